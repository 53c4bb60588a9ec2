// Compares the OpenMP kernels against their serial references: wall time and
// a bitwise equality check.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "dualgrid/geometry.hpp"
#include "dualgrid/phantom.hpp"
#include "dualgrid/projector.hpp"

using namespace dualgrid;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = Clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
    printf("%-8s %-14s %10s %10s %8s %s\n", "size", "kernel", "serial_s", "omp_s", "speedup",
           "bitwise");
    for (int n : {128, 256}) {
        ImageGrid img = shepp_logan(n);
        const double px = 2.0 / n;
        auto geom = make_parallel_geometry(180, static_cast<int>(std::ceil(std::sqrt(2.0) * n)),
                                           px, 0.0);
        auto op = make_operator(geom, n, px);

        Sinogram sino_ref = detail::forward_project_serial(op, img);
        Sinogram sino_omp = forward_project(op, img);
        const bool fwd_eq = sino_ref.values == sino_omp.values;
        double ts = time_best_of(reps, [&] { detail::forward_project_serial(op, img); });
        double tp = time_best_of(reps, [&] { forward_project(op, img); });
        printf("%-8d %-14s %10.4f %10.4f %8.2f %s\n", n, "forward", ts, tp, ts / tp,
               fwd_eq ? "equal" : "MISMATCH");

        ImageGrid bp_ref = detail::back_project_serial(op, sino_ref);
        ImageGrid bp_omp = back_project(op, sino_ref);
        const bool bp_eq = bp_ref.values == bp_omp.values;
        ts = time_best_of(reps, [&] { detail::back_project_serial(op, sino_ref); });
        tp = time_best_of(reps, [&] { back_project(op, sino_ref); });
        printf("%-8d %-14s %10.4f %10.4f %8.2f %s\n", n, "adjoint", ts, tp, ts / tp,
               bp_eq ? "equal" : "MISMATCH");

        const double theta = 0.27;
        ImageGrid rot_ref = detail::rotate_image_serial(img, theta);
        ImageGrid rot_omp = rotate_image(img, theta);
        const bool rot_eq = rot_ref.values == rot_omp.values;
        ts = time_best_of(reps, [&] { detail::rotate_image_serial(img, theta); });
        tp = time_best_of(reps, [&] { rotate_image(img, theta); });
        printf("%-8d %-14s %10.4f %10.4f %8.2f %s\n", n, "rotate", ts, tp, ts / tp,
               rot_eq ? "equal" : "MISMATCH");
    }
    return 0;
}
