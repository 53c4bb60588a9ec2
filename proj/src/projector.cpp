#include "dualgrid/projector.hpp"

#include <cmath>
#include <stdexcept>

#include "dualgrid/rng.hpp"

namespace dualgrid {

ProjectionOperator make_operator(ProjectionGeometry geometry, int image_size, double pixel_size) {
    if (image_size < 1) throw std::invalid_argument("make_operator: image_size must be >= 1");
    if (!(pixel_size > 0.0)) throw std::invalid_argument("make_operator: pixel_size must be > 0");
    ProjectionOperator op;
    op.geometry = std::move(geometry);
    op.image_size = image_size;
    op.pixel_size = pixel_size;
    return op;
}

ProjectionOperator with_angle_offset(const ProjectionOperator& op, double theta) {
    ProjectionOperator out = op;
    out.geometry.angle_offset = theta;
    return out;
}

namespace {

struct RayBasis {
    double ux, uy;  // detector axis
    double dx, dy;  // ray direction
    bool row_driven;  // |dy| >= |dx|: march over image rows
    double step_len;  // physical length per driving-axis step
};

RayBasis make_basis(double angle, double pixel_size) {
    RayBasis b;
    b.ux = std::cos(angle);
    b.uy = std::sin(angle);
    b.dx = -b.uy;
    b.dy = b.ux;
    b.row_driven = std::abs(b.dy) >= std::abs(b.dx);
    b.step_len = pixel_size / (b.row_driven ? std::abs(b.dy) : std::abs(b.dx));
    return b;
}

// Fractional transverse coordinate where ray (t, basis) crosses driving line q.
// All coordinates are pixel units centered on the grid.
inline double ray_cross(const RayBasis& b, double t, double q) {
    if (b.row_driven) {
        const double s = (q - t * b.uy) / b.dy;
        return t * b.ux + s * b.dx;
    }
    const double s = (q - t * b.ux) / b.dx;
    return t * b.uy + s * b.dy;
}

void forward_angle(const ProjectionOperator& op, const ImageGrid& img, int a, double* out) {
    const int n = op.image_size;
    const int n_bins = op.geometry.n_bins;
    const double ctr = 0.5 * (n - 1);
    const double bin_ctr = 0.5 * (n_bins - 1);
    const RayBasis b = make_basis(op.geometry.angles[a] + op.geometry.angle_offset, op.pixel_size);

    for (int k = 0; k < n_bins; ++k) {
        const double t = (k - bin_ctr) * op.geometry.bin_spacing / op.pixel_size;
        double acc = 0.0;
        for (int q = 0; q < n; ++q) {
            const double x = ray_cross(b, t, q - ctr) + ctr;
            const int ix = static_cast<int>(std::floor(x));
            const double fx = x - ix;
            if (b.row_driven) {
                if (ix >= 0 && ix < n) acc += (1.0 - fx) * img.at(q, ix);
                if (ix + 1 >= 0 && ix + 1 < n) acc += fx * img.at(q, ix + 1);
            } else {
                if (ix >= 0 && ix < n) acc += (1.0 - fx) * img.at(ix, q);
                if (ix + 1 >= 0 && ix + 1 < n) acc += fx * img.at(ix + 1, q);
            }
        }
        out[k] = acc * b.step_len;
    }
}

void adjoint_angle(const ProjectionOperator& op, const double* sino_row, int a, ImageGrid& img) {
    const int n = op.image_size;
    const int n_bins = op.geometry.n_bins;
    const double ctr = 0.5 * (n - 1);
    const double bin_ctr = 0.5 * (n_bins - 1);
    const RayBasis b = make_basis(op.geometry.angles[a] + op.geometry.angle_offset, op.pixel_size);

    for (int k = 0; k < n_bins; ++k) {
        const double t = (k - bin_ctr) * op.geometry.bin_spacing / op.pixel_size;
        const double val = sino_row[k] * b.step_len;
        for (int q = 0; q < n; ++q) {
            const double x = ray_cross(b, t, q - ctr) + ctr;
            const int ix = static_cast<int>(std::floor(x));
            const double fx = x - ix;
            if (b.row_driven) {
                if (ix >= 0 && ix < n) img.at(q, ix) += (1.0 - fx) * val;
                if (ix + 1 >= 0 && ix + 1 < n) img.at(q, ix + 1) += fx * val;
            } else {
                if (ix >= 0 && ix < n) img.at(ix, q) += (1.0 - fx) * val;
                if (ix + 1 >= 0 && ix + 1 < n) img.at(ix + 1, q) += fx * val;
            }
        }
    }
}

void check_image(const ProjectionOperator& op, const ImageGrid& img) {
    if (img.width != op.image_size || img.height != op.image_size)
        throw std::invalid_argument("projector: image shape does not match operator");
}

void check_sino(const ProjectionOperator& op, const Sinogram& sino) {
    if (sino.n_angles() != static_cast<int>(op.geometry.angles.size()) ||
        sino.n_bins != op.geometry.n_bins)
        throw std::invalid_argument("projector: sinogram shape does not match operator");
}

Sinogram empty_sino(const ProjectionOperator& op) {
    return Sinogram(op.geometry.angles, op.geometry.n_bins, op.geometry.bin_spacing);
}

}  // namespace

namespace detail {

Sinogram forward_project_serial(const ProjectionOperator& op, const ImageGrid& img) {
    check_image(op, img);
    Sinogram out = empty_sino(op);
    const int n_angles = out.n_angles();
    for (int a = 0; a < n_angles; ++a)
        forward_angle(op, img, a, out.values.data() + static_cast<size_t>(a) * out.n_bins);
    return out;
}

// Accumulates one angle into a scratch image, then adds it into the result in
// angle order. The parallel version reduces per-angle partials in the same
// order, so both paths produce identical bits.
ImageGrid back_project_serial(const ProjectionOperator& op, const Sinogram& sino) {
    check_sino(op, sino);
    ImageGrid out(op.image_size, op.image_size, op.pixel_size);
    ImageGrid partial(op.image_size, op.image_size, op.pixel_size);
    const int n_angles = sino.n_angles();
    for (int a = 0; a < n_angles; ++a) {
        std::fill(partial.values.begin(), partial.values.end(), 0.0);
        adjoint_angle(op, sino.values.data() + static_cast<size_t>(a) * sino.n_bins, a, partial);
        for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += partial.values[i];
    }
    return out;
}

}  // namespace detail

Sinogram forward_project(const ProjectionOperator& op, const ImageGrid& img) {
    check_image(op, img);
    Sinogram out = empty_sino(op);
    const int n_angles = out.n_angles();
#pragma omp parallel for schedule(static)
    for (int a = 0; a < n_angles; ++a)
        forward_angle(op, img, a, out.values.data() + static_cast<size_t>(a) * out.n_bins);
    return out;
}

ImageGrid back_project(const ProjectionOperator& op, const Sinogram& sino) {
    check_sino(op, sino);
    ImageGrid out(op.image_size, op.image_size, op.pixel_size);
    const int n_angles = sino.n_angles();
    constexpr int kBlock = 8;
    std::vector<ImageGrid> partials;
    for (int i = 0; i < kBlock; ++i)
        partials.emplace_back(op.image_size, op.image_size, op.pixel_size);
    for (int base = 0; base < n_angles; base += kBlock) {
        const int count = std::min(kBlock, n_angles - base);
#pragma omp parallel for schedule(static)
        for (int i = 0; i < count; ++i) {
            std::fill(partials[i].values.begin(), partials[i].values.end(), 0.0);
            const int a = base + i;
            adjoint_angle(op, sino.values.data() + static_cast<size_t>(a) * sino.n_bins, a,
                          partials[i]);
        }
        for (int i = 0; i < count; ++i)
            for (size_t p = 0; p < out.values.size(); ++p) out.values[p] += partials[i].values[p];
    }
    return out;
}

double estimate_operator_norm(const ProjectionOperator& op, int iters, uint64_t seed) {
    if (iters < 1) throw std::invalid_argument("estimate_operator_norm: iters must be >= 1");
    if (op.image_pixels() == 0 || op.sino_size() == 0) return 0.0;

    Rng rng(seed);
    ImageGrid v(op.image_size, op.image_size, op.pixel_size);
    for (double& x : v.values) x = rng.gaussian();
    double vn = norm2(v.values);
    if (vn == 0.0) return 0.0;
    for (double& x : v.values) x /= vn;

    double lambda = 0.0;  // Rayleigh quotient of A^T A; nondecreasing over iterations
    for (int it = 0; it < iters; ++it) {
        Sinogram av = forward_project(op, v);
        lambda = dot(av.values, av.values);
        ImageGrid w = back_project(op, av);
        double wn = norm2(w.values);
        if (wn == 0.0) return 0.0;
        for (size_t i = 0; i < v.values.size(); ++i) v.values[i] = w.values[i] / wn;
    }
    return std::sqrt(lambda);
}

}  // namespace dualgrid
