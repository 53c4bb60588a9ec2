#include <doctest.h>

#include <cmath>
#include <vector>

#include "dualgrid/metrics.hpp"
#include "dualgrid/phantom.hpp"
#include "test_helpers.hpp"

using namespace dualgrid;
using dualgrid::testing::random_image;

namespace {

// Straight-line reimplementation of masked Gaussian-window SSIM with a fixed
// dynamic range, used as the oracle for the library version.
double ssim_oracle(const ImageGrid& a, const ImageGrid& b, const FovMask& mask, double range) {
    const int n = a.width;
    const int win = 11, rad = 5;
    const double sigma = 1.5;
    std::vector<double> w(win * win);
    double wsum = 0.0;
    for (int j = 0; j < win; ++j)
        for (int i = 0; i < win; ++i) {
            const double d2 = (i - rad) * double(i - rad) + (j - rad) * double(j - rad);
            w[j * win + i] = std::exp(-d2 / (2.0 * sigma * sigma));
            wsum += w[j * win + i];
        }
    for (double& v : w) v /= wsum;

    const double c1 = 0.01 * range * 0.01 * range;
    const double c2 = 0.03 * range * 0.03 * range;
    double total = 0.0;
    long count = 0;
    for (int j = rad; j < n - rad; ++j)
        for (int i = rad; i < n - rad; ++i) {
            bool full = true;
            for (int dj = -rad; dj <= rad; ++dj)
                for (int di = -rad; di <= rad; ++di)
                    if (!mask.at(j + dj, i + di)) full = false;
            if (!full) continue;
            double ma = 0, mb = 0, aa = 0, bb = 0, ab = 0;
            for (int dj = -rad; dj <= rad; ++dj)
                for (int di = -rad; di <= rad; ++di) {
                    const double wv = w[(dj + rad) * win + (di + rad)];
                    const double va = a.at(j + dj, i + di);
                    const double vb = b.at(j + dj, i + di);
                    ma += wv * va;
                    mb += wv * vb;
                    aa += wv * va * va;
                    bb += wv * vb * vb;
                    ab += wv * va * vb;
                }
            total += ((2 * ma * mb + c1) * (2 * (ab - ma * mb) + c2)) /
                     ((ma * ma + mb * mb + c1) * ((aa - ma * ma) + (bb - mb * mb) + c2));
            ++count;
        }
    return total / count;
}

}  // namespace

TEST_CASE("ssim matches an independent reimplementation for fixed dynamic range") {
    const int n = 64;
    FovMask mask = make_fov_mask(n, n, 0.95);
    ImageGrid a = shepp_logan(n);
    ImageGrid b = a;
    Rng rng(21);
    for (double& v : b.values) v += 0.05 * rng.gaussian();

    SsimParams p;
    p.dynamic_range = 1.0;
    CHECK(ssim(a, b, mask, p) == doctest::Approx(ssim_oracle(a, b, mask, 1.0)).epsilon(1e-12));

    p.dynamic_range = 2.5;
    CHECK(ssim(a, b, mask, p) == doctest::Approx(ssim_oracle(a, b, mask, 2.5)).epsilon(1e-12));
}

TEST_CASE("ssim axioms: identity, symmetry, bounded range") {
    const int n = 64;
    FovMask mask = make_fov_mask(n, n, 0.95);
    SsimParams p;
    for (uint64_t seed = 0; seed < 50; ++seed) {
        ImageGrid a = random_image(n, 1000 + seed);
        ImageGrid b = random_image(n, 2000 + seed);
        CHECK(ssim(a, a, mask, p) == doctest::Approx(1.0).epsilon(1e-12));
        const double sab = ssim(a, b, mask, p);
        CHECK(sab == ssim(b, a, mask, p));
        CHECK(sab >= -1.0);
        CHECK(sab <= 1.0);
    }
}

TEST_CASE("ssim is invariant under a joint affine remap of both images") {
    const int n = 64;
    FovMask mask = make_fov_mask(n, n, 0.95);
    SsimParams p;  // auto dynamic range
    for (uint64_t seed = 0; seed < 50; ++seed) {
        ImageGrid a = random_image(n, 3000 + seed);
        ImageGrid b = random_image(n, 4000 + seed);
        const double s0 = ssim(a, b, mask, p);
        ImageGrid a2 = a, b2 = b;
        const double scale = 3.0 + 0.1 * static_cast<double>(seed);
        const double off = -7.5 + 0.3 * static_cast<double>(seed);
        for (double& v : a2.values) v = scale * v + off;
        for (double& v : b2.values) v = scale * v + off;
        CHECK(std::abs(ssim(a2, b2, mask, p) - s0) <= 1e-9);
    }
}

TEST_CASE("ssim decreases as one image is corrupted more strongly") {
    const int n = 64;
    FovMask mask = make_fov_mask(n, n, 0.95);
    SsimParams p;
    ImageGrid a = shepp_logan(n);
    double prev = 1.0;
    for (double level : {0.01, 0.05, 0.2}) {
        ImageGrid b = a;
        Rng rng(77);
        for (double& v : b.values) v += level * rng.gaussian();
        const double s = ssim(a, b, mask, p);
        CHECK(s < prev);
        prev = s;
    }
}

TEST_CASE("ssim handles constant pairs and rejects degenerate masks") {
    const int n = 32;
    FovMask mask = make_fov_mask(n, n, 0.95);
    ImageGrid c1(n, n), c2(n, n);
    std::fill(c1.values.begin(), c1.values.end(), 2.0);
    std::fill(c2.values.begin(), c2.values.end(), 2.0);
    SsimParams p;
    CHECK(ssim(c1, c2, mask, p) == 1.0);

    FovMask empty(mask);
    std::fill(empty.inside.begin(), empty.inside.end(), 0);
    CHECK_THROWS_AS(ssim(c1, c2, empty, p), std::invalid_argument);

    FovMask tiny = make_fov_mask(8, 8, 0.5);  // too small for an 11x11 window
    ImageGrid t = random_image(8, 5);
    p.dynamic_range = 1.0;
    CHECK_THROWS_AS(ssim(t, t, tiny, p), std::invalid_argument);
}

TEST_CASE("ssim parameter validation") {
    ImageGrid a = random_image(32, 1);
    ImageGrid b = random_image(32, 2);
    FovMask mask = make_fov_mask(32, 32, 0.95);
    SsimParams p;
    p.window = 10;
    CHECK_THROWS_AS(ssim(a, b, mask, p), std::invalid_argument);
    p = {};
    p.k1 = 0.0;
    CHECK_THROWS_AS(ssim(a, b, mask, p), std::invalid_argument);
    CHECK_THROWS_AS(ssim(a, random_image(16, 3), make_fov_mask(16, 16, 0.9), {}),
                    std::invalid_argument);
}

TEST_CASE("gradient_energy hand oracle and monotonicity under smoothing") {
    ImageGrid img(2, 2);
    img.at(0, 0) = 0.0;
    img.at(0, 1) = 3.0;
    img.at(1, 0) = 4.0;
    img.at(1, 1) = 4.0;
    // dx: (0,0)->3, (1,0)->0; dy: (0,0)->4, (0,1)->1
    CHECK(gradient_energy(img) == doctest::Approx(std::sqrt(9.0 + 0.0 + 16.0 + 1.0)).epsilon(1e-14));

    ImageGrid flat(16, 16);
    std::fill(flat.values.begin(), flat.values.end(), 1.0);
    CHECK(gradient_energy(flat) == 0.0);

    ImageGrid noisy = shepp_logan(64);
    Rng rng(9);
    for (double& v : noisy.values) v += 0.1 * rng.gaussian();
    CHECK(gradient_energy(noisy) > gradient_energy(shepp_logan(64)));
}

TEST_CASE("measure_consistency scores the derotated pair and peaks at theta = 0") {
    const int n = 48;
    auto op_a = dualgrid::testing::small_operator(n, 30);
    const double theta = 0.25;
    auto op_b = with_angle_offset(op_a, theta);
    ImageGrid truth = smooth_blobs(n);
    truth.pixel_size = op_a.pixel_size;
    Sinogram y = forward_project(op_a, truth);

    SolverConfig cfg;
    cfg.regularizer = Regularizer::tv;
    cfg.max_iters = 200;
    FovMask mask = make_fov_mask(n, n, 0.95);

    ConsistencyReading same = measure_consistency(y, op_a, op_a, 0.0, 1e-6, cfg, mask);
    CHECK(same.s_value == doctest::Approx(1.0).epsilon(1e-9));  // identical problems

    ConsistencyReading rot = measure_consistency(y, op_a, op_b, theta, 1e-6, cfg, mask);
    CHECK(rot.theta == theta);
    CHECK(rot.s_value > 0.5);   // aligned solutions agree on a clean smooth object
    CHECK(rot.s_value <= 1.0);
    CHECK(rot.x_primary.size() == truth.size());
    CHECK(rot.x_secondary_aligned.size() == truth.size());

    // scoring without derotation must be worse than with it
    Reconstruction rb = solve(y, op_b, 1e-6, cfg);
    const double misaligned = ssim(rot.x_primary, rb.image, mask, {});
    CHECK(rot.s_value > misaligned);
}
