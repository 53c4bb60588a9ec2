#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dualgrid/geometry.hpp"
#include "dualgrid/phantom.hpp"
#include "test_helpers.hpp"

using namespace dualgrid;

TEST_CASE("make_parallel_geometry produces equispaced angles in [0, pi)") {
    auto g = make_parallel_geometry(4, 10, 1.0, 0.0);
    REQUIRE(g.angles.size() == 4);
    CHECK(g.angles[0] == doctest::Approx(0.0));
    CHECK(g.angles[1] == doctest::Approx(std::numbers::pi / 4));
    CHECK(g.angles[2] == doctest::Approx(std::numbers::pi / 2));
    CHECK(g.angles[3] == doctest::Approx(3 * std::numbers::pi / 4));

    auto single = make_parallel_geometry(1, 5, 1.0, 0.2);
    CHECK(single.angles == std::vector<double>{0.0});
    CHECK(single.angle_offset == 0.2);

    auto full = make_parallel_geometry(180, 640, 1.0, 0.0);
    for (int i = 0; i < 180; ++i)
        CHECK(full.angles[i] == doctest::Approx(i * std::numbers::pi / 180).epsilon(1e-14));
}

TEST_CASE("make_parallel_geometry rejects bad arguments") {
    CHECK_THROWS_AS(make_parallel_geometry(0, 5, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_parallel_geometry(4, 0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_parallel_geometry(4, 5, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_parallel_geometry(4, 5, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("rotate_image by zero is the identity, exactly") {
    ImageGrid img = testing::random_image(32, 3);
    ImageGrid out = rotate_image(img, 0.0);
    CHECK(out.values == img.values);
}

TEST_CASE("rotate_image rejects non-square input") {
    ImageGrid img;
    img.width = 4;
    img.height = 8;
    img.values.assign(32, 0.0);
    CHECK_THROWS_AS(rotate_image(img, 0.1), std::invalid_argument);
}

TEST_CASE("constant image is rotation-invariant inside the FOV") {
    const int n = 64;
    ImageGrid img(n, n);
    std::fill(img.values.begin(), img.values.end(), 3.25);
    ImageGrid rot = rotate_image(img, 0.4);
    FovMask mask = make_fov_mask(n, n, 0.9);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (mask.at(j, i)) CHECK(rot.at(j, i) == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("rotation round trip on a smooth phantom stays within tolerance") {
    const int n = 128;
    const double theta = 15.0 * std::numbers::pi / 180.0;
    ImageGrid img = smooth_blobs(n);
    ImageGrid back = rotate_image(rotate_image(img, theta), -theta);
    FovMask mask = make_fov_mask(n, n, 0.95);

    double lo = 1e300, hi = -1e300;
    for (double v : img.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double max_err = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (mask.at(j, i)) max_err = std::max(max_err, std::abs(back.at(j, i) - img.at(j, i)));
    CHECK(max_err <= 0.05 * (hi - lo));
}

TEST_CASE("rotation round trip on Shepp-Logan has small mean error in the FOV") {
    // Edges of the piecewise-constant phantom smear under bilinear
    // interpolation, so the pointwise bound only applies to smooth objects;
    // the mean error stays small.
    const int n = 128;
    const double theta = 15.0 * std::numbers::pi / 180.0;
    ImageGrid img = shepp_logan(n);
    ImageGrid back = rotate_image(rotate_image(img, theta), -theta);
    FovMask mask = make_fov_mask(n, n, 0.95);
    double sum = 0.0;
    size_t count = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (mask.at(j, i)) {
                sum += std::abs(back.at(j, i) - img.at(j, i));
                ++count;
            }
    CHECK(sum / count <= 0.025);
}

TEST_CASE("rotate_image OpenMP path matches the serial reference bitwise") {
    ImageGrid img = testing::random_image(64, 11);
    for (double theta : {0.1, -0.7, 2.0}) {
        ImageGrid a = rotate_image(img, theta);
        ImageGrid b = detail::rotate_image_serial(img, theta);
        CHECK(a.values == b.values);
    }
}

TEST_CASE("make_fov_mask 4x4 full-radius: corners out, the rest in") {
    FovMask m = make_fov_mask(4, 4, 1.0);
    // Enumerated pixel-center distances from (2,2): corners sqrt(4.5) > 2,
    // edge-adjacent sqrt(2.5) <= 2, central sqrt(0.5) <= 2.
    int inside = 0;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
            const double d = std::hypot(i + 0.5 - 2.0, j + 0.5 - 2.0);
            CHECK(m.at(j, i) == (d <= 2.0));
            inside += m.at(j, i);
        }
    CHECK(inside == 12);
    CHECK_FALSE(m.at(0, 0));
    CHECK_FALSE(m.at(0, 3));
    CHECK_FALSE(m.at(3, 0));
    CHECK_FALSE(m.at(3, 3));
    CHECK(m.at(1, 1));
    CHECK(m.at(2, 2));
}

TEST_CASE("make_fov_mask area approaches the inscribed disk") {
    for (int n : {64, 128, 256}) {
        FovMask m = make_fov_mask(n, n, 1.0);
        const double expected = std::numbers::pi * n * n / 4.0;
        CHECK(std::abs(static_cast<double>(m.count_inside()) - expected) <= 0.05 * expected);
    }
}

TEST_CASE("make_fov_mask rejects bad radius fractions") {
    CHECK_THROWS_AS(make_fov_mask(8, 8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_fov_mask(8, 8, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_fov_mask(8, 8, 1.5), std::invalid_argument);
}

TEST_CASE("FOV mask is radially symmetric") {
    const int n = 33;
    FovMask m = make_fov_mask(n, n, 0.8);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            CHECK(m.at(j, i) == m.at(n - 1 - j, i));
            CHECK(m.at(j, i) == m.at(j, n - 1 - i));
            CHECK(m.at(j, i) == m.at(i, j));
        }
}

TEST_CASE("mask indicator survives rotation away from the boundary ring") {
    const int n = 64;
    FovMask m = make_fov_mask(n, n, 0.9);
    ImageGrid ind(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) ind.at(j, i) = m.at(j, i) ? 1.0 : 0.0;
    ImageGrid rot = rotate_image(ind, 0.3);
    const double r_interior = 0.9 * n / 2.0 - 2.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double d = std::hypot(i + 0.5 - n / 2.0, j + 0.5 - n / 2.0);
            if (d <= r_interior) CHECK(rot.at(j, i) == doctest::Approx(1.0).epsilon(1e-9));
        }
}
