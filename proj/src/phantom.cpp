#include "dualgrid/phantom.hpp"

#include <cmath>
#include <stdexcept>

#include "dualgrid/rng.hpp"

namespace dualgrid {

namespace {

struct Ellipse {
    double value, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan (intensity-rescaled variant of the classic ten-ellipse
// head phantom).
constexpr Ellipse kSheppLogan[] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
};

}  // namespace

ImageGrid shepp_logan(int n) {
    if (n < 16) throw std::invalid_argument("shepp_logan: n must be >= 16");
    ImageGrid img(n, n, 1.0);
    const double deg = 3.14159265358979323846 / 180.0;
    for (int j = 0; j < n; ++j) {
        // Pixel centers span [-1, 1]; y up so the phantom has its usual pose.
        const double y = 1.0 - 2.0 * (j + 0.5) / n;
        for (int i = 0; i < n; ++i) {
            const double x = 2.0 * (i + 0.5) / n - 1.0;
            double v = 0.0;
            for (const Ellipse& e : kSheppLogan) {
                const double c = std::cos(e.phi_deg * deg);
                const double s = std::sin(e.phi_deg * deg);
                const double dx = x - e.x0;
                const double dy = y - e.y0;
                const double u = (c * dx + s * dy) / e.a;
                const double w = (-s * dx + c * dy) / e.b;
                if (u * u + w * w <= 1.0) v += e.value;
            }
            // cancellation in the sum can leave values a few ulp below zero
            img.at(j, i) = std::max(v, 0.0);
        }
    }
    return img;
}

ImageGrid smooth_blobs(int n) {
    if (n < 16) throw std::invalid_argument("smooth_blobs: n must be >= 16");
    struct Blob {
        double amp, x0, y0, sigma;
    };
    constexpr Blob blobs[] = {
        {0.8, 0.0, 0.0, 0.45},
        {0.5, 0.3, 0.2, 0.15},
        {-0.3, -0.25, -0.2, 0.18},
        {0.4, -0.1, 0.35, 0.12},
    };
    ImageGrid img(n, n, 1.0);
    for (int j = 0; j < n; ++j) {
        const double y = 1.0 - 2.0 * (j + 0.5) / n;
        for (int i = 0; i < n; ++i) {
            const double x = 2.0 * (i + 0.5) / n - 1.0;
            double v = 0.0;
            for (const Blob& b : blobs) {
                const double d2 = (x - b.x0) * (x - b.x0) + (y - b.y0) * (y - b.y0);
                v += b.amp * std::exp(-d2 / (2.0 * b.sigma * b.sigma));
            }
            img.at(j, i) = std::max(v, 0.0);
        }
    }
    return img;
}

NoisySinogram add_noise(const Sinogram& sino, const NoiseSpec& spec) {
    if (spec.sigma_rel < 0.0) throw std::invalid_argument("add_noise: sigma_rel must be >= 0");
    NoisySinogram out;
    out.sino = sino;
    if (spec.sigma_rel == 0.0) return out;

    double peak = 0.0;
    for (double v : sino.values) peak = std::max(peak, std::abs(v));
    out.sigma_abs = spec.sigma_rel * peak;

    Rng rng(spec.seed);
    for (double& v : out.sino.values) v += out.sigma_abs * rng.gaussian();
    return out;
}

}  // namespace dualgrid
