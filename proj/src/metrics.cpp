#include "dualgrid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dualgrid {

namespace {

std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> w(static_cast<size_t>(size) * size);
    const double c = 0.5 * (size - 1);
    double sum = 0.0;
    for (int j = 0; j < size; ++j) {
        for (int i = 0; i < size; ++i) {
            const double d2 = (i - c) * (i - c) + (j - c) * (j - c);
            const double v = std::exp(-d2 / (2.0 * sigma * sigma));
            w[static_cast<size_t>(j) * size + i] = v;
            sum += v;
        }
    }
    for (double& v : w) v /= sum;
    return w;
}

}  // namespace

double ssim(const ImageGrid& a, const ImageGrid& b, const FovMask& mask,
            const SsimParams& params) {
    if (a.width != b.width || a.height != b.height || a.width != mask.width ||
        a.height != mask.height)
        throw std::invalid_argument("ssim: shape mismatch");
    if (params.window < 1 || params.window % 2 == 0)
        throw std::invalid_argument("ssim: window size must be odd and positive");
    if (!(params.k1 > 0.0) || !(params.k2 > 0.0))
        throw std::invalid_argument("ssim: k1, k2 must be > 0");

    const int n = a.width;
    const int win = params.window;
    const int rad = win / 2;

    double shift = 0.0;
    double range = params.dynamic_range;
    if (range <= 0.0) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (mask.at(j, i)) {
                    lo = std::min({lo, a.at(j, i), b.at(j, i)});
                    hi = std::max({hi, a.at(j, i), b.at(j, i)});
                }
        if (!std::isfinite(lo)) throw std::invalid_argument("ssim: empty mask interior");
        if (hi == lo) return 1.0;  // constant pair: both terms collapse to C/C
        shift = lo;
        range = hi - lo;
    }

    const double c1 = (params.k1 * range) * (params.k1 * range);
    const double c2 = (params.k2 * range) * (params.k2 * range);
    const std::vector<double> w = gaussian_window(win, params.window_sigma);

    double total = 0.0;
    long count = 0;
#pragma omp parallel for schedule(static) reduction(+ : total, count)
    for (int j = rad; j < n - rad; ++j) {
        for (int i = rad; i < n - rad; ++i) {
            bool full = true;
            for (int dj = -rad; dj <= rad && full; ++dj)
                for (int di = -rad; di <= rad; ++di)
                    if (!mask.at(j + dj, i + di)) {
                        full = false;
                        break;
                    }
            if (!full) continue;

            double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
            for (int dj = -rad; dj <= rad; ++dj) {
                for (int di = -rad; di <= rad; ++di) {
                    const double wv = w[static_cast<size_t>(dj + rad) * win + (di + rad)];
                    const double va = a.at(j + dj, i + di) - shift;
                    const double vb = b.at(j + dj, i + di) - shift;
                    mu_a += wv * va;
                    mu_b += wv * vb;
                    // grouping: the moment sums use the same rounding sequence
                    // whichever argument they come from, so ssim(a, b) is
                    // exactly symmetric and ssim(x, x) is exactly 1
                    aa += wv * (va * va);
                    bb += wv * (vb * vb);
                    ab += wv * (va * vb);
                }
            }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            const double s = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                             ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            total += s;
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("ssim: mask interior too small for the window");
    return total / static_cast<double>(count);
}

ConsistencyReading measure_consistency(const Sinogram& y, const ProjectionOperator& op_a,
                                       const ProjectionOperator& op_b, double theta, double alpha,
                                       const SolverConfig& cfg, const FovMask& mask,
                                       const SsimParams& params,
                                       const std::optional<ImageGrid>& warm_a,
                                       const std::optional<ImageGrid>& warm_b) {
    Reconstruction ra = solve(y, op_a, alpha, cfg, warm_a);
    Reconstruction rb = solve(y, op_b, alpha, cfg, warm_b);
    ConsistencyReading out;
    out.theta = theta;
    out.x_primary = std::move(ra.image);
    out.x_secondary_aligned = rotate_image(rb.image, -theta);
    out.s_value = ssim(out.x_primary, out.x_secondary_aligned, mask, params);
    return out;
}

double gradient_energy(const ImageGrid& img) {
    const int n = img.width;
    double s = 0.0;
    for (int j = 0; j < img.height; ++j) {
        for (int i = 0; i < n; ++i) {
            const size_t p = static_cast<size_t>(j) * n + i;
            if (i + 1 < n) {
                const double d = img.values[p + 1] - img.values[p];
                s += d * d;
            }
            if (j + 1 < img.height) {
                const double d = img.values[p + n] - img.values[p];
                s += d * d;
            }
        }
    }
    return std::sqrt(s);
}

}  // namespace dualgrid
