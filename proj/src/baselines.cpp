#include "dualgrid/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace dualgrid {

namespace {

double residual_norm(const Sinogram& y, const ProjectionOperator& op, const ImageGrid& x) {
    Sinogram ax = forward_project(op, x);
    double s = 0.0;
    for (size_t i = 0; i < ax.values.size(); ++i) {
        const double d = ax.values[i] - y.values[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double reg_value(const ImageGrid& x, Regularizer reg) {
    return reg == Regularizer::tikhonov ? dot(x.values, x.values) : total_variation(x);
}

}  // namespace

std::vector<SweepRecord> sweep(const Sinogram& y, const ProjectionOperator& op_a, double theta,
                               const std::vector<double>& alphas, const SolverConfig& cfg,
                               const SweepOptions& opts) {
    if (alphas.empty()) throw std::invalid_argument("sweep: empty alpha list");
    for (size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0)) throw std::invalid_argument("sweep: alphas must be > 0");
        if (i > 0 && !(alphas[i] > alphas[i - 1]))
            throw std::invalid_argument("sweep: alphas must be strictly increasing");
    }

    const ProjectionOperator op_b = with_angle_offset(op_a, theta);
    const FovMask mask = make_fov_mask(op_a.image_size, op_a.image_size, opts.fov_radius_fraction);
    SolverConfig scfg = cfg;
    if (scfg.op_norm <= 0.0) scfg.op_norm = estimate_operator_norm(op_a, 30, 1);

    // Continuation runs from the most to the least regularized problem: the
    // strongly smoothed solve converges quickly from zero, and each weaker
    // alpha only has to recover incremental detail from its predecessor.
    // Chaining the other way leaves the small-alpha solves badly
    // under-converged inside any fixed iteration budget.
    std::vector<SweepRecord> records(alphas.size());
    std::optional<ImageGrid> warm_a, warm_b;
    for (size_t k = alphas.size(); k-- > 0;) {
        const double alpha = alphas[k];
        Reconstruction ra = solve(y, op_a, alpha, scfg, warm_a);
        Reconstruction rb = solve(y, op_b, alpha, scfg, warm_b);
        ImageGrid aligned = rotate_image(rb.image, -theta);

        SweepRecord rec;
        rec.alpha = alpha;
        rec.s_value = ssim(ra.image, aligned, mask, SsimParams{});
        rec.residual_norm = residual_norm(y, op_a, ra.image);
        rec.reg_value = reg_value(ra.image, scfg.regularizer);
        rec.detail = gradient_energy(ra.image);
        records[k] = rec;

        if (opts.warm_start_chain) {
            warm_a = std::move(ra.image);
            warm_b = std::move(rb.image);
        }
    }
    return records;
}

LcurveResult lcurve_select(const std::vector<SweepRecord>& records) {
    if (records.size() < 5) throw std::invalid_argument("lcurve_select: need at least 5 records");
    std::vector<double> lx(records.size()), ly(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        if (!(records[i].residual_norm > 0.0) || !(records[i].reg_value > 0.0))
            throw InvalidDataError("lcurve_select: residual and regularizer values must be > 0");
        lx[i] = std::log(records[i].residual_norm);
        ly[i] = std::log(records[i].reg_value);
    }

    // Menger curvature of each interior triple of the arc-length polyline.
    double best = 0.0;
    size_t best_idx = 0;
    bool found = false;
    for (size_t i = 1; i + 1 < records.size(); ++i) {
        const double ax = lx[i] - lx[i - 1], ay = ly[i] - ly[i - 1];
        const double bx = lx[i + 1] - lx[i], by = ly[i + 1] - ly[i];
        const double cx = lx[i + 1] - lx[i - 1], cy = ly[i + 1] - ly[i - 1];
        const double la = std::hypot(ax, ay), lb = std::hypot(bx, by), lc = std::hypot(cx, cy);
        if (la == 0.0 || lb == 0.0 || lc == 0.0) continue;
        const double cross = std::abs(ax * by - ay * bx);
        const double kappa = 2.0 * cross / (la * lb * lc);
        if (kappa > best) {
            best = kappa;
            best_idx = i;
            found = true;
        }
    }

    LcurveResult result;
    if (!found || best < 1e-12) {
        result.corner_index = records.size() / 2;
        result.degenerate = true;
    } else {
        result.corner_index = best_idx;
    }
    result.alpha = records[result.corner_index].alpha;
    return result;
}

DiscrepancyResult discrepancy_select(const Sinogram& y, const ProjectionOperator& op, double sigma,
                                     double tau, const SolverConfig& cfg, double alpha_lo,
                                     double alpha_hi) {
    if (!(sigma > 0.0)) throw std::invalid_argument("discrepancy_select: sigma must be > 0");
    if (!(alpha_lo > 0.0 && alpha_lo < alpha_hi))
        throw std::invalid_argument("discrepancy_select: invalid bracket order");

    const double target = tau * std::sqrt(static_cast<double>(y.size())) * sigma;
    SolverConfig scfg = cfg;
    if (scfg.op_norm <= 0.0) scfg.op_norm = estimate_operator_norm(op, 30, 1);

    auto residual_at = [&](double alpha, const std::optional<ImageGrid>& warm,
                           ImageGrid& x_out) -> double {
        Reconstruction r = solve(y, op, alpha, scfg, warm);
        x_out = std::move(r.image);
        return residual_norm(y, op, x_out);
    };

    ImageGrid x_lo, x_hi;
    const double res_lo = residual_at(alpha_lo, std::nullopt, x_lo);
    if (!(res_lo < target))
        throw std::runtime_error(
            "discrepancy_select: bracket failure at alpha_lo (residual already above target)");
    const double res_hi = residual_at(alpha_hi, std::nullopt, x_hi);
    if (!(res_hi > target))
        throw std::runtime_error(
            "discrepancy_select: bracket failure at alpha_hi (residual below target)");

    double lo = std::log10(alpha_lo), hi = std::log10(alpha_hi);
    DiscrepancyResult result;
    result.target = target;
    std::optional<ImageGrid> warm = x_lo;
    for (int step = 0; step < 40; ++step) {
        const double mid = 0.5 * (lo + hi);
        const double alpha = std::pow(10.0, mid);
        ImageGrid x_mid;
        const double res = residual_at(alpha, warm, x_mid);
        warm = std::move(x_mid);
        result.alpha = alpha;
        result.residual = res;
        result.bisection_steps = step + 1;
        if (std::abs(res - target) <= 0.005 * target) break;
        if (res < target)
            lo = mid;
        else
            hi = mid;
    }
    return result;
}

}  // namespace dualgrid
