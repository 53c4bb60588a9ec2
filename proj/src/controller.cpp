#include "dualgrid/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dualgrid/rng.hpp"

namespace dualgrid {

void ControllerConfig::validate() const {
    if (!(s_ref > 0.0 && s_ref < 1.0))
        throw std::invalid_argument("controller: s_ref must be in (0, 1)");
    if (!(k_p >= 0.0)) throw std::invalid_argument("controller: k_p must be >= 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("controller: epsilon must be > 0");
    if (n_consecutive < 1) throw std::invalid_argument("controller: n_consecutive must be >= 1");
    if (!(alpha_min > 0.0 && alpha_min < alpha_init && alpha_init < alpha_max))
        throw std::invalid_argument("controller: need 0 < alpha_min < alpha_init < alpha_max");
    if (max_steps < 1) throw std::invalid_argument("controller: max_steps must be >= 1");
    if (!(theta_lo_deg < theta_hi_deg))
        throw std::invalid_argument("controller: invalid theta range");
}

ControllerState controller_step(const ControllerState& state, double s_k,
                                const ControllerConfig& cfg) {
    if (!(s_k >= -1.0 && s_k <= 1.0))
        throw std::invalid_argument("controller_step: s_k must be in [-1, 1]");
    ControllerState next = state;
    const double e_k = cfg.s_ref - s_k;

    ControllerEntry entry;
    entry.step = state.step;
    entry.alpha = state.alpha;
    entry.s_value = s_k;
    entry.error = e_k;
    entry.in_band = std::abs(e_k) < cfg.epsilon;
    next.history.push_back(entry);

    next.in_band_count = entry.in_band ? state.in_band_count + 1 : 0;
    next.converged = next.in_band_count >= cfg.n_consecutive;
    next.alpha = std::clamp(state.alpha * std::pow(10.0, cfg.k_p * e_k), cfg.alpha_min,
                            cfg.alpha_max);
    next.step = state.step + 1;
    return next;
}

ControlResult run_control_loop(const Sinogram& y, const ProjectionOperator& op_a,
                               const ControllerConfig& cfg, const SolverConfig& solver_cfg) {
    cfg.validate();
    if (!all_finite(y.values)) throw InvalidDataError("run_control_loop: NaN/Inf in sinogram");

    Rng rng(cfg.seed);
    const double deg = std::numbers::pi / 180.0;
    const double theta = rng.uniform(cfg.theta_lo_deg * deg, cfg.theta_hi_deg * deg);
    const ProjectionOperator op_b = with_angle_offset(op_a, theta);
    const FovMask mask = make_fov_mask(op_a.image_size, op_a.image_size, cfg.fov_radius_fraction);

    // The operator norm is rotation-invariant in exact arithmetic; sharing one
    // estimate keeps the two solves on identical step sizes.
    SolverConfig scfg = solver_cfg;
    if (scfg.op_norm <= 0.0) scfg.op_norm = estimate_operator_norm(op_a, 30, cfg.seed + 1);

    ControllerState state;
    state.alpha = cfg.alpha_init;

    ControlResult result;
    result.theta = theta;

    std::optional<ImageGrid> warm_a, warm_b;
    Reconstruction last_primary;
    double last_alpha = cfg.alpha_init;
    double last_s = 0.0;
    while (state.step < cfg.max_steps && !state.converged) {
        const double alpha = state.alpha;
        Reconstruction ra = solve(y, op_a, alpha, scfg, warm_a);
        Reconstruction rb = solve(y, op_b, alpha, scfg, warm_b);
        ImageGrid aligned = rotate_image(rb.image, -theta);
        const double s_k = ssim(ra.image, aligned, mask, SsimParams{});

        warm_a = ra.image;
        warm_b = rb.image;
        last_primary = std::move(ra);
        last_alpha = alpha;
        last_s = s_k;

        state = controller_step(state, s_k, cfg);
    }

    result.reconstruction = std::move(last_primary);
    result.final_alpha = last_alpha;
    result.final_s = last_s;
    result.trajectory = std::move(state.history);
    result.converged = state.converged;
    result.steps_used = state.step;
    return result;
}

}  // namespace dualgrid
