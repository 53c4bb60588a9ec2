#pragma once

#include <cstdint>

#include "dualgrid/metrics.hpp"
#include "dualgrid/solvers.hpp"

namespace dualgrid {

struct ControllerConfig {
    double s_ref = 0.90;        // target consistency, in (0, 1)
    double k_p = 0.5;           // proportional gain in the log10(alpha) domain
    double epsilon = 0.05;      // tolerance band half-width
    int n_consecutive = 5;      // in-band steps required for convergence
    double alpha_init = 1e-6;
    int max_steps = 60;
    double alpha_min = 1e-12;
    double alpha_max = 1e4;
    double theta_lo_deg = 10.0;  // rotation angle drawn from U(theta_lo, theta_hi)
    double theta_hi_deg = 20.0;
    uint64_t seed = 0;
    double fov_radius_fraction = 0.95;

    void validate() const;
};

struct ControllerEntry {
    int step = 0;
    double alpha = 0.0;
    double s_value = 0.0;
    double error = 0.0;
    bool in_band = false;
};

struct ControllerState {
    int step = 0;
    double alpha = 0.0;
    std::vector<ControllerEntry> history;
    int in_band_count = 0;
    bool converged = false;
};

struct ControlResult {
    Reconstruction reconstruction;  // x_A at the final alpha
    double final_alpha = 0.0;
    double final_s = 0.0;
    double theta = 0.0;
    std::vector<ControllerEntry> trajectory;
    bool converged = false;
    int steps_used = 0;
};

// One log-domain P-control update: e = s_ref - s, alpha *= 10^(k_p * e),
// clamped to [alpha_min, alpha_max]. Tracks the consecutive in-band count.
ControllerState controller_step(const ControllerState& state, double s_k,
                                const ControllerConfig& cfg);

// The full closed loop: draw theta once from the seed, build the offset
// operator, then alternate sensing (dual solve + masked SSIM) and the P-update
// until the error stays inside the band for n_consecutive steps or max_steps
// is hit. Non-convergence is a result, not an error.
ControlResult run_control_loop(const Sinogram& y, const ProjectionOperator& op_a,
                               const ControllerConfig& cfg, const SolverConfig& solver_cfg);

}  // namespace dualgrid
