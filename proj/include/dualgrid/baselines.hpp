#pragma once

#include "dualgrid/metrics.hpp"
#include "dualgrid/solvers.hpp"

namespace dualgrid {

struct SweepRecord {
    double alpha = 0.0;
    double s_value = 0.0;        // masked SSIM between the two grid solutions
    double residual_norm = 0.0;  // ||A x_alpha - y||_2 on the primary grid
    double reg_value = 0.0;      // R(x_alpha)
    double detail = 0.0;         // gradient_energy(x_alpha)
};

struct SweepOptions {
    bool warm_start_chain = true;  // continuation: chain solves from large to small alpha
    double fov_radius_fraction = 0.95;
};

struct LcurveResult {
    double alpha = 0.0;
    size_t corner_index = 0;
    bool degenerate = false;  // flat curvature; midpoint returned
};

// Records the S(alpha) curve plus residual/regularizer/detail per alpha.
// alphas must be strictly increasing and positive.
std::vector<SweepRecord> sweep(const Sinogram& y, const ProjectionOperator& op_a, double theta,
                               const std::vector<double>& alphas, const SolverConfig& cfg,
                               const SweepOptions& opts = {});

// Maximum discrete curvature of the log-log (residual, regularizer) polyline;
// endpoints excluded. A flat curve falls back to the midpoint and flags it.
LcurveResult lcurve_select(const std::vector<SweepRecord>& records);

struct DiscrepancyResult {
    double alpha = 0.0;
    double residual = 0.0;
    double target = 0.0;  // tau * sqrt(m) * sigma
    int bisection_steps = 0;
};

// Bisection on log(alpha) for ||A x_alpha - y|| = tau*sqrt(m)*sigma, to within
// 0.5% of the target or 40 steps. The bracket must straddle the target.
DiscrepancyResult discrepancy_select(const Sinogram& y, const ProjectionOperator& op, double sigma,
                                     double tau, const SolverConfig& cfg, double alpha_lo,
                                     double alpha_hi);

}  // namespace dualgrid
