#pragma once

#include <optional>

#include "dualgrid/geometry.hpp"
#include "dualgrid/solvers.hpp"
#include "dualgrid/types.hpp"

namespace dualgrid {

struct SsimParams {
    int window = 11;             // odd Gaussian window size
    double window_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 0.0;  // <= 0: recompute from the masked union per comparison
};

struct ConsistencyReading {
    double s_value = 0.0;
    ImageGrid x_primary;
    ImageGrid x_secondary_aligned;
    double theta = 0.0;
};

// Mean SSIM over pixels whose full window lies inside the mask. When
// dynamic_range is not given, both images are shifted by the common masked
// minimum and L is the masked union range, which makes the score exactly
// invariant under a joint affine map v -> a*v + b (a > 0).
double ssim(const ImageGrid& a, const ImageGrid& b, const FovMask& mask, const SsimParams& params);

// One sensing step of the control loop: reconstruct on both grids at the given
// alpha, derotate the secondary solution by -theta, and score masked SSIM.
// Warm starts, when given, seed the two solves (primary, secondary).
ConsistencyReading measure_consistency(const Sinogram& y, const ProjectionOperator& op_a,
                                       const ProjectionOperator& op_b, double theta, double alpha,
                                       const SolverConfig& cfg, const FovMask& mask,
                                       const SsimParams& params = {},
                                       const std::optional<ImageGrid>& warm_a = std::nullopt,
                                       const std::optional<ImageGrid>& warm_b = std::nullopt);

// l2 norm of the forward-difference gradient field; the detail proxy.
double gradient_energy(const ImageGrid& img);

}  // namespace dualgrid
