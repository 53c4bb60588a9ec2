#pragma once

#include <optional>
#include <stdexcept>

#include "dualgrid/projector.hpp"
#include "dualgrid/types.hpp"

namespace dualgrid {

struct InvalidDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Regularizer { tikhonov, tv };

struct SolverConfig {
    Regularizer regularizer = Regularizer::tv;
    int max_iters = 0;       // 0: per-regularizer default (300 tv, 200 tikhonov)
    double rel_tol = 1e-5;   // stopping threshold on relative iterate change
    bool nonneg = true;      // project onto x >= 0
    double op_norm = 0.0;    // known ||A||_2 estimate; 0 means estimate internally

    int effective_max_iters() const {
        if (max_iters > 0) return max_iters;
        return regularizer == Regularizer::tv ? 300 : 200;
    }
};

struct Reconstruction {
    ImageGrid image;
    double alpha = 0.0;
    double objective = 0.0;
    int iters_used = 0;
    bool converged = false;
};

// Approximate minimizer of 1/2 ||Ax - y||^2 + alpha R(x).
// Tikhonov (R = ||x||_2^2) without the nonnegativity constraint is solved by CG
// on (A^T A + 2 alpha I) x = A^T y; with the constraint an accelerated
// projected-gradient iteration is used. TV (R = ||grad x||_{2,1}, isotropic
// forward differences) is solved by a Chambolle-Pock primal-dual scheme on
// [A; grad] with diagonal row/column-sum preconditioning.
// objective_trace, when given, receives the objective value after every
// iteration (adds one forward projection per iteration, so off by default).
Reconstruction solve(const Sinogram& sino, const ProjectionOperator& op, double alpha,
                     const SolverConfig& cfg,
                     const std::optional<ImageGrid>& warm_start = std::nullopt,
                     std::vector<double>* objective_trace = nullptr);

// Exact evaluation of the variational objective at img.
double objective(const ImageGrid& img, const Sinogram& sino, const ProjectionOperator& op,
                 double alpha, Regularizer reg);

// Isotropic TV value with forward differences (replicate boundary).
double total_variation(const ImageGrid& img);

}  // namespace dualgrid
