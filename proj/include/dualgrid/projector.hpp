#pragma once

#include "dualgrid/geometry.hpp"
#include "dualgrid/types.hpp"

namespace dualgrid {

// Matrix-free parallel-beam Radon transform pair (A, A^T) by Joseph's method:
// rays are driven along the dominant axis with linear interpolation transverse,
// scaled by the per-step ray length. The adjoint uses the identical weights in
// a transposed scatter, so <Ax, y> == <x, A^T y> holds to round-off.
struct ProjectionOperator {
    ProjectionGeometry geometry;
    int image_size = 0;  // width == height
    double pixel_size = 1.0;

    size_t sino_size() const {
        return geometry.angles.size() * static_cast<size_t>(geometry.n_bins);
    }
    size_t image_pixels() const { return static_cast<size_t>(image_size) * image_size; }
};

ProjectionOperator make_operator(ProjectionGeometry geometry, int image_size, double pixel_size);

// Returns a copy of op with the given angle_offset; this is the secondary
// operator of the double-model scheme.
ProjectionOperator with_angle_offset(const ProjectionOperator& op, double theta);

Sinogram forward_project(const ProjectionOperator& op, const ImageGrid& img);
ImageGrid back_project(const ProjectionOperator& op, const Sinogram& sino);

// Power-method estimate of ||A||_2. Nondecreasing in iters for a fixed seed.
double estimate_operator_norm(const ProjectionOperator& op, int iters, uint64_t seed);

namespace detail {
// Serial references; the OpenMP entry points above must reproduce them bitwise.
Sinogram forward_project_serial(const ProjectionOperator& op, const ImageGrid& img);
ImageGrid back_project_serial(const ProjectionOperator& op, const Sinogram& sino);
}  // namespace detail

}  // namespace dualgrid
