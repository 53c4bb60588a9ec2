#pragma once

#include <Eigen/Dense>

#include "dualgrid/projector.hpp"
#include "dualgrid/rng.hpp"
#include "dualgrid/types.hpp"

namespace dualgrid::testing {

// Explicit dense matrix of the forward operator, assembled column by column
// from basis images. Independent check target for the matrix-free paths.
inline Eigen::MatrixXd dense_forward_matrix(const ProjectionOperator& op) {
    const size_t n = op.image_pixels();
    const size_t m = op.sino_size();
    Eigen::MatrixXd A(m, n);
    ImageGrid basis(op.image_size, op.image_size, op.pixel_size);
    for (size_t col = 0; col < n; ++col) {
        std::fill(basis.values.begin(), basis.values.end(), 0.0);
        basis.values[col] = 1.0;
        Sinogram s = forward_project(op, basis);
        for (size_t row = 0; row < m; ++row) A(row, col) = s.values[row];
    }
    return A;
}

inline ImageGrid random_image(int n, uint64_t seed, double pixel_size = 1.0) {
    ImageGrid img(n, n, pixel_size);
    Rng rng(seed);
    for (double& v : img.values) v = rng.gaussian();
    return img;
}

inline Sinogram random_sinogram(const ProjectionOperator& op, uint64_t seed) {
    Sinogram s(op.geometry.angles, op.geometry.n_bins, op.geometry.bin_spacing);
    Rng rng(seed);
    for (double& v : s.values) v = rng.gaussian();
    return s;
}

inline ProjectionOperator small_operator(int n, int views, double offset = 0.0) {
    const double px = 2.0 / n;
    auto geom = make_parallel_geometry(views, static_cast<int>(std::ceil(std::sqrt(2.0) * n)), px,
                                       offset);
    return make_operator(geom, n, px);
}

}  // namespace dualgrid::testing
