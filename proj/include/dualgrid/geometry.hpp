#pragma once

#include <vector>

#include "dualgrid/types.hpp"

namespace dualgrid {

// Parallel-beam scan description. The detector is centered on the grid center;
// bin k sits at offset (k - (n_bins-1)/2) * bin_spacing along the detector axis.
// angle_offset is added to every view angle by the operator, which is how the
// secondary (rotated-grid) operator is realized.
struct ProjectionGeometry {
    std::vector<double> angles;  // strictly increasing, in [0, pi)
    int n_bins = 0;
    double bin_spacing = 1.0;
    double angle_offset = 0.0;
};

// Circular field-of-view indicator. Comparisons between the two grids are
// restricted to the inscribed disk, since rotation moves the corners out of
// the common domain.
struct FovMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> inside;

    bool at(int row, int col) const { return inside[static_cast<size_t>(row) * width + col] != 0; }
    size_t count_inside() const;
};

ProjectionGeometry make_parallel_geometry(int n_angles, int n_bins, double bin_spacing,
                                          double angle_offset);

FovMask make_fov_mask(int width, int height, double radius_fraction);

// Rotates img by theta about the grid center, bilinear interpolation, zero fill
// for samples outside the grid. Derotation is rotate_image(img, -theta).
ImageGrid rotate_image(const ImageGrid& img, double theta);

namespace detail {
// Serial reference for the rotation kernel; the public entry point must match
// it bit for bit.
ImageGrid rotate_image_serial(const ImageGrid& img, double theta);
}  // namespace detail

}  // namespace dualgrid
