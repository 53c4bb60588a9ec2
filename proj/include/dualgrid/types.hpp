#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dualgrid {

// Square pixel image, row-major. Pixel (row j, col i) lives at values[j*width + i].
struct ImageGrid {
    int width = 0;
    int height = 0;
    double pixel_size = 1.0;
    std::vector<double> values;

    ImageGrid() = default;
    ImageGrid(int w, int h, double px = 1.0)
        : width(w), height(h), pixel_size(px), values(static_cast<size_t>(w) * h, 0.0) {
        if (w != h) throw std::invalid_argument("ImageGrid: grid must be square");
        if (w <= 0) throw std::invalid_argument("ImageGrid: non-positive size");
    }

    double& at(int row, int col) { return values[static_cast<size_t>(row) * width + col]; }
    double at(int row, int col) const { return values[static_cast<size_t>(row) * width + col]; }
    size_t size() const { return values.size(); }
};

// Projection data: values in angle-major order, values[a*n_bins + b].
struct Sinogram {
    std::vector<double> angles;  // radians, before any operator offset
    int n_bins = 0;
    double bin_spacing = 1.0;
    std::vector<double> values;

    Sinogram() = default;
    Sinogram(std::vector<double> ang, int bins, double spacing)
        : angles(std::move(ang)), n_bins(bins), bin_spacing(spacing),
          values(angles.size() * static_cast<size_t>(bins), 0.0) {}

    int n_angles() const { return static_cast<int>(angles.size()); }
    size_t size() const { return values.size(); }
    double& at(int angle, int bin) { return values[static_cast<size_t>(angle) * n_bins + bin]; }
    double at(int angle, int bin) const { return values[static_cast<size_t>(angle) * n_bins + bin]; }
};

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace dualgrid
