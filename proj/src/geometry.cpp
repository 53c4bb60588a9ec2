#include "dualgrid/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dualgrid {

size_t FovMask::count_inside() const {
    size_t n = 0;
    for (uint8_t v : inside) n += (v != 0);
    return n;
}

ProjectionGeometry make_parallel_geometry(int n_angles, int n_bins, double bin_spacing,
                                          double angle_offset) {
    if (n_angles < 1) throw std::invalid_argument("make_parallel_geometry: n_angles must be >= 1");
    if (n_bins < 1) throw std::invalid_argument("make_parallel_geometry: n_bins must be >= 1");
    if (!(bin_spacing > 0.0))
        throw std::invalid_argument("make_parallel_geometry: bin_spacing must be > 0");

    ProjectionGeometry g;
    g.n_bins = n_bins;
    g.bin_spacing = bin_spacing;
    g.angle_offset = angle_offset;
    g.angles.resize(n_angles);
    const double step = std::numbers::pi / n_angles;
    for (int i = 0; i < n_angles; ++i) g.angles[i] = i * step;
    return g;
}

FovMask make_fov_mask(int width, int height, double radius_fraction) {
    if (!(radius_fraction > 0.0) || radius_fraction > 1.0)
        throw std::invalid_argument("make_fov_mask: radius_fraction must be in (0, 1]");
    FovMask m;
    m.width = width;
    m.height = height;
    m.inside.assign(static_cast<size_t>(width) * height, 0);
    const double cx = 0.5 * width;
    const double cy = 0.5 * height;
    const double r = radius_fraction * 0.5 * width;
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) {
            const double dx = (i + 0.5) - cx;
            const double dy = (j + 0.5) - cy;
            if (dx * dx + dy * dy <= r * r) m.inside[static_cast<size_t>(j) * width + i] = 1;
        }
    }
    return m;
}

namespace {

inline double sample_bilinear(const ImageGrid& img, double x, double y) {
    // x is a fractional column index, y a fractional row index. Zero outside.
    const int n = img.width;
    const int ix = static_cast<int>(std::floor(x));
    const int iy = static_cast<int>(std::floor(y));
    const double fx = x - ix;
    const double fy = y - iy;
    double v = 0.0;
    if (iy >= 0 && iy < n) {
        if (ix >= 0 && ix < n) v += (1.0 - fx) * (1.0 - fy) * img.at(iy, ix);
        if (ix + 1 >= 0 && ix + 1 < n) v += fx * (1.0 - fy) * img.at(iy, ix + 1);
    }
    if (iy + 1 >= 0 && iy + 1 < n) {
        if (ix >= 0 && ix < n) v += (1.0 - fx) * fy * img.at(iy + 1, ix);
        if (ix + 1 >= 0 && ix + 1 < n) v += fx * fy * img.at(iy + 1, ix + 1);
    }
    return v;
}

void rotate_rows(const ImageGrid& src, ImageGrid& dst, double theta, int row_begin, int row_end) {
    const int n = src.width;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double ctr = 0.5 * (n - 1);
    for (int j = row_begin; j < row_end; ++j) {
        for (int i = 0; i < n; ++i) {
            // Inverse map: sample the source at the pre-rotation location.
            const double dx = i - ctr;
            const double dy = j - ctr;
            const double xs = ctr + c * dx + s * dy;
            const double ys = ctr - s * dx + c * dy;
            dst.at(j, i) = sample_bilinear(src, xs, ys);
        }
    }
}

}  // namespace

namespace detail {

ImageGrid rotate_image_serial(const ImageGrid& img, double theta) {
    if (img.width != img.height) throw std::invalid_argument("rotate_image: non-square image");
    if (theta == 0.0) return img;
    ImageGrid out(img.width, img.height, img.pixel_size);
    rotate_rows(img, out, theta, 0, img.height);
    return out;
}

}  // namespace detail

ImageGrid rotate_image(const ImageGrid& img, double theta) {
    if (img.width != img.height) throw std::invalid_argument("rotate_image: non-square image");
    if (theta == 0.0) return img;
    ImageGrid out(img.width, img.height, img.pixel_size);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < img.height; ++j) rotate_rows(img, out, theta, j, j + 1);
    return out;
}

}  // namespace dualgrid
