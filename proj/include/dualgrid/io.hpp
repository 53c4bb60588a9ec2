#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dualgrid/types.hpp"

namespace dualgrid {

enum class ImageFormat { pgm16, png };

// Binary sinogram container: magic "DXSG", version u16, n_angles u32,
// n_bins u32, bin_spacing f64, angles f64[n_angles], values f32[] in
// angle-major order. All fields little-endian.
void save_sinogram(const Sinogram& sino, const std::filesystem::path& path);
Sinogram load_sinogram(const std::filesystem::path& path);

// Min-max normalized to the output bit depth; a "<name>.scale.txt" sidecar
// records "min=<v> max=<v>". A constant image maps to 0.
void save_image(const ImageGrid& img, const std::filesystem::path& path, ImageFormat format);

// Decimal with 17 significant digits; round-trips a double exactly.
std::string format_g17(double v);

void save_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows);

// FNV-1a over the file contents, for run manifests.
uint64_t hash_file(const std::filesystem::path& path);

}  // namespace dualgrid
