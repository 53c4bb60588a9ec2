#pragma once

#include <cstdint>
#include <utility>

#include "dualgrid/types.hpp"

namespace dualgrid {

struct NoiseSpec {
    double sigma_rel = 0.0;  // std as a fraction of max |sinogram value|
    uint64_t seed = 0;
};

struct NoisySinogram {
    Sinogram sino;
    double sigma_abs = 0.0;  // realized per-sample std, for the discrepancy rule
};

// Modified Shepp-Logan head phantom (values in [0, 1]) rasterized at n x n,
// the object inscribed in the unit square.
ImageGrid shepp_logan(int n);

// Sum of smooth Gaussian blobs, same footprint as the head phantom; useful
// where interpolation-error bounds assume a smooth object.
ImageGrid smooth_blobs(int n);

// Adds i.i.d. Gaussian noise with std = sigma_rel * max(|sino|); deterministic
// per seed.
NoisySinogram add_noise(const Sinogram& sino, const NoiseSpec& spec);

}  // namespace dualgrid
