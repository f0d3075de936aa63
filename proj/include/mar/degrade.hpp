#pragma once

#include <cstdint>
#include <utility>

#include "mar/geometry.hpp"

namespace mar {

/// Replaces every entry >= cap by exactly cap and marks it in the mask.
/// Throws InvalidArgument for cap <= 0.
std::pair<Sinogram, SaturationMask> cap_sinogram(const Sinogram& sino, double cap);

enum class NoiseReference {
    max,   // sigma = level * max(sino)
    mean,  // sigma = level * mean(sino)
};

struct NoiseSpec {
    double relative_level = 0.0;
    std::uint64_t seed = 0;
    NoiseReference reference = NoiseReference::max;
};

/// Adds i.i.d. zero-mean Gaussian noise. Deterministic for a given seed
/// (std::mt19937_64 with std::normal_distribution).
Sinogram add_noise(const Sinogram& sino, const NoiseSpec& spec);

}  // namespace mar
