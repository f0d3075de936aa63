#pragma once

#include <cstddef>
#include <limits>

#include "mar/geometry.hpp"
#include "mar/image.hpp"

namespace mar {

/// Returned by psnr for identical inputs.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(peak^2 * n / ||u - ref||^2) in dB. With clip, both images are
/// first clamped to [0, peak]. Throws InvalidArgument on shape mismatch or
/// peak <= 0.
double psnr(const Image& u, const Image& ref, double peak = 1.0, bool clip = true);

enum class FbpFilter { none, ram_lak };

/// Filtered back-projection baseline.
///
/// The ram-lak filter is the band-limited ramp built from its spatial
/// kernel (1/4 at 0, -1/(pi n)^2 at odd n), doubled so that its response
/// reaches 1 at Nyquist, and applied per angle by FFT on a zero-padded row.
/// The back-projection is then scaled by pi / (2 N h^2).
Image fbp_baseline(const Sinogram& sino, std::size_t width, std::size_t height, FbpFilter filter,
                   double spacing = 1.0);

}  // namespace mar
