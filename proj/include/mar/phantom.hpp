#pragma once

#include <array>
#include <cstddef>

#include "mar/image.hpp"

namespace mar {

/// One term of the analytic phantom: intensity added inside a rotated
/// ellipse, in the normalized square [-1,1]^2 (y pointing up).
struct Ellipse {
    double intensity;
    double semi_x;
    double semi_y;
    double center_x;
    double center_y;
    double rotation_deg;

    bool contains(double x, double y) const;
};

enum class PhantomTable {
    standard,  // Shepp & Logan (1974) intensities
    modified,  // higher-contrast variant (Toft), the MATLAB default
};

const std::array<Ellipse, 10>& shepp_logan_ellipses(PhantomTable table = PhantomTable::standard);

/// Shepp-Logan phantom sampled at pixel centers and clipped to [0,1].
///
/// Pixel (r,c) has center x = -1 + (2c+1)/width, y = 1 - (2r+1)/height.
/// Throws InvalidArgument for width or height below 8.
Image shepp_logan(std::size_t width, std::size_t height, PhantomTable table = PhantomTable::standard,
                  double spacing = 1.0);

/// Rectangular high-density block added on top of the image.
struct MetalInsert {
    std::size_t row0 = 0;
    std::size_t col0 = 0;
    std::size_t rows = 10;
    std::size_t cols = 10;
    double added_value = 3.0;

    /// Block of the given extent centered vertically and centered in the
    /// right half of the image.
    static MetalInsert centered_right(std::size_t width, std::size_t height, std::size_t rows = 10,
                                      std::size_t cols = 10, double added_value = 3.0);
};

/// Returns img with insert.added_value added on the insert region.
/// Throws InvalidArgument if the region leaves the image or the value is negative.
Image add_metal(const Image& img, const MetalInsert& insert);

}  // namespace mar
