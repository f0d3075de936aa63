#include "mar/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mar/error.hpp"

namespace mar {

Image::Image(std::size_t width, std::size_t height, double spacing)
    : Image(width, height, spacing, std::vector<double>(width * height, 0.0)) {}

Image::Image(std::size_t width, std::size_t height, double spacing, std::vector<double> values)
    : width_(width), height_(height), spacing_(spacing), values_(std::move(values)) {
    if (width == 0 || height == 0) {
        throw InvalidArgument("Image: width and height must be at least 1");
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw InvalidArgument("Image: spacing must be positive and finite");
    }
    if (values_.size() != width * height) {
        throw InvalidArgument("Image: expected " + std::to_string(width * height) + " values, got " +
                              std::to_string(values_.size()));
    }
}

bool Image::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("dot: size mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace mar
