#include "mar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mar/error.hpp"

namespace mar {

Geometry Geometry::uniform(std::size_t n_angles, std::size_t n_bins, double bin_spacing, double detector_center) {
    Geometry g;
    g.angles.resize(n_angles);
    for (std::size_t k = 0; k < n_angles; ++k) {
        g.angles[k] = std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_angles);
    }
    g.n_bins = n_bins;
    g.bin_spacing = bin_spacing;
    g.detector_center = detector_center;
    g.validate();
    return g;
}

std::size_t Geometry::default_bins(std::size_t width, std::size_t height) {
    const double extent = static_cast<double>(std::max(width, height));
    return 2 * static_cast<std::size_t>(std::ceil(std::numbers::sqrt2 * extent / 2.0)) + 1;
}

void Geometry::validate() const {
    if (angles.empty()) throw InvalidArgument("Geometry: need at least one angle");
    if (n_bins == 0) throw InvalidArgument("Geometry: need at least one detector bin");
    if (!(bin_spacing > 0.0) || !std::isfinite(bin_spacing)) {
        throw InvalidArgument("Geometry: bin spacing must be positive");
    }
    if (!std::isfinite(detector_center)) throw InvalidArgument("Geometry: detector center must be finite");
    for (std::size_t k = 0; k < angles.size(); ++k) {
        if (!(angles[k] >= 0.0 && angles[k] < std::numbers::pi)) {
            throw InvalidArgument("Geometry: angle " + std::to_string(k) + " outside [0, pi)");
        }
        if (k > 0 && !(angles[k] > angles[k - 1])) {
            throw InvalidArgument("Geometry: angles must be strictly increasing");
        }
    }
}

bool Geometry::covers(std::size_t width, std::size_t height) const {
    const double half_w = (static_cast<double>(width) - 1.0) / 2.0;
    const double half_h = (static_cast<double>(height) - 1.0) / 2.0;
    const double mid = (static_cast<double>(n_bins) - 1.0) / 2.0;
    for (double phi : angles) {
        // extreme offsets over the pixel-center rectangle
        const double reach = half_w * std::abs(std::cos(phi)) + half_h * std::abs(std::sin(phi));
        const double lo = mid + (-reach - detector_center) / bin_spacing;
        const double hi = mid + (reach - detector_center) / bin_spacing;
        if (lo < 0.0 || hi > static_cast<double>(n_bins) - 1.0) return false;
    }
    return true;
}

Sinogram::Sinogram(Geometry geometry)
    : Sinogram(geometry, std::vector<double>(geometry.n_angles() * geometry.n_bins, 0.0)) {}

Sinogram::Sinogram(Geometry geometry, std::vector<double> values)
    : geometry_(std::move(geometry)), values_(std::move(values)) {
    geometry_.validate();
    if (values_.size() != geometry_.n_angles() * geometry_.n_bins) {
        throw InvalidArgument("Sinogram: expected " + std::to_string(geometry_.n_angles() * geometry_.n_bins) +
                              " values, got " + std::to_string(values_.size()));
    }
}

double Sinogram::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool Sinogram::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::size_t SaturationMask::count() const {
    return static_cast<std::size_t>(std::count_if(flags.begin(), flags.end(), [](auto f) { return f != 0; }));
}

}  // namespace mar
