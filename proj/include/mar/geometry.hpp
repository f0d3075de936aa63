#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mar {

/// Parallel-beam acquisition geometry.
///
/// Offsets are measured in pixel units from the image center. Bin b covers
/// the detector position `(b - (n_bins-1)/2) * bin_spacing + detector_center`.
struct Geometry {
    std::vector<double> angles;  // radians, strictly increasing in [0, pi)
    std::size_t n_bins = 0;
    double bin_spacing = 1.0;
    double detector_center = 0.0;

    std::size_t n_angles() const noexcept { return angles.size(); }

    /// `n_angles` uniformly spaced angles k*pi/n_angles.
    static Geometry uniform(std::size_t n_angles, std::size_t n_bins, double bin_spacing = 1.0,
                            double detector_center = 0.0);

    /// Smallest odd bin count that fits the image diagonal: 2*ceil(sqrt(2)*max(w,h)/2) + 1.
    static std::size_t default_bins(std::size_t width, std::size_t height);

    /// Throws InvalidArgument if the invariants do not hold.
    void validate() const;

    /// True when every pixel center of a width x height image lands inside the
    /// detector (between bin 0 and bin n_bins-1) for every angle.
    bool covers(std::size_t width, std::size_t height) const;

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Angle x offset data. Row i holds the projection at angles[i].
class Sinogram {
public:
    Sinogram() = default;
    explicit Sinogram(Geometry geometry);
    Sinogram(Geometry geometry, std::vector<double> values);

    const Geometry& geometry() const noexcept { return geometry_; }
    std::size_t rows() const noexcept { return geometry_.n_angles(); }
    std::size_t cols() const noexcept { return geometry_.n_bins; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator()(std::size_t angle, std::size_t bin) { return values_[angle * cols() + bin]; }
    double operator()(std::size_t angle, std::size_t bin) const { return values_[angle * cols() + bin]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double max() const;
    bool all_finite() const noexcept;

    friend bool operator==(const Sinogram&, const Sinogram&) = default;

private:
    Geometry geometry_;
    std::vector<double> values_;
};

/// Boolean grid over the sinogram domain; true marks a saturated entry.
struct SaturationMask {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> flags;

    SaturationMask() = default;
    SaturationMask(std::size_t r, std::size_t c) : rows(r), cols(c), flags(r * c, 0) {}

    bool operator()(std::size_t r, std::size_t c) const { return flags[r * cols + c] != 0; }
    bool at(std::size_t index) const { return flags[index] != 0; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }

    friend bool operator==(const SaturationMask&, const SaturationMask&) = default;
};

}  // namespace mar
