#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mar/geometry.hpp"
#include "mar/image.hpp"

namespace mar {

// Pixel-driven parallel-beam projector.
//
// Pixel (r,c) of a width x height image sits at x = c - (width-1)/2,
// y = (height-1)/2 - r (pixel units, y up). At angle phi its detector offset
// is s = x cos(phi) + y sin(phi); the pixel value times h / bin_spacing is
// split linearly between the two bins bracketing s. The back-projector
// gathers with the same weights, so the two are exact adjoints.

/// Throws InvalidArgument if the geometry does not cover the image.
Sinogram project(const Image& img, const Geometry& geom);

/// Adjoint of project for an image of the given shape and spacing.
Image backproject(const Sinogram& sino, std::size_t width, std::size_t height, double spacing = 1.0);

/// Power iteration on A*A from a fixed-seed start; returns the square root of
/// the largest Rayleigh quotient seen in `iters` steps (a lower bound on ||A||).
double estimate_norm(const Geometry& geom, std::size_t width, std::size_t height, std::size_t iters,
                     double spacing = 1.0, std::uint64_t seed = 0x5eedULL);

/// The projector scaled by a fixed factor, with buffer-reusing entry points
/// for the solver loop. Precomputes the per-angle trigonometry.
class RadonOperator {
public:
    RadonOperator(Geometry geom, std::size_t width, std::size_t height, double spacing = 1.0, double scale = 1.0,
                  bool allow_table = true);

    const Geometry& geometry() const noexcept { return geom_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    double spacing() const noexcept { return spacing_; }
    double scale() const noexcept { return scale_; }

    /// D such that this operator is A_h / D (1 when unscaled).
    double normalization() const noexcept { return 1.0 / scale_; }

    std::size_t image_size() const noexcept { return width_ * height_; }
    std::size_t sinogram_size() const noexcept { return geom_.n_angles() * geom_.n_bins; }

    void forward(std::span<const double> img, std::span<double> sino) const;
    void adjoint(std::span<const double> sino, std::span<double> img) const;

    /// Whether the per-pixel detector positions are cached (small problems)
    /// or recomputed on every application.
    bool uses_splat_table() const noexcept { return table_ != nullptr; }

    Sinogram forward(const Image& img) const;
    Image adjoint(const Sinogram& sino) const;

private:
    Geometry geom_;
    std::size_t width_;
    std::size_t height_;
    double spacing_;
    double scale_;
    std::vector<double> cos_;
    std::vector<double> sin_;

    struct SplatTable;
    std::shared_ptr<const SplatTable> table_;
};

/// Largest angles x pixels product for which RadonOperator caches positions.
inline constexpr std::size_t kMaxSplatTableEntries = std::size_t{8} << 20;

inline constexpr double kDefaultNormSafety = 1.05;
inline constexpr std::size_t kDefaultNormIterations = 100;

/// A = A_h / D with D = safety * estimate_norm(...), so that ||A|| < 1.
RadonOperator normalized_operator(const Geometry& geom, std::size_t width, std::size_t height,
                                  double spacing = 1.0, std::size_t iters = kDefaultNormIterations,
                                  double safety = kDefaultNormSafety);

}  // namespace mar
