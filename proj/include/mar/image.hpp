#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mar {

/// Real-valued pixel grid, row-major, pixel (0,0) at the top-left.
///
/// `spacing` is the grid step h used by the finite-difference operators and
/// as the splat weight of the projector.
class Image {
public:
    Image() = default;
    Image(std::size_t width, std::size_t height, double spacing = 1.0);
    Image(std::size_t width, std::size_t height, double spacing, std::vector<double> values);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    double spacing() const noexcept { return spacing_; }

    double& operator()(std::size_t row, std::size_t col) { return values_[row * width_ + col]; }
    double operator()(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool same_shape(const Image& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool all_finite() const noexcept;

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    double spacing_ = 1.0;
    std::vector<double> values_;
};

/// Two stacked scalar planes holding a 2-vector per pixel (x = along columns,
/// y = along rows). Shape always matches the image it was derived from.
struct VectorField {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> x;
    std::vector<double> y;

    VectorField() = default;
    VectorField(std::size_t w, std::size_t h) : width(w), height(h), x(w * h, 0.0), y(w * h, 0.0) {}

    std::size_t size() const noexcept { return x.size(); }

    friend bool operator==(const VectorField&, const VectorField&) = default;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

inline double dot(const VectorField& a, const VectorField& b) { return dot(a.x, b.x) + dot(a.y, b.y); }

}  // namespace mar
