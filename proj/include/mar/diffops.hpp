#pragma once

#include <cstddef>
#include <span>

#include "mar/image.hpp"

namespace mar {

/// Forward differences with zero extension outside the grid:
///   x(r,c) = (u(r,c+1) - u(r,c)) / h,  y(r,c) = (u(r+1,c) - u(r,c)) / h,
/// where u(r,width) = u(height,c) = 0.
VectorField gradient(const Image& img);

/// Negative adjoint of gradient: <gradient(u), p> = -<u, divergence(p)>.
/// Backward differences, p(r,-1) = p(-1,c) = 0.
Image divergence(const VectorField& field, double spacing = 1.0);

/// Returns 8 / h^2, a strict upper bound on ||gradient||^2.
/// Throws InvalidArgument for h <= 0.
double gradient_norm_bound(double spacing);

enum class TvNorm {
    isotropic,    // sum of pixelwise Euclidean magnitudes
    anisotropic,  // sum of absolute components
};

/// ||gradient(u)||_1 with the chosen pointwise norm.
double total_variation(const Image& img, TvNorm norm = TvNorm::isotropic);

// Buffer-reusing forms used by the solver; shapes are not rechecked.
void gradient_into(std::span<const double> img, std::size_t width, std::size_t height, double spacing,
                   VectorField& out);
void divergence_into(const VectorField& field, double spacing, std::span<double> out);

}  // namespace mar
