#pragma once

#include <span>

#include "mar/diffops.hpp"
#include "mar/geometry.hpp"
#include "mar/image.hpp"

namespace mar {

enum class ConstraintMode {
    unconstrained,  // L2 data term everywhere, saturation ignored
    soft,           // L2 data term off the mask, Au >= C on the mask
    hard,           // Au = U0 off the mask, Au >= C on the mask
};

/// Data side of the problem: measured sinogram U0, the saturated set and the cap.
struct ConstraintSpec {
    Sinogram data;
    SaturationMask mask;
    double cap = 0.0;
    ConstraintMode mode = ConstraintMode::soft;

    /// Throws InvalidArgument on shape mismatch or a non-positive cap.
    void validate() const;
};

/// True exactly where data >= cap. Throws InvalidArgument for cap <= 0.
SaturationMask detect_mask(const Sinogram& data, double cap);

// Scalar resolvents (id + sigma d g*)^-1 of the conjugate data terms.

/// Off the mask, g*(z) = z^2/2 + z*u0.
inline double prox_quadratic_conjugate(double vbar, double u0, double sigma) {
    return (vbar - sigma * u0) / (1.0 + sigma);
}

/// Off the mask in hard mode, g*(z) = z*u0 (conjugate of the equality indicator).
inline double prox_equality_conjugate(double vbar, double u0, double sigma) { return vbar - sigma * u0; }

/// On the mask, g*(z) = z*C for z <= 0 and +inf otherwise.
inline double prox_lower_bound_conjugate(double vbar, double cap, double sigma) {
    const double z = vbar - sigma * cap;
    return z < 0.0 ? z : 0.0;
}

/// Data-dual resolvent with the soft-constraint formulas. Output may alias input.
void resolvent_data_soft(std::span<const double> vbar, const ConstraintSpec& spec, double sigma,
                         std::span<double> out);

/// Data-dual resolvent with the hard-constraint formulas. Output may alias input.
void resolvent_data_hard(std::span<const double> vbar, const ConstraintSpec& spec, double sigma,
                         std::span<double> out);

/// Dispatches on spec.mode; unconstrained uses the soft formula with an empty mask.
void resolvent_data(std::span<const double> vbar, const ConstraintSpec& spec, double sigma, std::span<double> out);

Sinogram resolvent_data_soft(const Sinogram& vbar, const ConstraintSpec& spec, double sigma);
Sinogram resolvent_data_hard(const Sinogram& vbar, const ConstraintSpec& spec, double sigma);

/// Projection of every pixel vector onto the radius-lambda ball: Euclidean
/// for isotropic TV, componentwise clamp for anisotropic TV.
/// Throws InvalidArgument for lambda <= 0.
VectorField resolvent_tv(const VectorField& wbar, double lambda, TvNorm norm = TvNorm::isotropic);
void resolvent_tv_inplace(VectorField& w, double lambda, TvNorm norm = TvNorm::isotropic);

}  // namespace mar
