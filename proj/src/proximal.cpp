#include "mar/proximal.hpp"

#include <algorithm>
#include <cmath>

#include "mar/error.hpp"

namespace mar {

void ConstraintSpec::validate() const {
    if (!(cap > 0.0) || !std::isfinite(cap)) throw InvalidArgument("ConstraintSpec: cap must be positive");
    if (mask.rows != data.rows() || mask.cols != data.cols() || mask.flags.size() != data.size()) {
        throw InvalidArgument("ConstraintSpec: mask shape does not match the sinogram");
    }
}

SaturationMask detect_mask(const Sinogram& data, double cap) {
    if (!(cap > 0.0)) throw InvalidArgument("detect_mask: cap must be positive");
    SaturationMask mask(data.rows(), data.cols());
    const auto values = data.values();
    for (std::size_t i = 0; i < values.size(); ++i) mask.flags[i] = values[i] >= cap ? 1 : 0;
    return mask;
}

namespace {

void check_sizes(std::span<const double> vbar, const ConstraintSpec& spec, std::span<double> out, double sigma) {
    if (vbar.size() != spec.data.size() || out.size() != vbar.size()) {
        throw InvalidArgument("resolvent_data: dual variable does not match the sinogram shape");
    }
    if (!(sigma > 0.0)) throw InvalidArgument("resolvent_data: step must be positive");
}

}  // namespace

void resolvent_data_soft(std::span<const double> vbar, const ConstraintSpec& spec, double sigma,
                         std::span<double> out) {
    check_sizes(vbar, spec, out, sigma);
    const auto u0 = spec.data.values();
    for (std::size_t i = 0; i < vbar.size(); ++i) {
        out[i] = spec.mask.at(i) ? prox_lower_bound_conjugate(vbar[i], spec.cap, sigma)
                                 : prox_quadratic_conjugate(vbar[i], u0[i], sigma);
    }
}

void resolvent_data_hard(std::span<const double> vbar, const ConstraintSpec& spec, double sigma,
                         std::span<double> out) {
    check_sizes(vbar, spec, out, sigma);
    const auto u0 = spec.data.values();
    for (std::size_t i = 0; i < vbar.size(); ++i) {
        out[i] = spec.mask.at(i) ? prox_lower_bound_conjugate(vbar[i], spec.cap, sigma)
                                 : prox_equality_conjugate(vbar[i], u0[i], sigma);
    }
}

void resolvent_data(std::span<const double> vbar, const ConstraintSpec& spec, double sigma, std::span<double> out) {
    switch (spec.mode) {
        case ConstraintMode::hard:
            resolvent_data_hard(vbar, spec, sigma, out);
            return;
        case ConstraintMode::soft:
            resolvent_data_soft(vbar, spec, sigma, out);
            return;
        case ConstraintMode::unconstrained: {
            check_sizes(vbar, spec, out, sigma);
            const auto u0 = spec.data.values();
            for (std::size_t i = 0; i < vbar.size(); ++i) out[i] = prox_quadratic_conjugate(vbar[i], u0[i], sigma);
            return;
        }
    }
}

Sinogram resolvent_data_soft(const Sinogram& vbar, const ConstraintSpec& spec, double sigma) {
    Sinogram out(vbar.geometry());
    resolvent_data_soft(vbar.values(), spec, sigma, out.values());
    return out;
}

Sinogram resolvent_data_hard(const Sinogram& vbar, const ConstraintSpec& spec, double sigma) {
    Sinogram out(vbar.geometry());
    resolvent_data_hard(vbar.values(), spec, sigma, out.values());
    return out;
}

void resolvent_tv_inplace(VectorField& w, double lambda, TvNorm norm) {
    if (!(lambda > 0.0)) throw InvalidArgument("resolvent_tv: lambda must be positive");
    if (norm == TvNorm::anisotropic) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            w.x[i] = std::clamp(w.x[i], -lambda, lambda);
            w.y[i] = std::clamp(w.y[i], -lambda, lambda);
        }
        return;
    }
    const double inv_lambda = 1.0 / lambda;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double magnitude = std::hypot(w.x[i], w.y[i]);
        const double shrink = std::max(1.0, magnitude * inv_lambda);
        if (shrink > 1.0) {
            w.x[i] /= shrink;
            w.y[i] /= shrink;
        }
    }
}

VectorField resolvent_tv(const VectorField& wbar, double lambda, TvNorm norm) {
    VectorField w = wbar;
    resolvent_tv_inplace(w, lambda, norm);
    return w;
}

}  // namespace mar
