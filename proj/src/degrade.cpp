#include "mar/degrade.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "mar/error.hpp"

namespace mar {

std::pair<Sinogram, SaturationMask> cap_sinogram(const Sinogram& sino, double cap) {
    if (!(cap > 0.0)) throw InvalidArgument("cap_sinogram: cap must be positive");
    Sinogram out = sino;
    SaturationMask mask(sino.rows(), sino.cols());
    auto values = out.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= cap) {
            values[i] = cap;
            mask.flags[i] = 1;
        }
    }
    return {std::move(out), std::move(mask)};
}

Sinogram add_noise(const Sinogram& sino, const NoiseSpec& spec) {
    if (!(spec.relative_level >= 0.0) || !std::isfinite(spec.relative_level)) {
        throw InvalidArgument("add_noise: relative level must be a finite non-negative number");
    }
    if (spec.relative_level == 0.0) return sino;

    const auto values = sino.values();
    double reference = 0.0;
    if (spec.reference == NoiseReference::max) {
        reference = sino.max();
    } else {
        reference = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    }
    const double sigma = spec.relative_level * std::abs(reference);

    Sinogram out = sino;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : out.values()) v += sigma * normal(rng);
    return out;
}

}  // namespace mar
