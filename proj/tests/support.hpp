#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mar/geometry.hpp"
#include "mar/image.hpp"

namespace mar::test {

inline std::vector<double> random_vector(std::size_t n, std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

inline Image random_image(std::size_t w, std::size_t h, std::mt19937& rng, double spacing = 1.0) {
    return Image(w, h, spacing, random_vector(w * h, rng));
}

inline VectorField random_field(std::size_t w, std::size_t h, std::mt19937& rng) {
    VectorField f(w, h);
    f.x = random_vector(w * h, rng);
    f.y = random_vector(w * h, rng);
    return f;
}

inline Sinogram random_sinogram(const Geometry& g, std::mt19937& rng) {
    return Sinogram(g, random_vector(g.n_angles() * g.n_bins, rng));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double sum(std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += x;
    return s;
}

}  // namespace mar::test
