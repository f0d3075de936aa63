#include "mar/radon.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mar/error.hpp"
#include "mar/parallel.hpp"

namespace mar {

namespace {

struct Splat {
    std::size_t bin;
    double frac;  // weight of bin+1; bin gets 1 - frac
};

// The single place the detector position of a pixel is computed; forward and
// adjoint must agree bit for bit.
inline Splat locate(double x, double y, double c, double s, double mid, double center, double inv_spacing) {
    const double t = mid + (x * c + y * s - center) * inv_spacing;
    // covers() admits t >= 0 up to rounding; truncation is floor from here on
    if (!(t > 0.0)) return {0, 0.0};
    const auto b = static_cast<std::int64_t>(t);
    return {static_cast<std::size_t>(b), t - static_cast<double>(b)};
}

}  // namespace

struct RadonOperator::SplatTable {
    // [angle][pixel], row-major pixels
    std::vector<std::uint32_t> bins;
    std::vector<double> fracs;
};

RadonOperator::RadonOperator(Geometry geom, std::size_t width, std::size_t height, double spacing, double scale,
                             bool allow_table)
    : geom_(std::move(geom)), width_(width), height_(height), spacing_(spacing), scale_(scale) {
    geom_.validate();
    if (width == 0 || height == 0) throw InvalidArgument("RadonOperator: empty image shape");
    if (!(spacing > 0.0)) throw InvalidArgument("RadonOperator: spacing must be positive");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("RadonOperator: scale must be positive");
    if (!geom_.covers(width, height)) {
        throw InvalidArgument("RadonOperator: " + std::to_string(geom_.n_bins) + " bins do not cover a " +
                              std::to_string(width) + "x" + std::to_string(height) +
                              " image (need at least " + std::to_string(Geometry::default_bins(width, height)) +
                              " with unit spacing)");
    }
    cos_.reserve(geom_.n_angles());
    sin_.reserve(geom_.n_angles());
    for (double phi : geom_.angles) {
        cos_.push_back(std::cos(phi));
        sin_.push_back(std::sin(phi));
    }
    const std::size_t entries = geom_.n_angles() * image_size();
    if (allow_table && entries <= kMaxSplatTableEntries) {
        auto table = std::make_shared<SplatTable>();
        table->bins.resize(entries);
        table->fracs.resize(entries);
        const double mid = (static_cast<double>(geom_.n_bins) - 1.0) / 2.0;
        const double inv_spacing = 1.0 / geom_.bin_spacing;
        const double x0 = -(static_cast<double>(width_) - 1.0) / 2.0;
        const double y0 = (static_cast<double>(height_) - 1.0) / 2.0;
        parallel_for(geom_.n_angles(), [&](std::size_t begin, std::size_t end) {
            for (std::size_t k = begin; k < end; ++k) {
                std::size_t i = k * image_size();
                for (std::size_t r = 0; r < height_; ++r) {
                    const double y = y0 - static_cast<double>(r);
                    for (std::size_t col = 0; col < width_; ++col, ++i) {
                        const double x = x0 + static_cast<double>(col);
                        const Splat p = locate(x, y, cos_[k], sin_[k], mid, geom_.detector_center, inv_spacing);
                        table->bins[i] = static_cast<std::uint32_t>(p.bin);
                        table->fracs[i] = p.frac;
                    }
                }
            }
        });
        table_ = std::move(table);
    }
}

// Both directions work on rows padded with one trailing bin so that the
// upper neighbour of the last bin is addressable. The pad is zero on read and
// discarded on write, which keeps forward and adjoint exactly transposed.

void RadonOperator::forward(std::span<const double> img, std::span<double> sino) const {
    if (img.size() != image_size() || sino.size() != sinogram_size()) {
        throw InvalidArgument("RadonOperator::forward: buffer size mismatch");
    }
    const std::size_t n_bins = geom_.n_bins;
    const std::size_t padded = n_bins + 1;
    const double mid = (static_cast<double>(n_bins) - 1.0) / 2.0;
    const double inv_spacing = 1.0 / geom_.bin_spacing;
    const double weight = scale_ * spacing_ * inv_spacing;
    const double x0 = -(static_cast<double>(width_) - 1.0) / 2.0;
    const double y0 = (static_cast<double>(height_) - 1.0) / 2.0;

    parallel_for(geom_.n_angles(), [&](std::size_t begin, std::size_t end) {
        // Neighbouring pixels usually hit the same bin; spreading columns over
        // four partial rows breaks the read-modify-write chain.
        constexpr std::size_t kLanes = 4;
        std::vector<double> lanes(kLanes * padded);
        for (std::size_t k = begin; k < end; ++k) {
            std::fill(lanes.begin(), lanes.end(), 0.0);
            if (table_) {
                const std::uint32_t* bins = table_->bins.data() + k * image_size();
                const double* fracs = table_->fracs.data() + k * image_size();
                for (std::size_t r = 0; r < height_; ++r) {
                    const std::size_t base = r * width_;
                    for (std::size_t col = 0; col < width_; ++col) {
                        const std::size_t i = base + col;
                        const double w = weight * img[i];
                        double* lane = lanes.data() + (col % kLanes) * padded;
                        lane[bins[i]] += (1.0 - fracs[i]) * w;
                        lane[bins[i] + 1] += fracs[i] * w;
                    }
                }
                double* row = sino.data() + k * n_bins;
                for (std::size_t b = 0; b < n_bins; ++b) {
                    row[b] = (lanes[b] + lanes[padded + b]) + (lanes[2 * padded + b] + lanes[3 * padded + b]);
                }
                continue;
            }
            const double c = cos_[k];
            const double s = sin_[k];
            for (std::size_t r = 0; r < height_; ++r) {
                const double y = y0 - static_cast<double>(r);
                const double* pixels = img.data() + r * width_;
                for (std::size_t col = 0; col < width_; ++col) {
                    const double x = x0 + static_cast<double>(col);
                    const Splat p = locate(x, y, c, s, mid, geom_.detector_center, inv_spacing);
                    const double w = weight * pixels[col];
                    double* lane = lanes.data() + (col % kLanes) * padded;
                    lane[p.bin] += (1.0 - p.frac) * w;
                    lane[p.bin + 1] += p.frac * w;
                }
            }
            double* row = sino.data() + k * n_bins;
            for (std::size_t b = 0; b < n_bins; ++b) {
                row[b] = (lanes[b] + lanes[padded + b]) + (lanes[2 * padded + b] + lanes[3 * padded + b]);
            }
        }
    });
}

void RadonOperator::adjoint(std::span<const double> sino, std::span<double> img) const {
    if (img.size() != image_size() || sino.size() != sinogram_size()) {
        throw InvalidArgument("RadonOperator::adjoint: buffer size mismatch");
    }
    const std::size_t n_bins = geom_.n_bins;
    const std::size_t padded = n_bins + 1;
    const std::size_t n_angles = geom_.n_angles();
    const double mid = (static_cast<double>(n_bins) - 1.0) / 2.0;
    const double inv_spacing = 1.0 / geom_.bin_spacing;
    const double weight = scale_ * spacing_ * inv_spacing;
    const double x0 = -(static_cast<double>(width_) - 1.0) / 2.0;
    const double y0 = (static_cast<double>(height_) - 1.0) / 2.0;

    std::vector<double> data(n_angles * padded, 0.0);
    for (std::size_t k = 0; k < n_angles; ++k) {
        std::copy_n(sino.data() + k * n_bins, n_bins, data.data() + k * padded);
    }

    parallel_for(height_, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            double* pixels = img.data() + r * width_;
            std::fill(pixels, pixels + width_, 0.0);
            const double y = y0 - static_cast<double>(r);
            for (std::size_t k = 0; k < n_angles; ++k) {
                const double* row = data.data() + k * padded;
                if (table_) {
                    const std::size_t offset = k * image_size() + r * width_;
                    const std::uint32_t* bins = table_->bins.data() + offset;
                    const double* fracs = table_->fracs.data() + offset;
                    for (std::size_t col = 0; col < width_; ++col) {
                        pixels[col] += (1.0 - fracs[col]) * row[bins[col]] + fracs[col] * row[bins[col] + 1];
                    }
                    continue;
                }
                const double c = cos_[k];
                const double s = sin_[k];
                for (std::size_t col = 0; col < width_; ++col) {
                    const double x = x0 + static_cast<double>(col);
                    const Splat p = locate(x, y, c, s, mid, geom_.detector_center, inv_spacing);
                    pixels[col] += (1.0 - p.frac) * row[p.bin] + p.frac * row[p.bin + 1];
                }
            }
            for (std::size_t col = 0; col < width_; ++col) pixels[col] *= weight;
        }
    });
}

Sinogram RadonOperator::forward(const Image& img) const {
    if (img.width() != width_ || img.height() != height_) {
        throw InvalidArgument("RadonOperator::forward: image shape does not match operator");
    }
    Sinogram sino(geom_);
    forward(img.values(), sino.values());
    return sino;
}

Image RadonOperator::adjoint(const Sinogram& sino) const {
    if (!(sino.geometry() == geom_)) {
        throw InvalidArgument("RadonOperator::adjoint: sinogram geometry does not match operator");
    }
    Image img(width_, height_, spacing_);
    adjoint(sino.values(), img.values());
    return img;
}

Sinogram project(const Image& img, const Geometry& geom) {
    return RadonOperator(geom, img.width(), img.height(), img.spacing()).forward(img);
}

Image backproject(const Sinogram& sino, std::size_t width, std::size_t height, double spacing) {
    return RadonOperator(sino.geometry(), width, height, spacing).adjoint(sino);
}

double estimate_norm(const Geometry& geom, std::size_t width, std::size_t height, std::size_t iters,
                     double spacing, std::uint64_t seed) {
    if (iters == 0) throw InvalidArgument("estimate_norm: need at least one iteration");
    const RadonOperator op(geom, width, height, spacing);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(op.image_size());
    for (auto& v : x) v = normal(rng);
    std::vector<double> y(op.sinogram_size());

    double best = 0.0;
    for (std::size_t it = 0; it < iters; ++it) {
        const double xx = dot(x, x);
        if (xx == 0.0) break;
        op.forward(x, y);
        best = std::max(best, dot(y, y) / xx);
        op.adjoint(y, x);
        const double n = norm2(x);
        if (n == 0.0) break;
        for (auto& v : x) v /= n;
    }
    return std::sqrt(best);
}

RadonOperator normalized_operator(const Geometry& geom, std::size_t width, std::size_t height, double spacing,
                                  std::size_t iters, double safety) {
    if (!(safety >= 1.0)) throw InvalidArgument("normalized_operator: safety factor must be >= 1");
    const double estimate = estimate_norm(geom, width, height, iters, spacing);
    if (!(estimate > 0.0)) throw InvalidArgument("normalized_operator: operator is zero");
    return RadonOperator(geom, width, height, spacing, 1.0 / (safety * estimate));
}

}  // namespace mar
