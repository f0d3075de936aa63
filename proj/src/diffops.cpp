#include "mar/diffops.hpp"

#include <cmath>

#include "mar/error.hpp"

namespace mar {

void gradient_into(std::span<const double> img, std::size_t width, std::size_t height, double spacing,
                   VectorField& out) {
    const double inv_h = 1.0 / spacing;
    for (std::size_t r = 0; r < height; ++r) {
        const double* row = img.data() + r * width;
        const double* below = r + 1 < height ? row + width : nullptr;
        double* gx = out.x.data() + r * width;
        double* gy = out.y.data() + r * width;
        for (std::size_t c = 0; c < width; ++c) {
            const double right = c + 1 < width ? row[c + 1] : 0.0;
            const double down = below ? below[c] : 0.0;
            gx[c] = (right - row[c]) * inv_h;
            gy[c] = (down - row[c]) * inv_h;
        }
    }
}

void divergence_into(const VectorField& field, double spacing, std::span<double> out) {
    const std::size_t width = field.width;
    const std::size_t height = field.height;
    const double inv_h = 1.0 / spacing;
    for (std::size_t r = 0; r < height; ++r) {
        const double* px = field.x.data() + r * width;
        const double* py = field.y.data() + r * width;
        const double* py_above = r > 0 ? py - width : nullptr;
        double* d = out.data() + r * width;
        for (std::size_t c = 0; c < width; ++c) {
            const double left = c > 0 ? px[c - 1] : 0.0;
            const double up = py_above ? py_above[c] : 0.0;
            d[c] = ((px[c] - left) + (py[c] - up)) * inv_h;
        }
    }
}

VectorField gradient(const Image& img) {
    VectorField out(img.width(), img.height());
    gradient_into(img.values(), img.width(), img.height(), img.spacing(), out);
    return out;
}

Image divergence(const VectorField& field, double spacing) {
    if (field.x.size() != field.width * field.height || field.y.size() != field.x.size()) {
        throw InvalidArgument("divergence: vector field planes do not match its shape");
    }
    Image out(field.width, field.height, spacing);
    divergence_into(field, spacing, out.values());
    return out;
}

double gradient_norm_bound(double spacing) {
    if (!(spacing > 0.0)) throw InvalidArgument("gradient_norm_bound: h must be positive");
    return 8.0 / (spacing * spacing);
}

double total_variation(const Image& img, TvNorm norm) {
    const VectorField g = gradient(img);
    double tv = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        tv += norm == TvNorm::isotropic ? std::hypot(g.x[i], g.y[i]) : std::abs(g.x[i]) + std::abs(g.y[i]);
    }
    return tv;
}

}  // namespace mar
