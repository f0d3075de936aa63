#include "mar/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mar/error.hpp"

namespace mar {

namespace {

// intensity, a, b, x0, y0, phi (degrees)
constexpr std::array<Ellipse, 10> kStandard{{
    {1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
    {-0.98, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
    {-0.02, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
    {-0.02, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
    {0.01, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
    {0.01, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
    {0.01, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
    {0.01, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
    {0.01, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
    {0.01, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
}};

constexpr std::array<Ellipse, 10> kModified{{
    {1.0, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
    {-0.8, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
    {0.1, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
    {0.1, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
    {0.1, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
    {0.1, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
}};

}  // namespace

bool Ellipse::contains(double x, double y) const {
    const double phi = rotation_deg * std::numbers::pi / 180.0;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double dx = x - center_x;
    const double dy = y - center_y;
    const double u = (dx * c + dy * s) / semi_x;
    const double v = (-dx * s + dy * c) / semi_y;
    return u * u + v * v <= 1.0;
}

const std::array<Ellipse, 10>& shepp_logan_ellipses(PhantomTable table) {
    return table == PhantomTable::modified ? kModified : kStandard;
}

Image shepp_logan(std::size_t width, std::size_t height, PhantomTable table, double spacing) {
    if (width < 8 || height < 8) {
        throw InvalidArgument("shepp_logan: image must be at least 8x8, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
    if (!(spacing > 0.0)) {
        throw InvalidArgument("shepp_logan: spacing must be positive");
    }
    const auto& ellipses = shepp_logan_ellipses(table);
    Image img(width, height, spacing);
    for (std::size_t r = 0; r < height; ++r) {
        const double y = 1.0 - (2.0 * static_cast<double>(r) + 1.0) / static_cast<double>(height);
        for (std::size_t c = 0; c < width; ++c) {
            const double x = -1.0 + (2.0 * static_cast<double>(c) + 1.0) / static_cast<double>(width);
            double value = 0.0;
            for (const auto& e : ellipses) {
                if (e.contains(x, y)) value += e.intensity;
            }
            img(r, c) = std::clamp(value, 0.0, 1.0);
        }
    }
    return img;
}

MetalInsert MetalInsert::centered_right(std::size_t width, std::size_t height, std::size_t rows,
                                        std::size_t cols, double added_value) {
    MetalInsert insert;
    insert.rows = rows;
    insert.cols = cols;
    insert.added_value = added_value;
    insert.row0 = height / 2 >= rows / 2 ? height / 2 - rows / 2 : 0;
    insert.col0 = (3 * width) / 4 >= cols / 2 ? (3 * width) / 4 - cols / 2 : 0;
    return insert;
}

Image add_metal(const Image& img, const MetalInsert& insert) {
    if (insert.rows == 0 || insert.cols == 0 || insert.row0 + insert.rows > img.height() ||
        insert.col0 + insert.cols > img.width()) {
        throw InvalidArgument("add_metal: insert region [" + std::to_string(insert.row0) + "+" +
                              std::to_string(insert.rows) + ", " + std::to_string(insert.col0) + "+" +
                              std::to_string(insert.cols) + "] is outside the " +
                              std::to_string(img.height()) + "x" + std::to_string(img.width()) + " image");
    }
    if (!(insert.added_value >= 0.0) || !std::isfinite(insert.added_value)) {
        throw InvalidArgument("add_metal: added value must be finite and non-negative");
    }
    Image out = img;
    for (std::size_t r = insert.row0; r < insert.row0 + insert.rows; ++r) {
        for (std::size_t c = insert.col0; c < insert.col0 + insert.cols; ++c) {
            out(r, c) += insert.added_value;
        }
    }
    return out;
}

}  // namespace mar
