#include <doctest.h>

#include "mar/diffops.hpp"
#include "mar/error.hpp"
#include "support.hpp"

using namespace mar;

namespace {

// Largest eigenvalue of -div grad by power iteration.
double gradient_norm_squared(std::size_t w, std::size_t h, double spacing, int iters, std::uint32_t seed) {
    std::mt19937 rng(seed);
    Image u = test::random_image(w, h, rng, spacing);
    double estimate = 0.0;
    for (int it = 0; it < iters; ++it) {
        const double n = norm2(u.values());
        for (auto& v : u.values()) v /= n;
        const VectorField g = gradient(u);
        estimate = std::max(estimate, dot(g, g));
        Image d = divergence(g, spacing);
        for (auto& v : d.values()) v = -v;
        u = d;
    }
    return estimate;
}

}  // namespace

TEST_SUITE("diffops") {

TEST_CASE("constant image: zero interior gradient, -c/h on the far boundary") {
    const double c = 2.0;
    const double h = 0.5;
    Image img(6, 4, h, std::vector<double>(24, c));
    const VectorField g = gradient(img);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t col = 0; col < 6; ++col) {
            const std::size_t i = r * 6 + col;
            CHECK(g.x[i] == (col == 5 ? -c / h : 0.0));
            CHECK(g.y[i] == (r == 3 ? -c / h : 0.0));
        }
    }
}

TEST_CASE("gradient and divergence of zero are zero") {
    const VectorField g = gradient(Image(5, 7));
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(g.x[i] == 0.0);
        CHECK(g.y[i] == 0.0);
    }
    const Image d = divergence(VectorField(5, 7));
    for (double v : d.values()) CHECK(v == 0.0);
}

TEST_CASE("3x3 impulse: gradient is +-1 next to the centre only") {
    Image img(3, 3);
    img(1, 1) = 1.0;
    const VectorField g = gradient(img);
    // x: (1,0) sees +1 to its right, (1,1) sees -1; y: (0,1) sees +1 below, (1,1) sees -1
    for (std::size_t i = 0; i < 9; ++i) {
        const double ex = i == 3 ? 1.0 : (i == 4 ? -1.0 : 0.0);
        const double ey = i == 1 ? 1.0 : (i == 4 ? -1.0 : 0.0);
        CHECK(g.x[i] == ex);
        CHECK(g.y[i] == ey);
    }
}

TEST_CASE("a single x entry spreads to its own pixel and the right neighbour") {
    const double h = 0.25;
    VectorField p(5, 4);
    p.x[2 * 5 + 1] = 1.0;
    const Image d = divergence(p, h);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 5; ++c) {
            double expected = 0.0;
            if (r == 2 && c == 1) expected = 1.0 / h;
            if (r == 2 && c == 2) expected = -1.0 / h;
            CHECK(d(r, c) == expected);
        }
    }
}

TEST_CASE("gradient and divergence are negative adjoints") {
    std::mt19937 rng(21);
    struct Case {
        std::size_t w, h;
        double s;
    };
    for (auto [w, h, s] : {Case{64, 64, 1.0}, Case{17, 9, 0.3}, Case{1, 5, 2.0}}) {
        const Image u = test::random_image(w, h, rng, s);
        const VectorField p = test::random_field(w, h, rng);
        const VectorField gu = gradient(u);
        const Image dp = divergence(p, s);
        const double lhs = dot(gu, p);
        const double rhs = dot(u.values(), dp.values());
        const double scale = std::sqrt(dot(gu, gu) * dot(p, p));
        CHECK(std::abs(lhs + rhs) / scale < 1e-13);
    }
}

TEST_CASE("gradient norm bound") {
    CHECK(gradient_norm_bound(1.0) == 8.0);
    CHECK(gradient_norm_bound(2.0) == 2.0);
    CHECK_THROWS_AS(gradient_norm_bound(0.0), InvalidArgument);
    CHECK_THROWS_AS(gradient_norm_bound(-1.0), InvalidArgument);
}

TEST_CASE("power iteration stays below 8/h^2") {
    const double e1 = gradient_norm_squared(64, 64, 1.0, 3000, 1);
    CHECK(e1 < 8.0);
    CHECK(e1 > 7.9);
    const double e2 = gradient_norm_squared(32, 20, 2.0, 1000, 2);
    CHECK(e2 < 2.0);
}

TEST_CASE("interior gradients shift with the image") {
    std::mt19937 rng(22);
    const Image u = test::random_image(12, 10, rng);
    Image shifted(12, 10);
    for (std::size_t r = 0; r < 10; ++r) {
        for (std::size_t c = 1; c < 12; ++c) shifted(r, c) = u(r, c - 1);
    }
    const VectorField a = gradient(u);
    const VectorField b = gradient(shifted);
    for (std::size_t r = 0; r + 1 < 10; ++r) {
        for (std::size_t c = 1; c + 1 < 12; ++c) {
            CHECK(b.x[r * 12 + c] == a.x[r * 12 + c - 1]);
            CHECK(b.y[r * 12 + c] == a.y[r * 12 + c - 1]);
        }
    }
}

TEST_CASE("total variation") {
    Image img(4, 4);
    img(1, 1) = 1.0;
    // four unit differences around the impulse, two of them at the same pixel
    CHECK(total_variation(img, TvNorm::anisotropic) == doctest::Approx(4.0));
    CHECK(total_variation(img, TvNorm::isotropic) == doctest::Approx(2.0 + std::sqrt(2.0)));
    std::mt19937 rng(23);
    const Image u = test::random_image(9, 9, rng);
    CHECK(total_variation(u, TvNorm::isotropic) <= total_variation(u, TvNorm::anisotropic));
}

TEST_CASE("malformed vector fields are rejected") {
    VectorField p(3, 3);
    p.y.pop_back();
    CHECK_THROWS_AS(divergence(p), InvalidArgument);
}

}
