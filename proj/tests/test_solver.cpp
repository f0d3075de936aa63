#include <doctest.h>

#include <cmath>

#include "admm_oracle.hpp"
#include "mar/degrade.hpp"
#include "mar/error.hpp"
#include "mar/parallel.hpp"
#include "mar/phantom.hpp"
#include "mar/solver.hpp"
#include "support.hpp"

using namespace mar;

namespace {

struct Instance {
    Image truth;
    Sinogram clean;
    Sinogram capped;
    SaturationMask mask;
    double cap = 0.0;
};

// Small phantom with a metal block, capped so that the metal rays saturate.
Instance small_instance(std::size_t n, std::size_t angles) {
    Instance in;
    const std::size_t block = std::max<std::size_t>(2, n * 10 / 128);
    in.truth = add_metal(shepp_logan(n, n), MetalInsert::centered_right(n, n, block, block, 3.0));
    in.clean = project(in.truth, Geometry::uniform(angles, Geometry::default_bins(n, n)));
    in.cap = 0.9 * in.clean.max();
    std::tie(in.capped, in.mask) = cap_sinogram(in.clean, in.cap);
    return in;
}

ConstraintSpec spec_for(const Sinogram& data, const SaturationMask& mask, double cap, ConstraintMode mode) {
    ConstraintSpec spec;
    spec.data = data;
    spec.mask = mask;
    spec.cap = cap;
    spec.mode = mode;
    return spec;
}

double relative_residual(const Image& u, const Sinogram& data, const SaturationMask& mask) {
    const Sinogram au = project(u, data.geometry());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (mask.at(i)) continue;
        num += (au.values()[i] - data.values()[i]) * (au.values()[i] - data.values()[i]);
        den += data.values()[i] * data.values()[i];
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("step-size gate") {
    SolverConfig cfg;
    cfg.sigma_primal = cfg.sigma_dual = 0.999 / std::sqrt(9.0);
    CHECK_NOTHROW(validate_steps(cfg, 1.0));
    cfg.sigma_primal = cfg.sigma_dual = 1.0;
    CHECK_THROWS_AS(validate_steps(cfg, 1.0), ConfigError);
    try {
        validate_steps(cfg, 1.0);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("sigma_primal * sigma_dual < (||A||^2 + 8/h^2)^-1") != std::string::npos);
    }
    cfg.spacing = 2.0;
    cfg.sigma_primal = cfg.sigma_dual = 0.99 / std::sqrt(3.0);
    CHECK_NOTHROW(validate_steps(cfg, 1.0));
    cfg.spacing = 1.0;
    CHECK_THROWS_AS(validate_steps(cfg, 1.0), ConfigError);
}

TEST_CASE("the gate is strict at the boundary and the default step passes") {
    SolverConfig cfg;
    const double exact = 1.0 / std::sqrt(9.0);
    cfg.sigma_primal = exact * 1.0000001;
    cfg.sigma_dual = exact;
    CHECK_THROWS_AS(validate_steps(cfg, 1.0), ConfigError);
    cfg.sigma_primal = cfg.sigma_dual = 0.0;
    CHECK_NOTHROW(validate_steps(cfg, 1.0));
    const SolverConfig resolved = resolve_steps(cfg, 1.0);
    CHECK(resolved.sigma_primal == default_step(1.0, 1.0));
    CHECK(resolved.sigma_primal * resolved.sigma_dual * 9.0 < 1.0);
    CHECK(default_step(0.5, 2.0) == doctest::Approx((1 - 1e-6) / std::sqrt(0.25 + 2.0)));
}

TEST_CASE("other configuration errors") {
    SolverConfig cfg;
    cfg.max_iters = 0;
    CHECK_THROWS_AS(validate_steps(cfg, 1.0), ConfigError);
    cfg = {};
    cfg.mode = ConstraintMode::soft;
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(validate_steps(cfg, 1.0), ConfigError);
    cfg.mode = ConstraintMode::hard;
    CHECK_NOTHROW(validate_steps(cfg, 1.0));
    cfg.cap = -1.0;
    CHECK_THROWS_AS(validate_steps(cfg, 1.0), ConfigError);
    cfg = {};
    CHECK_THROWS_AS(validate_steps(cfg, 0.0), ConfigError);
    cfg.sigma_primal = -0.1;
    CHECK_THROWS_AS(validate_steps(cfg, 1.0), ConfigError);
}

TEST_CASE("zero data is a fixed point in every mode") {
    const Geometry g = Geometry::uniform(30, Geometry::default_bins(16, 16));
    const RadonOperator op = normalized_operator(g, 16, 16);
    for (auto mode : {ConstraintMode::unconstrained, ConstraintMode::soft, ConstraintMode::hard}) {
        SolverConfig cfg;
        cfg.mode = mode;
        cfg.lambda = 0.37;
        const ConstraintSpec spec = spec_for(Sinogram(g), SaturationMask(30, g.n_bins), 1.0, mode);
        ChambollePock cp(op, spec, cfg);
        for (int k = 0; k < 200; ++k) {
            cp.step();
            for (double v : cp.u().values()) REQUIRE(v == 0.0);
        }
    }
}

TEST_CASE("over-relaxation identity and ball membership hold every iteration") {
    const Instance in = small_instance(24, 40);
    const RadonOperator op = normalized_operator(in.capped.geometry(), 24, 24);
    for (auto mode : {ConstraintMode::soft, ConstraintMode::hard}) {
        SolverConfig cfg;
        cfg.mode = mode;
        cfg.lambda = 0.05;
        cfg.cap = in.cap;
        ChambollePock cp(op, spec_for(in.capped, in.mask, in.cap, mode), cfg);
        const double lambda = cfg.effective_lambda();
        for (int k = 0; k < 50; ++k) {
            const Image before = cp.u();
            cp.step();
            const auto u = cp.u().values();
            const auto ub = cp.u_bar().values();
            for (std::size_t i = 0; i < u.size(); ++i) REQUIRE(ub[i] == 2.0 * u[i] - before.values()[i]);
            const VectorField& w = cp.w();
            for (std::size_t i = 0; i < w.size(); ++i) REQUIRE(std::hypot(w.x[i], w.y[i]) <= lambda * (1 + 1e-15));
            REQUIRE(cp.u().all_finite());
        }
        CHECK(cp.iteration() == 50);
    }
}

TEST_CASE("primal objective examples") {
    const Geometry g = Geometry::uniform(10, Geometry::default_bins(8, 8));
    const RadonOperator op(g, 8, 8);
    SaturationMask mask(10, g.n_bins);
    mask.flags[3] = 1;
    const ConstraintSpec zero = spec_for(Sinogram(g), mask, 2.0, ConstraintMode::soft);
    const ObjectiveValue o = primal_objective(Image(8, 8), op, zero, 1.0);
    CHECK(o.value == 0.0);
    CHECK(o.violation == 2.0);

    std::mt19937 rng(41);
    const Image u(8, 8, 1.0, test::random_vector(64, rng));
    const ObjectiveValue a = primal_objective(u, op, zero, 1.0);
    const ObjectiveValue b = primal_objective(u, op, zero, 2.0);
    CHECK(b.value - b.data_term == doctest::Approx(2.0 * (a.value - a.data_term)).epsilon(1e-14));
    CHECK(a.tv == b.tv);

    const ObjectiveValue h = primal_objective(u, op, spec_for(Sinogram(g), mask, 2.0, ConstraintMode::hard), 1.0);
    CHECK(h.value == h.tv);
    CHECK(h.violation >= h.max_misfit);
    CHECK(h.violation >= h.bound_violation);
    CHECK(h.max_misfit > 0.0);
}

TEST_CASE("the ground truth is feasible for its own uncapped data") {
    const Image f = add_metal(shepp_logan(128, 128), MetalInsert::centered_right(128, 128));
    const Geometry g = Geometry::uniform(180, Geometry::default_bins(128, 128));
    const RadonOperator op(g, 128, 128);
    const Sinogram data = op.forward(f);
    const SaturationMask mask = detect_mask(data, 45.0);
    CHECK(mask.count() > 0);
    const ObjectiveValue o = primal_objective(f, op, spec_for(data, mask, 45.0, ConstraintMode::soft), 1.0);
    CHECK(o.violation == 0.0);
    CHECK(o.data_term == 0.0);
}

TEST_CASE("hard mode with an empty mask reproduces exact data") {
    const Image truth = shepp_logan(32, 32);
    const Sinogram data = project(truth, Geometry::uniform(60, Geometry::default_bins(32, 32)));
    SolverConfig cfg;
    cfg.mode = ConstraintMode::hard;
    cfg.cap = 10.0 * data.max();
    cfg.max_iters = 15000;
    const SolveResult r = solve(data, cfg, 32, 32);
    CHECK(relative_residual(r.image, data, SaturationMask(60, data.cols())) < 1e-2);
}

TEST_CASE("unconstrained mode drives the residual down on exact data") {
    const Image truth = shepp_logan(32, 32);
    const Sinogram data = project(truth, Geometry::uniform(60, Geometry::default_bins(32, 32)));
    SolverConfig cfg;
    cfg.mode = ConstraintMode::unconstrained;
    cfg.lambda = 1e-5;
    cfg.max_iters = 20000;
    cfg.snapshot_every = 500;
    double last = 1.0;
    SolveOptions opts;
    opts.on_snapshot = [&](const DiagnosticRecord&, const Image& u) {
        last = relative_residual(u, data, SaturationMask(60, data.cols()));
        return last >= 1e-2;
    };
    const SolveResult r = solve(data, cfg, 32, 32, opts);
    CHECK(relative_residual(r.image, data, SaturationMask(60, data.cols())) < 1e-2);
}

TEST_CASE("soft mode agrees with an ADMM reference on the objective") {
    const std::size_t n = 32;
    const Instance in = small_instance(n, 60);
    const RadonOperator op = normalized_operator(in.capped.geometry(), n, n);
    SolverConfig cfg;
    cfg.mode = ConstraintMode::soft;
    cfg.lambda = 0.02;
    cfg.cap = in.cap;
    ChambollePock cp(op, spec_for(in.capped, in.mask, in.cap, ConstraintMode::soft), cfg);
    for (int k = 0; k < 10000; ++k) cp.step();
    const ConstraintSpec& scaled = cp.scaled_spec();
    const ObjectiveValue ours = primal_objective(cp.u(), op, scaled, cfg.lambda);

    oracle::AdmmProblem p;
    p.a = oracle::dense_projector(op);
    p.b = Eigen::Map<const Eigen::VectorXd>(scaled.data.values().data(), static_cast<Eigen::Index>(scaled.data.size()));
    p.masked = scaled.mask.flags;
    p.c = scaled.cap;
    p.lambda = cfg.lambda;
    p.width = p.height = n;
    const Eigen::VectorXd ref = oracle::admm_solve(p, 2.0, 4000);
    const Image ref_img(n, n, 1.0, std::vector<double>(ref.data(), ref.data() + ref.size()));
    const ObjectiveValue theirs = primal_objective(ref_img, op, scaled, cfg.lambda);

    INFO("cp " << ours.value << " (violation " << ours.violation << "), admm " << theirs.value << " (violation "
               << theirs.violation << ")");
    CHECK(in.mask.count() > 0);
    CHECK(std::abs(ours.value - theirs.value) < 1e-5 * theirs.value);
    CHECK(ours.violation < 1e-6);
    CHECK(theirs.violation < 1e-6);
}

TEST_CASE("constraint violation improves between early and final iterates") {
    const Instance in = small_instance(48, 90);
    SolverConfig cfg;
    cfg.cap = in.cap;
    cfg.max_iters = 6000;
    cfg.snapshot_every = 500;
    const SolveResult r = solve(in.capped, cfg, 48, 48);
    const auto& recs = r.diagnostics.records;
    REQUIRE(recs.size() == 12);
    CHECK(recs.front().iteration == 500);
    CHECK(recs.back().iteration == 6000);
    for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i].iteration > recs[i - 1].iteration);
    CHECK(recs.back().violation < recs.front().violation);
    CHECK(recs.back().residual < recs.front().residual);
}

TEST_CASE("snapshots report PSNR, receive copies and can stop the run") {
    const Instance in = small_instance(24, 40);
    SolverConfig cfg;
    cfg.cap = in.cap;
    cfg.max_iters = 100;
    cfg.snapshot_every = 10;
    SolveOptions opts;
    opts.ground_truth = &in.truth;
    std::size_t calls = 0;
    opts.on_snapshot = [&](const DiagnosticRecord& rec, const Image& u) {
        ++calls;
        CHECK(rec.psnr.has_value());
        CHECK(u.width() == 24);
        return rec.iteration < 30;
    };
    const SolveResult r = solve(in.capped, cfg, 24, 24, opts);
    CHECK(r.iterations == 30);
    CHECK(calls == 3);
    CHECK(r.diagnostics.records.back().iteration == 30);

    cfg.snapshot_every = 0;
    const SolveResult quiet = solve(in.capped, cfg, 24, 24);
    REQUIRE(quiet.diagnostics.records.size() == 1);
    CHECK(quiet.diagnostics.records[0].iteration == 100);
    CHECK_FALSE(quiet.diagnostics.records[0].psnr.has_value());
    CHECK(quiet.normalization > 1.0);
}

TEST_CASE("serial solves are bitwise reproducible") {
    const Instance in = small_instance(24, 40);
    SolverConfig cfg;
    cfg.cap = in.cap;
    cfg.max_iters = 200;
    const ThreadLimit serial(1);
    const SolveResult a = solve(in.capped, cfg, 24, 24);
    const SolveResult b = solve(in.capped, cfg, 24, 24);
    CHECK(a.image == b.image);
}

TEST_CASE("non-finite iterates raise a divergence error") {
    const Geometry g = Geometry::uniform(30, Geometry::default_bins(16, 16));
    Sinogram huge(g);
    for (auto& v : huge.values()) v = 1e308;
    SolverConfig cfg;
    cfg.mode = ConstraintMode::unconstrained;
    cfg.cap = 1.0;
    cfg.max_iters = 10;
    try {
        solve(huge, cfg, 16, 16);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.iteration() >= 1);
        CHECK(std::string(e.what()).find("iteration") != std::string::npos);
    }
}

TEST_CASE("invalid inputs are rejected") {
    const Instance in = small_instance(16, 20);
    SolverConfig cfg;
    cfg.cap = in.cap;
    cfg.max_iters = 5;
    Sinogram bad = in.capped;
    bad.values()[0] = std::nan("");
    CHECK_THROWS_AS(solve(bad, cfg, 16, 16), InvalidArgument);
    const Image wrong(8, 8);
    SolveOptions opts;
    opts.ground_truth = &wrong;
    CHECK_THROWS_AS(solve(in.capped, cfg, 16, 16, opts), InvalidArgument);
    opts = {};
    opts.mask = SaturationMask(3, 3);
    CHECK_THROWS_AS(solve(in.capped, cfg, 16, 16, opts), InvalidArgument);
    cfg.cap = 0.0;
    CHECK_THROWS_AS(solve(in.capped, cfg, 16, 16), ConfigError);
    cfg.cap = in.cap;
    cfg.sigma_primal = cfg.sigma_dual = 1.0;
    CHECK_THROWS_AS(solve(in.capped, cfg, 16, 16), ConfigError);
}

}
