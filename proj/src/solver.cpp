#include "mar/solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "mar/error.hpp"
#include "mar/metrics.hpp"

namespace mar {

double default_step(double norm_bound_a, double spacing) {
    return (1.0 - 1e-6) / std::sqrt(norm_bound_a * norm_bound_a + gradient_norm_bound(spacing));
}

SolverConfig resolve_steps(SolverConfig cfg, double norm_bound_a) {
    if (!(cfg.spacing > 0.0)) throw ConfigError("solver: grid spacing h must be positive");
    const double fallback = default_step(norm_bound_a, cfg.spacing);
    if (cfg.sigma_primal == 0.0) cfg.sigma_primal = fallback;
    if (cfg.sigma_dual == 0.0) cfg.sigma_dual = fallback;
    return cfg;
}

void validate_steps(const SolverConfig& raw, double norm_bound_a) {
    if (!(norm_bound_a > 0.0) || !std::isfinite(norm_bound_a)) {
        throw ConfigError("solver: operator norm bound must be positive and finite");
    }
    const SolverConfig cfg = resolve_steps(raw, norm_bound_a);
    if (cfg.max_iters < 1) throw ConfigError("solver: max_iters must be at least 1");
    if (cfg.mode != ConstraintMode::hard && !(cfg.lambda > 0.0)) throw ConfigError("solver: lambda must be positive");
    if (!(cfg.cap > 0.0)) throw ConfigError("solver: cap C must be positive");
    if (!(cfg.sigma_primal > 0.0) || !(cfg.sigma_dual > 0.0)) throw ConfigError("solver: step sizes must be positive");
    const double lhs = cfg.sigma_primal * cfg.sigma_dual;
    const double rhs = 1.0 / (norm_bound_a * norm_bound_a + gradient_norm_bound(cfg.spacing));
    if (!(lhs < rhs)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "solver: step sizes violate sigma_primal * sigma_dual < (||A||^2 + 8/h^2)^-1: " << cfg.sigma_primal
            << " * " << cfg.sigma_dual << " = " << lhs << " >= " << rhs << " (||A|| <= " << norm_bound_a
            << ", h = " << cfg.spacing << ")";
        throw ConfigError(msg.str());
    }
}

ObjectiveValue primal_objective(const Image& u, const RadonOperator& op, const ConstraintSpec& spec, double lambda,
                                TvNorm norm) {
    spec.validate();
    if (u.width() != op.width() || u.height() != op.height() || spec.data.size() != op.sinogram_size()) {
        throw InvalidArgument("primal_objective: shapes of image, operator and data disagree");
    }
    std::vector<double> au(op.sinogram_size());
    op.forward(u.values(), au);
    const auto u0 = spec.data.values();
    const bool use_mask = spec.mode != ConstraintMode::unconstrained;

    ObjectiveValue out;
    double sq = 0.0;
    double bound_violation = 0.0;
    double equality_violation = 0.0;
    for (std::size_t i = 0; i < au.size(); ++i) {
        if (use_mask && spec.mask.at(i)) {
            bound_violation = std::max(bound_violation, spec.cap - au[i]);
        } else {
            const double r = au[i] - u0[i];
            sq += r * r;
            equality_violation = std::max(equality_violation, std::abs(r));
        }
    }
    out.tv = total_variation(u, norm);
    out.data_term = 0.5 * sq;
    out.residual = std::sqrt(sq);
    if (spec.mode == ConstraintMode::hard) {
        out.value = out.tv;
        out.violation = std::max(bound_violation, equality_violation);
    } else {
        out.value = out.data_term + lambda * out.tv;
        out.violation = bound_violation;
    }
    out.bound_violation = bound_violation;
    out.max_misfit = equality_violation;
    return out;
}

ChambollePock::ChambollePock(RadonOperator op, ConstraintSpec spec, const SolverConfig& cfg, double norm_bound_a)
    : op_(std::move(op)), scaled_(std::move(spec)) {
    validate_steps(cfg, norm_bound_a);
    cfg_ = resolve_steps(cfg, norm_bound_a);
    scaled_.validate();
    if (!(scaled_.data.geometry() == op_.geometry())) {
        throw InvalidArgument("ChambollePock: data geometry does not match the operator");
    }
    if (op_.spacing() != cfg_.spacing) {
        throw InvalidArgument("ChambollePock: operator and configuration disagree on h");
    }
    scaled_.mode = cfg_.mode;
    const double scale = op_.scale();
    for (auto& x : scaled_.data.values()) x *= scale;
    scaled_.cap *= scale;
    lambda_ = cfg_.effective_lambda();

    const std::size_t w = op_.width();
    const std::size_t h = op_.height();
    u_ = Image(w, h, cfg_.spacing);
    u_bar_ = u_;
    v_.assign(op_.sinogram_size(), 0.0);
    w_ = VectorField(w, h);
    grad_ = VectorField(w, h);
    sino_.assign(op_.sinogram_size(), 0.0);
    back_.assign(op_.image_size(), 0.0);
    div_.assign(op_.image_size(), 0.0);
}

void ChambollePock::step() {
    const double sd = cfg_.sigma_dual;
    const double sp = cfg_.sigma_primal;

    // TV dual
    gradient_into(u_bar_.values(), op_.width(), op_.height(), cfg_.spacing, grad_);
    for (std::size_t i = 0; i < w_.size(); ++i) {
        w_.x[i] += sd * grad_.x[i];
        w_.y[i] += sd * grad_.y[i];
    }
    resolvent_tv_inplace(w_, lambda_, cfg_.tv_norm);

    // data dual
    op_.forward(u_bar_.values(), sino_);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += sd * sino_[i];
    resolvent_data(v_, scaled_, sd, v_);

    // primal (F = 0, identity resolvent) and over-relaxation
    divergence_into(w_, cfg_.spacing, div_);
    op_.adjoint(v_, back_);
    auto u = u_.values();
    auto u_bar = u_bar_.values();
    double checksum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double u_new = u[i] + sp * div_[i] - sp * back_[i];
        u_bar[i] = 2.0 * u_new - u[i];
        u[i] = u_new;
        checksum += u_new;
    }
    ++iteration_;
    if (!std::isfinite(checksum)) {
        throw DivergenceError("solver diverged: non-finite primal iterate at iteration " + std::to_string(iteration_),
                              static_cast<std::int64_t>(iteration_));
    }
}

DiagnosticRecord ChambollePock::diagnose(const Image* ground_truth) const {
    const ObjectiveValue obj = primal_objective(u_, op_, scaled_, lambda_, cfg_.tv_norm);
    const double d = op_.normalization();
    DiagnosticRecord rec;
    rec.iteration = iteration_;
    rec.objective = obj.value;
    rec.violation = obj.bound_violation * d;
    rec.residual = obj.residual * d;
    if (ground_truth) rec.psnr = psnr(u_, *ground_truth, 1.0, true);
    return rec;
}

SolveResult solve(const Sinogram& data, const SolverConfig& cfg, const RadonOperator& op, const SolveOptions& options) {
    if (!data.all_finite()) throw InvalidArgument("solve: data contains non-finite values");
    ConstraintSpec spec;
    spec.data = data;
    spec.cap = cfg.cap;
    spec.mode = cfg.mode;
    if (!(cfg.cap > 0.0)) throw ConfigError("solver: cap C must be positive");
    spec.mask = options.mask ? *options.mask : detect_mask(data, cfg.cap);
    if (options.ground_truth && (options.ground_truth->width() != op.width() ||
                                 options.ground_truth->height() != op.height())) {
        throw InvalidArgument("solve: ground truth shape does not match the reconstruction");
    }

    ChambollePock cp(op, std::move(spec), cfg);
    SolveResult result;
    result.normalization = op.normalization();

    const auto start = std::chrono::steady_clock::now();
    const std::size_t every = cfg.snapshot_every;
    bool stopped = false;
    while (cp.iteration() < cfg.max_iters && !stopped) {
        cp.step();
        if (every > 0 && cp.iteration() % every == 0 && cp.iteration() < cfg.max_iters) {
            result.diagnostics.records.push_back(cp.diagnose(options.ground_truth));
            if (options.on_snapshot && !options.on_snapshot(result.diagnostics.records.back(), Image(cp.u()))) {
                stopped = true;
            }
        }
    }
    const auto stop = std::chrono::steady_clock::now();
    result.seconds = std::chrono::duration<double>(stop - start).count();
    result.iterations = cp.iteration();
    result.ms_per_iteration = result.iterations ? 1e3 * result.seconds / static_cast<double>(result.iterations) : 0.0;

    if (result.diagnostics.records.empty() || result.diagnostics.records.back().iteration != cp.iteration()) {
        result.diagnostics.records.push_back(cp.diagnose(options.ground_truth));
        if (options.on_snapshot && !stopped) options.on_snapshot(result.diagnostics.records.back(), Image(cp.u()));
    }
    result.image = cp.u();
    return result;
}

SolveResult solve(const Sinogram& data, const SolverConfig& cfg, std::size_t width, std::size_t height,
                  const SolveOptions& options) {
    const RadonOperator op =
        normalized_operator(data.geometry(), width, height, cfg.spacing, cfg.norm_iters, cfg.norm_safety);
    return solve(data, cfg, op, options);
}

}  // namespace mar
