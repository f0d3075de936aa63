#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mar/diffops.hpp"
#include "mar/geometry.hpp"
#include "mar/image.hpp"
#include "mar/proximal.hpp"
#include "mar/radon.hpp"

namespace mar {

struct SolverConfig {
    ConstraintMode mode = ConstraintMode::hard;
    double lambda = 1.0;  // ignored in hard mode, which uses 1
    double cap = 45.0;
    double sigma_primal = 0.0;  // 0 selects default_step
    double sigma_dual = 0.0;    // 0 selects default_step
    std::size_t max_iters = 1000;
    double spacing = 1.0;
    std::size_t snapshot_every = 0;  // 0: only the final record
    TvNorm tv_norm = TvNorm::isotropic;
    std::size_t norm_iters = kDefaultNormIterations;
    double norm_safety = kDefaultNormSafety;

    double effective_lambda() const { return mode == ConstraintMode::hard ? 1.0 : lambda; }
};

/// (||A||^2 + 8/h^2)^(-1/2) shrunk by 1e-6, usable for both steps.
double default_step(double norm_bound_a, double spacing);

/// Throws ConfigError unless sigma_primal * sigma_dual * (||A||^2 + 8/h^2) < 1
/// and the remaining fields are in range. Zero steps are checked as their
/// default_step replacement.
void validate_steps(const SolverConfig& cfg, double norm_bound_a);

/// Returns cfg with zero step sizes replaced by default_step.
SolverConfig resolve_steps(SolverConfig cfg, double norm_bound_a);

struct ObjectiveValue {
    double value = 0.0;      // data term + lambda * TV (TV alone in hard mode)
    double violation = 0.0;        // bound_violation, and in hard mode also max_misfit
    double bound_violation = 0.0;  // max over the mask of (C - Au)_+
    double max_misfit = 0.0;       // max |Au - U0| off the mask
    double data_term = 0.0;  // 1/2 ||Au - U0||^2 off the mask (everywhere when unconstrained)
    double tv = 0.0;
    double residual = 0.0;  // ||Au - U0|| off the mask
};

/// Evaluates the primal objective for u with the operator and data as given
/// (scaled or unscaled, both must agree). The indicator terms are reported
/// through `violation` instead of +inf.
ObjectiveValue primal_objective(const Image& u, const RadonOperator& op, const ConstraintSpec& spec, double lambda,
                                TvNorm norm = TvNorm::isotropic);

struct DiagnosticRecord {
    std::size_t iteration = 0;
    double objective = 0.0;  // in the normalized problem the solver minimizes
    double violation = 0.0;  // in sinogram data units
    double residual = 0.0;   // in sinogram data units
    std::optional<double> psnr;
};

struct Diagnostics {
    std::vector<DiagnosticRecord> records;
};

/// Snapshot callback. Receives a copy of the current iterate; return false to stop early.
using SnapshotCallback = std::function<bool(const DiagnosticRecord&, const Image&)>;

/// Primal-dual iteration over K = [A; grad] for one problem instance.
///
/// The operator must already be normalized; `spec` holds the measured data
/// in the same units as the unnormalized projector and is rescaled
/// internally. Each step performs, in order: TV-dual ascent and projection,
/// data-dual ascent and resolvent, primal descent, over-relaxation.
class ChambollePock {
public:
    ChambollePock(RadonOperator op, ConstraintSpec spec, const SolverConfig& cfg, double norm_bound_a = 1.0);

    void step();

    std::size_t iteration() const noexcept { return iteration_; }
    const Image& u() const noexcept { return u_; }
    const Image& u_bar() const noexcept { return u_bar_; }
    const std::vector<double>& v() const noexcept { return v_; }
    const VectorField& w() const noexcept { return w_; }
    const SolverConfig& config() const noexcept { return cfg_; }
    const RadonOperator& op() const noexcept { return op_; }
    const ConstraintSpec& scaled_spec() const noexcept { return scaled_; }

    DiagnosticRecord diagnose(const Image* ground_truth = nullptr) const;

private:
    RadonOperator op_;
    ConstraintSpec scaled_;
    SolverConfig cfg_;
    double lambda_;
    std::size_t iteration_ = 0;

    Image u_;
    Image u_bar_;
    std::vector<double> v_;
    VectorField w_;

    // scratch
    VectorField grad_;
    std::vector<double> sino_;
    std::vector<double> back_;
    std::vector<double> div_;
};

struct SolveOptions {
    const Image* ground_truth = nullptr;
    std::optional<SaturationMask> mask;  // default: detect_mask(data, cfg.cap)
    SnapshotCallback on_snapshot;
};

struct SolveResult {
    Image image;
    Diagnostics diagnostics;
    std::size_t iterations = 0;
    double normalization = 1.0;  // D
    double seconds = 0.0;        // iteration loop only
    double ms_per_iteration = 0.0;
};

/// Builds the normalized projector for the data's geometry and runs
/// cfg.max_iters iterations from u = v = w = 0.
SolveResult solve(const Sinogram& data, const SolverConfig& cfg, std::size_t width, std::size_t height,
                  const SolveOptions& options = {});

/// As above with a caller-provided normalized projector.
SolveResult solve(const Sinogram& data, const SolverConfig& cfg, const RadonOperator& op,
                  const SolveOptions& options = {});

}  // namespace mar
