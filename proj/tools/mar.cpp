// mar: command-line front end for the metal artifact reduction pipeline.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numeric
// divergence, 4 I/O or file format error.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "manifest.hpp"
#include "mar/degrade.hpp"
#include "mar/error.hpp"
#include "mar/io.hpp"
#include "mar/metrics.hpp"
#include "mar/parallel.hpp"
#include "mar/phantom.hpp"
#include "mar/radon.hpp"
#include "mar/solver.hpp"

namespace fs = std::filesystem;
using namespace mar;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;
constexpr double kIterationBudgetMs = 45.0;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path manifest_path_for(const fs::path& out) { return fs::path(out.string() + ".manifest.txt"); }

std::string format_db(double db) {
    if (std::isinf(db)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", db);
    return buf;
}

const char* mode_name(ConstraintMode m) {
    switch (m) {
        case ConstraintMode::unconstrained: return "unconstrained";
        case ConstraintMode::soft: return "soft";
        case ConstraintMode::hard: return "hard";
    }
    return "?";
}

void write_diagnostics_csv(const fs::path& path, const Diagnostics& diag) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot write " + path.string());
    std::fprintf(f, "iteration,objective,violation,residual,psnr\n");
    for (const auto& r : diag.records) {
        std::fprintf(f, "%zu,%.17g,%.17g,%.17g,", r.iteration, r.objective, r.violation, r.residual);
        if (r.psnr) {
            std::fprintf(f, "%.17g\n", *r.psnr);
        } else {
            std::fprintf(f, "\n");
        }
    }
    std::fclose(f);
}

void note_timing(cli::Manifest& m, const SolveResult& r, const std::string& prefix = "") {
    m.set("time." + prefix + "solve_seconds", r.seconds);
    m.set("time." + prefix + "ms_per_iteration", r.ms_per_iteration);
    m.set("time." + prefix + "iterations_per_second", r.seconds > 0 ? static_cast<double>(r.iterations) / r.seconds : 0.0);
    if (r.ms_per_iteration > kIterationBudgetMs) {
        m.set("time." + prefix + "warning", "iteration slower than the 45 ms budget");
        std::cerr << "warning: " << r.ms_per_iteration << " ms per iteration exceeds the " << kIterationBudgetMs
                  << " ms budget\n";
    }
}

void note_final(cli::Manifest& m, const SolveResult& r, const std::string& prefix = "") {
    const auto& last = r.diagnostics.records.back();
    m.set(prefix + "iterations", r.iterations);
    m.set(prefix + "normalization_D", r.normalization);
    m.set(prefix + "final_objective", last.objective);
    m.set(prefix + "final_violation", last.violation);
    m.set(prefix + "final_residual", last.residual);
    if (last.psnr) m.set(prefix + "psnr_db", format_db(*last.psnr));
}

// --- phantom ---------------------------------------------------------------

struct PhantomArgs {
    std::size_t size = 128;
    std::vector<std::size_t> metal_pos;
    std::vector<std::size_t> metal_size;  // empty: 10x10 at 128, scaled with size
    double metal_value = 3.0;
    std::string table = "standard";
    double spacing = 1.0;
    std::string out;
    std::string png;
};

Image make_phantom(const PhantomArgs& a, MetalInsert* used = nullptr) {
    const PhantomTable table = a.table == "modified" ? PhantomTable::modified : PhantomTable::standard;
    Image img = shepp_logan(a.size, a.size, table, a.spacing);
    const std::size_t side = std::max<std::size_t>(1, (a.size * 10 + 64) / 128);
    const std::size_t rows = a.metal_size.empty() ? side : a.metal_size[0];
    const std::size_t cols = a.metal_size.empty() ? side : a.metal_size[1];
    MetalInsert insert = MetalInsert::centered_right(a.size, a.size, rows, cols, a.metal_value);
    if (!a.metal_pos.empty()) {
        insert.row0 = a.metal_pos[0];
        insert.col0 = a.metal_pos[1];
    }
    if (used) *used = insert;
    if (a.metal_value == 0.0) return img;
    return add_metal(img, insert);
}

int run_phantom(const PhantomArgs& a) {
    const auto start = Clock::now();
    MetalInsert insert;
    const Image img = make_phantom(a, &insert);
    io::write_grid(a.out, io::to_grid(img));
    if (!a.png.empty()) io::export_png(a.png, img.values(), img.height(), img.width(), 0.0, 1.0);

    cli::Manifest m;
    m.set("subcommand", "phantom");
    m.set("size", a.size);
    m.set("table", a.table);
    m.set("spacing", a.spacing);
    m.set("metal_row0", insert.row0);
    m.set("metal_col0", insert.col0);
    m.set("metal_rows", insert.rows);
    m.set("metal_cols", insert.cols);
    m.set("metal_value", a.metal_value);
    m.set("out", a.out);
    m.set("time.total_seconds", seconds_since(start));
    m.write(manifest_path_for(a.out));
    return 0;
}

// --- project / cap / noise ---------------------------------------------------

struct ProjectArgs {
    std::string in;
    std::size_t angles = 180;
    std::size_t bins = 0;
    std::string out;
    std::string png;
};

int run_project(const ProjectArgs& a) {
    const auto start = Clock::now();
    const Image img = io::image_from_grid(io::read_grid(a.in));
    const std::size_t bins = a.bins ? a.bins : Geometry::default_bins(img.width(), img.height());
    const Geometry geom = Geometry::uniform(a.angles, bins);
    const Sinogram sino = project(img, geom);
    io::write_grid(a.out, io::to_grid(sino, img.spacing()));
    if (!a.png.empty()) io::export_png(a.png, sino.values(), sino.rows(), sino.cols(), 0.0, sino.max());

    cli::Manifest m;
    m.set("subcommand", "project");
    m.set("in", a.in);
    m.set("angles", a.angles);
    m.set("bins", bins);
    m.set("max_value", sino.max());
    m.set("out", a.out);
    m.set("time.total_seconds", seconds_since(start));
    m.write(manifest_path_for(a.out));
    return 0;
}

struct CapArgs {
    std::string in;
    double cap = 45.0;
    std::string out;
    std::string mask_out;
    std::string png;
};

int run_cap(const CapArgs& a) {
    const auto start = Clock::now();
    const io::GridFile grid = io::read_grid(a.in);
    const Sinogram sino = io::sinogram_from_grid(grid);
    const auto [capped, mask] = cap_sinogram(sino, a.cap);
    io::write_grid(a.out, io::to_grid(capped, grid.spacing(), a.cap));
    if (!a.mask_out.empty()) io::write_grid(a.mask_out, io::to_grid(mask));
    if (!a.png.empty()) io::export_png(a.png, capped.values(), capped.rows(), capped.cols(), 0.0, capped.max());

    cli::Manifest m;
    m.set("subcommand", "cap");
    m.set("in", a.in);
    m.set("cap", a.cap);
    m.set("saturated_entries", mask.count());
    m.set("out", a.out);
    m.set("mask_out", a.mask_out);
    m.set("time.total_seconds", seconds_since(start));
    m.write(manifest_path_for(a.out));
    return 0;
}

struct NoiseArgs {
    std::string in;
    double level = 0.05;
    std::uint64_t seed = 1;
    std::string reference = "max";
    std::optional<double> cap;
    std::string mask_out;
    std::string out;
};

int run_noise(const NoiseArgs& a) {
    const auto start = Clock::now();
    const io::GridFile grid = io::read_grid(a.in);
    const Sinogram sino = io::sinogram_from_grid(grid);
    NoiseSpec spec;
    spec.relative_level = a.level;
    spec.seed = a.seed;
    spec.reference = a.reference == "mean" ? NoiseReference::mean : NoiseReference::max;
    Sinogram noisy = add_noise(sino, spec);

    cli::Manifest m;
    m.set("subcommand", "noise");
    m.set("in", a.in);
    m.set("level", a.level);
    m.set("seed", static_cast<std::size_t>(a.seed));
    m.set("reference", a.reference);
    double cap_slot = grid.cap();
    if (a.cap) {
        auto [capped, mask] = cap_sinogram(noisy, *a.cap);
        noisy = std::move(capped);
        cap_slot = *a.cap;
        if (!a.mask_out.empty()) io::write_grid(a.mask_out, io::to_grid(mask));
        m.set("cap", *a.cap);
        m.set("order", "noise-then-cap");
        m.set("saturated_entries", mask.count());
    }
    io::write_grid(a.out, io::to_grid(noisy, grid.spacing(), cap_slot));
    m.set("out", a.out);
    m.set("time.total_seconds", seconds_since(start));
    m.write(manifest_path_for(a.out));
    return 0;
}

// --- reconstruct -------------------------------------------------------------

struct ReconstructArgs {
    std::string in;
    std::string mask;
    std::string mode = "cp-hard";
    std::optional<double> cap;
    std::optional<double> lambda;
    std::optional<double> log_lambda;
    std::size_t iters = 80000;
    std::size_t snapshot_every = 0;
    std::string ground_truth;
    std::size_t size = 0;
    std::string tv = "iso";
    double sigma_primal = 0.0;
    double sigma_dual = 0.0;
    std::string out_dir = ".";
};

// --size, else the ground truth, else the largest square whose default
// detector is exactly this wide.
std::size_t infer_size(const ReconstructArgs& a, const std::optional<Image>& truth, std::size_t bins) {
    if (a.size) return a.size;
    if (truth) return truth->width();
    std::size_t n = 0;
    for (std::size_t k = 1; Geometry::default_bins(k, k) <= bins; ++k) {
        if (Geometry::default_bins(k, k) == bins) n = k;
    }
    if (!n) throw UsageError("cannot infer the image size from " + std::to_string(bins) + " bins; pass --size");
    return n;
}

int run_reconstruct(const ReconstructArgs& a) {
    const auto start = Clock::now();
    const io::GridFile grid = io::read_grid(a.in);
    const Sinogram sino = io::sinogram_from_grid(grid);
    std::optional<Image> truth;
    if (!a.ground_truth.empty()) truth = io::image_from_grid(io::read_grid(a.ground_truth));
    const std::size_t n = infer_size(a, truth, sino.cols());
    if (truth && (truth->width() != n || truth->height() != n)) {
        throw UsageError("--size does not match the ground truth shape");
    }
    const double spacing = std::isnan(grid.spacing()) ? 1.0 : grid.spacing();

    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    cli::Manifest m;
    m.set("subcommand", "reconstruct");
    m.set("in", a.in);
    m.set("mode", a.mode);
    m.set("size", n);
    m.set("angles", sino.rows());
    m.set("bins", sino.cols());
    m.set("spacing", spacing);

    Image recon;
    if (a.mode == "fbp" || a.mode == "bp") {
        recon = fbp_baseline(sino, n, n, a.mode == "fbp" ? FbpFilter::ram_lak : FbpFilter::none, spacing);
        if (truth) m.set("psnr_db", format_db(psnr(recon, *truth, 1.0, true)));
    } else {
        SolverConfig cfg;
        if (a.mode == "cp-hard") {
            cfg.mode = ConstraintMode::hard;
        } else if (a.mode == "cp-soft") {
            cfg.mode = ConstraintMode::soft;
        } else if (a.mode == "cp-unconstrained") {
            cfg.mode = ConstraintMode::unconstrained;
        } else {
            throw UsageError("unknown --mode " + a.mode);
        }
        if (cfg.mode != ConstraintMode::hard) {
            if (a.lambda && a.log_lambda) throw UsageError("give either --lambda or --log-lambda, not both");
            if (!a.lambda && !a.log_lambda) throw UsageError(a.mode + " requires --lambda or --log-lambda");
            cfg.lambda = a.lambda ? *a.lambda : std::pow(10.0, *a.log_lambda);
        }
        std::optional<SaturationMask> mask;
        if (!a.mask.empty()) {
            mask = io::mask_from_grid(io::read_grid(a.mask));
            if (mask->rows != sino.rows() || mask->cols != sino.cols()) {
                throw UsageError("mask shape does not match the sinogram");
            }
        }
        if (a.cap) {
            cfg.cap = *a.cap;
        } else if (mask && !std::isnan(grid.cap())) {
            cfg.cap = grid.cap();
        } else if (cfg.mode == ConstraintMode::unconstrained) {
            cfg.cap = std::max(1.0, sino.max() + 1.0);  // no constraint: any cap above the data
        } else {
            throw UsageError(a.mode + " requires --cap (or --mask with a capped sinogram)");
        }
        cfg.max_iters = a.iters;
        cfg.snapshot_every = a.snapshot_every;
        cfg.spacing = spacing;
        cfg.tv_norm = a.tv == "aniso" ? TvNorm::anisotropic : TvNorm::isotropic;
        cfg.sigma_primal = a.sigma_primal;
        cfg.sigma_dual = a.sigma_dual;
        validate_steps(cfg, 1.0);
        const SolverConfig resolved = resolve_steps(cfg, 1.0);

        SolveOptions opts;
        opts.ground_truth = truth ? &*truth : nullptr;
        opts.mask = mask;
        const SolveResult result = solve(sino, cfg, n, n, opts);
        recon = result.image;

        m.set("solver_mode", mode_name(cfg.mode));
        m.set("cap", cfg.cap);
        m.set("lambda", cfg.effective_lambda());
        m.set("sigma_primal", resolved.sigma_primal);
        m.set("sigma_dual", resolved.sigma_dual);
        m.set("tv_norm", a.tv);
        m.set("max_iters", a.iters);
        m.set("snapshot_every", a.snapshot_every);
        note_final(m, result);
        note_timing(m, result);
        write_diagnostics_csv(dir / "diagnostics.csv", result.diagnostics);
        m.set("diagnostics", (dir / "diagnostics.csv").string());
    }
    io::write_grid(dir / "recon.grid", io::to_grid(recon));
    io::export_png(dir / "recon.png", recon.values(), recon.height(), recon.width(), 0.0, 1.0);
    m.set("out_grid", (dir / "recon.grid").string());
    m.set("out_png", (dir / "recon.png").string());
    if (!a.ground_truth.empty()) m.set("ground_truth", a.ground_truth);
    m.set("time.total_seconds", seconds_since(start));
    m.write(dir / "manifest.txt");
    for (const auto& [k, v] : m.entries()) {
        if (k == "psnr_db") std::cout << "psnr_db " << v << "\n";
    }
    return 0;
}

// --- psnr / export -----------------------------------------------------------

struct PsnrArgs {
    std::string a;
    std::string b;
    double peak = 1.0;
    bool clip = false;
};

int run_psnr(const PsnrArgs& args) {
    const Image a = io::image_from_grid(io::read_grid(args.a));
    const Image b = io::image_from_grid(io::read_grid(args.b));
    if (!a.same_shape(b)) throw UsageError("images have different shapes");
    std::cout << format_db(psnr(a, b, args.peak, args.clip)) << "\n";
    return 0;
}

struct ExportArgs {
    std::string in;
    std::string png;
    std::string csv;
    std::vector<double> window;
};

int run_export(const ExportArgs& a) {
    const io::GridFile grid = io::read_grid(a.in);
    if (!a.png.empty()) {
        double lo = 0.0;
        double hi = 1.0;
        if (a.window.size() == 2) {
            lo = a.window[0];
            hi = a.window[1];
        } else if (grid.kind == io::GridKind::sinogram) {
            hi = *std::max_element(grid.values.begin(), grid.values.end());
        }
        io::export_png(a.png, grid, lo, hi);
    }
    if (!a.csv.empty()) io::export_csv(a.csv, grid.values, grid.rows, grid.cols);
    return 0;
}

// --- reproduce ---------------------------------------------------------------

struct ReproduceArgs {
    std::string out_dir = "figures";
    std::size_t size = 128;
    std::size_t angles = 180;
    double cap = 45.0;
    std::size_t iters = 80000;
    double noise = 0.05;
    std::uint64_t seed = 1;
    double log_lambda = -4.1;
    std::string table = "standard";
    std::size_t snapshot_every = 1000;
    bool skip_noisy = false;
};

int run_reproduce(const ReproduceArgs& a) {
    const auto start = Clock::now();
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    cli::Manifest m;
    m.set("subcommand", "reproduce");

    PhantomArgs pa;
    pa.size = a.size;
    pa.table = a.table;
    MetalInsert insert;
    const Image truth = make_phantom(pa, &insert);
    io::write_grid(dir / "phantom.grid", io::to_grid(truth));
    io::export_png(dir / "phantom.png", truth.values(), truth.height(), truth.width(), 0.0, 1.0);
    m.set("size", a.size);
    m.set("table", a.table);
    m.set("metal_row0", insert.row0);
    m.set("metal_col0", insert.col0);

    const Geometry geom = Geometry::uniform(a.angles, Geometry::default_bins(a.size, a.size));
    const Sinogram sino = project(truth, geom);
    io::write_grid(dir / "sinogram.grid", io::to_grid(sino));
    io::export_png(dir / "sinogram.png", sino.values(), sino.rows(), sino.cols(), 0.0, sino.max());
    m.set("angles", a.angles);
    m.set("bins", geom.n_bins);
    m.set("sinogram_max", sino.max());

    const auto [capped, mask] = cap_sinogram(sino, a.cap);
    io::write_grid(dir / "capped.grid", io::to_grid(capped, 1.0, a.cap));
    io::write_grid(dir / "mask.grid", io::to_grid(mask));
    io::export_png(dir / "capped.png", capped.values(), capped.rows(), capped.cols(), 0.0, sino.max());
    m.set("cap", a.cap);
    m.set("saturated_entries", mask.count());

    const Image fbp_clean = fbp_baseline(sino, a.size, a.size, FbpFilter::ram_lak);
    const Image fbp_capped = fbp_baseline(capped, a.size, a.size, FbpFilter::ram_lak);
    io::export_png(dir / "fbp_uncapped.png", fbp_clean.values(), a.size, a.size, 0.0, 1.0);
    io::export_png(dir / "fbp_capped.png", fbp_capped.values(), a.size, a.size, 0.0, 1.0);
    m.set("fbp_uncapped.psnr_db", format_db(psnr(fbp_clean, truth)));
    m.set("fbp_capped.psnr_db", format_db(psnr(fbp_capped, truth)));

    auto progress = [](const char* label) {
        return [label](const DiagnosticRecord& r, const Image&) {
            std::cerr << label << " k=" << r.iteration << " violation=" << r.violation
                      << " psnr=" << (r.psnr ? format_db(*r.psnr) : std::string("-")) << "\n";
            return true;
        };
    };

    SolverConfig cfg;
    cfg.mode = ConstraintMode::hard;
    cfg.cap = a.cap;
    cfg.max_iters = a.iters;
    cfg.snapshot_every = a.snapshot_every;
    SolveOptions opts;
    opts.ground_truth = &truth;
    opts.on_snapshot = progress("hard");
    const SolveResult hard = solve(capped, cfg, a.size, a.size, opts);
    io::write_grid(dir / "recon_hard.grid", io::to_grid(hard.image));
    io::export_png(dir / "recon_hard.png", hard.image.values(), a.size, a.size, 0.0, 1.0);
    write_diagnostics_csv(dir / "diagnostics_hard.csv", hard.diagnostics);
    m.set("iters", a.iters);
    note_final(m, hard, "hard.");
    note_timing(m, hard, "hard.");

    if (!a.skip_noisy) {
        NoiseSpec ns;
        ns.relative_level = a.noise;
        ns.seed = a.seed;
        const Sinogram noisy = add_noise(sino, ns);
        const auto [noisy_capped, noisy_mask] = cap_sinogram(noisy, a.cap);
        io::write_grid(dir / "noisy_capped.grid", io::to_grid(noisy_capped, 1.0, a.cap));
        m.set("noise_level", a.noise);
        m.set("noise_seed", static_cast<std::size_t>(a.seed));
        m.set("log_lambda", a.log_lambda);

        SolverConfig soft = cfg;
        soft.lambda = std::pow(10.0, a.log_lambda);
        for (auto mode : {ConstraintMode::unconstrained, ConstraintMode::soft}) {
            soft.mode = mode;
            const std::string name = mode == ConstraintMode::soft ? "soft" : "unconstrained";
            opts.on_snapshot = progress(mode == ConstraintMode::soft ? "soft" : "unconstrained");
            const SolveResult r = solve(noisy_capped, soft, a.size, a.size, opts);
            io::write_grid(dir / ("recon_" + name + ".grid"), io::to_grid(r.image));
            io::export_png(dir / ("recon_" + name + ".png"), r.image.values(), a.size, a.size, 0.0, 1.0);
            write_diagnostics_csv(dir / ("diagnostics_" + name + ".csv"), r.diagnostics);
            note_final(m, r, name + ".");
            note_timing(m, r, name + ".");
        }
    }
    m.set("time.total_seconds", seconds_since(start));
    m.write(dir / "manifest.txt");
    for (const auto& [k, v] : m.entries()) {
        if (k.find("psnr_db") != std::string::npos) std::cout << k << " " << v << "\n";
    }
    return 0;
}

std::size_t thread_count(std::size_t flag) {
    if (flag) return flag;
    if (const char* env = std::getenv("MAR_THREADS")) {
        try {
            return static_cast<std::size_t>(std::stoul(env));
        } catch (const std::exception&) {
            throw UsageError(std::string("MAR_THREADS is not a number: ") + env);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metal artifact reduction by TV-regularized reconstruction with sinogram inequality constraints"};
    app.require_subcommand(1);
    std::size_t threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: MAR_THREADS or all cores; 1 = serial)");

    PhantomArgs phantom_args;
    auto* phantom_cmd = app.add_subcommand("phantom", "Write a Shepp-Logan phantom with a metal block");
    phantom_cmd->add_option("--size", phantom_args.size, "Image width and height")->check(CLI::Range(8, 1 << 14));
    phantom_cmd->add_option("--metal-pos", phantom_args.metal_pos, "Top-left row,col of the block")
        ->expected(2)
        ->delimiter(',');
    phantom_cmd->add_option("--metal-size", phantom_args.metal_size, "Block rows,cols")->expected(2)->delimiter(',');
    phantom_cmd->add_option("--metal-value", phantom_args.metal_value, "Density added on the block")
        ->check(CLI::NonNegativeNumber);
    phantom_cmd->add_option("--table", phantom_args.table, "Ellipse intensities")
        ->check(CLI::IsMember({"standard", "modified"}));
    phantom_cmd->add_option("--spacing", phantom_args.spacing, "Grid step h")->check(CLI::PositiveNumber);
    phantom_cmd->add_option("--out", phantom_args.out, "Output grid file")->required();
    phantom_cmd->add_option("--png", phantom_args.png, "Also write a PNG (window 0,1)");

    ProjectArgs project_args;
    auto* project_cmd = app.add_subcommand("project", "Radon transform of an image");
    project_cmd->add_option("--in", project_args.in, "Input image grid")->required();
    project_cmd->add_option("--angles", project_args.angles, "Number of angles over [0, pi)")->check(CLI::PositiveNumber);
    project_cmd->add_option("--bins", project_args.bins, "Detector bins (default: fits the diagonal)");
    project_cmd->add_option("--out", project_args.out, "Output sinogram grid")->required();
    project_cmd->add_option("--png", project_args.png, "Also write a PNG");

    CapArgs cap_args;
    auto* cap_cmd = app.add_subcommand("cap", "Saturate a sinogram at a threshold");
    cap_cmd->add_option("--in", cap_args.in, "Input sinogram grid")->required();
    cap_cmd->add_option("--cap", cap_args.cap, "Threshold C")->required()->check(CLI::PositiveNumber);
    cap_cmd->add_option("--out", cap_args.out, "Output sinogram grid")->required();
    cap_cmd->add_option("--mask-out", cap_args.mask_out, "Write the saturation mask (0/1 sinogram grid)");
    cap_cmd->add_option("--png", cap_args.png, "Also write a PNG");

    NoiseArgs noise_args;
    auto* noise_cmd = app.add_subcommand("noise", "Add Gaussian noise to a sinogram");
    noise_cmd->add_option("--in", noise_args.in, "Input sinogram grid")->required();
    noise_cmd->add_option("--level", noise_args.level, "Noise std relative to the reference")
        ->check(CLI::NonNegativeNumber);
    noise_cmd->add_option("--seed", noise_args.seed, "Generator seed");
    noise_cmd->add_option("--reference", noise_args.reference, "Reference scale")->check(CLI::IsMember({"max", "mean"}));
    noise_cmd->add_option("--cap", noise_args.cap, "Cap after adding noise")->check(CLI::PositiveNumber);
    noise_cmd->add_option("--mask-out", noise_args.mask_out, "Mask output when --cap is given");
    noise_cmd->add_option("--out", noise_args.out, "Output sinogram grid")->required();

    ReconstructArgs rec_args;
    auto* rec_cmd = app.add_subcommand("reconstruct", "Reconstruct an image from a sinogram");
    rec_cmd->add_option("--in", rec_args.in, "Input sinogram grid")->required();
    rec_cmd->add_option("--mask", rec_args.mask, "Saturation mask grid (default: data >= cap)");
    rec_cmd->add_option("--mode", rec_args.mode, "Reconstruction method")
        ->check(CLI::IsMember({"fbp", "bp", "cp-unconstrained", "cp-soft", "cp-hard"}));
    rec_cmd->add_option("--cap", rec_args.cap, "Threshold C")->check(CLI::PositiveNumber);
    rec_cmd->add_option("--lambda", rec_args.lambda, "TV weight")->check(CLI::PositiveNumber);
    rec_cmd->add_option("--log-lambda", rec_args.log_lambda, "log10 of the TV weight");
    rec_cmd->add_option("--iters", rec_args.iters, "Iteration budget")->check(CLI::PositiveNumber);
    rec_cmd->add_option("--snapshot-every", rec_args.snapshot_every, "Diagnostics interval (0: final only)");
    rec_cmd->add_option("--ground-truth", rec_args.ground_truth, "Reference image for PSNR");
    rec_cmd->add_option("--size", rec_args.size, "Reconstruction width and height (default: ground truth, else inferred from the bins)");
    rec_cmd->add_option("--tv", rec_args.tv, "Pointwise TV norm")->check(CLI::IsMember({"iso", "aniso"}));
    rec_cmd->add_option("--sigma-primal", rec_args.sigma_primal, "Primal step (default: largest admissible)");
    rec_cmd->add_option("--sigma-dual", rec_args.sigma_dual, "Dual step (default: largest admissible)");
    rec_cmd->add_option("--out-dir", rec_args.out_dir, "Output directory");

    PsnrArgs psnr_args;
    auto* psnr_cmd = app.add_subcommand("psnr", "PSNR between two images in dB");
    psnr_cmd->add_option("--a", psnr_args.a, "First image grid")->required();
    psnr_cmd->add_option("--b", psnr_args.b, "Second image grid")->required();
    psnr_cmd->add_option("--peak", psnr_args.peak, "Peak value")->check(CLI::PositiveNumber);
    psnr_cmd->add_flag("--clip", psnr_args.clip, "Clip both images to [0, peak] first");

    ExportArgs export_args;
    auto* export_cmd = app.add_subcommand("export", "Convert a grid file to PNG and/or CSV");
    export_cmd->add_option("--in", export_args.in, "Input grid")->required();
    export_cmd->add_option("--png", export_args.png, "PNG output");
    export_cmd->add_option("--csv", export_args.csv, "CSV output");
    export_cmd->add_option("--window", export_args.window, "lo,hi display window")->expected(2)->delimiter(',');

    ReproduceArgs repro_args;
    auto* repro_cmd = app.add_subcommand("reproduce", "Run the full synthetic experiment end to end");
    repro_cmd->add_option("--out-dir", repro_args.out_dir, "Output directory");
    repro_cmd->add_option("--size", repro_args.size, "Phantom size")->check(CLI::Range(8, 1 << 14));
    repro_cmd->add_option("--angles", repro_args.angles, "Number of angles")->check(CLI::PositiveNumber);
    repro_cmd->add_option("--cap", repro_args.cap, "Threshold C")->check(CLI::PositiveNumber);
    repro_cmd->add_option("--iters", repro_args.iters, "Iterations per reconstruction")->check(CLI::PositiveNumber);
    repro_cmd->add_option("--noise", repro_args.noise, "Relative noise level")->check(CLI::NonNegativeNumber);
    repro_cmd->add_option("--seed", repro_args.seed, "Noise seed");
    repro_cmd->add_option("--log-lambda", repro_args.log_lambda, "log10 TV weight for the noisy case");
    repro_cmd->add_option("--table", repro_args.table, "Ellipse intensities")
        ->check(CLI::IsMember({"standard", "modified"}));
    repro_cmd->add_option("--snapshot-every", repro_args.snapshot_every, "Diagnostics interval");
    repro_cmd->add_flag("--skip-noisy", repro_args.skip_noisy, "Only run the noise-free hard-constraint case");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const ThreadLimit limit(thread_count(threads));
        if (*phantom_cmd) return run_phantom(phantom_args);
        if (*project_cmd) return run_project(project_args);
        if (*cap_cmd) return run_cap(cap_args);
        if (*noise_cmd) return run_noise(noise_args);
        if (*rec_cmd) return run_reconstruct(rec_args);
        if (*psnr_cmd) return run_psnr(psnr_args);
        if (*export_cmd) return run_export(export_args);
        if (*repro_cmd) return run_reproduce(repro_args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DivergenceError& e) {
        std::cerr << "diverged: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
