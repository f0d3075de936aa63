#include "mar/metrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include "mar/error.hpp"
#include "mar/radon.hpp"

namespace mar {

double psnr(const Image& u, const Image& ref, double peak, bool clip) {
    if (!u.same_shape(ref)) throw InvalidArgument("psnr: image shapes differ");
    if (!(peak > 0.0)) throw InvalidArgument("psnr: peak must be positive");
    const auto a = u.values();
    const auto b = ref.values();
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = clip ? std::clamp(a[i], 0.0, peak) : a[i];
        const double y = clip ? std::clamp(b[i], 0.0, peak) : b[i];
        sq += (x - y) * (x - y);
    }
    if (sq == 0.0) return kInfinitePsnr;
    return 10.0 * std::log10(peak * peak * static_cast<double>(a.size()) / sq);
}

namespace {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

std::size_t padded_length(std::size_t n_bins) {
    std::size_t n = 64;
    while (n < 2 * n_bins) n *= 2;
    return n;
}

// Frequency response of the doubled spatial Ram-Lak kernel, length n (real).
std::vector<double> ramp_response(std::size_t n) {
    std::unique_ptr<double[], FftwFree> kernel(fftw_alloc_real(n));
    std::unique_ptr<fftw_complex[], FftwFree> spectrum(fftw_alloc_complex(n / 2 + 1));
    for (std::size_t i = 0; i < n; ++i) kernel[i] = 0.0;
    kernel[0] = 0.25;
    for (std::size_t k = 1; k <= n / 2; k += 2) {
        const double v = -1.0 / std::pow(std::numbers::pi * static_cast<double>(k), 2);
        kernel[k] = v;
        kernel[n - k] = v;
    }
    Plan plan(fftw_plan_dft_r2c_1d(static_cast<int>(n), kernel.get(), spectrum.get(), FFTW_ESTIMATE));
    fftw_execute(plan.get());
    std::vector<double> response(n / 2 + 1);
    for (std::size_t i = 0; i < response.size(); ++i) response[i] = 2.0 * spectrum[i][0];
    return response;
}

}  // namespace

Image fbp_baseline(const Sinogram& sino, std::size_t width, std::size_t height, FbpFilter filter, double spacing) {
    const Geometry& geom = sino.geometry();
    Sinogram filtered = sino;
    if (filter == FbpFilter::ram_lak) {
        const std::size_t n_bins = geom.n_bins;
        const std::size_t n = padded_length(n_bins);
        const std::vector<double> response = ramp_response(n);
        std::unique_ptr<double[], FftwFree> row(fftw_alloc_real(n));
        std::unique_ptr<fftw_complex[], FftwFree> spectrum(fftw_alloc_complex(n / 2 + 1));
        Plan forward(fftw_plan_dft_r2c_1d(static_cast<int>(n), row.get(), spectrum.get(), FFTW_ESTIMATE));
        Plan inverse(fftw_plan_dft_c2r_1d(static_cast<int>(n), spectrum.get(), row.get(), FFTW_ESTIMATE));
        for (std::size_t k = 0; k < geom.n_angles(); ++k) {
            for (std::size_t i = 0; i < n; ++i) row[i] = i < n_bins ? sino(k, i) : 0.0;
            fftw_execute(forward.get());
            for (std::size_t i = 0; i < response.size(); ++i) {
                spectrum[i][0] *= response[i];
                spectrum[i][1] *= response[i];
            }
            fftw_execute(inverse.get());
            // c2r is unnormalized
            for (std::size_t i = 0; i < n_bins; ++i) filtered(k, i) = row[i] / static_cast<double>(n);
        }
    }
    Image out = backproject(filtered, width, height, spacing);
    const double factor = std::numbers::pi / (2.0 * static_cast<double>(geom.n_angles())) / (spacing * spacing);
    for (auto& v : out.values()) v *= factor;
    return out;
}

}  // namespace mar
