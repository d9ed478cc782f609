#include "ledtap/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace ledtap::dsp {

namespace {

// The FFTW planner is not reentrant.
std::mutex planner;

}  // namespace


double quantile(std::span<const double> x, double q) {
    const double qs[] = {q};
    return quantiles(x, qs)[0];
}

std::vector<double> quantiles(std::span<const double> x, std::span<const double> qs) {
    std::vector<double> out(qs.size(), 0.0);
    if (x.empty()) return out;
    std::vector<double> v(x.begin(), x.end());
    for (std::size_t j = 0; j < qs.size(); ++j) {
        const double pos = std::clamp(qs[j], 0.0, 1.0) * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
        const double a = v[lo];
        if (lo + 1 >= v.size()) {
            out[j] = a;
            continue;
        }
        const double b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
        out[j] = a + (pos - static_cast<double>(lo)) * (b - a);
    }
    return out;
}

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double rms(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

double robust_noise_sigma(std::span<const double> x) {
    if (x.size() < 3) return 0.0;
    std::vector<double> d(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = std::abs(x[i + 1] - x[i]);
    const double med = quantile(d, 0.5);
    // Median of |N(0, 2 sigma^2)| is 0.6745 sqrt(2) sigma.
    return med / (0.6744897501960817 * std::numbers::sqrt2);
}

void one_pole_lowpass(std::vector<double>& x, double fc, double fs) {
    if (x.empty()) return;
    const double a = 1.0 - std::exp(-2.0 * std::numbers::pi * fc / fs);
    double y = x[0];
    for (auto& v : x) {
        y += a * (v - y);
        v = y;
    }
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<double> power_spectrum(std::span<const double> x, std::size_t fft_size) {
    if (fft_size < x.size()) throw std::invalid_argument("power_spectrum: fft size smaller than input");
    double* in = fftw_alloc_real(fft_size);
    fftw_complex* out = fftw_alloc_complex(fft_size / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(planner);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(fft_size), in, out, FFTW_ESTIMATE);
    }
    std::copy(x.begin(), x.end(), in);
    std::fill(in + x.size(), in + fft_size, 0.0);
    fftw_execute(plan);
    std::vector<double> p(fft_size / 2 + 1);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    {
        std::lock_guard lock(planner);
        fftw_destroy_plan(plan);
    }
    fftw_free(out);
    fftw_free(in);
    return p;
}

std::vector<double> cross_correlation(std::span<const double> a, std::span<const double> b, long max_lag) {
    if (a.size() != b.size()) throw std::invalid_argument("cross_correlation: length mismatch");
    const std::size_t n = a.size();
    const std::size_t N = next_pow2(2 * n);
    const std::size_t bins = N / 2 + 1;
    double* buf = fftw_alloc_real(N);
    fftw_complex* fa = fftw_alloc_complex(bins);
    fftw_complex* fb = fftw_alloc_complex(bins);
    fftw_plan pa, pb, inv;
    {
        std::lock_guard lock(planner);
        pa = fftw_plan_dft_r2c_1d(static_cast<int>(N), buf, fa, FFTW_ESTIMATE);
        pb = fftw_plan_dft_r2c_1d(static_cast<int>(N), buf, fb, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(N), fa, buf, FFTW_ESTIMATE);
    }
    std::fill(buf, buf + N, 0.0);
    std::copy(a.begin(), a.end(), buf);
    fftw_execute(pa);
    std::fill(buf, buf + N, 0.0);
    std::copy(b.begin(), b.end(), buf);
    fftw_execute(pb);
    for (std::size_t k = 0; k < bins; ++k) {
        const double re = fa[k][0] * fb[k][0] + fa[k][1] * fb[k][1];
        const double im = fa[k][1] * fb[k][0] - fa[k][0] * fb[k][1];
        fa[k][0] = re;
        fa[k][1] = im;
    }
    fftw_execute(inv);
    std::vector<double> c(static_cast<std::size_t>(2 * max_lag + 1));
    for (long lag = -max_lag; lag <= max_lag; ++lag) {
        const std::size_t idx = lag >= 0 ? static_cast<std::size_t>(lag) : N - static_cast<std::size_t>(-lag);
        c[static_cast<std::size_t>(lag + max_lag)] = buf[idx] / static_cast<double>(N);
    }
    {
        std::lock_guard lock(planner);
        fftw_destroy_plan(pa);
        fftw_destroy_plan(pb);
        fftw_destroy_plan(inv);
    }
    fftw_free(fb);
    fftw_free(fa);
    fftw_free(buf);
    return c;
}

}  // namespace ledtap::dsp
