#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ledtap::dsp {

/// Linear-interpolated quantile, q in [0, 1]. Empty input returns 0.
double quantile(std::span<const double> x, double q);

/// Several quantiles from one working copy.
std::vector<double> quantiles(std::span<const double> x, std::span<const double> qs);

double mean(std::span<const double> x);
double rms(std::span<const double> x);

/// Noise sigma from the median absolute first difference; insensitive to steps.
double robust_noise_sigma(std::span<const double> x);

/// In-place single-pole low-pass, y[n] = y[n-1] + a (x[n] - y[n-1]) with
/// a = 1 - exp(-2 pi fc / fs). The filter starts settled at x[0].
void one_pole_lowpass(std::vector<double>& x, double fc, double fs);

/// |X(f)|^2 of a real series zero-padded to `fft_size` (power of two, >= x.size()).
/// Bin k sits at k / (fft_size * dt).
std::vector<double> power_spectrum(std::span<const double> x, std::size_t fft_size);

std::size_t next_pow2(std::size_t n);

/// c[lag + max_lag] = sum over i of a[i] * b[i - lag], for lag in [-max_lag, max_lag],
/// via FFT. Inputs must share a length.
std::vector<double> cross_correlation(std::span<const double> a, std::span<const double> b, long max_lag);

}  // namespace ledtap::dsp
