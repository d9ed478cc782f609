#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ledtap::kernels {

struct LagScore {
    long lag = 0;   // b is shifted right by lag samples
    double k = 0.0;
    std::size_t n = 0;
};

/// Pearson correlation of a[i] against b[i - lag] over the overlap, for every
/// lag in [-max_lag, max_lag]; returns the lag with the largest |k|.
LagScore best_lag_pearson_serial(std::span<const double> a, std::span<const double> b, long max_lag);
LagScore best_lag_pearson_omp(std::span<const double> a, std::span<const double> b, long max_lag);

/// Same search with every lag's cross term from one FFT and the overlap
/// moments from prefix sums; the winning lag is rescored exactly.
LagScore best_lag_pearson_fft(std::span<const double> a, std::span<const double> b, long max_lag);

/// Pearson correlation at one fixed lag.
LagScore pearson_at(std::span<const double> a, std::span<const double> b, long lag);

/// Harmonic scan over candidate periods. For each period P the score is
/// min(mean log S(k/P) over odd k, mean log S(k/P) over even k), k = 1..K,
/// with S linearly interpolated from `power` at bin spacing df. Harmonics past
/// the last bin are skipped.
std::vector<double> harmonic_scan_serial(std::span<const double> power, double df,
                                         std::span<const double> periods, int harmonics);
std::vector<double> harmonic_scan_omp(std::span<const double> power, double df,
                                      std::span<const double> periods, int harmonics);

}  // namespace ledtap::kernels
