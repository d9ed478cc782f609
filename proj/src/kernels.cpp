#include "ledtap/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ledtap/dsp.hpp"

namespace ledtap::kernels {

LagScore pearson_at(std::span<const double> a, std::span<const double> b, long lag) {
    const long n = static_cast<long>(std::min(a.size(), b.size()));
    const long lo = std::max(0L, lag);
    const long hi = std::min(n, n + lag);
    LagScore r{lag, 0.0, 0};
    if (hi - lo < 2) return r;
    double sa = 0, sb = 0;
    for (long i = lo; i < hi; ++i) {
        sa += a[static_cast<std::size_t>(i)];
        sb += b[static_cast<std::size_t>(i - lag)];
    }
    const double m = static_cast<double>(hi - lo);
    const double ma = sa / m, mb = sb / m;
    double sab = 0, saa = 0, sbb = 0;
    for (long i = lo; i < hi; ++i) {
        const double da = a[static_cast<std::size_t>(i)] - ma;
        const double db = b[static_cast<std::size_t>(i - lag)] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    r.n = static_cast<std::size_t>(hi - lo);
    r.k = (saa > 0 && sbb > 0) ? sab / std::sqrt(saa * sbb) : 0.0;
    return r;
}

namespace {

LagScore pick(const std::vector<LagScore>& all) {
    LagScore best = all.front();
    for (const auto& s : all) {
        const double a = std::abs(s.k), b = std::abs(best.k);
        if (a > b || (a == b && std::labs(s.lag) < std::labs(best.lag))) best = s;
    }
    return best;
}

double harmonic_score(std::span<const double> power, double df, double period, int harmonics) {
    constexpr double floor = 1e-9;
    const double f0 = 1.0 / period;
    const double last = static_cast<double>(power.size() - 1);
    double odd = 0, even = 0;
    int n_odd = 0, n_even = 0;
    for (int k = 1; k <= harmonics; ++k) {
        const double pos = k * f0 / df;
        if (pos >= last) break;
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        const double s = power[i] + frac * (power[i + 1] - power[i]);
        const double l = std::log(s + floor);
        if (k & 1) {
            odd += l;
            ++n_odd;
        } else {
            even += l;
            ++n_even;
        }
    }
    if (n_odd == 0) return -std::numeric_limits<double>::infinity();
    if (n_even == 0) return odd / n_odd;
    return std::min(odd / n_odd, even / n_even);
}

}  // namespace

LagScore best_lag_pearson_serial(std::span<const double> a, std::span<const double> b, long max_lag) {
    std::vector<LagScore> all(static_cast<std::size_t>(2 * max_lag + 1));
    for (long l = -max_lag; l <= max_lag; ++l) all[static_cast<std::size_t>(l + max_lag)] = pearson_at(a, b, l);
    return pick(all);
}

LagScore best_lag_pearson_omp(std::span<const double> a, std::span<const double> b, long max_lag) {
    std::vector<LagScore> all(static_cast<std::size_t>(2 * max_lag + 1));
#pragma omp parallel for schedule(static)
    for (long l = -max_lag; l <= max_lag; ++l) all[static_cast<std::size_t>(l + max_lag)] = pearson_at(a, b, l);
    return pick(all);
}

std::vector<double> harmonic_scan_serial(std::span<const double> power, double df, std::span<const double> periods,
                                         int harmonics) {
    std::vector<double> out(periods.size());
    for (std::size_t i = 0; i < periods.size(); ++i) out[i] = harmonic_score(power, df, periods[i], harmonics);
    return out;
}

std::vector<double> harmonic_scan_omp(std::span<const double> power, double df, std::span<const double> periods,
                                      int harmonics) {
    std::vector<double> out(periods.size());
    const long n = static_cast<long>(periods.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = harmonic_score(power, df, periods[static_cast<std::size_t>(i)], harmonics);
    return out;
}

LagScore best_lag_pearson_fft(std::span<const double> a, std::span<const double> b, long max_lag) {
    const std::size_t n = std::min(a.size(), b.size());
    max_lag = std::min<long>(max_lag, static_cast<long>(n) - 2);
    if (max_lag <= 0) return pearson_at(a, b, 0);
    // Centre globally so the moment differences below do not cancel badly.
    std::vector<double> ca(a.begin(), a.begin() + static_cast<long>(n)), cb(b.begin(), b.begin() + static_cast<long>(n));
    for (auto* v : {&ca, &cb}) {
        double m = 0;
        for (double x : *v) m += x;
        m /= static_cast<double>(n);
        for (double& x : *v) x -= m;
    }
    const auto cross = dsp::cross_correlation(ca, cb, max_lag);
    auto prefix = [n](const std::vector<double>& v, bool square) {
        std::vector<double> p(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) p[i + 1] = p[i] + (square ? v[i] * v[i] : v[i]);
        return p;
    };
    const auto pa = prefix(ca, false), paa = prefix(ca, true), pb = prefix(cb, false), pbb = prefix(cb, true);
    std::vector<LagScore> all(static_cast<std::size_t>(2 * max_lag + 1));
    const long N = static_cast<long>(n);
    for (long lag = -max_lag; lag <= max_lag; ++lag) {
        const auto lo = static_cast<std::size_t>(std::max(0L, lag));
        const auto hi = static_cast<std::size_t>(std::min(N, N + lag));
        const auto blo = static_cast<std::size_t>(static_cast<long>(lo) - lag);
        const auto bhi = static_cast<std::size_t>(static_cast<long>(hi) - lag);
        const double m = static_cast<double>(hi - lo);
        const double sa = pa[hi] - pa[lo], sb = pb[bhi] - pb[blo];
        const double va = (paa[hi] - paa[lo]) - sa * sa / m;
        const double vb = (pbb[bhi] - pbb[blo]) - sb * sb / m;
        const double cov = cross[static_cast<std::size_t>(lag + max_lag)] - sa * sb / m;
        all[static_cast<std::size_t>(lag + max_lag)] = {lag, (va > 0 && vb > 0) ? cov / std::sqrt(va * vb) : 0.0, hi - lo};
    }
    return pearson_at(a, b, pick(all).lag);
}

}  // namespace ledtap::kernels
