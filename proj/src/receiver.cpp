#include "ledtap/receiver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>

#include "ledtap/demixer.hpp"
#include "ledtap/dsp.hpp"
#include "ledtap/errors.hpp"
#include "ledtap/kernels.hpp"

namespace ledtap {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Fit of DC plus `harmonics` mains harmonics, phase measured in mains cycles
// from sample 0 of the whole record.
struct HumFit {
    double dc = 0.0;
    std::vector<double> a, b;  // cos, sin per harmonic 1..H

    double at(double phase) const {
        double v = dc;
        for (std::size_t h = 0; h < a.size(); ++h) {
            const double w = two_pi * static_cast<double>(h + 1) * phase;
            v += a[h] * std::cos(w) + b[h] * std::sin(w);
        }
        return v;
    }
};

// Long blocks hold a whole number of mains cycles, where the basis is
// orthogonal: fold samples into phase bins and project.
HumFit project_block(const double* x, std::size_t m, double phase0, double step, int harmonics) {
    constexpr std::size_t bins = 2048;
    std::vector<double> sum(bins, 0.0), phase_sum(bins, 0.0);
    std::vector<std::size_t> count(bins, 0);
    double ph = phase0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto k = std::min(bins - 1, static_cast<std::size_t>(ph * bins));
        sum[k] += x[i];
        phase_sum[k] += ph;
        ++count[k];
        ph += step;
        if (ph >= 1.0) ph -= 1.0;
    }
    HumFit fit;
    fit.a.assign(static_cast<std::size_t>(harmonics), 0.0);
    fit.b.assign(static_cast<std::size_t>(harmonics), 0.0);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < bins; ++k) {
        if (!count[k]) continue;
        const double centre = phase_sum[k] / static_cast<double>(count[k]);
        fit.dc += sum[k] * inv_m;
        for (int h = 1; h <= harmonics; ++h) {
            const double w = two_pi * h * centre;
            fit.a[static_cast<std::size_t>(h - 1)] += 2.0 * inv_m * sum[k] * std::cos(w);
            fit.b[static_cast<std::size_t>(h - 1)] += 2.0 * inv_m * sum[k] * std::sin(w);
        }
    }
    return fit;
}

// Short records: direct least squares on the sampled basis.
HumFit solve_block(const double* x, std::size_t m, double phase0, double step, int harmonics) {
    const int cols = 1 + 2 * harmonics;
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(m), cols);
    Eigen::VectorXd y(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double ph = phase0 + step * static_cast<double>(i);
        basis(r, 0) = 1.0;
        for (int h = 1; h <= harmonics; ++h) {
            basis(r, 2 * h - 1) = std::cos(two_pi * h * ph);
            basis(r, 2 * h) = std::sin(two_pi * h * ph);
        }
        y(r) = x[i];
    }
    const Eigen::VectorXd c = basis.colPivHouseholderQr().solve(y);
    HumFit fit;
    fit.dc = c(0);
    for (int h = 1; h <= harmonics; ++h) {
        fit.a.push_back(c(2 * h - 1));
        fit.b.push_back(c(2 * h));
    }
    return fit;
}

void subtract_fit(double* x, std::size_t len, double phase0, double step, const HumFit& fit) {
    constexpr std::size_t table = 4096;
    std::array<double, table + 1> tab{};
    for (std::size_t k = 0; k <= table; ++k) tab[k] = fit.at(static_cast<double>(k) / table);
    double ph = phase0;
    for (std::size_t i = 0; i < len; ++i) {
        const double pos = ph * table;
        const auto k = std::min(table - 1, static_cast<std::size_t>(pos));
        const double frac = pos - static_cast<double>(k);
        x[i] -= tab[k] + frac * (tab[k + 1] - tab[k]);
        ph += step;
        if (ph >= 1.0) ph -= 1.0;
    }
}

}  // namespace

DetectorWaveform suppress_ambient(const DetectorWaveform& wave, const SuppressOptions& opts) {
    const double fs = wave.sample_rate;
    if (!(fs > 1000.0)) throw SampleRateTooLow("ambient suppression needs more than 1 kHz sampling");
    DetectorWaveform out = wave;
    const std::size_t n = out.size();
    if (n == 0) return out;

    int harmonics = static_cast<int>(std::floor(opts.max_harmonic_hz / opts.mains_hz + 1e-9));
    while (harmonics > 0 && harmonics * opts.mains_hz >= fs / 2.0) --harmonics;
    const double step = opts.mains_hz / fs;  // cycles per sample
    const double samples_per_cycle = fs / opts.mains_hz;
    const double cycles_per_block = std::max(1.0, std::round(opts.block_seconds * opts.mains_hz));
    const auto block = static_cast<std::size_t>(std::llround(cycles_per_block * samples_per_cycle));
    const std::size_t min_projection = static_cast<std::size_t>(20.0 * samples_per_cycle);

    const std::size_t nblocks = std::max<std::size_t>(1, n / std::max<std::size_t>(block, 1));
    for (std::size_t bi = 0; bi < nblocks; ++bi) {
        const std::size_t begin = bi * block;
        const std::size_t len = (bi + 1 == nblocks) ? n - begin : block;
        double phase0 = std::fmod(static_cast<double>(begin) * step, 1.0);
        double* x = out.samples.data() + begin;
        HumFit fit;
        if (len >= min_projection) {
            const double whole = std::floor(static_cast<double>(len) / samples_per_cycle);
            const auto m = static_cast<std::size_t>(std::llround(whole * samples_per_cycle));
            fit = project_block(x, std::min(m, len), phase0, step, harmonics);
        } else {
            const int h = std::min(harmonics, static_cast<int>((len - 1) / 2));
            fit = solve_block(x, len, phase0, step, std::max(h, 0));
        }
        subtract_fit(x, len, phase0, step, fit);
    }
    return out;
}

LineWaveform binarize(const SampledWaveform& wave, const BinarizeOptions& opts) {
    const auto& x = wave.samples;
    if (x.size() < 2) throw FlatSignal("fewer than two samples");
    const double qs[] = {opts.low_quantile, opts.high_quantile};
    const auto q = dsp::quantiles(x, qs);
    const double range = q[1] - q[0];
    const double sigma = dsp::robust_noise_sigma(x);
    const double scale = std::max(std::abs(q[0]), std::abs(q[1]));
    if (!(range > 4.0 * sigma) || !(range > 1e-12 * scale) || range <= 0.0)
        throw FlatSignal("quantile range within the noise floor");

    const double thr = 0.5 * (q[0] + q[1]);
    const double band = 0.5 * opts.hysteresis_fraction * range;
    const Level lit = lit_level(opts.polarity);
    const double dt = 1.0 / wave.sample_rate;
    const double t0 = wave.start_time;

    bool high = x[0] > thr;
    std::vector<Transition> tr;
    std::size_t last_switch = 0;
    double last_time = -1.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const bool flip = high ? x[i] < thr - band : x[i] > thr + band;
        if (!flip) continue;
        high = !high;
        // Latest threshold crossing since the previous switch.
        std::size_t j = i;
        while (j > last_switch + 1 && (high ? x[j - 1] > thr : x[j - 1] < thr)) --j;
        double t = t0 + static_cast<double>(i) * dt;
        if (j >= 1) {
            const double a = x[j - 1], b = x[j];
            const double frac = (b != a) ? std::clamp((thr - a) / (b - a), 0.0, 1.0) : 1.0;
            t = t0 + (static_cast<double>(j - 1) + frac) * dt;
        }
        if (t <= last_time) t = std::nextafter(last_time, 1e300);
        const Level lvl = high ? lit : opposite(lit);
        tr.push_back({t, lvl});
        last_time = t;
        last_switch = i;
    }
    const Level initial = (x[0] > thr) ? lit : opposite(lit);
    const double duration = t0 + static_cast<double>(x.size()) * dt;
    while (!tr.empty() && tr.back().time >= duration) tr.pop_back();
    return LineWaveform(initial, std::move(tr), duration);
}

namespace {

// Fraction of [a, b) the line spends at mark.
double mark_fraction(const LineWaveform& line, double a, double b) {
    const auto& tr = line.transitions();
    auto it = std::upper_bound(tr.begin(), tr.end(), a, [](double v, const Transition& t) { return v < t.time; });
    Level cur = it == tr.begin() ? line.initial_level() : std::prev(it)->level;
    double t = a, marked = 0.0;
    for (; it != tr.end() && it->time < b; ++it) {
        if (cur == Level::mark) marked += it->time - t;
        t = it->time;
        cur = it->level;
    }
    if (cur == Level::mark) marked += b - t;
    return marked / (b - a);
}

}  // namespace

RecoveryResult decode(const LineWaveform& line, const FrameFormat& fmt,
                      std::optional<std::span<const std::uint8_t>> truth, SamplingMode mode) {
    const auto& tr = line.transitions();
    const bool any_edge = std::any_of(tr.begin(), tr.end(), [](const Transition& t) { return t.level == Level::space; });
    if (!any_edge) throw NoStartEdge("line never leaves mark");

    const double ui = unit_interval(fmt);
    const int stop_cell = fmt.cells_before_stop();
    const int nd = fmt.data_bits();
    auto sample = [&](double frame_start, int cell) -> int {
        if (mode == SamplingMode::integrate_and_dump) {
            const double a = frame_start + cell * ui;
            return mark_fraction(line, a, a + ui) > 0.5 ? 1 : 0;
        }
        return logical_bit(line.level_at(frame_start + (cell + 0.5) * ui));
    };

    RecoveryResult r;
    std::size_t idx = 0;
    double hunt_from = -1.0;
    while (true) {
        while (idx < tr.size() && !(tr[idx].level == Level::space && tr[idx].time > hunt_from)) ++idx;
        if (idx >= tr.size()) break;
        const double start = tr[idx].time;
        const double stop_sample = start + (stop_cell + 0.5) * ui;
        if (stop_sample >= line.duration()) break;
        if (sample(start, 0) != 0) {
            hunt_from = start;  // glitch, not a start bit
            continue;
        }
        unsigned byte = 0;
        for (int i = 0; i < nd; ++i) byte |= static_cast<unsigned>(sample(start, 1 + i)) << i;
        if (fmt.has_parity()) {
            const int p = sample(start, 1 + nd);
            if (p != parity_bit(static_cast<std::uint8_t>(byte), nd, fmt.parity())) ++r.parity_errors;
        }
        if (sample(start, stop_cell) != 1) ++r.framing_errors;
        r.bytes.push_back(static_cast<std::uint8_t>(byte));
        r.frame_starts.push_back(start);
        hunt_from = stop_sample;
    }

    if (truth) {
        const auto& t = *truth;
        const unsigned mask = (1u << nd) - 1u;
        const std::size_t common = std::min(t.size(), r.bytes.size());
        for (std::size_t i = 0; i < common; ++i)
            r.bit_errors += static_cast<std::size_t>(std::popcount((static_cast<unsigned>(t[i]) ^ r.bytes[i]) & mask));
        const std::size_t longer = std::max(t.size(), r.bytes.size());
        r.bit_errors += (longer - common) * static_cast<std::size_t>(nd);
        r.bits_total = longer * static_cast<std::size_t>(nd);
    }
    return r;
}

CorrelationResult correlation(std::span<const double> a, std::span<const double> b, long max_lag) {
    if (a.size() != b.size()) throw LengthMismatch("correlation inputs differ in length");
    if (a.size() < 2) throw LengthMismatch("correlation needs at least two samples");
    const long lag_cap = std::min<long>(std::max(0L, max_lag), static_cast<long>(a.size()) - 2);
    const auto s = lag_cap > 0 ? kernels::best_lag_pearson_fft(a, b, lag_cap) : kernels::pearson_at(a, b, 0);
    return {std::clamp(s.k, -1.0, 1.0), s.n, s.lag};
}

std::vector<double> render_reference(const LineWaveform& line, double sample_rate, std::size_t n, Polarity polarity,
                                     double start_time) {
    std::vector<double> out(n);
    const Level lit = lit_level(polarity);
    const auto& tr = line.transitions();
    std::size_t next = 0;
    Level cur = line.initial_level();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = start_time + static_cast<double>(i) / sample_rate;
        while (next < tr.size() && tr[next].time <= t) cur = tr[next++].level;
        out[i] = cur == lit ? 1.0 : 0.0;
    }
    return out;
}

std::span<const double> standard_rates() {
    static const double rates[] = {300, 600, 1200, 2400, 4800, 9600, 19200};
    return rates;
}

double estimate_rate(const DetectorWaveform& wave, const BinarizeOptions& opts) {
    LineWaveform line;
    try {
        line = binarize(wave, opts);
    } catch (const FlatSignal&) {
        throw InsufficientTransitions("no usable swing in the waveform");
    }
    const auto events = line_events(line, opts.polarity);
    if (events.size() < 20) throw InsufficientTransitions("fewer than 20 transitions");
    const double raw = 1.0 / estimate_ui(events);
    double best = raw, best_err = 0.05;
    for (double r : standard_rates()) {
        const double err = std::abs(raw / r - 1.0);
        if (err <= best_err) {
            best = r;
            best_err = err;
        }
    }
    return best;
}

}  // namespace ledtap
