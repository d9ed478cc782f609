#include "ledtap/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

#include "ledtap/errors.hpp"
#include "ledtap/kernels.hpp"
#include "ledtap/rng.hpp"

namespace ledtap {

double default_sample_rate(double bit_rate) { return std::max(200e3, 20.0 * bit_rate); }

DetectorWaveform transmit(const LineWaveform& line, const LedModel& led, const ChannelModel& channel, double sample_rate,
                          std::uint64_t seed, bool suppress) {
    auto det = propagate(drive(line, led, sample_rate), channel, seed);
    // Back-to-back 8N1 at 1200 b/s repeats every mains cycle, so hum removal
    // would also strip the framing; with no ambient there is nothing to remove.
    return suppress && !channel.ambient.is_dark() ? suppress_ambient(det) : det;
}

LinkResult simulate_link(std::span<const std::uint8_t> payload, const FrameFormat& fmt, const LedModel& led,
                         const ChannelModel& channel, std::uint64_t seed, const LinkOptions& opts) {
    const double fs = opts.sample_rate > 0.0 ? opts.sample_rate : default_sample_rate(fmt.bit_rate());
    const double pad = 2.0 * character_interval(fmt);
    LinkResult res;
    const auto data = encode(payload, fmt, 0.0, pad);
    res.line = LineWaveform(data.initial_level(), data.transitions(), data.duration() + pad);

    res.detector = transmit(res.line, led, channel, fs, seed, opts.suppress);

    const std::size_t bits = payload.size() * static_cast<std::size_t>(fmt.data_bits());
    try {
        const auto rx = binarize(res.detector, BinarizeOptions{.polarity = led.polarity});
        res.recovery = decode(rx, fmt, payload, opts.sampling);
    } catch (const FlatSignal&) {
        res.flat = true;
        res.recovery.bit_errors = res.recovery.bits_total = bits;
    } catch (const NoStartEdge&) {
        res.recovery.bit_errors = res.recovery.bits_total = bits;
    }

    if (opts.compute_k) {
        const auto& x = res.detector.samples;
        const auto ref = render_reference(res.line, fs, x.size(), led.polarity);
        const std::size_t w = std::min(x.size(), opts.lag_window);
        const long max_lag = std::min<long>(static_cast<long>(character_interval(fmt) * fs), static_cast<long>(w) - 2);
        const std::span<const double> xs(x.data(), w), rs(ref.data(), w);
        const long lag = max_lag > 0 ? kernels::best_lag_pearson_fft(xs, rs, max_lag).lag : 0;
        res.k = kernels::pearson_at(x, ref, lag).k;
    }
    return res;
}

void SweepSpec::validate() const {
    if (distances.empty() || rates.empty() || ambients.empty() || seeds.empty())
        throw std::invalid_argument("sweep: every axis needs at least one value");
    for (double d : distances)
        if (!(d > 0.0)) throw std::invalid_argument("sweep: distances must be positive");
    for (double r : rates)
        if (!(r > 0.0)) throw std::invalid_argument("sweep: rates must be positive");
}

namespace {

struct Cell {
    std::size_t ambient, rate, distance, seed;
};

Cell cell_at(const SweepSpec& s, std::size_t i) {
    Cell c{};
    c.seed = i % s.seeds.size();
    i /= s.seeds.size();
    c.distance = i % s.distances.size();
    i /= s.distances.size();
    c.rate = i % s.rates.size();
    c.ambient = i / s.rates.size();
    return c;
}

SweepRow run_cell(const SweepSpec& spec, std::size_t index, std::span<const std::uint8_t> payload,
                  const ChannelModel& base, const LedModel& led, const LinkOptions& opts) {
    const Cell c = cell_at(spec, index);
    ChannelModel ch = spec.noise ? base : base.noiseless();
    ch.distance = spec.distances[c.distance];
    ch.ambient = AmbientModel::preset(spec.ambients[c.ambient]);
    const FrameFormat fmt = FrameFormat::parse(spec.frame, spec.rates[c.rate]);
    // Distance is left out of the noise seed so every distance sees the same
    // noise realisation for a given (seed, ambient, rate).
    const std::uint64_t seed = mix_seed(mix_seed(spec.seeds[c.seed], c.ambient), c.rate);
    const auto r = simulate_link(payload, fmt, led, ch, seed, opts);
    const double ber = r.recovery.ber();
    return {ch.distance, fmt.bit_rate(), spec.ambients[c.ambient], spec.seeds[c.seed], ber, r.k,
            r.recovery.framing_errors, ber <= 1e-2 ? EmanationClass::III : EmanationClass::II};
}

}  // namespace

std::vector<SweepRow> run_sweep_serial(const SweepSpec& spec, std::span<const std::uint8_t> payload,
                                       const ChannelModel& base, const LedModel& led, const LinkOptions& opts) {
    spec.validate();
    std::vector<SweepRow> rows;
    rows.reserve(spec.cells());
    for (std::size_t i = 0; i < spec.cells(); ++i) rows.push_back(run_cell(spec, i, payload, base, led, opts));
    return rows;
}

std::vector<SweepRow> run_sweep_omp(const SweepSpec& spec, std::span<const std::uint8_t> payload,
                                    const ChannelModel& base, const LedModel& led, const LinkOptions& opts) {
    spec.validate();
    const long n = static_cast<long>(spec.cells());
    std::vector<SweepRow> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i)
        rows[static_cast<std::size_t>(i)] = run_cell(spec, static_cast<std::size_t>(i), payload, base, led, opts);
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string s = "distance_m,rate_bps,ambient,seed,ber,k,framing_errors,class\n";
    for (const auto& r : rows)
        s += fmt::format("{:g},{:g},{},{},{:.6g},{:.6f},{},{}\n", r.distance, r.rate, r.ambient, r.seed, r.ber, r.k,
                         r.framing_errors, to_string(r.cls));
    return s;
}

}  // namespace ledtap
