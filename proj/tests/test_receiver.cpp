#include <doctest.h>

#include <cmath>
#include <random>

#include "ledtap/channel.hpp"
#include "ledtap/emitter.hpp"
#include "ledtap/errors.hpp"
#include "ledtap/kernels.hpp"
#include "ledtap/receiver.hpp"
#include "ledtap/rng.hpp"
#include "ledtap/sweep.hpp"
#include "oracles/stats.hpp"

using namespace ledtap;

namespace {

LineWaveform framed(std::span<const std::uint8_t> payload, const FrameFormat& f) {
    const double pad = 2 * character_interval(f);
    const auto l = encode(payload, f, 0.0, pad);
    return LineWaveform(l.initial_level(), l.transitions(), l.duration() + pad);
}

DetectorWaveform sines(double fs, double seconds, std::vector<std::pair<double, double>> comps, double dc) {
    DetectorWaveform w;
    w.sample_rate = fs;
    w.samples.resize(static_cast<std::size_t>(fs * seconds));
    for (std::size_t i = 0; i < w.size(); ++i) {
        double v = dc;
        for (auto [f, a] : comps) v += a * std::sin(2 * std::numbers::pi * f * static_cast<double>(i) / fs + 0.3);
        w.samples[i] = v;
    }
    return w;
}

}  // namespace

TEST_CASE("suppress_ambient") {
    DetectorWaveform zero;
    zero.sample_rate = 100e3;
    zero.samples.assign(100000, 0.0);
    CHECK(suppress_ambient(zero).samples == zero.samples);

    const auto hum = sines(100e3, 1.0, {{120, 1.0}}, 0.4);
    CHECK(oracle::rms(suppress_ambient(hum).samples) < 0.05 * oracle::rms(hum.samples));

    const auto hf = sines(100e3, 1.0, {{3000, 1.0}, {5170, 0.5}}, 0.0);
    const auto out = suppress_ambient(hf);
    std::vector<double> diff(hf.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = out.samples[i] - hf.samples[i];
    CHECK(oracle::rms(diff) < 0.01 * oracle::rms(hf.samples));
}

TEST_CASE("binarize clean and flat inputs") {
    const FrameFormat f(9600);
    const auto line = framed(random_bytes(16, 2), f);
    const double fs = 1e6;
    LedModel led;
    const auto o = drive(line, led, fs);
    const auto rx = binarize(o);
    REQUIRE(rx.transitions().size() == line.transitions().size());
    for (std::size_t i = 0; i < line.transitions().size(); ++i) {
        CHECK(rx.transitions()[i].level == line.transitions()[i].level);
        CHECK(std::abs(rx.transitions()[i].time - line.transitions()[i].time) <= 1.0 / fs);
    }
    SampledWaveform flat;
    flat.sample_rate = fs;
    flat.samples.assign(1000, 0.7);
    CHECK_THROWS_AS(binarize(flat), FlatSignal);
}

TEST_CASE("binarize at 20 dB SNR keeps edges within a quarter UI") {
    const FrameFormat f(4800);
    const double ui = unit_interval(f);
    const auto line = framed(random_bytes(30, 8), f);
    const double fs = 200e3;
    auto o = drive(line, LedModel{}, fs);
    // 20 dB: noise sigma one tenth of the swing.
    std::mt19937_64 gen(3);
    std::normal_distribution<double> n(0.0, 0.1 * LedModel{}.peak_intensity);
    for (auto& v : o.samples) v += n(gen);
    const auto rx = binarize(o);
    REQUIRE(rx.transitions().size() == line.transitions().size());
    for (std::size_t i = 0; i < line.transitions().size(); ++i)
        CHECK(std::abs(rx.transitions()[i].time - line.transitions()[i].time) <= ui / 4);
}

TEST_CASE("decode round trip and error accounting") {
    std::mt19937_64 gen(1);
    for (const char* fs : {"8N1", "7E1", "8O2", "5N1.5"}) {
        const auto f = FrameFormat::parse(fs, 2400);
        auto payload = random_bytes(40, gen());
        for (auto& b : payload) b &= static_cast<std::uint8_t>((1 << f.data_bits()) - 1);
        const auto r = decode(framed(payload, f), f, payload);
        CHECK(r.bytes == payload);
        CHECK(r.bit_errors == 0);
        CHECK(r.framing_errors == 0);
        CHECK(r.parity_errors == 0);
    }

    // Stop bit forced to space.
    const FrameFormat f(9600);
    const double ui = unit_interval(f);
    const std::uint8_t a = 0x41;
    const auto l = encode({&a, 1}, f, 0.0, ui);
    auto tr = l.transitions();
    tr.pop_back();  // the final return to mark at the stop cell
    tr.push_back({ui + 10 * ui + ui, Level::mark});
    const auto broken = LineWaveform(Level::mark, tr, 14 * ui);
    CHECK(decode(broken, f).framing_errors == 1);

    CHECK_THROWS_AS(decode(LineWaveform::constant(Level::mark, 1e-2), f), NoStartEdge);
}

TEST_CASE("stretched random payload breaks decoding") {
    // On the bare line a 1.5 UI hold ends exactly on the next decision point;
    // the detector's finite bandwidth is what settles the tie.
    const FrameFormat f(9600);
    const auto payload = random_bytes(200, 12);
    const auto s = stretch(framed(payload, f), StretcherConfig::ui_multiple(f, 1.5));
    ChannelModel ch;
    ch.distance = 1.0;
    const auto w = transmit(s, LedModel{}, ch.noiseless(), default_sample_rate(9600), 1);
    const auto r = decode(binarize(w), f, payload);
    CHECK((r.framing_errors > 0 || r.ber() > 0.2));
}

TEST_CASE("correlation") {
    std::mt19937_64 gen(4);
    std::normal_distribution<double> n;
    std::vector<double> a(10000), b(10000), neg(10000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = n(gen);
        b[i] = n(gen);
        neg[i] = -a[i];
    }
    CHECK(correlation(a, a).k == doctest::Approx(1.0));
    CHECK(correlation(a, neg).k == doctest::Approx(-1.0));
    const auto c = correlation(a, b);
    CHECK(std::abs(c.k) < 0.05);
    CHECK(c.n == 10000);
    CHECK(c.k == doctest::Approx(oracle::pearson(a, b)).epsilon(1e-9));
    CHECK_THROWS_AS(correlation(a, std::vector<double>(9999)), LengthMismatch);
    CHECK_THROWS_AS(correlation(std::vector<double>(1), std::vector<double>(1)), LengthMismatch);

    // A delayed copy is found at its lag.
    std::vector<double> d(a.size(), 0.0);
    for (std::size_t i = 25; i < a.size(); ++i) d[i] = a[i - 25];
    const auto cl = correlation(d, a, 40);
    CHECK(cl.lag == 25);
    CHECK(cl.k == doctest::Approx(oracle::pearson(d, a, 25)).epsilon(1e-9));
}

TEST_CASE("rate estimation") {
    const FrameFormat f(9600);
    const auto line = framed(random_bytes(60, 5), f);
    DetectorWaveform w;
    static_cast<SampledWaveform&>(w) = drive(line, LedModel{}, 400e3);
    CHECK(estimate_rate(w) == 9600);

    const FrameFormat f48(4800);
    auto o = drive(framed(random_bytes(60, 6), f48), LedModel{}, 200e3);
    std::mt19937_64 gen(6);
    std::normal_distribution<double> n(0.0, 0.1 * LedModel{}.peak_intensity);
    for (auto& v : o.samples) v += n(gen);
    DetectorWaveform w48;
    static_cast<SampledWaveform&>(w48) = o;
    CHECK(estimate_rate(w48) == 4800);

    DetectorWaveform idle;
    idle.sample_rate = 200e3;
    idle.samples.assign(20000, 0.0);
    CHECK_THROWS_AS(estimate_rate(idle), InsufficientTransitions);
}

TEST_CASE("noiseless dark-room link is the identity at every matrix rate") {
    ChannelModel m;
    m.ambient = AmbientModel::preset("dark_room");
    m = m.noiseless();
    for (double rate : standard_rates()) {
        if (rate > 19200) continue;
        for (double d : {5.0, 38.0}) {
            m.distance = d;
            const auto payload = random_bytes(24, static_cast<std::uint64_t>(rate));
            LinkOptions lo;
            lo.compute_k = false;
            const auto r = simulate_link(payload, FrameFormat(rate), LedModel{}, m, 1, lo);
            CHECK(r.recovery.bytes == payload);
            CHECK(r.recovery.bit_errors == 0);
        }
    }
}

TEST_CASE("integrate-and-dump sampling also round trips") {
    const FrameFormat f(1200);
    const auto payload = random_bytes(30, 77);
    CHECK(decode(framed(payload, f), f, payload, SamplingMode::integrate_and_dump).bytes == payload);
}
