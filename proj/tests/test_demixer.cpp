#include <doctest.h>

#include <cmath>

#include "ledtap/config.hpp"
#include "ledtap/demixer.hpp"
#include "ledtap/emitter.hpp"
#include "ledtap/errors.hpp"
#include "ledtap/figures.hpp"
#include "ledtap/io.hpp"
#include "ledtap/receiver.hpp"
#include "ledtap/rng.hpp"
#include "oracles/brute_force_demix.hpp"
#include "oracles/spectral.hpp"
#include "scenes.hpp"

using namespace ledtap;

namespace {

std::vector<double> times(const std::vector<TransitionEvent>& ev) {
    std::vector<double> t;
    for (const auto& e : ev)
        for (int k = 0; k < e.magnitude; ++k) t.push_back(e.time);
    return t;
}

}  // namespace

TEST_CASE("extract_events on a single clean stream") {
    const FrameFormat f(9600);
    const auto l = encode(random_bytes(5, 1), f, 0.0, unit_interval(f));
    const LineWaveform line(l.initial_level(), l.transitions(), l.duration() + unit_interval(f));
    LedModel led;
    led.peak_intensity = 1.0;
    const double fs = 2e6;
    const auto ev = extract_events(drive(line, led, fs), 1.0);
    REQUIRE(ev.size() == line.transitions().size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        CHECK(ev[i].magnitude == 1);
        CHECK(ev[i].direction == (line.transitions()[i].level == Level::space ? Direction::up : Direction::down));
        CHECK(std::abs(ev[i].time - line.transitions()[i].time) <= 1.0 / fs);
    }
    const auto direct = line_events(line);
    CHECK(direct.size() == ev.size());
}

TEST_CASE("simultaneous onsets merge into one event") {
    SampledWaveform w;
    w.sample_rate = 1e6;
    w.samples.assign(200, 0.0);
    for (std::size_t i = 100; i < 200; ++i) w.samples[i] = 2.0;
    const auto ev = extract_events(w, 1.0);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].magnitude == 2);
    CHECK(ev[0].direction == Direction::up);

    for (std::size_t i = 100; i < 200; ++i) w.samples[i] = 1.5;
    CHECK_THROWS_AS(extract_events(w, 1.0), AmplitudeMismatch);
    CHECK_THROWS(extract_events(w, 0.0));

    // Two steps one sample apart cannot be resolved.
    SampledWaveform fast;
    fast.sample_rate = 1e6;
    fast.samples.assign(50, 0.0);
    for (std::size_t i = 20; i < 50; ++i) fast.samples[i] = 1.0;
    for (std::size_t i = 21; i < 50; ++i) fast.samples[i] = 0.0;
    CHECK_THROWS_AS(extract_events(fast, 1.0), SampleRateTooLow);
}

TEST_CASE("ten-stream sum keeps every component transition") {
    const auto sc = make_diffuse_scene(10, 10, 9600, 2e6, 0.06, 3);
    const auto ev = extract_events(SampledWaveform{sc.sample_rate, 0.0, sc.sum}, 1.0);
    std::size_t units = 0;
    for (const auto& e : ev) units += static_cast<std::size_t>(e.magnitude);
    std::size_t want = 0;
    for (std::size_t s = 0; s < sc.payloads.size(); ++s)
        want += encode(sc.payloads[s], FrameFormat(9600), 0.0, sc.starts[s]).transitions().size();
    CHECK(units == want);
}

TEST_CASE("unit interval estimation") {
    CHECK_THROWS_AS(estimate_ui({}), InsufficientTransitions);

    const FrameFormat slow(300);
    const auto line = encode(random_bytes(30, 4), slow, 0.0, 0.01);
    CHECK(estimate_ui(line_events(line)) == doctest::Approx(1.0 / 300).epsilon(0.02));

    const auto sc = make_diffuse_scene(10, 10, 9600, 2e6, 0.06, 1);
    const auto ev = extract_events(SampledWaveform{sc.sample_rate, 0.0, sc.sum}, 1.0);
    const double est = estimate_ui(ev);
    CHECK(est == doctest::Approx(1.0 / 9600).epsilon(0.02));

    // Exact point-process DFT on a coarser grid lands on the same interval.
    const double ref = oracle::estimate_period(times(ev), 10e-6, 10e-3, 1500, 32, 0.3, 1.5);
    CHECK(ref == doctest::Approx(1.0 / 9600).epsilon(0.02));
    CHECK(est == doctest::Approx(ref).epsilon(0.02));

    UiOptions alt;
    alt.method = UiMethod::interval_sequence;
    CHECK(estimate_ui(ev, alt) == doctest::Approx(1.0 / 9600).epsilon(0.02));

    UiOptions serial;
    serial.parallel = false;
    CHECK(estimate_ui(ev, serial) == est);
}

TEST_CASE("bundled nine-event prefix") {
    const auto ev = io::read_events(data_dir() + "/table3_events.csv");
    const double ui = 1.0 / 9600;
    DemixOptions o;
    o.record_end = 450e-6;
    const auto r = demix(ev, ui, FrameFormat(9600), o);
    REQUIRE(r.streams.size() == 6);
    const double opened[] = {104.1667, 184.1667, 235.1667, 248.1667, 359.1667, 362.1667};
    for (std::size_t i = 0; i < 6; ++i) CHECK(r.streams[i].hypothesis.start_time * 1e6 == doctest::Approx(opened[i]).epsilon(1e-6));
    struct Want {
        int stream, cell;
        double t;
        int level;
    };
    const Want want[] = {{1, 1, 208.333, 1}, {2, 1, 288.333, 0}, {1, 2, 312.5, 1}, {3, 1, 339.333, 1},
                         {4, 1, 352.333, 1}, {2, 2, 392.5, 1},   {1, 3, 416.667, 1}, {3, 2, 443.5, 0}};
    for (const auto& w : want) {
        const auto it = std::find_if(r.log.begin(), r.log.end(), [&](const DecisionRecord& d) {
            return d.stream == w.stream && d.cell == w.cell;
        });
        REQUIRE(it != r.log.end());
        CHECK(it->time * 1e6 == doctest::Approx(w.t).epsilon(1e-5));
        CHECK(it->level == w.level);
    }
    CHECK(r.unassigned_events == 0);
}

TEST_CASE("single stream matches plain decode") {
    const FrameFormat f(9600);
    const auto payload = random_bytes(12, 8);
    const auto line = encode(payload, f, 0.0, 3e-4);
    const auto r = demix(line_events(line), unit_interval(f), f);
    REQUIRE(r.streams.size() == 1);
    CHECK(r.streams[0].bytes == decode(line, f).bytes);
    CHECK(r.streams[0].bytes == payload);
}

TEST_CASE("three offset streams separate exactly") {
    const FrameFormat f(9600);
    const double ui = unit_interval(f);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::vector<std::vector<std::uint8_t>> payloads;
        std::vector<TransitionEvent> ev;
        const double offs[] = {0.0, 0.2 + 0.1 * static_cast<double>(seed % 3), 0.55 + 0.05 * static_cast<double>(seed % 5)};
        for (int s = 0; s < 3; ++s) {
            payloads.push_back(random_bytes(6, mix_seed(seed, static_cast<std::uint64_t>(s))));
            const auto l = encode(payloads.back(), f, 0.0, (1 + 3 * s + offs[s]) * ui);
            const auto e = line_events(l);
            ev.insert(ev.end(), e.begin(), e.end());
        }
        std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
        const auto r = demix(ev, ui, f);
        REQUIRE(r.streams.size() == 3);
        for (int s = 0; s < 3; ++s) CHECK(r.streams[static_cast<std::size_t>(s)].bytes == payloads[static_cast<std::size_t>(s)]);
        CHECK(r.ambiguity_flags.empty());
    }
}

TEST_CASE("permutation invariance") {
    const FrameFormat f(9600);
    const double ui = unit_interval(f);
    const auto a = random_bytes(4, 1), b = random_bytes(4, 2);
    auto build = [&](const std::vector<std::uint8_t>& first, const std::vector<std::uint8_t>& second) {
        auto e1 = line_events(encode(first, f, 0.0, ui));
        const auto e2 = line_events(encode(second, f, 0.0, 4.37 * ui));
        e1.insert(e1.end(), e2.begin(), e2.end());
        std::sort(e1.begin(), e1.end(), [](const auto& x, const auto& y) { return x.time < y.time; });
        return demix(e1, ui, f);
    };
    const auto ab = build(a, b), ba = build(b, a);
    REQUIRE(ab.streams.size() == 2);
    REQUIRE(ba.streams.size() == 2);
    CHECK(ab.streams[0].bytes == ba.streams[1].bytes);
    CHECK(ab.streams[1].bytes == ba.streams[0].bytes);
}

TEST_CASE("conservation: reconstructed levels sum to the input") {
    const auto sc = make_diffuse_scene(6, 6, 9600, 2e6, 0.08, 5);
    const SampledWaveform sum{sc.sample_rate, 0.0, sc.sum};
    const auto ev = extract_events(sum, 1.0);
    const auto r = demix(ev, 1.0 / 9600, FrameFormat(9600));
    REQUIRE(r.ambiguity_flags.empty());
    std::vector<LineWaveform> lines;
    for (const auto& s : r.streams) {
        // Rebuild each stream from its recovered frames.
        std::vector<Transition> tr;
        for (std::size_t i = 0; i < s.bytes.size(); ++i) {
            const auto l = encode({&s.bytes[i], 1}, FrameFormat(9600), 0.0, s.frame_starts[i]);
            for (const auto& t : l.transitions())
                if (!tr.empty() && tr.back().time == t.time) tr.pop_back();
                else tr.push_back(t);
        }
        lines.emplace_back(Level::mark, tr, 1.0);
    }
    for (const auto& e : ev) {
        const double t = e.time + 0.25 / 9600;
        int level = 0;
        for (const auto& l : lines) level += l.level_at(t) == Level::space;
        const auto i = static_cast<std::size_t>(t * sc.sample_rate);
        CHECK(level == static_cast<int>(std::lround(sc.sum[i])));
    }
}

TEST_CASE("demix agrees with the brute-force oracle on small instances") {
    int compared = 0;
    for (std::uint64_t seed = 1; compared < 60 && seed < 600; ++seed) {
        const int n = 2 + static_cast<int>(seed % 3);
        const auto in = scenes::random_instance(n, 9600, seed);
        oracle::BruteForceDemixer bf(1.0 / 9600, 0.05, 4);
        const auto sol = bf.solve(in.units);
        if (!sol.unique()) continue;
        ++compared;
        DemixOptions o;
        o.record_end = in.end;
        const auto r = demix(in.events, 1.0 / 9600, FrameFormat(9600), o);
        CHECK_MESSAGE(scenes::same_frames(scenes::frame_set(r), *sol.solutions.begin()), "seed " << seed);
        CHECK(r.unassigned_events == 0);
    }
    CHECK(compared == 60);
}

TEST_CASE("brute-force oracle recovers the generating frames on separated streams") {
    const auto in = scenes::random_instance(2, 9600, 1234);
    oracle::BruteForceDemixer bf(1.0 / 9600, 0.05, 4);
    const auto sol = bf.solve(in.units);
    REQUIRE_FALSE(sol.solutions.empty());
    bool found = false;
    for (const auto& s : sol.solutions) {
        oracle::FrameSet truth;
        for (const auto& [t, b] : in.frames) truth.emplace_back(std::llround(t * 1e9), b);
        found = found || scenes::same_frames(s, truth);
    }
    CHECK(found);
}

TEST_CASE("stream plausibility") {
    DemixResult r;
    RecoveredStream ascii, high;
    ascii.hypothesis.id = 1;
    ascii.bytes = {'h', 'i'};
    high.hypothesis.id = 2;
    high.bytes = {0xFF, 'a'};
    r.streams = {ascii, high};
    const auto a = validate_streams(r, EncodingHint::ascii);
    CHECK(a[0].plausible());
    CHECK_FALSE(a[1].plausible());
    for (const auto& p : validate_streams(r, EncodingHint::none)) CHECK(p.plausible());
    r.streams[0].framing_errors = 1;
    CHECK_FALSE(validate_streams(r, EncodingHint::none)[0].plausible());
}
