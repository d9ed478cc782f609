#include "ledtap/classifier.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <limits>

#include "ledtap/config.hpp"
#include "ledtap/constants.hpp"
#include "ledtap/dsp.hpp"
#include "ledtap/emitter.hpp"
#include "ledtap/errors.hpp"
#include "ledtap/receiver.hpp"
#include "ledtap/rng.hpp"
#include "ledtap/sweep.hpp"

namespace ledtap {

std::string to_string(EmanationClass c) {
    switch (c) {
        case EmanationClass::I: return "I";
        case EmanationClass::II: return "II";
        case EmanationClass::III: return "III";
    }
    return "?";
}

namespace {

EmanationClass parse_class(const std::string& s) {
    if (s == "I") return EmanationClass::I;
    if (s == "II") return EmanationClass::II;
    if (s == "III") return EmanationClass::III;
    throw ConfigError("unknown class '" + s + "'");
}

std::string tap_name(TapKind t) {
    switch (t) {
        case TapKind::data_line: return "data_line";
        case TapKind::activity_envelope: return "activity_envelope";
        case TapKind::static_state: return "static_state";
    }
    return "?";
}

std::string side_name(Side s) { return s == Side::red ? "red" : s == Side::black ? "black" : "n/a"; }

double shortest_lit(const LineWaveform& line, Polarity p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : line.intervals(lit_level(p)))
        if (a > 0.0 && b < line.duration()) best = std::min(best, b - a);
    return best;
}

}  // namespace

ClassLabel classify(const OpticalWaveform& optical, std::span<const std::uint8_t> truth, const FrameFormat& fmt,
                    const ClassifyOptions& opts) {
    ClassLabel label;
    const double qs[] = {0.05, 0.95};
    const auto q = dsp::quantiles(optical.samples, qs);
    label.modulation_depth = q[1] > 0.0 ? (q[1] - q[0]) / q[1] : 0.0;
    if (label.modulation_depth < opts.modulation_threshold) {
        label.cls = EmanationClass::I;
        return label;
    }

    SampledWaveform observed = optical;
    if (opts.channel) observed = suppress_ambient(propagate(optical, *opts.channel, opts.seed));

    label.cls = EmanationClass::II;
    LineWaveform line;
    try {
        line = binarize(observed);
    } catch (const FlatSignal&) {
        label.ber = 1.0;
        return label;
    }
    const double pulse = shortest_lit(line, Polarity::lit_on_space);
    if (std::isfinite(pulse)) label.min_pulse_observed = pulse;
    try {
        const auto r = decode(line, fmt, truth);
        label.ber = r.ber();
    } catch (const NoStartEdge&) {
        label.ber = 1.0;
    }
    if (*label.ber <= opts.ber_threshold) label.cls = EmanationClass::III;
    return label;
}

DeviceFixture load_fixture(const std::string& path) {
    const auto cfg = Config::load(path);
    DeviceFixture fx;
    fx.name = cfg.get_string("name");
    fx.category = cfg.get_string("category");
    const auto tap = cfg.get_string("tap");
    if (tap == "data_line") fx.tap = TapKind::data_line;
    else if (tap == "activity_envelope") fx.tap = TapKind::activity_envelope;
    else if (tap == "static_state") fx.tap = TapKind::static_state;
    else throw ConfigError(path + ": unknown tap '" + tap + "'");
    if (cfg.has("min_pulse")) {
        fx.min_pulse = cfg.get_double("min_pulse");
        if (!(*fx.min_pulse > 0.0)) throw ConfigError(path + ": min_pulse must be positive");
    }
    const auto side = cfg.get_string("side", "n/a");
    fx.side = side == "red" ? Side::red : side == "black" ? Side::black : Side::na;
    fx.rated_rate = cfg.get_double("rated_rate", 9600.0);
    fx.expected = parse_class(cfg.get_string("expected_class"));
    return fx;
}

std::vector<DeviceFixture> load_fixture_suite(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".fix") paths.push_back(e.path().string());
    std::sort(paths.begin(), paths.end());
    std::vector<DeviceFixture> out;
    for (const auto& p : paths) out.push_back(load_fixture(p));
    return out;
}

double SurveyReport::class_iii_fraction() const {
    return rows.empty() ? 0.0 : static_cast<double>(count_iii) / static_cast<double>(rows.size());
}

std::string SurveyReport::to_csv() const {
    std::string s = "device,category,tap,class_i,class_ii,class_iii,modulation_depth,min_pulse_s,ber,side\n";
    for (const auto& r : rows) {
        const auto c = r.label.cls;
        s += fmt::format("\"{}\",{},{},{},{},{},{:.4f},{},{},{}\n", r.fixture.name, r.fixture.category,
                         tap_name(r.fixture.tap), c == EmanationClass::I ? "*" : "", c == EmanationClass::II ? "*" : "",
                         c == EmanationClass::III ? "*" : "", r.label.modulation_depth,
                         r.label.min_pulse_observed ? fmt::format("{:.6g}", *r.label.min_pulse_observed) : "",
                         r.label.ber ? fmt::format("{:.4g}", *r.label.ber) : "", side_name(r.fixture.side));
    }
    s += fmt::format("# total={} class_i={} class_ii={} class_iii={} class_iii_fraction={:.3f} red_side_exposed={}\n",
                     rows.size(), count_i, count_ii, count_iii, class_iii_fraction(), red_side_exposed);
    return s;
}

OpticalWaveform synthesize_fixture(const DeviceFixture& fx, std::span<const std::uint8_t> payload, double sample_rate,
                                   const FrameFormat& fmt) {
    // The tail outlasts the hold so a slow activity light is seen going dark.
    constexpr double lead = 0.010;
    const double tail = std::max(0.030, 2.0 * fx.min_pulse.value_or(0.0));
    LedModel led;
    LineWaveform line;
    if (fx.tap == TapKind::static_state) {
        const double span = lead + static_cast<double>(payload.size()) * character_interval(fmt) + tail;
        line = LineWaveform::constant(lit_level(led.polarity), span);
    } else {
        const auto data = encode(payload, fmt, 0.0, lead);
        line = LineWaveform(data.initial_level(), data.transitions(), data.duration() + tail);
        if (fx.tap == TapKind::activity_envelope) {
            StretcherConfig cfg;
            cfg.min_on = fx.min_pulse.value_or(constants::class_ii_pulse_s);
            line = stretch(line, cfg);
        }
    }
    return drive(line, led, sample_rate);
}

SurveyReport survey(const std::vector<DeviceFixture>& fixtures, const ChannelModel& scenario, std::uint64_t seed,
                    const SurveyOptions& opts) {
    if (fixtures.empty()) throw std::invalid_argument("survey: empty fixture list");
    SurveyReport rep;
    rep.rows.resize(fixtures.size());
    const long n = static_cast<long>(fixtures.size());
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
    for (long i = 0; i < n; ++i) {
        const auto& fx = fixtures[static_cast<std::size_t>(i)];
        const FrameFormat fmt(fx.rated_rate);
        const auto payload = random_bytes(opts.payload_bytes, mix_seed(seed, 1000 + static_cast<std::uint64_t>(i)));
        const auto optical = synthesize_fixture(fx, payload, default_sample_rate(fx.rated_rate), fmt);
        ClassifyOptions co;
        co.channel = scenario;
        co.seed = mix_seed(seed, static_cast<std::uint64_t>(i));
        rep.rows[static_cast<std::size_t>(i)] = {fx, classify(optical, payload, fmt, co)};
    }
    for (const auto& r : rep.rows) {
        switch (r.label.cls) {
            case EmanationClass::I: ++rep.count_i; break;
            case EmanationClass::II: ++rep.count_ii; break;
            case EmanationClass::III:
                ++rep.count_iii;
                if (r.fixture.side == Side::red) ++rep.red_side_exposed;
                break;
        }
    }
    return rep;
}

}  // namespace ledtap
