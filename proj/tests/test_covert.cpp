#include <doctest.h>

#include <array>
#include <random>

#include "ledtap/channel.hpp"
#include "ledtap/covert.hpp"
#include "ledtap/emitter.hpp"
#include "ledtap/errors.hpp"
#include "ledtap/sweep.hpp"

using namespace ledtap;

namespace {

std::vector<std::uint8_t> bytes(const std::string& s) { return {s.begin(), s.end()}; }

std::array<SampledWaveform, 3> record(const std::vector<LedScheduleEvent>& ev, const CovertScheme& sc,
                                      bool noiseless = false) {
    ChannelModel ch;
    ch.distance = 10.0;
    ch.ambient = AmbientModel::preset("dark_room");
    if (noiseless) ch = ch.noiseless();
    const double T = sc.symbol_period();
    const auto lines = schedule_to_lines(ev, 2 * T, 0, 2 * T);
    std::array<SampledWaveform, 3> out;
    for (std::size_t j = 0; j < 3; ++j) out[j] = transmit(lines[j], LedModel{}, ch, 200e3, 100 + j);
    return out;
}

}  // namespace

TEST_CASE("'M' at 50 b/s follows the listing cadence") {
    const CovertScheme sc{CovertKind::single_async, 50.0};
    CHECK(sc.symbol_period() == doctest::Approx(0.020));
    const auto m = bytes("M");
    const auto ev = encode_message(m, sc);
    const auto lines = schedule_to_lines(ev, 0.0);
    const int want[] = {1, 1, 0, 1, 1, 0, 0, 1, 0, 0};
    for (int i = 0; i < 10; ++i) CHECK((lines[0].level_at((i + 0.5) * 0.020) == Level::space) == (want[i] == 1));
    CHECK(schedule_end(ev) == doctest::Approx(10 * 0.020));
}

TEST_CASE("empty message only restores the saved state") {
    for (auto kind : {CovertKind::single_async, CovertKind::tri_parallel, CovertKind::sync_serial, CovertKind::diff_manchester}) {
        const auto ev = encode_message({}, CovertScheme{kind, 150.0}, led_num);
        REQUIRE_FALSE(ev.empty());
        for (const auto& e : ev) CHECK(e.time == 0.0);
        const auto lines = schedule_to_lines(ev, 0.01, led_num);
        CHECK(lines[0].final_level() == Level::mark);
        CHECK(lines[1].final_level() == Level::space);
        CHECK(lines[2].final_level() == Level::mark);
    }
}

TEST_CASE("tri-parallel aggregate rate is three LEDs at a third of the rate") {
    const CovertScheme sc{CovertKind::tri_parallel, 450.0};
    CHECK(1.0 / sc.symbol_period() == doctest::Approx(150.0));
    CHECK_THROWS(CovertScheme{CovertKind::single_async, 20000.0}.validate());
    CHECK_THROWS(CovertScheme{CovertKind::single_async, 0.5}.validate());
}

TEST_CASE("schedules restore the captured state and keep their cadence") {
    std::mt19937_64 gen(2);
    for (auto kind : {CovertKind::single_async, CovertKind::tri_parallel, CovertKind::sync_serial, CovertKind::diff_manchester}) {
        for (std::uint8_t saved : {0, 1, 5, 7}) {
            std::string text;
            for (int i = 0; i < 5; ++i) text.push_back(static_cast<char>('a' + gen() % 26));
            const CovertScheme sc{kind, 150.0};
            const auto ev = encode_message(bytes(text), sc, saved);
            for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i].time >= ev[i - 1].time);
            const auto lines = schedule_to_lines(ev, 0.01, saved);
            for (std::size_t j = 0; j < 3; ++j)
                CHECK((lines[j].final_level() == Level::space) == ((saved >> j) & 1));
            // Total time: whole symbols at the symbol period, within one period.
            const double bits = 8.0 * static_cast<double>(text.size());
            double symbols = 0;
            switch (kind) {
                case CovertKind::single_async: symbols = 10.0 * static_cast<double>(text.size()); break;
                case CovertKind::tri_parallel: symbols = 5.0 * static_cast<double>(text.size()); break;
                case CovertKind::sync_serial: symbols = bits; break;
                case CovertKind::diff_manchester: symbols = std::ceil(bits / 3.0) + 1; break;
            }
            CHECK(std::abs(schedule_end(ev) - symbols * sc.symbol_period()) <= sc.symbol_period() + 1e-12);
        }
    }
}

TEST_CASE("round trips through the receiver") {
    std::mt19937_64 gen(9);
    for (auto kind : {CovertKind::single_async, CovertKind::tri_parallel, CovertKind::sync_serial, CovertKind::diff_manchester}) {
        for (bool mid_one : {false, true}) {
            if (mid_one && kind != CovertKind::diff_manchester) continue;
            std::vector<std::uint8_t> text(6);
            for (auto& c : text) c = static_cast<std::uint8_t>(gen());
            const CovertScheme sc{kind, 450.0, mid_one};
            const auto w = record(encode_message(text, sc), sc);
            CHECK(decode_message(w, sc) == text);
        }
    }
}

TEST_CASE("differential Manchester tolerates an inverted LED") {
    const CovertScheme sc{CovertKind::diff_manchester, 150.0};
    const auto text = bytes("polarity");
    auto w = record(encode_message(text, sc), sc, true);
    double hi = 0;
    for (double v : w[1].samples) hi = std::max(hi, v);
    for (auto& v : w[1].samples) v = hi - v;
    CHECK(decode_message(w, sc) == text);
}

TEST_CASE("decoder error paths") {
    const CovertScheme sc{CovertKind::single_async, 50.0};
    std::array<SampledWaveform, 3> w;
    CHECK_THROWS(decode_message(std::span<const SampledWaveform>(w.data(), 2), sc));
}

TEST_CASE("scan-code stream framing") {
    const auto idle = scan_stream({}, 10000);
    CHECK(idle.transitions().empty());
    const auto dark = drive(idle, LedModel{}, 200e3);
    for (double v : dark.samples) CHECK(v == 0.0);

    const double ui = 1e-4;
    const auto one = scan_stream({{0x1C, KeyAction::make, 0.002}}, 10000);
    REQUIRE_FALSE(one.transitions().empty());
    CHECK(one.transitions().front().time == doctest::Approx(0.002));
    CHECK(one.transitions().back().time <= 0.002 + 11 * ui + 1e-12);
    const auto lit = one.intervals(Level::space);
    CHECK(lit.front().first >= 0.002 - 1e-12);
    CHECK(lit.back().second <= 0.002 + 11 * ui + 1e-12);

    CHECK_THROWS(scan_stream({}, 5000));
}

TEST_CASE("typed text round trips with make/break timing") {
    const double rate = 10000;
    const auto keys = type_text("go Go", 0.01, 0.08);
    const auto line = scan_stream(keys, rate);
    const auto det = drive(line, LedModel{}, 200e3);
    const auto r = decode_scan(det, rate);
    CHECK(r.text == "go Go");
    REQUIRE(r.events.size() == keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        CHECK(r.events[i].code == keys[i].code);
        CHECK(r.events[i].kind == keys[i].kind);
        CHECK(std::abs(r.events[i].time - keys[i].time) <= 1.0 / rate);
    }
    CHECK(r.framing_errors == 0);
    CHECK(r.parity_errors == 0);
}

TEST_CASE("unknown scan codes are kept and flagged") {
    const auto line = scan_stream({{0xE7, KeyAction::make, 0.001}, {0x1C, KeyAction::make, 0.01}}, 12000);
    const auto r = decode_scan(drive(line, LedModel{}, 200e3), 12000);
    REQUIRE(r.events.size() == 2);
    CHECK(r.events[0].code == 0xE7);
    CHECK_FALSE(r.events[0].known);
    CHECK(r.unknown_codes == 1);
    CHECK(r.text == "a");
}

TEST_CASE("scheme names") {
    for (auto k : {CovertKind::single_async, CovertKind::tri_parallel, CovertKind::sync_serial, CovertKind::diff_manchester})
        CHECK(parse_covert_kind(to_string(k)) == k);
    CHECK_THROWS(parse_covert_kind("smoke_signals"));
}
