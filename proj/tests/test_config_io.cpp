#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ledtap/config.hpp"
#include "ledtap/errors.hpp"
#include "ledtap/figures.hpp"
#include "ledtap/io.hpp"
#include "ledtap/svg.hpp"

using namespace ledtap;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("ledtap_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("config sections, comments and lists") {
    const auto c = Config::parse("top = 1\n[a]\nx = 2.5   # trailing\n# whole line\nlist = 1, 2,3\nname = hello world\n");
    CHECK(c.get_double("top") == 1.0);
    CHECK(c.get_double("a.x") == 2.5);
    CHECK(c.get_list("a.list") == std::vector<double>{1, 2, 3});
    CHECK(c.get_string("a.name") == "hello world");
    CHECK(c.get_double("a.missing", 7.0) == 7.0);
    CHECK_THROWS_AS(c.get_double("a.missing"), ConfigError);
}

TEST_CASE("config errors carry line numbers") {
    try {
        Config::parse("[ok]\na = 1\nnot a pair\n", "demo.conf");
        FAIL("no throw");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("demo.conf:3") != std::string::npos);
    }
    const auto c = Config::parse("[s]\nv = abc\n", "x.conf");
    try {
        c.get_double("s.v");
        FAIL("no throw");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("x.conf:2") != std::string::npos);
    }
}

TEST_CASE("bundled defaults carry the anchored constants") {
    const auto& d = Config::defaults();
    CHECK(d.get_double("channel.responsivity") == 0.45);
    CHECK(d.get_double("channel.aperture_diameter") == 0.100);
    CHECK(d.get_double("amplifier.low_gain_bandwidth") == 45e3);
    CHECK(d.get_double("optics.wavelength_nm") == 650);
    auto m = d;
    m.merge(Config::parse("[channel]\ndistance = 17\n"));
    CHECK(channel_from_config(m).distance == 17.0);
}

TEST_CASE("waveform files round trip") {
    const auto dir = scratch("wave");
    SampledWaveform w{1234.5, 0.25, {0.0, 1.5, -2.25, 1e-300, 3.0}};
    for (auto f : {io::SampleFormat::binary_f64, io::SampleFormat::csv}) {
        const auto path = (dir / (f == io::SampleFormat::csv ? "w.csv" : "w.f64")).string();
        io::write_waveform(path, w, f, "V", {{"note", "x"}});
        const auto r = io::read_waveform(path);
        CHECK(r.sample_rate == w.sample_rate);
        CHECK(r.start_time == w.start_time);
        CHECK(r.samples == w.samples);
    }
    CHECK_THROWS(io::read_waveform((dir / "missing.f64").string()));
}

TEST_CASE("event and schedule files round trip") {
    const auto dir = scratch("events");
    const std::vector<TransitionEvent> ev{{1e-4, Direction::up, 1}, {2.5e-4, Direction::down, 2}};
    io::write_events((dir / "e.csv").string(), ev);
    CHECK(io::read_events((dir / "e.csv").string()) == ev);
    const std::vector<LedScheduleEvent> s{{0.0, led_caps, true}, {0.02, static_cast<std::uint8_t>(led_caps | led_num), false}};
    io::write_schedule((dir / "s.csv").string(), s);
    CHECK(io::read_schedule((dir / "s.csv").string()) == s);
}

TEST_CASE("figures write svg and csv") {
    const auto dir = scratch("fig");
    FigureParams p;
    p.streams = 4;
    p.chars_per_stream = 4;
    for (auto k : {FigureKind::stretcher, FigureKind::diffuse_sum, FigureKind::ui_spectrum, FigureKind::emanation_trace}) {
        const auto files = emit_figure(k, p, dir.string());
        const auto svg = io::read_text(files.svg_path);
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
        CHECK(std::filesystem::file_size(files.csv_path) > 0);
        CHECK(parse_figure_kind(to_string(k)) == k);
    }
    const auto csv = io::read_text((dir / "diffuse_sum.csv").string());
    CHECK(csv.rfind("time_ms,level", 0) == 0);
}

TEST_CASE("svg escapes labels") {
    svg::Plot p;
    p.title = "a < b & c";
    p.series.push_back({{0, 1}, {0, 1}, "s", "#000", false});
    const auto s = svg::render(p);
    CHECK(s.find("a &lt; b &amp; c") != std::string::npos);
}
