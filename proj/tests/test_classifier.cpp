#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ledtap/classifier.hpp"
#include "ledtap/config.hpp"
#include "ledtap/emitter.hpp"
#include "ledtap/errors.hpp"
#include "ledtap/rng.hpp"
#include "ledtap/sweep.hpp"

using namespace ledtap;

namespace {

ChannelModel room(const std::string& ambient, double d = 1.0) {
    ChannelModel m;
    m.distance = d;
    m.ambient = AmbientModel::preset(ambient);
    return m;
}

DeviceFixture fixture(TapKind tap, std::optional<double> pulse = std::nullopt, double rate = 9600) {
    DeviceFixture fx;
    fx.name = "test";
    fx.category = "modem";
    fx.tap = tap;
    fx.min_pulse = pulse;
    fx.rated_rate = rate;
    return fx;
}

}  // namespace

TEST_CASE("constant-on indicator is Class I") {
    OpticalWaveform o;
    o.sample_rate = 200e3;
    o.samples.assign(20000, 1e-3);
    CHECK(classify(o, random_bytes(4, 1), FrameFormat(9600)).cls == EmanationClass::I);
}

TEST_CASE("20 ms pulses at 9600 b/s are Class II") {
    const FrameFormat f(9600);
    const auto payload = random_bytes(48, 2);
    const auto o = synthesize_fixture(fixture(TapKind::activity_envelope, 20e-3), payload, 200e3, f);
    ClassifyOptions co;
    co.channel = room("fluorescent_office");
    const auto label = classify(o, payload, f, co);
    CHECK(label.cls == EmanationClass::II);
    REQUIRE(label.min_pulse_observed);
    CHECK(*label.min_pulse_observed >= 20e-3 * 0.99);
}

TEST_CASE("data-line tap at short range is Class III") {
    const FrameFormat f(9600);
    const auto payload = random_bytes(48, 3);
    const auto o = synthesize_fixture(fixture(TapKind::data_line), payload, 200e3, f);
    ClassifyOptions co;
    co.channel = room("fluorescent_office");
    const auto label = classify(o, payload, f, co);
    CHECK(label.cls == EmanationClass::III);
    REQUIRE(label.ber);
    CHECK(*label.ber <= co.ber_threshold);
}

TEST_CASE("stretching any Class III drive never leaves it Class III") {
    for (double rate : {2400.0, 9600.0, 19200.0}) {
        const FrameFormat f(rate);
        const auto payload = random_bytes(48, static_cast<std::uint64_t>(rate));
        const auto line = encode(payload, f, 0.0, 0.01);
        const LineWaveform padded(line.initial_level(), line.transitions(), line.duration() + 0.03);
        for (double m : {1.5, 2.0, 4.0}) {
            const auto o = drive(stretch(padded, StretcherConfig::ui_multiple(f, m)), LedModel{}, default_sample_rate(rate));
            ClassifyOptions co;
            co.channel = room("dark_room");
            CHECK(classify(o, payload, f, co).cls != EmanationClass::III);
        }
    }
}

TEST_CASE("classification is deterministic and side-blind") {
    const FrameFormat f(9600);
    const auto payload = random_bytes(48, 4);
    auto fx = fixture(TapKind::data_line);
    const auto o = synthesize_fixture(fx, payload, 200e3, f);
    ClassifyOptions co;
    co.channel = room("fluorescent_office", 5);
    const auto a = classify(o, payload, f, co), b = classify(o, payload, f, co);
    CHECK(a.cls == b.cls);
    CHECK(a.ber == b.ber);
    CHECK(a.modulation_depth == b.modulation_depth);

    std::vector<DeviceFixture> suite{fx, fx, fx};
    suite[0].side = Side::red;
    suite[1].side = Side::black;
    const auto rep = survey(suite, room("fluorescent_office"), 9);
    CHECK(rep.rows[0].label.cls == rep.rows[1].label.cls);
    CHECK(rep.rows[1].label.cls == rep.rows[2].label.cls);
    CHECK(rep.red_side_exposed == 1);
}

TEST_CASE("survey corner cases") {
    std::vector<DeviceFixture> statics(5, fixture(TapKind::static_state));
    const auto rep = survey(statics, room("fluorescent_office"), 1);
    CHECK(rep.count_i == 5);
    CHECK(rep.class_iii_fraction() == 0.0);

    const auto one = survey({fixture(TapKind::data_line)}, room("dark_room"), 1);
    CHECK(one.count_iii == 1);
    CHECK_THROWS(survey({}, room("dark_room"), 1));
}

TEST_CASE("bundled fixture suite") {
    const auto suite = load_fixture_suite(data_dir() + "/fixtures");
    REQUIRE(suite.size() == 39);
    std::size_t iii = 0, i = 0;
    for (const auto& fx : suite) {
        iii += fx.expected == EmanationClass::III;
        i += fx.expected == EmanationClass::I;
        if (fx.tap == TapKind::data_line) CHECK(fx.expected == EmanationClass::III);
        if (fx.tap == TapKind::static_state) CHECK(fx.expected == EmanationClass::I);
    }
    CHECK(iii == 14);
    CHECK(i == 4);
}

TEST_CASE("fixture parsing errors") {
    const auto dir = std::filesystem::temp_directory_path() / "ledtap_fixture_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "bad.fix").string();
    std::ofstream(path) << "name = x\ncategory = lan\ntap = activity_envelope\nmin_pulse = -1\nexpected_class = II\n";
    CHECK_THROWS_AS(load_fixture(path), ConfigError);
    std::ofstream(path) << "name = x\ncategory = lan\ntap = blinking\nexpected_class = II\n";
    CHECK_THROWS_AS(load_fixture(path), ConfigError);
    std::ofstream(path) << "name = x\ncategory = lan\ntap = static_state\nside = red\nexpected_class = I\n";
    const auto fx = load_fixture(path);
    CHECK(fx.side == Side::red);
    CHECK(fx.tap == TapKind::static_state);
    std::filesystem::remove_all(dir);
}

TEST_CASE("survey report layout") {
    const auto rep = survey({fixture(TapKind::static_state), fixture(TapKind::data_line)}, room("dark_room"), 2);
    const auto csv = rep.to_csv();
    CHECK(csv.rfind("device,category,tap,class_i,class_ii,class_iii", 0) == 0);
    CHECK(csv.find("# total=2 class_i=1 class_ii=0 class_iii=1") != std::string::npos);
}
