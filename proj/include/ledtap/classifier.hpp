#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ledtap/channel.hpp"
#include "ledtap/lineproto.hpp"
#include "ledtap/waveform.hpp"

namespace ledtap {

enum class EmanationClass : std::uint8_t { I = 1, II = 2, III = 3 };

std::string to_string(EmanationClass c);

struct ClassLabel {
    EmanationClass cls = EmanationClass::I;
    double modulation_depth = 0.0;
    std::optional<double> min_pulse_observed;
    std::optional<double> ber;
    std::optional<double> k;
};

struct ClassifyOptions {
    double ber_threshold = 1e-2;
    double modulation_threshold = 0.01;
    std::optional<ChannelModel> channel;  // absent: classify the optical waveform directly
    std::uint64_t seed = 1;
};

/// Unmodulated -> I; content recovered with BER at or under threshold -> III; otherwise II.
ClassLabel classify(const OpticalWaveform& optical, std::span<const std::uint8_t> truth, const FrameFormat& fmt,
                    const ClassifyOptions& opts = {});

enum class TapKind : std::uint8_t { data_line, activity_envelope, static_state };
enum class Side : std::uint8_t { red, black, na };

struct DeviceFixture {
    std::string name;
    std::string category;
    TapKind tap = TapKind::data_line;
    std::optional<double> min_pulse;
    Side side = Side::na;
    double rated_rate = 9600.0;
    EmanationClass expected = EmanationClass::III;  // reference verdict carried by the fixture file
};

/// Reads one key=value fixture file. Throws ConfigError with the line number.
DeviceFixture load_fixture(const std::string& path);
/// All *.fix files in `dir`, sorted by file name.
std::vector<DeviceFixture> load_fixture_suite(const std::string& dir);

struct SurveyRow {
    DeviceFixture fixture;
    ClassLabel label;
};

struct SurveyReport {
    std::vector<SurveyRow> rows;
    std::size_t count_i = 0, count_ii = 0, count_iii = 0;
    std::size_t red_side_exposed = 0;  // Class III rows on the red side

    double class_iii_fraction() const;
    /// Delimited table with one bullet column per class.
    std::string to_csv() const;
};

struct SurveyOptions {
    std::size_t payload_bytes = 48;
    bool parallel = true;
};

SurveyReport survey(const std::vector<DeviceFixture>& fixtures, const ChannelModel& scenario, std::uint64_t seed,
                    const SurveyOptions& opts = {});

/// Optical output of a fixture carrying `payload`.
OpticalWaveform synthesize_fixture(const DeviceFixture& fx, std::span<const std::uint8_t> payload,
                                   double sample_rate, const FrameFormat& fmt);

}  // namespace ledtap
