#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ledtap/channel.hpp"
#include "ledtap/classifier.hpp"
#include "ledtap/emitter.hpp"
#include "ledtap/lineproto.hpp"
#include "ledtap/receiver.hpp"

namespace ledtap {

struct LinkOptions {
    double sample_rate = 0.0;  // 0 picks max(200 kHz, 20 x bit rate)
    bool suppress = true;
    bool compute_k = true;
    std::size_t lag_window = 1u << 18;  // samples used for the alignment search
    SamplingMode sampling = SamplingMode::mid_bit;
};

struct LinkResult {
    LineWaveform line;
    DetectorWaveform detector;  // after suppression when enabled
    RecoveryResult recovery;
    double k = 0.0;
    bool flat = false;  // binarizer found no usable swing
};

double default_sample_rate(double bit_rate);

/// drive -> propagate -> optional suppress (skipped under a dark ambient); the detector record of one indicator.
DetectorWaveform transmit(const LineWaveform& line, const LedModel& led, const ChannelModel& channel, double sample_rate,
                          std::uint64_t seed, bool suppress = true);

/// encode -> drive -> propagate -> suppress -> binarize -> decode, scored against the payload.
LinkResult simulate_link(std::span<const std::uint8_t> payload, const FrameFormat& fmt, const LedModel& led,
                         const ChannelModel& channel, std::uint64_t seed, const LinkOptions& opts = {});

struct SweepSpec {
    std::vector<double> distances{5, 10, 15, 20, 25, 30, 35, 38};
    std::vector<double> rates{300, 600, 1200, 2400, 4800, 9600, 19200};
    std::vector<std::string> ambients{"fluorescent_office"};
    std::vector<std::uint64_t> seeds{1};
    std::string frame = "8N1";
    bool noise = true;

    void validate() const;
    std::size_t cells() const { return distances.size() * rates.size() * ambients.size() * seeds.size(); }
};

struct SweepRow {
    double distance;
    double rate;
    std::string ambient;
    std::uint64_t seed;
    double ber;
    double k;
    std::size_t framing_errors;
    EmanationClass cls;
};

/// Rows come out in cell order (ambient, rate, distance, seed) whatever the schedule.
std::vector<SweepRow> run_sweep_serial(const SweepSpec& spec, std::span<const std::uint8_t> payload,
                                       const ChannelModel& base, const LedModel& led, const LinkOptions& opts = {});
std::vector<SweepRow> run_sweep_omp(const SweepSpec& spec, std::span<const std::uint8_t> payload,
                                    const ChannelModel& base, const LedModel& led, const LinkOptions& opts = {});

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace ledtap
