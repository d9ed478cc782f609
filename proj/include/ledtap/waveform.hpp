#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace ledtap {

/// EIA/TIA-232-E line state. Mark is logical 1 (idle), space is logical 0.
enum class Level : std::uint8_t { mark, space };

constexpr Level opposite(Level l) { return l == Level::mark ? Level::space : Level::mark; }
constexpr int logical_bit(Level l) { return l == Level::mark ? 1 : 0; }
constexpr Level level_for_bit(int bit) { return bit ? Level::mark : Level::space; }

struct Transition {
    double time;  // seconds
    Level level;  // level from `time` onwards
};

/// Piecewise-constant two-level signal on [0, duration), stored as exact
/// transition times.
class LineWaveform {
public:
    LineWaveform() = default;

    /// Throws std::invalid_argument unless times are strictly increasing, lie in
    /// [0, duration) and levels alternate starting from the opposite of `initial`.
    LineWaveform(Level initial, std::vector<Transition> transitions, double duration);

    static LineWaveform constant(Level level, double duration);

    Level initial_level() const { return initial_; }
    const std::vector<Transition>& transitions() const { return transitions_; }
    double duration() const { return duration_; }
    Level final_level() const;

    Level level_at(double t) const;

    /// Begins and ends at mark, as an idle EIA/TIA-232-E line does.
    bool idle_bounded() const;

    /// Maximal [begin, end) intervals spent at `level`, clipped to [0, duration).
    std::vector<std::pair<double, double>> intervals(Level level) const;

    /// Total time spent at `level`.
    double time_at(Level level) const;

    /// Shortest interval between consecutive transitions; +inf when fewer than two.
    double shortest_pulse() const;

    /// Same waveform delayed by `offset` seconds, padded with the initial level.
    LineWaveform shifted(double offset) const;

    /// Same waveform with every level swapped.
    LineWaveform inverted() const;

private:
    Level initial_ = Level::mark;
    std::vector<Transition> transitions_;
    double duration_ = 0.0;
};

/// Uniformly sampled real-valued series; sample i sits at start_time + i / sample_rate.
struct SampledWaveform {
    double sample_rate = 0.0;
    double start_time = 0.0;
    std::vector<double> samples;

    std::size_t size() const { return samples.size(); }
    double duration() const { return samples.empty() ? 0.0 : static_cast<double>(samples.size()) / sample_rate; }
    double time_at(std::size_t i) const { return start_time + static_cast<double>(i) / sample_rate; }
};

/// Radiant intensity of an emitter, watts per steradian (or any optical unit
/// when the waveform is a relative sum).
struct OpticalWaveform : SampledWaveform {};

/// Detector-amplifier output, volts.
struct DetectorWaveform : SampledWaveform {};

}  // namespace ledtap
