#pragma once

#include <optional>

#include "ledtap/lineproto.hpp"
#include "ledtap/waveform.hpp"

namespace ledtap {

/// Which line level lights the indicator. Serial-line indicators normally
/// light on space so that an idle channel stays dark.
enum class Polarity : std::uint8_t { lit_on_space, lit_on_mark };

constexpr Level lit_level(Polarity p) { return p == Polarity::lit_on_space ? Level::space : Level::mark; }

struct LedModel {
    double rise_time = 20e-9;   // 10-90 %, seconds
    double fall_time = 20e-9;   // 90-10 %, seconds
    double peak_intensity = 1e-3;  // W/sr
    Polarity polarity = Polarity::lit_on_space;
    double wavelength_nm = 650.0;

    /// Throws std::invalid_argument unless rise, fall and peak are positive.
    void validate() const;
};

/// Single-pole time constant for a given 10-90 % transition time.
double time_constant(double t_10_90);

/// Radiant intensity of `led` driven by `line`, evaluated exactly at each
/// sample instant. The LED starts in steady state for the line's initial level.
/// Throws SampleRateTooLow when sample_rate < 10 / line.shortest_pulse().
OpticalWaveform drive(const LineWaveform& line, const LedModel& led, double sample_rate);

enum class StretchMode : std::uint8_t { unit_interval_multiple, character_interval };

struct StretcherConfig {
    double min_on = 0.0;
    std::optional<double> min_off;
    StretchMode mode = StretchMode::unit_interval_multiple;
    Polarity polarity = Polarity::lit_on_space;

    static StretcherConfig ui_multiple(const FrameFormat& fmt, double multiple);
    /// Most conservative variant: hold for a full character interval.
    static StretcherConfig whole_character(const FrameFormat& fmt);
};

/// Retriggerable monostable applied to the lit level. Lit intervals are only
/// ever extended; overlapping holds merge. The waveform grows if a hold runs
/// past its end.
LineWaveform stretch(const LineWaveform& line, const StretcherConfig& cfg);

struct ResidualCapacity {
    double literal_ratio;      // t_character / t_UI
    double per_character_bps;  // one bit per character event
};

ResidualCapacity residual_timing_capacity(const FrameFormat& fmt);

}  // namespace ledtap
