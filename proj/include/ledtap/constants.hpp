#pragma once

// Apparatus figures the model is anchored to. data/default.conf carries the
// same numbers for runtime configuration.
namespace ledtap::constants {

inline constexpr double responsivity_a_per_w = 0.45;
inline constexpr double aperture_diameter_m = 0.100;
inline constexpr double filter_center_nm = 650.0;
inline constexpr double low_gain_v_per_a = 1e4;
inline constexpr double low_gain_bandwidth_hz = 45e3;
inline constexpr double high_gain_v_per_a = 1e7;
inline constexpr double high_gain_bandwidth_hz = 10e3;
inline constexpr double mains_ripple_hz = 120.0;
inline constexpr double electron_charge = 1.602176634e-19;

inline constexpr double class_ii_pulse_s = 20e-3;
inline constexpr double stretcher_min_on_ui = 1.5;

}  // namespace ledtap::constants
