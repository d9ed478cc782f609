#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ledtap/waveform.hpp"

namespace ledtap {

/// Background light reaching the detector, expressed as collected optical power.
struct AmbientModel {
    double dc_level = 0.0;          // W
    double mains_hz = 120.0;
    std::vector<std::pair<int, double>> harmonics;        // (index, W); index 1 is the fundamental
    std::vector<std::pair<double, double>> hf_components;  // (Hz, W)

    static AmbientModel preset(const std::string& name);
    static const std::vector<std::string>& preset_names();
    double highest_frequency() const;
    bool is_dark() const;
};

struct ChannelModel {
    double distance = 5.0;              // m
    double aperture_diameter = 0.100;   // m
    double filter_transmission = 0.9;
    double responsivity = 0.45;         // A/W
    double detector_area_mm2 = 1.0;
    double amp_gain = 1e4;              // V/A
    AmbientModel ambient;
    double thermal_noise_density = 16.5e-9;  // V/sqrt(Hz) at the amplifier output
    bool include_shot_noise = true;
    std::optional<double> clip_ceiling;  // V

    void validate() const;
    /// Copy with thermal and shot noise disabled.
    ChannelModel noiseless() const;
    /// Fraction of radiant intensity (W/sr) that lands on the detector as watts.
    double geometric_gain() const;
};

/// Transimpedance bandwidth: power law through (1e4 V/A, 45 kHz) and
/// (1e7 V/A, 10 kHz), held constant outside [1e3, 1e8] V/A.
double amp_bandwidth(double gain);

OpticalWaveform ambient_waveform(const AmbientModel& model, double duration, double sample_rate,
                                 std::uint64_t seed);

/// Detector voltage for `optical` seen through `model`. Noise is white before
/// the amplifier pole. Throws SampleRateTooLow when the rate is below twice the
/// amplifier bandwidth.
DetectorWaveform propagate(const OpticalWaveform& optical, const ChannelModel& model, std::uint64_t seed);

}  // namespace ledtap
