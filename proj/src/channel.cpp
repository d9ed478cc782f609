#include "ledtap/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "ledtap/config.hpp"
#include "ledtap/constants.hpp"
#include "ledtap/dsp.hpp"
#include "ledtap/errors.hpp"
#include "ledtap/rng.hpp"

namespace ledtap {

AmbientModel AmbientModel::preset(const std::string& name) { return ambient_from_config(Config::defaults(), name); }

const std::vector<std::string>& AmbientModel::preset_names() {
    static const std::vector<std::string> names{"daylight_office", "fluorescent_office", "night_office", "dark_room"};
    return names;
}

double AmbientModel::highest_frequency() const {
    double f = 0.0;
    for (const auto& [h, a] : harmonics)
        if (a > 0.0) f = std::max(f, h * mains_hz);
    for (const auto& [hz, a] : hf_components)
        if (a > 0.0) f = std::max(f, hz);
    return f;
}

bool AmbientModel::is_dark() const {
    if (dc_level != 0.0) return false;
    for (const auto& [h, a] : harmonics)
        if (a != 0.0) return false;
    for (const auto& [hz, a] : hf_components)
        if (a != 0.0) return false;
    return true;
}

void ChannelModel::validate() const {
    if (!(distance > 0.0)) throw std::invalid_argument("ChannelModel: distance must be positive");
    if (!(filter_transmission > 0.0 && filter_transmission <= 1.0))
        throw std::invalid_argument("ChannelModel: filter transmission must lie in (0, 1]");
    if (!(responsivity > 0.0)) throw std::invalid_argument("ChannelModel: responsivity must be positive");
    if (!(amp_gain > 0.0)) throw std::invalid_argument("ChannelModel: amplifier gain must be positive");
    if (!(aperture_diameter > 0.0)) throw std::invalid_argument("ChannelModel: aperture must be positive");
    if (thermal_noise_density < 0.0) throw std::invalid_argument("ChannelModel: noise density must be non-negative");
    if (ambient.dc_level < 0.0) throw std::invalid_argument("AmbientModel: amplitudes must be non-negative");
    for (const auto& [h, a] : ambient.harmonics)
        if (a < 0.0 || h < 1) throw std::invalid_argument("AmbientModel: bad harmonic entry");
    for (const auto& [hz, a] : ambient.hf_components)
        if (a < 0.0 || hz <= 0.0) throw std::invalid_argument("AmbientModel: bad component entry");
}

ChannelModel ChannelModel::noiseless() const {
    ChannelModel m = *this;
    m.thermal_noise_density = 0.0;
    m.include_shot_noise = false;
    return m;
}

double ChannelModel::geometric_gain() const {
    const double r = aperture_diameter / 2.0;
    return std::numbers::pi * r * r / (distance * distance) * filter_transmission;
}

double amp_bandwidth(double gain) {
    using namespace constants;
    if (!(gain > 0.0)) throw std::invalid_argument("amp_bandwidth: gain must be positive");
    const double g = std::clamp(gain, 1e3, 1e8);
    const double slope = std::log(high_gain_bandwidth_hz / low_gain_bandwidth_hz) /
                         std::log(high_gain_v_per_a / low_gain_v_per_a);
    // Evaluate from the nearer anchor so both anchors come back exactly.
    if (g * g < low_gain_v_per_a * high_gain_v_per_a)
        return low_gain_bandwidth_hz * std::pow(g / low_gain_v_per_a, slope);
    return high_gain_bandwidth_hz * std::pow(g / high_gain_v_per_a, slope);
}

OpticalWaveform ambient_waveform(const AmbientModel& model, double duration, double sample_rate, std::uint64_t seed) {
    if (!(sample_rate > 0.0)) throw std::invalid_argument("ambient_waveform: sample rate must be positive");
    if (sample_rate <= 2.0 * model.highest_frequency())
        throw SampleRateTooLow("ambient component above Nyquist");
    OpticalWaveform out;
    out.sample_rate = sample_rate;
    const auto n = static_cast<std::size_t>(std::floor(duration * sample_rate + 1e-9));
    out.samples.assign(n, model.dc_level);

    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    auto add_tone = [&](double hz, double amp) {
        const double ph = phase(gen);
        if (amp == 0.0) return;
        const double w = 2.0 * std::numbers::pi * hz / sample_rate;
        for (std::size_t i = 0; i < n; ++i) out.samples[i] += amp * std::sin(w * static_cast<double>(i) + ph);
    };
    for (const auto& [h, a] : model.harmonics) add_tone(h * model.mains_hz, a);
    for (const auto& [hz, a] : model.hf_components) add_tone(hz, a);
    return out;
}

DetectorWaveform propagate(const OpticalWaveform& optical, const ChannelModel& model, std::uint64_t seed) {
    model.validate();
    const double fs = optical.sample_rate;
    const double bw = amp_bandwidth(model.amp_gain);
    if (!(fs >= 2.0 * bw)) throw SampleRateTooLow("detector sampling below twice the amplifier bandwidth");

    const std::size_t n = optical.size();
    const double geo = model.geometric_gain();
    DetectorWaveform out;
    out.sample_rate = fs;
    out.start_time = optical.start_time;
    out.samples.resize(n);

    // Photocurrent in amperes.
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = model.responsivity * geo * optical.samples[i];
    if (!model.ambient.is_dark()) {
        const auto amb = ambient_waveform(model.ambient, static_cast<double>(n) / fs, fs, mix_seed(seed, 1));
        for (std::size_t i = 0; i < n && i < amb.size(); ++i) out.samples[i] += model.responsivity * amb.samples[i];
    }

    double var = model.thermal_noise_density * model.thermal_noise_density * fs / 2.0;
    if (model.include_shot_noise) {
        const double mean_current = std::max(0.0, dsp::mean(out.samples));
        var += constants::electron_charge * mean_current * fs * model.amp_gain * model.amp_gain;
    }
    for (auto& v : out.samples) v *= model.amp_gain;
    if (var > 0.0) {
        std::mt19937_64 gen(mix_seed(seed, 2));
        std::normal_distribution<double> noise(0.0, std::sqrt(var));
        for (auto& v : out.samples) v += noise(gen);
    }
    dsp::one_pole_lowpass(out.samples, bw, fs);
    if (model.clip_ceiling) {
        for (auto& v : out.samples) v = std::min(v, *model.clip_ceiling);
    }
    return out;
}

}  // namespace ledtap
