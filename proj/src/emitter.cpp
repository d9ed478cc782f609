#include "ledtap/emitter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ledtap/errors.hpp"

namespace ledtap {

void LedModel::validate() const {
    if (!(rise_time > 0.0) || !(fall_time > 0.0)) throw std::invalid_argument("LedModel: rise/fall time must be positive");
    if (!(peak_intensity > 0.0)) throw std::invalid_argument("LedModel: peak intensity must be positive");
}

double time_constant(double t_10_90) { return t_10_90 / std::log(9.0); }

OpticalWaveform drive(const LineWaveform& line, const LedModel& led, double sample_rate) {
    led.validate();
    if (!(sample_rate > 0.0)) throw std::invalid_argument("drive: sample rate must be positive");
    const double shortest = line.shortest_pulse();
    if (std::isfinite(shortest) && sample_rate * shortest < 10.0 * (1.0 - 1e-9))
        throw SampleRateTooLow("drive needs at least 10 samples across the shortest pulse");

    const Level lit = lit_level(led.polarity);
    const double tau_rise = time_constant(led.rise_time);
    const double tau_fall = time_constant(led.fall_time);
    const double dt = 1.0 / sample_rate;
    const double step_rise = std::exp(-dt / tau_rise);
    const double step_fall = std::exp(-dt / tau_fall);

    OpticalWaveform out;
    out.sample_rate = sample_rate;
    const auto n = static_cast<std::size_t>(std::floor(line.duration() * sample_rate + 1e-9));
    out.samples.resize(n);

    const auto& tr = line.transitions();
    std::size_t next = 0;
    double target = line.initial_level() == lit ? led.peak_intensity : 0.0;
    bool rising = target > 0.0;
    double y = target;  // steady state before t = 0
    double t = 0.0;     // time at which y is valid

    auto relax = [&](double span) {
        const double tau = rising ? tau_rise : tau_fall;
        y = target + (y - target) * std::exp(-span / tau);
    };

    for (std::size_t i = 0; i < n; ++i) {
        const double ti = static_cast<double>(i) * dt;
        bool exact = false;
        while (next < tr.size() && tr[next].time <= ti) {
            relax(tr[next].time - t);
            t = tr[next].time;
            target = tr[next].level == lit ? led.peak_intensity : 0.0;
            rising = target > 0.0;
            ++next;
            exact = true;
        }
        if (exact || i == 0) {
            relax(ti - t);
        } else {
            y = target + (y - target) * (rising ? step_rise : step_fall);
        }
        t = ti;
        out.samples[i] = std::clamp(y, 0.0, led.peak_intensity);
    }
    return out;
}

StretcherConfig StretcherConfig::ui_multiple(const FrameFormat& fmt, double multiple) {
    StretcherConfig c;
    c.min_on = multiple * unit_interval(fmt);
    c.mode = StretchMode::unit_interval_multiple;
    return c;
}

StretcherConfig StretcherConfig::whole_character(const FrameFormat& fmt) {
    StretcherConfig c;
    c.min_on = character_interval(fmt);
    c.mode = StretchMode::character_interval;
    return c;
}

LineWaveform stretch(const LineWaveform& line, const StretcherConfig& cfg) {
    if (!(cfg.min_on > 0.0)) throw std::invalid_argument("stretch: min_on must be positive");
    if (cfg.min_off && !(*cfg.min_off > 0.0)) throw std::invalid_argument("stretch: min_off must be positive");

    const Level lit = lit_level(cfg.polarity);
    const auto lit_iv = line.intervals(lit);
    if (lit_iv.empty()) return line;

    // Gaps below rounding noise of the hold time are a retrigger, not a dark pulse.
    const double slack = 1e-9 * cfg.min_on;
    std::vector<std::pair<double, double>> held;
    for (const auto& [a, b] : lit_iv) {
        const double end = std::max(b, a + cfg.min_on);
        if (!held.empty() && a <= held.back().second + slack) {
            held.back().second = std::max(held.back().second, end);
        } else {
            held.emplace_back(a, end);
        }
    }
    if (cfg.min_off) {
        std::vector<std::pair<double, double>> merged;
        for (const auto& iv : held) {
            if (!merged.empty() && iv.first - merged.back().second < *cfg.min_off) {
                merged.back().second = std::max(merged.back().second, iv.second);
            } else {
                merged.push_back(iv);
            }
        }
        held = std::move(merged);
    }

    const double duration = std::max(line.duration(), held.back().second);
    const Level dark = opposite(lit);
    std::vector<Transition> tr;
    Level initial = dark;
    for (const auto& [a, b] : held) {
        if (a <= 0.0) initial = lit;
        else tr.push_back({a, lit});
        if (b < duration) tr.push_back({b, dark});
    }
    return LineWaveform(initial, std::move(tr), duration);
}

ResidualCapacity residual_timing_capacity(const FrameFormat& fmt) {
    return {character_interval(fmt) / unit_interval(fmt), 1.0 / character_interval(fmt)};
}

}  // namespace ledtap
