// Reference LED response: RK4 integration of dy/dt = (target - y) / tau with
// steps split at every line transition. Independent of the library's
// closed-form relaxation.
#pragma once

#include <cmath>
#include <vector>

#include "ledtap/emitter.hpp"
#include "ledtap/waveform.hpp"

namespace oracle {

inline std::vector<double> led_response(const ledtap::LineWaveform& line, const ledtap::LedModel& led,
                                        double sample_rate, int substeps = 200) {
    const double tau_r = led.rise_time / std::log(9.0), tau_f = led.fall_time / std::log(9.0);
    const auto lit = ledtap::lit_level(led.polarity);
    const auto n = static_cast<std::size_t>(std::floor(line.duration() * sample_rate + 1e-9));
    std::vector<double> out(n);
    double y = line.initial_level() == lit ? led.peak_intensity : 0.0;
    double t = 0.0;
    const auto& tr = line.transitions();
    std::size_t next = 0;
    auto rhs = [&](double target, double v) { return (target - v) / (target > 0.0 ? tau_r : tau_f); };
    auto advance = [&](double to) {
        while (to > t) {
            // Level in force over [t, to): the one set by the last transition at or before t.
            while (next < tr.size() && tr[next].time <= t) ++next;
            const double seg_end = next < tr.size() ? std::min(to, tr[next].time) : to;
            const double target = line.level_at(t) == lit ? led.peak_intensity : 0.0;
            const double h = (seg_end - t) / substeps;
            for (int s = 0; s < substeps && h > 0.0; ++s) {
                const double k1 = rhs(target, y), k2 = rhs(target, y + 0.5 * h * k1);
                const double k3 = rhs(target, y + 0.5 * h * k2), k4 = rhs(target, y + h * k3);
                y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            }
            t = seg_end;
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        advance(static_cast<double>(i) / sample_rate);
        out[i] = y;
    }
    return out;
}

}  // namespace oracle
