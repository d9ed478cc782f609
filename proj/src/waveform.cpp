#include "ledtap/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ledtap {

LineWaveform::LineWaveform(Level initial, std::vector<Transition> transitions, double duration)
    : initial_(initial), transitions_(std::move(transitions)), duration_(duration) {
    if (!(duration >= 0.0) || !std::isfinite(duration))
        throw std::invalid_argument("LineWaveform: duration must be finite and non-negative");
    Level prev = initial;
    double prev_t = -std::numeric_limits<double>::infinity();
    for (const auto& tr : transitions_) {
        if (!(tr.time >= 0.0) || !(tr.time < duration))
            throw std::invalid_argument("LineWaveform: transition time outside [0, duration)");
        if (!(tr.time > prev_t)) throw std::invalid_argument("LineWaveform: transition times must strictly increase");
        if (tr.level == prev) throw std::invalid_argument("LineWaveform: levels must alternate");
        prev = tr.level;
        prev_t = tr.time;
    }
}

LineWaveform LineWaveform::constant(Level level, double duration) { return LineWaveform(level, {}, duration); }

Level LineWaveform::final_level() const { return transitions_.empty() ? initial_ : transitions_.back().level; }

Level LineWaveform::level_at(double t) const {
    auto it = std::upper_bound(transitions_.begin(), transitions_.end(), t,
                               [](double v, const Transition& tr) { return v < tr.time; });
    if (it == transitions_.begin()) return initial_;
    return std::prev(it)->level;
}

bool LineWaveform::idle_bounded() const { return initial_ == Level::mark && final_level() == Level::mark; }

std::vector<std::pair<double, double>> LineWaveform::intervals(Level level) const {
    std::vector<std::pair<double, double>> out;
    double begin = 0.0;
    Level cur = initial_;
    for (const auto& tr : transitions_) {
        if (cur == level && tr.time > begin) out.emplace_back(begin, tr.time);
        begin = tr.time;
        cur = tr.level;
    }
    if (cur == level && duration_ > begin) out.emplace_back(begin, duration_);
    return out;
}

double LineWaveform::time_at(Level level) const {
    double total = 0.0;
    for (const auto& [a, b] : intervals(level)) total += b - a;
    return total;
}

double LineWaveform::shortest_pulse() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < transitions_.size(); ++i)
        best = std::min(best, transitions_[i].time - transitions_[i - 1].time);
    return best;
}

LineWaveform LineWaveform::shifted(double offset) const {
    if (offset < 0.0) throw std::invalid_argument("LineWaveform::shifted: negative offset");
    auto tr = transitions_;
    for (auto& t : tr) t.time += offset;
    return LineWaveform(initial_, std::move(tr), duration_ + offset);
}

LineWaveform LineWaveform::inverted() const {
    auto tr = transitions_;
    for (auto& t : tr) t.level = opposite(t.level);
    return LineWaveform(opposite(initial_), std::move(tr), duration_);
}

}  // namespace ledtap
