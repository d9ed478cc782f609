#include "ledtap/demixer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ledtap/dsp.hpp"
#include "ledtap/errors.hpp"
#include "ledtap/kernels.hpp"

namespace ledtap {

std::vector<TransitionEvent> extract_events(const SampledWaveform& sum, double unit_amplitude) {
    if (!(unit_amplitude > 0.0)) throw std::invalid_argument("extract_events: unit amplitude must be positive");
    const auto& x = sum.samples;
    const std::size_t n = x.size();
    std::vector<long> q(n);
    std::size_t off_run = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = x[i] / unit_amplitude;
        q[i] = std::lround(u);
        if (std::abs(u - static_cast<double>(q[i])) > 0.25) {
            if (++off_run > 2) throw AmplitudeMismatch("levels are not integer multiples of the unit amplitude");
        } else {
            off_run = 0;
        }
    }

    std::vector<TransitionEvent> events;
    const double dt = 1.0 / sum.sample_rate;
    std::size_t prev_end = 0;
    bool have_prev = false;
    std::size_t i = 1;
    while (i < n) {
        if (q[i] == q[i - 1]) {
            ++i;
            continue;
        }
        const bool up = q[i] > q[i - 1];
        const std::size_t first = i;
        std::size_t last = i;
        while (last + 1 < n && q[last + 1] != q[last] && (q[last + 1] > q[last]) == up) ++last;
        if (have_prev && first - prev_end < 3)
            throw SampleRateTooLow("level steps closer than three samples");

        const long l0 = q[first - 1], l1 = q[last];
        const double mid = 0.5 * static_cast<double>(l0 + l1) * unit_amplitude;
        double t = sum.start_time + static_cast<double>(first) * dt;
        for (std::size_t k = first - 1; k < last; ++k) {
            const double a = x[k], b = x[k + 1];
            if ((up && a < mid && b >= mid) || (!up && a > mid && b <= mid)) {
                t = sum.start_time + (static_cast<double>(k) + (mid - a) / (b - a)) * dt;
                break;
            }
        }
        events.push_back({t, up ? Direction::up : Direction::down, static_cast<int>(std::labs(l1 - l0))});
        prev_end = last;
        have_prev = true;
        i = last + 1;
    }
    return events;
}

std::vector<TransitionEvent> line_events(const LineWaveform& line, Polarity polarity) {
    const Level lit = lit_level(polarity);
    std::vector<TransitionEvent> out;
    out.reserve(line.transitions().size());
    for (const auto& tr : line.transitions())
        out.push_back({tr.time, tr.level == lit ? Direction::up : Direction::down, 1});
    return out;
}

namespace {

std::vector<double> log_periods(const UiOptions& o) {
    std::vector<double> p(o.candidates);
    const double a = std::log(o.min_period), b = std::log(o.max_period);
    for (std::size_t i = 0; i < o.candidates; ++i)
        p[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(o.candidates - 1));
    return p;
}

// |X(f)|^2 of the event impulse train on a uniform grid.
std::vector<double> event_power(const std::vector<TransitionEvent>& events, double& df) {
    std::vector<double> times;
    times.reserve(events.size());
    for (const auto& e : events) times.push_back(e.time);
    std::vector<double> gaps;
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] > times[i - 1]) gaps.push_back(times[i] - times[i - 1]);
    const double med_gap = gaps.empty() ? 1e-4 : dsp::quantile(gaps, 0.5);
    const double dt = std::clamp(med_gap / 400.0, 0.25e-6, 5e-6);
    constexpr std::size_t max_window = std::size_t{1} << 21;

    const double t0 = times.front();
    std::vector<double> x;
    for (const auto& e : events) {
        const double pos = (e.time - t0) / dt;
        if (pos >= static_cast<double>(max_window)) break;
        const auto k = static_cast<std::size_t>(std::llround(pos));
        if (k >= x.size()) x.resize(k + 1, 0.0);
        x[k] += e.magnitude;
    }
    const std::size_t nfft = dsp::next_pow2(2 * x.size());
    df = 1.0 / (static_cast<double>(nfft) * dt);
    return dsp::power_spectrum(x, nfft);
}

// Interval-sequence reading: R(f) = sum cos(2 pi f d_k) over successive gaps.
std::vector<double> interval_scores(const std::vector<TransitionEvent>& events, const std::vector<double>& periods) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < events.size(); ++i) gaps.push_back(events[i].time - events[i - 1].time);
    std::vector<double> out(periods.size());
    const long n = static_cast<long>(periods.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const double f = 1.0 / periods[static_cast<std::size_t>(i)];
        double r = 0.0;
        for (double d : gaps) r += std::cos(2.0 * std::numbers::pi * f * d);
        out[static_cast<std::size_t>(i)] = r;
    }
    return out;
}

// Share of successive gaps within 10 % of a whole number of periods.
double grid_fit(const std::vector<TransitionEvent>& events, double period) {
    std::size_t hit = 0, n = 0;
    for (std::size_t i = 1; i < events.size(); ++i) {
        const double g = (events[i].time - events[i - 1].time) / period;
        if (g <= 0.0) continue;
        ++n;
        if (g > 0.5 && std::abs(g - std::round(g)) < 0.1) ++hit;
    }
    return n == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(n);
}

// A lone stream puts every edge on its bit grid, so its spectrum also peaks
// at whole multiples of the UI. Step down to the longest divisor that
// explains the gaps when the chosen period does not.
double resolve_multiple(const std::vector<TransitionEvent>& events, double period, double min_period) {
    constexpr double enough = 0.9;
    if (grid_fit(events, period) >= enough) return period;
    for (int n = 2; n <= 16 && period / n >= min_period; ++n)
        if (grid_fit(events, period / n) >= enough) return period / n;
    return period;
}

}  // namespace

UiSpectrum ui_spectrum(const std::vector<TransitionEvent>& events, const UiOptions& opts) {
    if (events.size() < 20) throw InsufficientTransitions("need at least 20 transition events");
    if (!(opts.min_period > 0.0) || !(opts.max_period > opts.min_period) || opts.candidates < 2 || opts.harmonics < 1)
        throw std::invalid_argument("ui_spectrum: bad period range");
    UiSpectrum s;
    s.periods = log_periods(opts);
    if (opts.method == UiMethod::interval_sequence) {
        s.score = interval_scores(events, s.periods);
    } else {
        double df = 0.0;
        const auto power = event_power(events, df);
        s.score = opts.parallel ? kernels::harmonic_scan_omp(power, df, s.periods, opts.harmonics)
                                : kernels::harmonic_scan_serial(power, df, s.periods, opts.harmonics);
    }
    std::vector<double> finite;
    for (double v : s.score)
        if (std::isfinite(v)) finite.push_back(v);
    if (finite.empty()) throw NoDominantPeak("no candidate period has usable harmonics");
    s.peak_score = *std::max_element(finite.begin(), finite.end());
    s.median_score = dsp::quantile(finite, 0.5);
    const auto it = std::max_element(s.score.begin(), s.score.end(), [](double a, double b) {
        return (std::isfinite(a) ? a : -1e300) < (std::isfinite(b) ? b : -1e300);
    });
    s.best_period = s.periods[static_cast<std::size_t>(it - s.score.begin())];
    return s;
}

double estimate_ui(const std::vector<TransitionEvent>& events, const UiOptions& opts) {
    const auto s = ui_spectrum(events, opts);
    if (opts.method == UiMethod::interval_sequence) {
        // Longest period within 90 % of the peak response.
        const double cut = 0.9 * s.peak_score;
        if (!(s.peak_score > 0.0)) throw NoDominantPeak("interval spectrum has no positive peak");
        for (std::size_t i = s.periods.size(); i-- > 0;)
            if (s.score[i] >= cut) return resolve_multiple(events, s.periods[i], opts.min_period);
        return s.best_period;
    }
    const double span = s.peak_score - s.median_score;
    if (span < std::log(2.0)) throw NoDominantPeak("spectral peak under twice the median level");
    const double cut = s.peak_score - std::min(opts.peak_fraction * span, opts.max_drop);
    for (std::size_t i = s.periods.size(); i-- > 0;)
        if (std::isfinite(s.score[i]) && s.score[i] >= cut) return resolve_multiple(events, s.periods[i], opts.min_period);
    return s.best_period;
}

std::string to_string(Interpretation i) {
    switch (i) {
        case Interpretation::open: return "open";
        case Interpretation::none: return "none";
        case Interpretation::up: return "up";
        case Interpretation::down: return "down";
        case Interpretation::next_frame: return "next_frame";
        case Interpretation::close: return "close";
    }
    return "?";
}

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct Tracker {
    RecoveredStream out;
    double frame_start = 0.0;
    int cell = 1;  // next decision; stop_cell + 1 is the continuation check
    int level = 1;
    std::vector<int> levels;
    bool open = true;
};

class Demixer {
public:
    Demixer(double ui, const FrameFormat& fmt, const DemixOptions& opts)
        : ui_(ui), fmt_(fmt), opts_(opts), tol_(opts.tolerance * ui), stop_cell_(fmt.cells_before_stop()),
          frame_len_(0.5 * fmt.character_half_units() * ui), idle_(opts.polarity == Polarity::lit_on_space ? 0 : 1) {}

    DemixResult run(const std::vector<TransitionEvent>& events) {
        events_ = &events;
        for (next_ = 1; next_ <= events.size(); ++next_) process(events[next_ - 1]);
        for (auto& s : streams_) {
            while (s.open && decision_time(s) <= opts_.record_end) step_none(s);
            if (s.open && s.cell > 1 && s.cell <= stop_cell_) ++s.out.incomplete_frames;
        }
        for (auto& s : streams_) {
            s.out.hypothesis.bits = s.levels;
            s.out.hypothesis.next_decision = s.open ? decision_time(s) : nan;
            result_.streams.push_back(std::move(s.out));
        }
        return std::move(result_);
    }

private:
    double decision_time(const Tracker& s) const {
        return s.cell <= stop_cell_ ? s.frame_start + s.cell * ui_ : s.frame_start + frame_len_;
    }

    void log(const Tracker& s, int cell, double time, double ev, Interpretation how) {
        result_.log.push_back({s.out.hypothesis.id, cell, time, ev, how, s.level});
    }

    void finish_frame(Tracker& s) {
        const int nd = fmt_.data_bits();
        unsigned byte = 0;
        for (int i = 0; i < nd; ++i) {
            const int lvl = s.levels[static_cast<std::size_t>(1 + i)];
            const int bit = idle_ == 0 ? 1 - lvl : lvl;
            byte |= static_cast<unsigned>(bit) << i;
        }
        if (fmt_.has_parity()) {
            const int lvl = s.levels[static_cast<std::size_t>(1 + nd)];
            const int bit = idle_ == 0 ? 1 - lvl : lvl;
            if (bit != parity_bit(static_cast<std::uint8_t>(byte), nd, fmt_.parity())) ++s.out.parity_errors;
        }
        if (s.levels[static_cast<std::size_t>(stop_cell_)] != idle_) ++s.out.framing_errors;
        s.out.bytes.push_back(static_cast<std::uint8_t>(byte));
        s.out.frame_starts.push_back(s.frame_start);
    }

    void set_cell(Tracker& s, int level, double ev, Interpretation how) {
        const double d = decision_time(s);
        s.level = level;
        s.levels[static_cast<std::size_t>(s.cell)] = level;
        log(s, s.cell, d, ev, how);
        if (s.cell == stop_cell_) finish_frame(s);
        ++s.cell;
    }

    void begin_frame(Tracker& s, double t) {
        s.frame_start = t;
        s.level = 1 - idle_;
        s.levels.assign(static_cast<std::size_t>(stop_cell_ + 1), idle_);
        s.levels[0] = s.level;
        s.cell = 1;
    }

    void step_none(Tracker& s) {
        if (s.cell <= stop_cell_) {
            set_cell(s, s.level, nan, Interpretation::none);
        } else {
            log(s, -1, decision_time(s), nan, Interpretation::close);
            s.open = false;
        }
    }

    void process(const TransitionEvent& e) {
        for (auto& s : streams_)
            while (s.open && decision_time(s) < e.time - tol_) step_none(s);

        std::vector<Tracker*> aligned;
        for (auto& s : streams_)
            if (s.open && std::abs(decision_time(s) - e.time) <= tol_) aligned.push_back(&s);
        if (aligned.size() >= 2) {
            AmbiguityFlag f{e.time, {}};
            for (auto* s : aligned) f.streams.push_back(s->out.hypothesis.id);
            result_.ambiguity_flags.push_back(std::move(f));
        }

        const int to_level = e.direction == Direction::up ? 1 : 0;
        const bool starts = to_level != idle_;
        std::vector<Tracker*> eligible;
        // A stop cell can only fall back to idle; a start edge there belongs elsewhere.
        for (auto* s : aligned) {
            const bool fits = s->cell < stop_cell_    ? s->level != to_level && (!starts || can_return(*s))
                              : s->cell == stop_cell_ ? s->level != to_level && !starts
                                                      : starts;
            if (fits) eligible.push_back(s);
        }
        std::stable_sort(eligible.begin(), eligible.end(), [&](const Tracker* a, const Tracker* b) {
            return std::abs(decision_time(*a) - e.time) < std::abs(decision_time(*b) - e.time);
        });

        int units = e.magnitude;
        for (auto* s : eligible) {
            if (units == 0) break;
            --units;
            if (s->cell <= stop_cell_) {
                set_cell(*s, to_level, e.time, to_level ? Interpretation::up : Interpretation::down);
            } else {
                log(*s, -1, decision_time(*s), e.time, Interpretation::next_frame);
                begin_frame(*s, e.time);
            }
        }
        for (; units > 0; --units) {
            if (!starts) {
                ++result_.unassigned_events;
                continue;
            }
            Tracker s;
            s.out.hypothesis.id = static_cast<int>(streams_.size()) + 1;
            s.out.hypothesis.start_time = e.time;
            s.out.hypothesis.unit_interval = ui_;
            begin_frame(s, e.time);
            log(s, 0, e.time, e.time, Interpretation::open);
            streams_.push_back(std::move(s));
        }
    }

    // Leaving idle mid-frame needs a later edge back to idle on one of the
    // stream's remaining decision points, or the stop cell is violated.
    bool can_return(const Tracker& s) const {
        const auto& ev = *events_;
        const double last = s.frame_start + stop_cell_ * ui_ + tol_;
        if (last > opts_.record_end) return true;  // the return may lie past the record
        for (std::size_t i = next_; i < ev.size() && ev[i].time <= last; ++i) {
            if ((ev[i].direction == Direction::up ? 1 : 0) != idle_) continue;
            const double c = std::round((ev[i].time - s.frame_start) / ui_);
            if (c > s.cell && c <= stop_cell_ && std::abs(ev[i].time - s.frame_start - c * ui_) <= tol_) return true;
        }
        return false;
    }

    double ui_;
    FrameFormat fmt_;
    DemixOptions opts_;
    double tol_;
    int stop_cell_;
    double frame_len_;
    int idle_;
    std::vector<Tracker> streams_;
    DemixResult result_;
    const std::vector<TransitionEvent>* events_ = nullptr;
    std::size_t next_ = 0;  // index of the event after the one in hand
};

bool ebcdic_text(std::uint8_t c) {
    auto in = [c](int a, int b) { return c >= a && c <= b; };
    return c == 0x05 || c == 0x0D || c == 0x15 || c == 0x25 || c == 0x40 || in(0x4A, 0x50) || in(0x5A, 0x61) ||
           in(0x6A, 0x6F) || in(0x79, 0x7F) || in(0x81, 0x89) || in(0x91, 0x99) || in(0xA1, 0xA9) ||
           in(0xC0, 0xC9) || in(0xD0, 0xD9) || c == 0xE0 || in(0xE2, 0xE9) || in(0xF0, 0xF9);
}

}  // namespace

DemixResult demix(const std::vector<TransitionEvent>& events, double ui, const FrameFormat& fmt,
                  const DemixOptions& opts) {
    if (!(ui > 0.0)) throw std::invalid_argument("demix: unit interval must be positive");
    for (std::size_t i = 1; i < events.size(); ++i)
        if (events[i].time < events[i - 1].time) throw std::invalid_argument("demix: events must be time-ordered");
    for (const auto& e : events)
        if (e.magnitude < 1) throw std::invalid_argument("demix: event magnitude must be at least 1");
    return Demixer(ui, fmt, opts).run(events);
}

std::vector<StreamPlausibility> validate_streams(const DemixResult& result, EncodingHint hint) {
    std::vector<StreamPlausibility> out;
    for (const auto& s : result.streams) {
        StreamPlausibility p{s.hypothesis.id, s.framing_errors == 0 && s.parity_errors == 0 && s.incomplete_frames == 0,
                             true};
        for (auto b : s.bytes) {
            if (hint == EncodingHint::ascii && (b & 0x80)) p.encoding_ok = false;
            if (hint == EncodingHint::ebcdic && !ebcdic_text(b)) p.encoding_ok = false;
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace ledtap
