#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ledtap/emitter.hpp"
#include "ledtap/lineproto.hpp"
#include "ledtap/waveform.hpp"

namespace ledtap {

enum class Direction : std::uint8_t { up, down };

struct TransitionEvent {
    double time;
    Direction direction;
    int magnitude = 1;

    friend bool operator==(const TransitionEvent&, const TransitionEvent&) = default;
};

/// One event per quantized level step of `sum`, timed at the mid-level crossing.
/// Steps in adjacent samples with the same direction merge into one event.
/// Throws AmplitudeMismatch when more than two consecutive samples sit off the
/// integer grid, SampleRateTooLow when distinct steps are under three samples apart.
std::vector<TransitionEvent> extract_events(const SampledWaveform& sum, double unit_amplitude);

/// Events of a single line as seen optically (lit = 1).
std::vector<TransitionEvent> line_events(const LineWaveform& line, Polarity polarity = Polarity::lit_on_space);

enum class UiMethod : std::uint8_t { point_process, interval_sequence };

struct UiOptions {
    UiMethod method = UiMethod::point_process;
    double min_period = 10e-6;
    double max_period = 10e-3;
    int harmonics = 32;
    std::size_t candidates = 20000;
    double peak_fraction = 0.3;  // acceptance band as a share of the peak-to-median span
    double max_drop = 1.5;       // cap on that band, natural-log units
    bool parallel = true;
};

struct UiSpectrum {
    std::vector<double> periods;  // ascending
    std::vector<double> score;    // log-domain harmonic score
    double best_period = 0.0;
    double peak_score = 0.0;
    double median_score = 0.0;
};

/// Harmonic score of the event train over log-spaced candidate periods.
UiSpectrum ui_spectrum(const std::vector<TransitionEvent>& events, const UiOptions& opts = {});

/// Most likely unit interval. The longest period scoring within 30 % of the
/// peak-to-median span below the peak wins, which rejects sub-harmonics of UI.
/// Throws InsufficientTransitions below 20 events, NoDominantPeak when the
/// peak is under twice the median level.
double estimate_ui(const std::vector<TransitionEvent>& events, const UiOptions& opts = {});

struct StreamHypothesis {
    int id = 0;
    double start_time = 0.0;
    double unit_interval = 0.0;
    std::vector<int> bits;  // optical levels of the current frame, lit = 1
    double next_decision = 0.0;
};

struct RecoveredStream {
    StreamHypothesis hypothesis;
    std::vector<std::uint8_t> bytes;
    std::vector<double> frame_starts;
    std::size_t framing_errors = 0;
    std::size_t parity_errors = 0;
    std::size_t incomplete_frames = 0;
};

enum class Interpretation : std::uint8_t { open, none, up, down, next_frame, close };

std::string to_string(Interpretation i);

struct DecisionRecord {
    int stream;
    int cell;           // 0 start, 1.. data/parity/stop, -1 continuation check
    double time;        // nominal decision time
    double event_time;  // aligned event, NaN for none/close
    Interpretation interpretation;
    int level;          // optical level from this decision onwards
};

struct AmbiguityFlag {
    double event_time;
    std::vector<int> streams;
};

struct DemixResult {
    std::vector<RecoveredStream> streams;
    std::size_t unassigned_events = 0;  // units not explained by any stream
    std::vector<AmbiguityFlag> ambiguity_flags;
    std::vector<DecisionRecord> log;
};

struct DemixOptions {
    double tolerance = 0.05;  // fraction of ui
    Polarity polarity = Polarity::lit_on_space;
    double record_end = std::numeric_limits<double>::infinity();
};

/// Greedy left-to-right separation. Events off every open lattice open new
/// streams; aligned events set the next cell level, absent ones keep it.
/// A stream continues into a new frame only if an up event lands on its frame
/// end, otherwise it closes.
DemixResult demix(const std::vector<TransitionEvent>& events, double ui, const FrameFormat& fmt,
                  const DemixOptions& opts = {});

enum class EncodingHint : std::uint8_t { none, ascii, ebcdic };

struct StreamPlausibility {
    int id;
    bool framing_ok;
    bool encoding_ok;
    bool plausible() const { return framing_ok && encoding_ok; }
};

std::vector<StreamPlausibility> validate_streams(const DemixResult& result, EncodingHint hint);

}  // namespace ledtap
