#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ledtap/emitter.hpp"
#include "ledtap/lineproto.hpp"
#include "ledtap/waveform.hpp"

namespace ledtap {

struct SuppressOptions {
    double mains_hz = 120.0;
    double max_harmonic_hz = 1000.0;
    double block_seconds = 0.5;
};

/// Removes DC and mains harmonics up to max_harmonic_hz. Each block of roughly
/// block_seconds gets its own least-squares fit of those components, so
/// content away from the harmonic lines passes untouched.
DetectorWaveform suppress_ambient(const DetectorWaveform& wave, const SuppressOptions& opts = {});

struct BinarizeOptions {
    double low_quantile = 0.05;
    double high_quantile = 0.95;
    double hysteresis_fraction = 0.10;  // full band width, relative to range
    Polarity polarity = Polarity::lit_on_space;
};

/// Two-level slicer with hysteresis; crossing times are interpolated to sub-sample
/// precision. Throws FlatSignal when the quantile range is within 4 noise sigmas.
LineWaveform binarize(const SampledWaveform& wave, const BinarizeOptions& opts = {});

enum class SamplingMode : std::uint8_t { mid_bit, integrate_and_dump };

struct RecoveryResult {
    std::vector<std::uint8_t> bytes;
    std::vector<double> frame_starts;
    std::size_t bit_errors = 0;
    std::size_t bits_total = 0;
    std::size_t framing_errors = 0;
    std::size_t parity_errors = 0;

    double ber() const { return bits_total ? static_cast<double>(bit_errors) / static_cast<double>(bits_total) : 0.0; }
};

/// UART recovery: hunt for mark-to-space edges, sample each cell, validate the
/// stop cell. With `truth`, data bits are compared position by position and
/// every missing or surplus character counts as data_bits errors.
/// Throws NoStartEdge when the line never falls to space.
RecoveryResult decode(const LineWaveform& line, const FrameFormat& fmt,
                      std::optional<std::span<const std::uint8_t>> truth = std::nullopt,
                      SamplingMode mode = SamplingMode::mid_bit);

struct CorrelationResult {
    double k = 0.0;
    std::size_t n = 0;
    long lag = 0;
};

/// Pearson correlation at the best integer-sample alignment within +-max_lag.
/// Throws LengthMismatch for differing lengths or fewer than two samples.
CorrelationResult correlation(std::span<const double> a, std::span<const double> b, long max_lag = 0);

/// Rectangular lit/dark reference (1 = lit) sampled on the detector grid.
std::vector<double> render_reference(const LineWaveform& line, double sample_rate, std::size_t n,
                                     Polarity polarity = Polarity::lit_on_space, double start_time = 0.0);

/// Candidate rates tried by estimate_rate.
std::span<const double> standard_rates();

/// Rate whose unit interval best matches the transition spectrum; the raw
/// estimate is returned when no standard rate lies within 5 %.
/// Throws InsufficientTransitions below 20 transitions.
double estimate_rate(const DetectorWaveform& wave, const BinarizeOptions& opts = {});

}  // namespace ledtap
