#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ledtap/waveform.hpp"

namespace ledtap {

enum class Parity : std::uint8_t { none, even, odd };
enum class StopBits : std::uint8_t { one, one_and_half, two };

/// Asynchronous character framing. Stop length is held in half unit intervals
/// so that 1.5 stop units stay exact.
class FrameFormat {
public:
    /// Throws std::invalid_argument on rate <= 0 or data_bits outside [5, 8].
    explicit FrameFormat(double bit_rate, int data_bits = 8, Parity parity = Parity::none,
                         StopBits stop = StopBits::one);

    /// Parses the conventional "8N1" / "7E2" / "8O1.5" shorthand.
    static FrameFormat parse(const std::string& shorthand, double bit_rate);

    double bit_rate() const { return bit_rate_; }
    int data_bits() const { return data_bits_; }
    Parity parity() const { return parity_; }
    StopBits stop() const { return stop_; }
    bool has_parity() const { return parity_ != Parity::none; }
    int stop_half_units() const;
    double stop_units() const { return stop_half_units() / 2.0; }

    /// Start + data + parity cells, i.e. every cell before the stop bit.
    int cells_before_stop() const { return 1 + data_bits_ + (has_parity() ? 1 : 0); }
    /// Character length in half unit intervals.
    int character_half_units() const { return 2 * cells_before_stop() + stop_half_units(); }

    FrameFormat with_rate(double rate) const { return FrameFormat(rate, data_bits_, parity_, stop_); }
    std::string to_string() const;

    friend bool operator==(const FrameFormat&, const FrameFormat&) = default;

private:
    double bit_rate_;
    int data_bits_;
    Parity parity_;
    StopBits stop_;
};

double unit_interval(const FrameFormat& fmt);
double character_interval(const FrameFormat& fmt);

/// Parity bit value for the low `data_bits` of `byte`; meaningless for Parity::none.
int parity_bit(std::uint8_t byte, int data_bits, Parity parity);

/// Logical bit pattern of one character: start, data LSB-first, parity, then a
/// single stop entry regardless of stop length.
std::vector<int> frame_bits(std::uint8_t byte, const FrameFormat& fmt);

/// NRZ-L line for `payload`. Each character is followed by `inter_char_idle`
/// seconds of mark; `leading_idle` seconds of mark precede the first one.
/// Empty payload yields constant mark lasting leading_idle + inter_char_idle.
LineWaveform encode(std::span<const std::uint8_t> payload, const FrameFormat& fmt,
                    double inter_char_idle, double leading_idle = 0.0);

/// Mid-cell sampling instants for start, data, parity and stop cells.
std::vector<double> decision_points(const FrameFormat& fmt, double frame_start);

}  // namespace ledtap
