#include "ledtap/lineproto.hpp"

#include <bit>
#include <stdexcept>

namespace ledtap {

FrameFormat::FrameFormat(double bit_rate, int data_bits, Parity parity, StopBits stop)
    : bit_rate_(bit_rate), data_bits_(data_bits), parity_(parity), stop_(stop) {
    if (!(bit_rate > 0.0)) throw std::invalid_argument("FrameFormat: bit rate must be positive");
    if (data_bits < 5 || data_bits > 8) throw std::invalid_argument("FrameFormat: data bits must be 5..8");
}

FrameFormat FrameFormat::parse(const std::string& s, double bit_rate) {
    if (s.size() < 3) throw std::invalid_argument("FrameFormat: bad shorthand '" + s + "'");
    const int data = s[0] - '0';
    Parity p;
    switch (s[1]) {
        case 'N': case 'n': p = Parity::none; break;
        case 'E': case 'e': p = Parity::even; break;
        case 'O': case 'o': p = Parity::odd; break;
        default: throw std::invalid_argument("FrameFormat: bad parity in '" + s + "'");
    }
    const std::string stop = s.substr(2);
    StopBits sb;
    if (stop == "1") sb = StopBits::one;
    else if (stop == "1.5") sb = StopBits::one_and_half;
    else if (stop == "2") sb = StopBits::two;
    else throw std::invalid_argument("FrameFormat: bad stop length in '" + s + "'");
    return FrameFormat(bit_rate, data, p, sb);
}

int FrameFormat::stop_half_units() const {
    switch (stop_) {
        case StopBits::one: return 2;
        case StopBits::one_and_half: return 3;
        case StopBits::two: return 4;
    }
    return 2;
}

std::string FrameFormat::to_string() const {
    std::string s = std::to_string(data_bits_);
    s += parity_ == Parity::none ? 'N' : parity_ == Parity::even ? 'E' : 'O';
    s += stop_ == StopBits::one ? "1" : stop_ == StopBits::one_and_half ? "1.5" : "2";
    return s;
}

double unit_interval(const FrameFormat& fmt) { return 1.0 / fmt.bit_rate(); }

double character_interval(const FrameFormat& fmt) {
    return fmt.character_half_units() * 0.5 * unit_interval(fmt);
}

int parity_bit(std::uint8_t byte, int data_bits, Parity parity) {
    const unsigned mask = (1u << data_bits) - 1u;
    const int ones = std::popcount(static_cast<unsigned>(byte) & mask);
    if (parity == Parity::even) return ones & 1;
    if (parity == Parity::odd) return (ones & 1) ^ 1;
    return 0;
}

std::vector<int> frame_bits(std::uint8_t byte, const FrameFormat& fmt) {
    std::vector<int> bits;
    bits.reserve(static_cast<std::size_t>(fmt.cells_before_stop()) + 1);
    bits.push_back(0);
    for (int i = 0; i < fmt.data_bits(); ++i) bits.push_back((byte >> i) & 1);
    if (fmt.has_parity()) bits.push_back(parity_bit(byte, fmt.data_bits(), fmt.parity()));
    bits.push_back(1);
    return bits;
}

LineWaveform encode(std::span<const std::uint8_t> payload, const FrameFormat& fmt, double inter_char_idle,
                    double leading_idle) {
    if (!(inter_char_idle >= 0.0) || !(leading_idle >= 0.0))
        throw std::invalid_argument("encode: idle durations must be non-negative");
    const double ui = unit_interval(fmt);
    const double half = 0.5 * ui;
    const int char_half = fmt.character_half_units();

    std::vector<Transition> tr;
    Level cur = Level::mark;
    const double pitch = static_cast<double>(char_half) * half + inter_char_idle;
    for (std::size_t c = 0; c < payload.size(); ++c) {
        const double frame_start = leading_idle + static_cast<double>(c) * pitch;
        const auto bits = frame_bits(payload[c], fmt);
        // Cell n of this frame begins 2n half units after frame_start.
        for (std::size_t n = 0; n + 1 < bits.size(); ++n) {
            const Level lvl = level_for_bit(bits[n]);
            if (lvl != cur) {
                tr.push_back({frame_start + static_cast<double>(2 * n) * half, lvl});
                cur = lvl;
            }
        }
        if (cur != Level::mark) {
            tr.push_back({frame_start + static_cast<double>(2 * (bits.size() - 1)) * half, Level::mark});
            cur = Level::mark;
        }
    }
    const double duration = payload.empty() ? leading_idle + inter_char_idle
                                            : leading_idle + static_cast<double>(payload.size()) * pitch;
    return LineWaveform(Level::mark, std::move(tr), duration);
}

std::vector<double> decision_points(const FrameFormat& fmt, double frame_start) {
    const double ui = unit_interval(fmt);
    const int cells = fmt.cells_before_stop() + 1;
    std::vector<double> pts(static_cast<std::size_t>(cells));
    for (int n = 0; n < cells; ++n) pts[static_cast<std::size_t>(n)] = frame_start + (n + 0.5) * ui;
    return pts;
}

}  // namespace ledtap
