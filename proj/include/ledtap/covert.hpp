#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ledtap/waveform.hpp"

namespace ledtap {

/// Keyboard indicator bitmask.
enum LedBits : std::uint8_t { led_caps = 1, led_num = 2, led_scroll = 4, led_all = 7 };

struct LedScheduleEvent {
    double time;
    std::uint8_t leds;  // LedBits mask
    bool on;

    friend bool operator==(const LedScheduleEvent&, const LedScheduleEvent&) = default;
};

enum class CovertKind : std::uint8_t { single_async, tri_parallel, sync_serial, diff_manchester };

std::string to_string(CovertKind k);
CovertKind parse_covert_kind(const std::string& s);

struct CovertScheme {
    CovertKind kind = CovertKind::single_async;
    double rate = 50.0;  // aggregate bits/s
    bool mid_transition_on_one = false;  // diff_manchester: which bit value gets the mid-cell transition

    /// Per-indicator symbol duration.
    double symbol_period() const;
    void validate() const;
};

/// LED schedule for `text`. The last events restore `saved_state`.
/// single_async: one caps symbol per 1/rate for start (on), 8 data bits LSB-first (1 = on), stop (off).
/// tri_parallel: all three LEDs share start and stop; 9 bits (8 data and a zero pad)
///   go out three per symbol as caps/num/scroll, symbol period 3/rate.
/// sync_serial: caps carries data, num a return-to-zero clock lit for the first half of every cell.
/// diff_manchester: bits dealt round-robin to caps/num/scroll, each with cell 3/rate,
///   a transition on every cell boundary and a mid-cell transition for a 0.
/// Throws std::invalid_argument for a rate outside [1, 10000].
std::vector<LedScheduleEvent> encode_message(std::span<const std::uint8_t> text, const CovertScheme& scheme,
                                             std::uint8_t saved_state = 0);

/// Total duration covered by a schedule, including the restore events.
double schedule_end(const std::vector<LedScheduleEvent>& events);

/// One line per indicator (caps, num, scroll) with lit = space. The schedule is
/// delayed by `lead` seconds and padded with `tail` seconds after its last event.
/// LEDs start in `initial_state`.
std::array<LineWaveform, 3> schedule_to_lines(const std::vector<LedScheduleEvent>& events, double tail,
                                              std::uint8_t initial_state = 0, double lead = 0.0);

/// Inverse of encode_message from per-indicator waveforms (caps, num, scroll).
/// Throws ClockSlipDetected or FramingError.
std::vector<std::uint8_t> decode_message(std::span<const SampledWaveform> per_led, const CovertScheme& scheme);

enum class KeyAction : std::uint8_t { make, brk };

struct ScanCodeEvent {
    std::uint8_t code;
    KeyAction kind;
    double time;
    bool known = true;

    friend bool operator==(const ScanCodeEvent&, const ScanCodeEvent&) = default;
};

/// Keyboard data line carrying AT words (start, 8 data LSB-first, odd parity,
/// stop). A break is the F0 prefix word followed by the code word; words are
/// separated by one idle unit and queue behind each other when keys crowd.
/// The line idles at mark, so an LED lit on space stays dark at rest.
/// Throws std::invalid_argument for interface_rate outside [8000, 16700].
LineWaveform scan_stream(const std::vector<ScanCodeEvent>& keys, double interface_rate, double tail = 0.01);

struct ScanDecodeResult {
    std::vector<ScanCodeEvent> events;
    std::string text;
    std::size_t unknown_codes = 0;
    std::size_t framing_errors = 0;
    std::size_t parity_errors = 0;
};

ScanDecodeResult decode_scan(const SampledWaveform& optical, double interface_rate);

/// Set-2 code table: code -> {unshifted, shifted}; named keys map to '\0'.
struct ScanKey {
    std::string name;
    char normal;
    char shifted;
};
const std::map<std::uint8_t, ScanKey>& scan_table();

/// Make/break events for typing `text`, one key every `key_interval` seconds,
/// with shift pressed around upper-case letters and shifted symbols.
std::vector<ScanCodeEvent> type_text(const std::string& text, double start, double key_interval,
                                     double hold = 0.03);

}  // namespace ledtap
