#include "ledtap/covert.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ledtap/config.hpp"
#include "ledtap/emitter.hpp"
#include "ledtap/errors.hpp"
#include "ledtap/lineproto.hpp"
#include "ledtap/receiver.hpp"

namespace ledtap {

namespace {

constexpr std::uint8_t led_order[3] = {led_caps, led_num, led_scroll};
constexpr std::uint8_t break_prefix = 0xF0;
constexpr std::uint8_t left_shift = 0x12;
constexpr std::uint8_t right_shift = 0x59;

void push_levels(std::vector<LedScheduleEvent>& ev, double t, std::uint8_t on_mask, std::uint8_t off_mask) {
    if (off_mask) ev.push_back({t, off_mask, false});
    if (on_mask) ev.push_back({t, on_mask, true});
}

void push_restore(std::vector<LedScheduleEvent>& ev, double t, std::uint8_t saved) {
    push_levels(ev, t, saved & led_all, static_cast<std::uint8_t>(~saved & led_all));
}

std::vector<int> message_bits(std::span<const std::uint8_t> text) {
    std::vector<int> bits;
    for (auto c : text)
        for (int i = 0; i < 8; ++i) bits.push_back((c >> i) & 1);
    return bits;
}

LineWaveform slice(const SampledWaveform& w) {
    BinarizeOptions o;
    o.low_quantile = 0.01;
    o.high_quantile = 0.99;
    try {
        return binarize(w, o);
    } catch (const FlatSignal&) {
        return LineWaveform::constant(Level::mark, w.start_time + w.duration());
    }
}

bool lit_at(const LineWaveform& l, double t) { return l.level_at(t) == Level::space; }

std::vector<std::uint8_t> pack(const std::vector<int>& bits) {
    std::vector<std::uint8_t> out(bits.size() / 8, 0);
    for (std::size_t i = 0; i < out.size() * 8; ++i) out[i / 8] |= static_cast<std::uint8_t>(bits[i] << (i % 8));
    return out;
}

std::vector<std::uint8_t> decode_single(const SampledWaveform& caps, const CovertScheme& s) {
    const auto line = slice(caps);
    RecoveryResult r;
    try {
        r = decode(line, FrameFormat(s.rate, 8, Parity::none, StopBits::one));
    } catch (const NoStartEdge&) {
        return {};
    }
    // Restoring a lit indicator leaves one unterminated frame at the tail.
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < r.bytes.size(); ++i) {
        const double stop_mid = r.frame_starts[i] + 9.5 / s.rate;
        if (line.level_at(stop_mid) != Level::mark) {
            if (i + 1 == r.bytes.size()) break;
            throw FramingError("stop symbol lit");
        }
        out.push_back(static_cast<std::uint8_t>(~r.bytes[i]));
    }
    return out;
}

std::vector<std::uint8_t> decode_tri(std::span<const SampledWaveform> w, const CovertScheme& s) {
    const double T = s.symbol_period();
    std::array<LineWaveform, 3> lines{slice(w[0]), slice(w[1]), slice(w[2])};
    const auto& ref = lines[0];
    std::vector<std::uint8_t> out;
    double hunt = -1.0;
    const auto& tr = ref.transitions();
    std::size_t idx = 0;
    while (true) {
        while (idx < tr.size() && !(tr[idx].level == Level::space && tr[idx].time > hunt)) ++idx;
        if (idx >= tr.size()) break;
        const double start = tr[idx].time;
        if (start + 4.5 * T >= ref.duration()) break;
        auto all_lit = [&](double t) { return lit_at(lines[0], t) && lit_at(lines[1], t) && lit_at(lines[2], t); };
        auto any_lit = [&](double t) { return lit_at(lines[0], t) || lit_at(lines[1], t) || lit_at(lines[2], t); };
        if (!all_lit(start + 0.5 * T)) {
            hunt = start;
            continue;
        }
        unsigned byte = 0;
        for (int sym = 0; sym < 3; ++sym)
            for (int j = 0; j < 3; ++j) {
                const int bit = 3 * sym + j;
                if (bit < 8 && lit_at(lines[static_cast<std::size_t>(j)], start + (sym + 1.5) * T))
                    byte |= 1u << bit;
            }
        if (any_lit(start + 4.5 * T)) {
            const bool last = std::none_of(tr.begin() + static_cast<std::ptrdiff_t>(idx) + 1, tr.end(),
                                           [&](const Transition& t) { return t.time > start + 5 * T; });
            if (last) break;
            throw FramingError("stop symbol lit");
        }
        out.push_back(static_cast<std::uint8_t>(byte));
        hunt = start + 4.5 * T;
    }
    return out;
}

std::vector<std::uint8_t> decode_sync(std::span<const SampledWaveform> w) {
    const auto data = slice(w[0]);
    const auto clock = slice(w[1]);
    std::vector<int> bits;
    for (const auto& t : clock.transitions())
        if (t.level == Level::mark) bits.push_back(lit_at(data, t.time) ? 1 : 0);
    return pack(bits);
}

std::vector<int> manchester_cells(const LineWaveform& line, double T, bool mid_on_one) {
    std::vector<double> tr;
    for (const auto& t : line.transitions()) tr.push_back(t.time);
    std::vector<int> cells;
    if (tr.empty()) return cells;
    const int mid_bit = mid_on_one ? 1 : 0;
    double b = tr[0];
    std::size_t k = 1;
    while (k < tr.size()) {
        const double t = tr[k];
        if (std::abs(t - (b + 0.5 * T)) <= 0.25 * T) {
            if (k + 1 >= tr.size()) break;
            if (std::abs(tr[k + 1] - (b + T)) > 0.25 * T) throw ClockSlipDetected("cell boundary missing after mid-cell transition");
            cells.push_back(mid_bit);
            b = tr[k + 1];
            k += 2;
        } else if (std::abs(t - (b + T)) <= 0.25 * T) {
            cells.push_back(1 - mid_bit);
            b = t;
            ++k;
        } else {
            if (k + 1 == tr.size()) break;  // lone restore edge
            throw ClockSlipDetected("transition off the cell lattice");
        }
    }
    return cells;
}

std::vector<std::uint8_t> decode_manchester(std::span<const SampledWaveform> w, const CovertScheme& s) {
    const double T = s.symbol_period();
    std::array<std::vector<int>, 3> cells;
    for (std::size_t j = 0; j < 3; ++j) cells[j] = manchester_cells(slice(w[j]), T, s.mid_transition_on_one);
    std::vector<int> bits;
    for (std::size_t i = 0;; ++i) {
        const auto& c = cells[i % 3];
        if (i / 3 >= c.size()) break;
        bits.push_back(c[i / 3]);
    }
    return pack(bits);
}

}  // namespace

std::string to_string(CovertKind k) {
    switch (k) {
        case CovertKind::single_async: return "single_async";
        case CovertKind::tri_parallel: return "tri_parallel";
        case CovertKind::sync_serial: return "sync_serial";
        case CovertKind::diff_manchester: return "diff_manchester";
    }
    return "?";
}

CovertKind parse_covert_kind(const std::string& s) {
    for (auto k : {CovertKind::single_async, CovertKind::tri_parallel, CovertKind::sync_serial, CovertKind::diff_manchester})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown covert scheme '" + s + "'");
}

double CovertScheme::symbol_period() const {
    switch (kind) {
        case CovertKind::tri_parallel:
        case CovertKind::diff_manchester: return 3.0 / rate;
        default: return 1.0 / rate;
    }
}

void CovertScheme::validate() const {
    if (!(rate >= 1.0 && rate <= 10000.0)) throw std::invalid_argument("covert rate must lie in [1, 10000] b/s");
}

std::vector<LedScheduleEvent> encode_message(std::span<const std::uint8_t> text, const CovertScheme& scheme,
                                             std::uint8_t saved_state) {
    scheme.validate();
    const double T = scheme.symbol_period();
    std::vector<LedScheduleEvent> ev;
    double end = 0.0;
    switch (scheme.kind) {
        case CovertKind::single_async: {
            std::size_t sym = 0;
            for (auto c : text) {
                ev.push_back({static_cast<double>(sym++) * T, led_caps, true});
                for (int i = 0; i < 8; ++i) ev.push_back({static_cast<double>(sym++) * T, led_caps, ((c >> i) & 1) != 0});
                ev.push_back({static_cast<double>(sym++) * T, led_caps, false});
            }
            end = static_cast<double>(sym) * T;
            break;
        }
        case CovertKind::tri_parallel: {
            std::size_t sym = 0;
            for (auto c : text) {
                push_levels(ev, static_cast<double>(sym++) * T, led_all, 0);
                for (int s = 0; s < 3; ++s) {
                    std::uint8_t on = 0;
                    for (int j = 0; j < 3; ++j) {
                        const int bit = 3 * s + j;
                        if (bit < 8 && ((c >> bit) & 1)) on |= led_order[j];
                    }
                    push_levels(ev, static_cast<double>(sym++) * T, on, static_cast<std::uint8_t>(~on & led_all));
                }
                push_levels(ev, static_cast<double>(sym++) * T, 0, led_all);
            }
            end = static_cast<double>(sym) * T;
            break;
        }
        case CovertKind::sync_serial: {
            const auto bits = message_bits(text);
            for (std::size_t i = 0; i < bits.size(); ++i) {
                const double t = static_cast<double>(i) * T;
                ev.push_back({t, led_caps, bits[i] != 0});
                ev.push_back({t, led_num, true});
                ev.push_back({t + 0.5 * T, led_num, false});
            }
            end = static_cast<double>(bits.size()) * T;
            break;
        }
        case CovertKind::diff_manchester: {
            const auto bits = message_bits(text);
            if (bits.empty()) break;
            const std::size_t cells = (bits.size() + 2) / 3;
            const int mid_bit = scheme.mid_transition_on_one ? 1 : 0;
            std::array<bool, 3> lvl{};
            for (std::size_t j = 0; j < 3; ++j) lvl[j] = (saved_state & led_order[j]) != 0;
            for (std::size_t c = 0; c <= cells; ++c) {
                const double t = static_cast<double>(c) * T;
                for (std::size_t j = 0; j < 3; ++j) {
                    lvl[j] = !lvl[j];
                    ev.push_back({t, led_order[j], lvl[j]});
                }
                if (c == cells) break;
                for (std::size_t j = 0; j < 3; ++j) {
                    const std::size_t i = 3 * c + j;
                    const int bit = i < bits.size() ? bits[i] : 1 - mid_bit;  // padding cells carry no mid edge
                    if (bit == mid_bit) {
                        lvl[j] = !lvl[j];
                        ev.push_back({t + 0.5 * T, led_order[j], lvl[j]});
                    }
                }
            }
            std::stable_sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
            // The restore lands one cell after the closing boundary.
            end = static_cast<double>(cells + 1) * T;
            break;
        }
    }
    push_restore(ev, end, saved_state);
    return ev;
}

double schedule_end(const std::vector<LedScheduleEvent>& events) {
    double t = 0.0;
    for (const auto& e : events) t = std::max(t, e.time);
    return t;
}

std::array<LineWaveform, 3> schedule_to_lines(const std::vector<LedScheduleEvent>& events, double tail,
                                              std::uint8_t initial_state, double lead) {
    if (tail < 0.0 || lead < 0.0) throw std::invalid_argument("schedule_to_lines: negative padding");
    const double duration = lead + schedule_end(events) + tail;
    std::array<LineWaveform, 3> out;
    for (std::size_t j = 0; j < 3; ++j) {
        bool on = (initial_state & led_order[j]) != 0;
        bool initial = on;
        std::vector<Transition> tr;
        for (const auto& e : events) {
            if (!(e.leds & led_order[j]) || e.on == on) continue;
            on = e.on;
            const double t = lead + e.time;
            const Level lvl = on ? Level::space : Level::mark;
            if (!tr.empty() && tr.back().time == t) {
                tr.pop_back();
            } else if (t <= 0.0 && tr.empty()) {
                initial = on;
            } else {
                tr.push_back({t, lvl});
            }
        }
        if (!tr.empty() && tr.back().time >= duration) tr.pop_back();
        out[j] = LineWaveform(initial ? Level::space : Level::mark, std::move(tr), duration);
    }
    return out;
}

std::vector<std::uint8_t> decode_message(std::span<const SampledWaveform> per_led, const CovertScheme& scheme) {
    scheme.validate();
    if (per_led.size() != 3) throw std::invalid_argument("decode_message expects caps, num and scroll waveforms");
    switch (scheme.kind) {
        case CovertKind::single_async: return decode_single(per_led[0], scheme);
        case CovertKind::tri_parallel: return decode_tri(per_led, scheme);
        case CovertKind::sync_serial: return decode_sync(per_led);
        case CovertKind::diff_manchester: return decode_manchester(per_led, scheme);
    }
    return {};
}

const std::map<std::uint8_t, ScanKey>& scan_table() {
    static const std::map<std::uint8_t, ScanKey> table = [] {
        std::map<std::uint8_t, ScanKey> t;
        const std::string path = data_dir() + "/scancodes_set2.txt";
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open " + path);
        auto glyph = [](const std::string& tok) -> char {
            if (tok == "SP") return ' ';
            if (tok == "NL") return '\n';
            if (tok == "--") return '\0';
            return tok[0];
        };
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            std::string code, name, normal, shifted;
            if (!(ss >> code >> name >> normal >> shifted))
                throw ConfigError(path + ":" + std::to_string(lineno) + ": expected four fields");
            t[static_cast<std::uint8_t>(std::stoul(code, nullptr, 16))] = {name, glyph(normal), glyph(shifted)};
        }
        return t;
    }();
    return table;
}

LineWaveform scan_stream(const std::vector<ScanCodeEvent>& keys, double interface_rate, double tail) {
    if (!(interface_rate >= 8000.0 && interface_rate <= 16700.0))
        throw std::invalid_argument("scan_stream: interface rate must lie in [8000, 16700] b/s");
    const FrameFormat fmt(interface_rate, 8, Parity::odd, StopBits::one);
    const double ui = unit_interval(fmt);
    auto sorted = keys;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.time < b.time; });

    std::vector<Transition> tr;
    Level cur = Level::mark;
    double free_at = 0.0;
    auto send = [&](std::uint8_t code, double at) {
        const double start = std::max(at, free_at);
        const auto bits = frame_bits(code, fmt);
        for (std::size_t n = 0; n < bits.size(); ++n) {
            const Level lvl = level_for_bit(bits[n]);
            if (lvl != cur) {
                tr.push_back({start + static_cast<double>(n) * ui, lvl});
                cur = lvl;
            }
        }
        free_at = start + 12.0 * ui;  // 11-unit word and one idle unit
    };
    for (const auto& k : sorted) {
        if (k.time < 0.0) throw std::invalid_argument("scan_stream: negative key time");
        if (k.kind == KeyAction::brk) send(break_prefix, k.time);
        send(k.code, k.kind == KeyAction::brk ? free_at : k.time);
    }
    return LineWaveform(Level::mark, std::move(tr), free_at + tail);
}

ScanDecodeResult decode_scan(const SampledWaveform& optical, double interface_rate) {
    ScanDecodeResult res;
    BinarizeOptions o;
    o.low_quantile = 0.0;
    o.high_quantile = 1.0;
    LineWaveform line;
    RecoveryResult r;
    try {
        line = binarize(optical, o);
        r = decode(line, FrameFormat(interface_rate, 8, Parity::odd, StopBits::one));
    } catch (const FlatSignal&) {
        return res;
    } catch (const NoStartEdge&) {
        return res;
    }
    res.framing_errors = r.framing_errors;
    res.parity_errors = r.parity_errors;
    const auto& table = scan_table();
    bool shift = false;
    bool pending_break = false;
    double break_time = 0.0;
    for (std::size_t i = 0; i < r.bytes.size(); ++i) {
        const std::uint8_t code = r.bytes[i];
        if (code == break_prefix) {
            pending_break = true;
            break_time = r.frame_starts[i];
            continue;
        }
        ScanCodeEvent ev{code, pending_break ? KeyAction::brk : KeyAction::make,
                         pending_break ? break_time : r.frame_starts[i], true};
        pending_break = false;
        const auto it = table.find(code);
        if (it == table.end()) {
            ev.known = false;
            ++res.unknown_codes;
        } else if (code == left_shift || code == right_shift) {
            shift = ev.kind == KeyAction::make;
        } else if (ev.kind == KeyAction::make) {
            const char c = shift ? it->second.shifted : it->second.normal;
            if (c) res.text.push_back(c);
        }
        res.events.push_back(ev);
    }
    return res;
}

std::vector<ScanCodeEvent> type_text(const std::string& text, double start, double key_interval, double hold) {
    const auto& table = scan_table();
    std::vector<ScanCodeEvent> out;
    const double settle = 0.005;
    if (!(key_interval > hold + 2 * settle)) throw std::invalid_argument("type_text: key interval too short for hold");
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        const double t = start + static_cast<double>(i) * key_interval;
        bool found = false;
        for (const auto& [code, key] : table) {
            if (code == left_shift || code == right_shift) continue;
            if (key.normal == ch && ch != '\0') {
                out.push_back({code, KeyAction::make, t});
                out.push_back({code, KeyAction::brk, t + hold});
                found = true;
            } else if (key.shifted == ch && ch != '\0') {
                out.push_back({left_shift, KeyAction::make, t});
                out.push_back({code, KeyAction::make, t + settle});
                out.push_back({code, KeyAction::brk, t + settle + hold});
                out.push_back({left_shift, KeyAction::brk, t + 2 * settle + hold});
                found = true;
            }
            if (found) break;
        }
        if (!found) throw std::invalid_argument(std::string("type_text: no key for character '") + ch + "'");
    }
    return out;
}

}  // namespace ledtap
