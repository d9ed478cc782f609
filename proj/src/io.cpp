#include "ledtap/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ledtap/config.hpp"
#include "ledtap/errors.hpp"

namespace ledtap::io {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw std::runtime_error("cannot read " + path);
    return in;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path, std::size_t fields) {
    auto in = open_in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
        if (lineno == 1 && !cols.empty() && !cols[0].empty() && std::isalpha(static_cast<unsigned char>(cols[0][0])))
            continue;  // header
        if (cols.size() != fields)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(fields) + " fields");
        rows.push_back(std::move(cols));
    }
    return rows;
}

}  // namespace

void write_waveform(const std::string& path, const SampledWaveform& w, SampleFormat fmt, const std::string& units,
                    const std::map<std::string, std::string>& extra) {
    if (fmt == SampleFormat::binary_f64) {
        auto out = open_out(path, std::ios::binary);
        static_assert(sizeof(double) == 8);
        for (double v : w.samples) {
            unsigned char b[8];
            std::memcpy(b, &v, 8);
            if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
            out.write(reinterpret_cast<const char*>(b), 8);
        }
    } else {
        auto out = open_out(path);
        for (double v : w.samples) out << fmt::format("{:.17g}\n", v);
    }
    auto meta = open_out(path + ".meta");
    meta << fmt::format("sample_rate = {:.17g}\n", w.sample_rate);
    meta << fmt::format("start_time = {:.17g}\n", w.start_time);
    meta << "units = " << units << "\n";
    meta << "format = " << (fmt == SampleFormat::binary_f64 ? "f64le" : "csv") << "\n";
    meta << "samples = " << w.samples.size() << "\n";
    for (const auto& [k, v] : extra) meta << k << " = " << v << "\n";
}

SampledWaveform read_waveform(const std::string& path) {
    const auto meta = Config::load(path + ".meta");
    SampledWaveform w;
    w.sample_rate = meta.get_double("sample_rate");
    w.start_time = meta.get_double("start_time", 0.0);
    const std::string format = meta.get_string("format", "f64le");
    if (format == "f64le") {
        auto in = open_in(path, std::ios::binary);
        unsigned char b[8];
        while (in.read(reinterpret_cast<char*>(b), 8)) {
            if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
            double v;
            std::memcpy(&v, b, 8);
            w.samples.push_back(v);
        }
    } else if (format == "csv") {
        auto in = open_in(path);
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) w.samples.push_back(std::stod(line));
    } else {
        throw ConfigError(path + ".meta: unknown sample format '" + format + "'");
    }
    return w;
}

void write_events(const std::string& path, const std::vector<TransitionEvent>& events) {
    auto out = open_out(path);
    out << "time_s,direction,magnitude\n";
    for (const auto& e : events)
        out << fmt::format("{:.12e},{},{}\n", e.time, e.direction == Direction::up ? "up" : "down", e.magnitude);
}

std::vector<TransitionEvent> read_events(const std::string& path) {
    std::vector<TransitionEvent> out;
    for (const auto& r : read_csv_rows(path, 3)) {
        Direction d;
        if (r[1] == "up") d = Direction::up;
        else if (r[1] == "down") d = Direction::down;
        else throw ConfigError(path + ": direction must be up or down");
        out.push_back({std::stod(r[0]), d, std::stoi(r[2])});
    }
    return out;
}

void write_schedule(const std::string& path, const std::vector<LedScheduleEvent>& events) {
    auto out = open_out(path);
    out << "time_s,led,state\n";
    for (const auto& e : events) {
        std::string leds;
        if (e.leds & led_caps) leds += "caps";
        if (e.leds & led_num) leds += leds.empty() ? "num" : "+num";
        if (e.leds & led_scroll) leds += leds.empty() ? "scroll" : "+scroll";
        out << fmt::format("{:.9f},{},{}\n", e.time, leds, e.on ? "on" : "off");
    }
}

std::vector<LedScheduleEvent> read_schedule(const std::string& path) {
    std::vector<LedScheduleEvent> out;
    for (const auto& r : read_csv_rows(path, 3)) {
        std::uint8_t mask = 0;
        std::stringstream ss(r[1]);
        std::string name;
        while (std::getline(ss, name, '+')) {
            if (name == "caps") mask |= led_caps;
            else if (name == "num") mask |= led_num;
            else if (name == "scroll") mask |= led_scroll;
            else throw ConfigError(path + ": unknown led '" + name + "'");
        }
        out.push_back({std::stod(r[0]), mask, r[2] == "on"});
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
}

std::string read_text(const std::string& path) {
    auto in = open_in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ledtap::io
