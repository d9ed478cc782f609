#include "ledtap/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ledtap/errors.hpp"

namespace ledtap {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        cfg.values_[section.empty() ? key : section + "." + key] = {trim(line.substr(eq + 1)), lineno};
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

const Config& Config::defaults() {
    static const Config cfg = load(data_dir() + "/default.conf");
    return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

const Config::Entry& Config::entry(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(origin_ + ": missing key '" + key + "'");
    return it->second;
}

void Config::fail(const std::string& key, const Entry& e, const std::string& why) const {
    throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + key + "' " + why);
}

std::string Config::get_string(const std::string& key) const { return entry(key).value; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const {
    const auto& e = entry(key);
    try {
        std::size_t used = 0;
        const double v = std::stod(e.value, &used);
        if (used != e.value.size()) fail(key, e, "has trailing characters");
        return v;
    } catch (const std::logic_error&) {
        fail(key, e, "is not a number");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::vector<double> Config::get_list(const std::string& key) const {
    const auto& e = entry(key);
    std::vector<double> out;
    for (const auto& item : split_list(e.value)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) fail(key, e, "has a malformed list entry '" + item + "'");
        } catch (const std::logic_error&) {
            fail(key, e, "has a malformed list entry '" + item + "'");
        }
    }
    return out;
}

std::vector<std::string> Config::get_string_list(const std::string& key) const { return split_list(entry(key).value); }

void Config::merge(const Config& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
    if (!other.origin_.empty()) origin_ = other.origin_;
}

std::string data_dir() {
    if (const char* env = std::getenv("LEDTAP_DATA_DIR"); env && *env) return env;
    return LEDTAP_DATA_DIR;
}

AmbientModel ambient_from_config(const Config& cfg, const std::string& preset) {
    const std::string p = "ambient." + preset + ".";
    if (!cfg.has(p + "dc")) throw ConfigError("unknown ambient preset '" + preset + "'");
    AmbientModel m;
    m.dc_level = cfg.get_double(p + "dc");
    m.mains_hz = cfg.get_double(p + "mains_hz", 120.0);
    if (cfg.has(p + "harmonics")) {
        const auto v = cfg.get_list(p + "harmonics");
        if (v.size() % 2) throw ConfigError("ambient preset '" + preset + "': harmonics need index,amplitude pairs");
        for (std::size_t i = 0; i < v.size(); i += 2) m.harmonics.emplace_back(static_cast<int>(v[i]), v[i + 1]);
    }
    if (cfg.has(p + "hf")) {
        const auto v = cfg.get_list(p + "hf");
        if (v.size() % 2) throw ConfigError("ambient preset '" + preset + "': hf needs frequency,amplitude pairs");
        for (std::size_t i = 0; i < v.size(); i += 2) m.hf_components.emplace_back(v[i], v[i + 1]);
    }
    return m;
}

ChannelModel channel_from_config(const Config& cfg) {
    ChannelModel m;
    m.distance = cfg.get_double("channel.distance", m.distance);
    m.aperture_diameter = cfg.get_double("channel.aperture_diameter", m.aperture_diameter);
    m.filter_transmission = cfg.get_double("channel.filter_transmission", m.filter_transmission);
    m.responsivity = cfg.get_double("channel.responsivity", m.responsivity);
    m.detector_area_mm2 = cfg.get_double("channel.detector_area_mm2", m.detector_area_mm2);
    m.amp_gain = cfg.get_double("channel.amp_gain", m.amp_gain);
    m.thermal_noise_density = cfg.get_double("channel.thermal_noise_density", m.thermal_noise_density);
    m.include_shot_noise = cfg.get_string("channel.shot_noise", "on") != "off";
    if (cfg.has("channel.clip_ceiling")) m.clip_ceiling = cfg.get_double("channel.clip_ceiling");
    m.ambient = ambient_from_config(cfg, cfg.get_string("channel.ambient", "dark_room"));
    m.validate();
    return m;
}

}  // namespace ledtap
