#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ledtap/channel.hpp"

namespace ledtap {

/// key=value file with optional [section] headers. Keys are addressed as
/// "section.key"; keys before any header live at top level.
class Config {
public:
    Config() = default;

    /// Throws ConfigError naming the file and line for malformed input.
    static Config parse(const std::string& text, const std::string& origin = "<string>");
    static Config load(const std::string& path);
    /// The bundled data/default.conf.
    static const Config& defaults();

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::vector<double> get_list(const std::string& key) const;
    std::vector<std::string> get_string_list(const std::string& key) const;

    /// Entries of `other` replace ours.
    void merge(const Config& other);
    void set(const std::string& key, const std::string& value) { values_[key] = {value, 0}; }

    const std::string& origin() const { return origin_; }

private:
    struct Entry {
        std::string value;
        int line;
    };
    const Entry& entry(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const Entry& e, const std::string& why) const;

    std::map<std::string, Entry> values_;
    std::string origin_;
};

/// Root of the bundled data files; LEDTAP_DATA_DIR in the environment overrides it.
std::string data_dir();

AmbientModel ambient_from_config(const Config& cfg, const std::string& preset);
ChannelModel channel_from_config(const Config& cfg);

}  // namespace ledtap
