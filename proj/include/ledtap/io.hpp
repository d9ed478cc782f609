#pragma once

#include <map>
#include <string>
#include <vector>

#include "ledtap/covert.hpp"
#include "ledtap/demixer.hpp"
#include "ledtap/waveform.hpp"

namespace ledtap::io {

enum class SampleFormat { binary_f64, csv };

/// Writes samples to `path` plus a `path.meta` sidecar (sample_rate, start_time,
/// units, seed, format).
void write_waveform(const std::string& path, const SampledWaveform& w, SampleFormat fmt,
                    const std::string& units, const std::map<std::string, std::string>& extra = {});
/// Reads a waveform written by write_waveform, using the sidecar for the format.
SampledWaveform read_waveform(const std::string& path);

void write_events(const std::string& path, const std::vector<TransitionEvent>& events);
std::vector<TransitionEvent> read_events(const std::string& path);

void write_schedule(const std::string& path, const std::vector<LedScheduleEvent>& events);
std::vector<LedScheduleEvent> read_schedule(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace ledtap::io
