#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ledtap {

enum class FigureKind { emanation_trace, distance_degradation, stretcher, diffuse_sum, ui_spectrum };

FigureKind parse_figure_kind(const std::string& s);
std::string to_string(FigureKind k);

struct FigureParams {
    std::uint64_t seed = 1;
    double rate = 9600.0;
    double distance = 5.0;
    std::string ambient = "fluorescent_office";
    int streams = 10;
    int chars_per_stream = 10;
    double min_on_ui = 1.5;
};

struct FigureFiles {
    std::string svg_path;
    std::string csv_path;
    std::vector<std::string> notes;  // one-line annotations, e.g. the estimated unit interval
};

/// Writes <out_dir>/<kind>.svg and <out_dir>/<kind>.csv.
FigureFiles emit_figure(FigureKind kind, const FigureParams& params, const std::string& out_dir);

/// Summed lit/dark levels of independent 8N1 streams with random phases at
/// least `min_separation` unit intervals apart; used for the diffuse figures.
struct DiffuseScene {
    double sample_rate;
    double unit_interval;
    std::vector<std::vector<std::uint8_t>> payloads;
    std::vector<double> starts;
    std::vector<double> sum;  // sampled optical sum in unit amplitudes
};

DiffuseScene make_diffuse_scene(int streams, int chars, double rate, double sample_rate, double min_separation,
                                std::uint64_t seed);

}  // namespace ledtap
