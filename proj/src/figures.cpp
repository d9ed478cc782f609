#include "ledtap/figures.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "ledtap/channel.hpp"
#include "ledtap/demixer.hpp"
#include "ledtap/emitter.hpp"
#include "ledtap/io.hpp"
#include "ledtap/lineproto.hpp"
#include "ledtap/receiver.hpp"
#include "ledtap/rng.hpp"
#include "ledtap/svg.hpp"
#include "ledtap/sweep.hpp"

namespace ledtap {

FigureKind parse_figure_kind(const std::string& s) {
    for (auto k : {FigureKind::emanation_trace, FigureKind::distance_degradation, FigureKind::stretcher,
                   FigureKind::diffuse_sum, FigureKind::ui_spectrum})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown figure kind '" + s + "'");
}

std::string to_string(FigureKind k) {
    switch (k) {
        case FigureKind::emanation_trace: return "emanation_trace";
        case FigureKind::distance_degradation: return "distance_degradation";
        case FigureKind::stretcher: return "stretcher";
        case FigureKind::diffuse_sum: return "diffuse_sum";
        case FigureKind::ui_spectrum: return "ui_spectrum";
    }
    return "?";
}

DiffuseScene make_diffuse_scene(int streams, int chars, double rate, double sample_rate, double min_separation,
                                std::uint64_t seed) {
    if (streams < 1 || chars < 1) throw std::invalid_argument("make_diffuse_scene: need streams and characters");
    if (min_separation * streams >= 0.75) throw std::invalid_argument("make_diffuse_scene: separation too wide to pack");
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<int> offset(0, 19);
    std::vector<double> phase;
    int tries = 0;
    while (static_cast<int>(phase.size()) < streams) {
        const double p = uni(gen);
        if (++tries > 1000) {
            phase.clear();
            tries = 0;
        }
        const bool clear = std::all_of(phase.begin(), phase.end(), [&](double q) {
            const double d = std::abs(p - q);
            return std::min(d, 1.0 - d) >= min_separation;
        });
        if (clear) phase.push_back(p);
    }

    DiffuseScene sc;
    sc.sample_rate = sample_rate;
    sc.unit_interval = 1.0 / rate;
    const FrameFormat fmt(rate);
    std::vector<LineWaveform> lines;
    double end = 0.0;
    for (int s = 0; s < streams; ++s) {
        const double start = (offset(gen) + phase[static_cast<std::size_t>(s)]) * sc.unit_interval;
        auto payload = random_bytes(static_cast<std::size_t>(chars), gen());
        lines.push_back(encode(payload, fmt, 0.0, start));
        sc.payloads.push_back(std::move(payload));
        sc.starts.push_back(start);
        end = std::max(end, lines.back().duration());
    }
    end += 5.0 * sc.unit_interval;
    LedModel led;
    led.peak_intensity = 1.0;
    for (const auto& l : lines) {
        const LineWaveform padded(l.initial_level(), l.transitions(), end);
        const auto o = drive(padded, led, sample_rate);
        if (sc.sum.empty()) sc.sum.assign(o.size(), 0.0);
        for (std::size_t i = 0; i < o.size() && i < sc.sum.size(); ++i) sc.sum[i] += o.samples[i];
    }
    return sc;
}

namespace {

void write_csv(const std::string& path, const std::string& header, const std::vector<std::vector<double>>& cols) {
    std::string s = header + "\n";
    const std::size_t n = cols.empty() ? 0 : cols.front().size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) s += fmt::format("{}{:.9g}", c ? "," : "", cols[c][i]);
        s += "\n";
    }
    io::write_text(path, s);
}

}  // namespace

FigureFiles emit_figure(FigureKind kind, const FigureParams& prm, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    FigureFiles files;
    const std::string base = out_dir + "/" + to_string(kind);
    files.svg_path = base + ".svg";
    files.csv_path = base + ".csv";
    svg::Plot plot;
    const FrameFormat fmt(prm.rate);
    const double ui = unit_interval(fmt);

    switch (kind) {
        case FigureKind::emanation_trace: {
            const std::vector<std::uint8_t> payload{'L', 'E', 'D', '!'};
            ChannelModel ch;
            ch.distance = prm.distance;
            ch.ambient = AmbientModel::preset(prm.ambient);
            // Several mains cycles either side so the hum fit has something to lock onto.
            const double pad = std::max(0.025, 2.0 * character_interval(fmt));
            const auto data = encode(payload, fmt, 0.0, pad);
            const LineWaveform framed(data.initial_level(), data.transitions(), data.duration() + pad);
            const double fs = default_sample_rate(prm.rate);
            const auto full = transmit(framed, LedModel{}, ch, fs, prm.seed);
            const auto full_ref = render_reference(framed, fs, full.size(), Polarity::lit_on_space);

            // Decode, score and plot the characters with one character of idle each side.
            const auto first = static_cast<std::size_t>((pad - character_interval(fmt)) * fs);
            const auto last = std::min(full.size(), static_cast<std::size_t>((data.duration() + character_interval(fmt)) * fs));
            DetectorWaveform win;
            win.sample_rate = fs;
            win.start_time = full.time_at(first);
            win.samples.assign(full.samples.begin() + static_cast<long>(first), full.samples.begin() + static_cast<long>(last));
            const std::vector<double> win_ref(full_ref.begin() + static_cast<long>(first), full_ref.begin() + static_cast<long>(last));
            const auto rec = decode(binarize(win), fmt, payload);
            const double k = correlation(win.samples, win_ref, static_cast<long>(character_interval(fmt) * fs)).k;
            std::vector<double> t, line, mv;
            for (std::size_t i = first; i < last; ++i) {
                t.push_back(full.time_at(i) * 1e3);
                line.push_back(full_ref[i] > 0.5 ? 15.0 : -15.0);  // space is the positive line voltage
                mv.push_back(full.samples[i] * 1e3);
            }
            write_csv(files.csv_path, "time_ms,line_v,detector_mv", {t, line, mv});
            const double peak = *std::max_element(mv.begin(), mv.end());
            std::vector<double> scaled(line.size());
            for (std::size_t i = 0; i < line.size(); ++i) scaled[i] = line[i] / 15.0 * peak;
            plot.title = fmt::format("Line signal and optical emanation, {:g} b/s at {:g} m", prm.rate, prm.distance);
            plot.x_label = "time (ms)";
            plot.y_label = "detector output (mV)";
            plot.series.push_back({t, scaled, "line (scaled)", "#999999", true});
            plot.series.push_back({t, mv, "optical", "#1f4e9c", false});
            files.notes.push_back(fmt::format("k = {:.4f}, BER = {:.3g}", k, rec.ber()));
            break;
        }
        case FigureKind::distance_degradation: {
            SweepSpec spec;
            spec.rates = {prm.rate};
            spec.ambients = {prm.ambient};
            spec.seeds = {prm.seed};
            const auto payload = random_bytes(200, mix_seed(prm.seed, 77));
            ChannelModel ch;
            const auto rows = run_sweep_omp(spec, payload, ch, LedModel{});
            std::vector<double> d, k, ber;
            for (const auto& r : rows) {
                d.push_back(r.distance);
                k.push_back(r.k);
                ber.push_back(r.ber);
            }
            write_csv(files.csv_path, "distance_m,k,ber", {d, k, ber});
            plot.title = fmt::format("Correlation with the line signal vs distance, {:g} b/s", prm.rate);
            plot.x_label = "distance (m)";
            plot.y_label = "k / BER";
            plot.series.push_back({d, k, "k", "#1f4e9c", false});
            plot.series.push_back({d, ber, "BER", "#c0392b", false});
            break;
        }
        case FigureKind::stretcher: {
            const std::vector<std::uint8_t> payload{0x41};
            const auto line = encode(payload, fmt, 2 * ui, 2 * ui);
            StretcherConfig cfg = StretcherConfig::ui_multiple(fmt, prm.min_on_ui);
            const auto stretched = stretch(line, cfg);
            const double fs = 200.0 * prm.rate;
            LedModel led;
            led.peak_intensity = 1.0;
            const auto a = drive(LineWaveform(line.initial_level(), line.transitions(), stretched.duration()), led, fs);
            const auto b = drive(stretched, led, fs);
            std::vector<double> t(a.size()), ya(a.size()), yb(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                t[i] = a.time_at(i) / ui;
                ya[i] = a.samples[i];
                yb[i] = b.samples[i] * 0.9;
            }
            write_csv(files.csv_path, "time_ui,original,stretched", {t, ya, b.samples});
            const double probe = decision_points(fmt, 2 * ui)[1];
            const bool misread = stretched.level_at(probe) == Level::space || b.samples[static_cast<std::size_t>(probe * fs)] > 0.5;
            plot.title = fmt::format("Pulse stretcher, min on-time {:g} UI", prm.min_on_ui);
            plot.x_label = "time (unit intervals)";
            plot.y_label = "LED intensity (relative)";
            plot.series.push_back({t, ya, "original", "#1f4e9c", false});
            plot.series.push_back({t, yb, "stretched", "#e67e22", false});
            plot.markers.push_back({probe / ui, 0.9, misread ? "decision point reads lit" : "decision point"});
            files.notes.push_back(misread ? "stretched waveform misread at the first data bit" : "no misread");
            break;
        }
        case FigureKind::diffuse_sum:
        case FigureKind::ui_spectrum: {
            const auto sc = make_diffuse_scene(prm.streams, prm.chars_per_stream, prm.rate, 2e6, 0.06, prm.seed);
            SampledWaveform sum{sc.sample_rate, 0.0, sc.sum};
            if (kind == FigureKind::diffuse_sum) {
                std::vector<double> t(sum.size());
                for (std::size_t i = 0; i < t.size(); ++i) t[i] = sum.time_at(i) * 1e3;
                write_csv(files.csv_path, "time_ms,level", {t, sum.samples});
                plot.title = fmt::format("Optical sum of {} serial streams at {:g} b/s", prm.streams, prm.rate);
                plot.x_label = "time (ms)";
                plot.y_label = "level (LEDs lit)";
                plot.series.push_back({t, sum.samples, "", "#1f4e9c", true});
                break;
            }
            const auto events = extract_events(sum, 1.0);
            const auto spec = ui_spectrum(events);
            const double est = estimate_ui(events);
            std::vector<double> us(spec.periods.size());
            for (std::size_t i = 0; i < us.size(); ++i) us[i] = spec.periods[i] * 1e6;
            write_csv(files.csv_path, "period_us,score", {us, spec.score});
            plot.title = "Transition-time spectrum over candidate unit intervals";
            plot.x_label = "period (us)";
            plot.y_label = "harmonic score (log)";
            plot.log_x = true;
            plot.series.push_back({us, spec.score, "", "#1f4e9c", false});
            const auto it = std::lower_bound(spec.periods.begin(), spec.periods.end(), est);
            const double sy = spec.score[static_cast<std::size_t>(std::min<std::ptrdiff_t>(
                it - spec.periods.begin(), static_cast<std::ptrdiff_t>(spec.periods.size()) - 1))];
            plot.markers.push_back({est * 1e6, sy, fmt::format("{:.2f} us", est * 1e6)});
            files.notes.push_back(fmt::format("estimated unit interval {:.3f} us", est * 1e6));
            break;
        }
    }
    io::write_text(files.svg_path, svg::render(plot));
    return files;
}

}  // namespace ledtap
