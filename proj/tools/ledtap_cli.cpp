// ledtap: batch front-end for the optical emanation simulator.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "ledtap/channel.hpp"
#include "ledtap/classifier.hpp"
#include "ledtap/config.hpp"
#include "ledtap/covert.hpp"
#include "ledtap/demixer.hpp"
#include "ledtap/emitter.hpp"
#include "ledtap/figures.hpp"
#include "ledtap/io.hpp"
#include "ledtap/lineproto.hpp"
#include "ledtap/receiver.hpp"
#include "ledtap/rng.hpp"
#include "ledtap/sweep.hpp"

using namespace ledtap;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    std::string config;
    std::string out = ".";
    std::string format = "text";
};

// Key/value summary printed as "key: value" lines or a two-row CSV.
using Summary = std::vector<std::pair<std::string, std::string>>;

void print_summary(const Summary& s, const Globals& g) {
    if (g.format == "csv") {
        std::string head, row;
        for (std::size_t i = 0; i < s.size(); ++i) {
            head += (i ? "," : "") + s[i].first;
            row += (i ? "," : "") + s[i].second;
        }
        std::cout << head << "\n" << row << "\n";
    } else {
        for (const auto& [k, v] : s) std::cout << k << ": " << v << "\n";
    }
}

std::string out_path(const Globals& g, const std::string& name) {
    std::filesystem::create_directories(g.out);
    return (std::filesystem::path(g.out) / name).string();
}

std::string hex(std::span<const std::uint8_t> b) {
    std::string s;
    for (auto x : b) s += fmt::format("{:02x}", x);
    return s;
}

std::vector<std::uint8_t> as_bytes(const std::string& s) { return {s.begin(), s.end()}; }

LedModel led_from_config(const Config& cfg) {
    LedModel led;
    led.peak_intensity = cfg.get_double("optics.led_peak_intensity", led.peak_intensity);
    led.rise_time = cfg.get_double("optics.led_rise_time", led.rise_time);
    led.fall_time = cfg.get_double("optics.led_fall_time", led.fall_time);
    led.wavelength_nm = cfg.get_double("optics.wavelength_nm", led.wavelength_nm);
    led.validate();
    return led;
}

struct ChannelFlags {
    double distance = -1.0;
    std::string ambient;
    bool noiseless = false;

    void add(CLI::App* c, const std::string& default_ambient = "") {
        ambient = default_ambient;
        c->add_option("--distance", distance, "Detector distance in metres");
        c->add_option("--ambient", ambient, "Ambient preset")->check(CLI::IsMember(AmbientModel::preset_names()));
        c->add_flag("--noiseless", noiseless, "Disable detector noise");
    }

    ChannelModel build(const Config& cfg) const {
        auto ch = channel_from_config(cfg);
        if (distance > 0.0) ch.distance = distance;
        if (!ambient.empty()) ch.ambient = ambient_from_config(cfg, ambient);
        if (noiseless) ch = ch.noiseless();
        ch.validate();
        return ch;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ledtap: optical emanations of LED status indicators"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--config", g.config, "Config file layered over the bundled defaults")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--format", g.format, "Summary format")->check(CLI::IsMember({"csv", "text"}));

    // simulate
    auto* sim = app.add_subcommand("simulate", "One serial link through LED, channel and receiver");
    double sim_rate = 9600;
    std::string sim_frame = "8N1", sim_text;
    std::size_t sim_bytes = 64;
    ChannelFlags sim_ch;
    sim->add_option("--rate", sim_rate, "Bit rate")->check(CLI::PositiveNumber);
    sim->add_option("--frame", sim_frame, "Frame format, e.g. 8N1, 7E2");
    sim->add_option("--bytes", sim_bytes, "Random payload length");
    sim->add_option("--text", sim_text, "Payload text instead of random bytes");
    sim_ch.add(sim);

    // sweep
    auto* sw = app.add_subcommand("sweep", "Distance x rate x ambient x seed matrix");
    std::vector<double> sw_dist, sw_rates;
    std::vector<std::string> sw_amb;
    std::vector<std::uint64_t> sw_seeds;
    std::size_t sw_bytes = 0;
    bool sw_noiseless = false, sw_serial = false;
    sw->add_option("--distances", sw_dist, "Distances in metres (comma list)")->delimiter(',');
    sw->add_option("--rates", sw_rates, "Bit rates (comma list)")->delimiter(',');
    sw->add_option("--ambients", sw_amb, "Ambient presets (comma list)")->delimiter(',');
    sw->add_option("--seeds", sw_seeds, "Seeds (comma list)")->delimiter(',');
    sw->add_option("--payload-bytes", sw_bytes, "Random payload length per cell");
    sw->add_flag("--noiseless", sw_noiseless, "Disable detector noise");
    sw->add_flag("--serial", sw_serial, "Use the serial reference loop");

    // classify
    auto* cl = app.add_subcommand("classify", "Class I/II/III label for one fixture or recorded waveform");
    std::string cl_fixture, cl_wave, cl_truth, cl_frame = "8N1";
    double cl_rate = 9600;
    bool cl_direct = false;
    ChannelFlags cl_ch;
    cl->add_option("--fixture", cl_fixture, "Device fixture file")->check(CLI::ExistingFile);
    cl->add_option("--waveform", cl_wave, "Optical waveform (.meta sidecar alongside)");
    cl->add_option("--truth", cl_truth, "Raw payload bytes for --waveform")->check(CLI::ExistingFile);
    cl->add_option("--rate", cl_rate, "Bit rate for --waveform")->check(CLI::PositiveNumber);
    cl->add_option("--frame", cl_frame, "Frame format for --waveform");
    cl->add_flag("--direct", cl_direct, "Classify the optical waveform without a channel");
    cl_ch.add(cl);

    // survey
    auto* sv = app.add_subcommand("survey", "Classify the bundled device fixture suite");
    std::string sv_dir;
    ChannelFlags sv_ch;
    sv->add_option("--fixtures", sv_dir, "Fixture directory")->check(CLI::ExistingDirectory);
    sv_ch.add(sv);

    // demix
    auto* dm = app.add_subcommand("demix", "Separate interleaved serial streams from a summed optical record");
    std::string dm_events, dm_wave, dm_hint = "none", dm_frame = "8N1", dm_method = "point_process";
    double dm_unit = 1.0, dm_ui = 0.0, dm_rate = 9600, dm_end = 0.0;
    int dm_scene = 0, dm_chars = 10;
    dm->add_option("--events", dm_events, "Event list CSV")->check(CLI::ExistingFile);
    dm->add_option("--waveform", dm_wave, "Summed optical waveform");
    dm->add_option("--unit-amplitude", dm_unit, "Single-indicator step for --waveform");
    dm->add_option("--scene", dm_scene, "Synthesize a diffuse scene with this many streams");
    dm->add_option("--chars", dm_chars, "Characters per synthesized stream");
    dm->add_option("--ui", dm_ui, "Unit interval in seconds; estimated when absent");
    dm->add_option("--ui-method", dm_method, "Unit-interval estimator")->check(CLI::IsMember({"point_process", "interval_sequence"}));
    dm->add_option("--rate", dm_rate, "Nominal rate for --scene");
    dm->add_option("--frame", dm_frame, "Frame format, e.g. 8N1");
    dm->add_option("--record-end", dm_end, "End of the record in seconds");
    dm->add_option("--hint", dm_hint, "Plausibility check for recovered text")->check(CLI::IsMember({"none", "ascii", "ebcdic"}));

    // covert-send / covert-recv
    std::vector<std::string> scheme_names{"single_async", "tri_parallel", "sync_serial", "diff_manchester", "scan_code"};
    auto* cs = app.add_subcommand("covert-send", "Encode a message onto keyboard LEDs and record it");
    std::string cs_scheme = "single_async", cs_text, cs_file;
    double cs_rate = 50, cs_fs = 0;
    bool cs_mid_one = false;
    ChannelFlags cs_ch;
    cs->add_option("--scheme", cs_scheme, "Signalling scheme")->check(CLI::IsMember(scheme_names));
    cs->add_option("--rate", cs_rate, "Aggregate bit rate, or the interface clock for scan_code");
    cs->add_option("--text", cs_text, "Message text");
    cs->add_option("--text-file", cs_file, "Read the message from a file")->check(CLI::ExistingFile);
    cs->add_option("--sample-rate", cs_fs, "Detector sample rate in Hz");
    cs->add_flag("--mid-on-one", cs_mid_one, "diff_manchester: mid-cell transition marks a one");
    cs_ch.add(cs, "dark_room");

    auto* cr = app.add_subcommand("covert-recv", "Decode recorded keyboard LED waveforms");
    std::string cr_scheme = "single_async", cr_in;
    double cr_rate = 50;
    bool cr_mid_one = false;
    cr->add_option("--scheme", cr_scheme, "Signalling scheme")->check(CLI::IsMember(scheme_names));
    cr->add_option("--rate", cr_rate, "Rate used by covert-send");
    cr->add_option("--in", cr_in, "Directory written by covert-send (default: --out)");
    cr->add_flag("--mid-on-one", cr_mid_one, "diff_manchester: mid-cell transition marks a one");

    // figure
    auto* fg = app.add_subcommand("figure", "Write a plot (.svg) and its data (.csv)");
    std::string fg_kind;
    FigureParams fp;
    fg->add_option("--kind", fg_kind, "Figure to draw")
        ->required()
        ->check(CLI::IsMember({"emanation_trace", "distance_degradation", "stretcher", "diffuse_sum", "ui_spectrum"}));
    fg->add_option("--rate", fp.rate, "Bit rate");
    fg->add_option("--distance", fp.distance, "Detector distance in metres");
    fg->add_option("--ambient", fp.ambient, "Ambient preset")->check(CLI::IsMember(AmbientModel::preset_names()));
    fg->add_option("--streams", fp.streams, "Streams in diffuse figures");
    fg->add_option("--chars", fp.chars_per_stream, "Characters per stream in diffuse figures");
    fg->add_option("--min-on", fp.min_on_ui, "Stretcher minimum on-time in unit intervals");

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg = Config::defaults();
        if (!g.config.empty()) cfg.merge(Config::load(g.config));
        const LedModel led = led_from_config(cfg);

        if (*sim) {
            const auto fmt = FrameFormat::parse(sim_frame, sim_rate);
            const auto payload = sim_text.empty() ? random_bytes(sim_bytes, mix_seed(g.seed, 77)) : as_bytes(sim_text);
            const auto ch = sim_ch.build(cfg);
            const auto r = simulate_link(payload, fmt, led, ch, g.seed);
            io::write_waveform(out_path(g, "detector.f64"), r.detector, io::SampleFormat::binary_f64, "V",
                               {{"rate", fmt::format("{}", sim_rate)}, {"frame", fmt.to_string()}});
            io::write_text(out_path(g, "recovered.bin"),
                           std::string(r.recovery.bytes.begin(), r.recovery.bytes.end()));
            print_summary({{"rate", fmt::format("{:g}", sim_rate)},
                           {"frame", fmt.to_string()},
                           {"distance_m", fmt::format("{:g}", ch.distance)},
                           {"bytes", fmt::format("{}", payload.size())},
                           {"recovered", fmt::format("{}", r.recovery.bytes.size())},
                           {"ber", fmt::format("{:.6g}", r.recovery.ber())},
                           {"framing_errors", fmt::format("{}", r.recovery.framing_errors)},
                           {"k", fmt::format("{:.6f}", r.k)}},
                          g);
        } else if (*sw) {
            SweepSpec spec;
            spec.distances = sw_dist.empty() ? cfg.get_list("sweep.distances") : sw_dist;
            spec.rates = sw_rates.empty() ? cfg.get_list("sweep.rates") : sw_rates;
            spec.ambients = sw_amb.empty() ? cfg.get_string_list("sweep.ambients") : sw_amb;
            spec.seeds = sw_seeds;
            if (spec.seeds.empty())
                for (double s : cfg.get_list("sweep.seeds")) spec.seeds.push_back(static_cast<std::uint64_t>(s));
            spec.frame = cfg.get_string("sweep.frame", "8N1");
            spec.noise = !sw_noiseless;
            const std::size_t n = sw_bytes ? sw_bytes : static_cast<std::size_t>(cfg.get_double("sweep.payload_bytes"));
            const auto payload = random_bytes(n, mix_seed(g.seed, 77));
            const auto base = channel_from_config(cfg);
            const auto rows = sw_serial ? run_sweep_serial(spec, payload, base, led) : run_sweep_omp(spec, payload, base, led);
            const auto path = out_path(g, "sweep.csv");
            io::write_text(path, sweep_csv(rows));
            if (g.format == "csv") std::cout << sweep_csv(rows);
            else print_summary({{"cells", fmt::format("{}", rows.size())}, {"table", path}}, g);
        } else if (*cl) {
            ClassifyOptions co;
            co.ber_threshold = cfg.get_double("classifier.ber_threshold");
            co.modulation_threshold = cfg.get_double("classifier.modulation_threshold");
            co.seed = g.seed;
            if (!cl_direct) {
                ChannelFlags f = cl_ch;
                if (f.distance <= 0.0) f.distance = cfg.get_double("classifier.survey_distance");
                if (f.ambient.empty()) f.ambient = cfg.get_string("classifier.survey_ambient");
                co.channel = f.build(cfg);
            }
            ClassLabel label;
            std::string name;
            if (!cl_fixture.empty()) {
                const auto fx = load_fixture(cl_fixture);
                const FrameFormat fmt(fx.rated_rate);
                const auto payload = random_bytes(static_cast<std::size_t>(cfg.get_double("classifier.payload_bytes")),
                                                  mix_seed(g.seed, 1000));
                label = classify(synthesize_fixture(fx, payload, default_sample_rate(fx.rated_rate), fmt), payload, fmt,
                                 co);
                name = fx.name;
            } else if (!cl_wave.empty()) {
                if (cl_truth.empty()) throw std::invalid_argument("classify: --waveform needs --truth");
                const auto w = io::read_waveform(cl_wave);
                const auto truth = as_bytes(io::read_text(cl_truth));
                label = classify(OpticalWaveform{w}, truth, FrameFormat::parse(cl_frame, cl_rate), co);
                name = cl_wave;
            } else {
                throw std::invalid_argument("classify: give --fixture or --waveform");
            }
            print_summary({{"device", name},
                           {"class", to_string(label.cls)},
                           {"modulation_depth", fmt::format("{:.4f}", label.modulation_depth)},
                           {"min_pulse_s", label.min_pulse_observed ? fmt::format("{:.6g}", *label.min_pulse_observed) : ""},
                           {"ber", label.ber ? fmt::format("{:.4g}", *label.ber) : ""}},
                          g);
        } else if (*sv) {
            ChannelFlags f = sv_ch;
            if (f.distance <= 0.0) f.distance = cfg.get_double("classifier.survey_distance");
            if (f.ambient.empty()) f.ambient = cfg.get_string("classifier.survey_ambient");
            const auto fixtures = load_fixture_suite(sv_dir.empty() ? data_dir() + "/fixtures" : sv_dir);
            SurveyOptions so;
            so.payload_bytes = static_cast<std::size_t>(cfg.get_double("classifier.payload_bytes"));
            const auto rep = survey(fixtures, f.build(cfg), g.seed, so);
            const auto path = out_path(g, "survey.csv");
            io::write_text(path, rep.to_csv());
            if (g.format == "csv") std::cout << rep.to_csv();
            else
                print_summary({{"devices", fmt::format("{}", rep.rows.size())},
                               {"class_i", fmt::format("{}", rep.count_i)},
                               {"class_ii", fmt::format("{}", rep.count_ii)},
                               {"class_iii", fmt::format("{}", rep.count_iii)},
                               {"class_iii_fraction", fmt::format("{:.3f}", rep.class_iii_fraction())},
                               {"red_side_exposed", fmt::format("{}", rep.red_side_exposed)},
                               {"table", path}},
                              g);
        } else if (*dm) {
            std::vector<TransitionEvent> events;
            std::vector<std::vector<std::uint8_t>> truth;
            double end = dm_end > 0.0 ? dm_end : std::numeric_limits<double>::infinity();
            if (!dm_events.empty()) {
                events = io::read_events(dm_events);
            } else if (!dm_wave.empty()) {
                const auto w = io::read_waveform(dm_wave);
                events = extract_events(w, dm_unit);
                if (dm_end <= 0.0) end = w.start_time + w.duration();
            } else if (dm_scene > 0) {
                const auto sc = make_diffuse_scene(dm_scene, dm_chars, dm_rate, 2e6, 0.06, g.seed);
                const SampledWaveform sum{sc.sample_rate, 0.0, sc.sum};
                io::write_waveform(out_path(g, "scene.f64"), sum, io::SampleFormat::binary_f64, "unit");
                events = extract_events(sum, 1.0);
                io::write_events(out_path(g, "scene_events.csv"), events);
                truth = sc.payloads;
                if (dm_end <= 0.0) end = sum.duration();
            } else {
                throw std::invalid_argument("demix: give --events, --waveform or --scene");
            }
            UiOptions uo;
            uo.method = dm_method == "interval_sequence" ? UiMethod::interval_sequence : UiMethod::point_process;
            const double ui = dm_ui > 0.0 ? dm_ui : estimate_ui(events, uo);
            DemixOptions dopt;
            dopt.tolerance = cfg.get_double("demixer.tolerance");
            dopt.record_end = end;
            const auto res = demix(events, ui, FrameFormat::parse(dm_frame, 1.0 / ui), dopt);
            const auto plaus = validate_streams(
                res, dm_hint == "ascii" ? EncodingHint::ascii : dm_hint == "ebcdic" ? EncodingHint::ebcdic : EncodingHint::none);
            std::string s = "stream,start_time_s,bytes_hex,framing_errors,parity_errors,plausible\n";
            for (std::size_t i = 0; i < res.streams.size(); ++i) {
                const auto& st = res.streams[i];
                s += fmt::format("{},{:.9e},{},{},{},{}\n", st.hypothesis.id, st.hypothesis.start_time, hex(st.bytes),
                                 st.framing_errors, st.parity_errors, plaus[i].plausible() ? "yes" : "no");
            }
            io::write_text(out_path(g, "streams.csv"), s);
            std::string log = "time_s,event_time_s,stream,cell,interpretation,level\n";
            for (const auto& d : res.log)
                log += fmt::format("{:.9e},{:.9e},{},{},{},{}\n", d.time, d.event_time, d.stream, d.cell,
                                   to_string(d.interpretation), d.level);
            io::write_text(out_path(g, "decisions.csv"), log);
            std::size_t exact = 0;
            for (const auto& p : truth)
                exact += std::any_of(res.streams.begin(), res.streams.end(), [&](const auto& st) { return st.bytes == p; });
            Summary sum{{"events", fmt::format("{}", events.size())},
                        {"unit_interval_us", fmt::format("{:.3f}", ui * 1e6)},
                        {"streams", fmt::format("{}", res.streams.size())},
                        {"unassigned_events", fmt::format("{}", res.unassigned_events)},
                        {"ambiguity_flags", fmt::format("{}", res.ambiguity_flags.size())}};
            if (!truth.empty()) sum.push_back({"payloads_recovered", fmt::format("{}/{}", exact, truth.size())});
            print_summary(sum, g);
        } else if (*cs) {
            std::string text = cs_file.empty() ? cs_text : io::read_text(cs_file);
            const auto ch = cs_ch.build(cfg);
            if (cs_scheme == "scan_code") {
                const double fs = cs_fs > 0.0 ? cs_fs : default_sample_rate(cs_rate);
                const auto keys = type_text(text, 0.0, 0.1);
                const auto line = scan_stream(keys, cs_rate);
                const auto det = transmit(line, led, ch, fs, g.seed);
                io::write_waveform(out_path(g, "keyboard.f64"), det, io::SampleFormat::binary_f64, "V");
                std::string s = "time_s,code,kind\n";
                for (const auto& k : keys)
                    s += fmt::format("{:.9f},0x{:02X},{}\n", k.time, k.code, k.kind == KeyAction::make ? "make" : "break");
                io::write_text(out_path(g, "scancodes.csv"), s);
                print_summary({{"scheme", cs_scheme}, {"key_events", fmt::format("{}", keys.size())},
                               {"duration_s", fmt::format("{:.6f}", line.duration())}},
                              g);
            } else {
                CovertScheme sc{parse_covert_kind(cs_scheme), cs_rate, cs_mid_one};
                sc.validate();
                const auto bytes = as_bytes(text);
                const auto events = encode_message(bytes, sc);
                io::write_schedule(out_path(g, "schedule.csv"), events);
                const double fs = cs_fs > 0.0 ? cs_fs : default_sample_rate(cs_rate);
                const auto lines = schedule_to_lines(events, 2.0 * sc.symbol_period(), 0, 2.0 * sc.symbol_period());
                const char* names[] = {"led_caps.f64", "led_num.f64", "led_scroll.f64"};
                for (std::size_t j = 0; j < 3; ++j)
                    io::write_waveform(out_path(g, names[j]), transmit(lines[j], led, ch, fs, mix_seed(g.seed, j)),
                                       io::SampleFormat::binary_f64, "V");
                print_summary({{"scheme", cs_scheme}, {"rate", fmt::format("{:g}", cs_rate)},
                               {"schedule_events", fmt::format("{}", events.size())},
                               {"duration_s", fmt::format("{:.6f}", schedule_end(events))}},
                              g);
            }
        } else if (*cr) {
            const std::filesystem::path dir = cr_in.empty() ? g.out : cr_in;
            std::string text;
            if (cr_scheme == "scan_code") {
                const auto r = decode_scan(io::read_waveform((dir / "keyboard.f64").string()), cr_rate);
                text = r.text;
                print_summary({{"key_events", fmt::format("{}", r.events.size())},
                               {"unknown_codes", fmt::format("{}", r.unknown_codes)},
                               {"framing_errors", fmt::format("{}", r.framing_errors)},
                               {"text", text}},
                              g);
            } else {
                CovertScheme sc{parse_covert_kind(cr_scheme), cr_rate, cr_mid_one};
                sc.validate();
                std::vector<SampledWaveform> w;
                for (const char* n : {"led_caps.f64", "led_num.f64", "led_scroll.f64"})
                    w.push_back(io::read_waveform((dir / n).string()));
                const auto bytes = decode_message(w, sc);
                text.assign(bytes.begin(), bytes.end());
                print_summary({{"bytes", fmt::format("{}", bytes.size())}, {"text", text}}, g);
            }
            io::write_text(out_path(g, "received.txt"), text);
        } else if (*fg) {
            fp.seed = g.seed;
            const auto files = emit_figure(parse_figure_kind(fg_kind), fp, g.out);
            Summary s{{"svg", files.svg_path}, {"csv", files.csv_path}};
            for (const auto& n : files.notes) s.push_back({"note", n});
            print_summary(s, g);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
