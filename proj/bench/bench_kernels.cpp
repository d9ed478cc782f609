// Serial reference against the OpenMP kernels, plus the FFT lag search.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ledtap/channel.hpp"
#include "ledtap/demixer.hpp"
#include "ledtap/dsp.hpp"
#include "ledtap/figures.hpp"
#include "ledtap/kernels.hpp"
#include "ledtap/rng.hpp"
#include "ledtap/sweep.hpp"

using namespace ledtap;

namespace {

std::pair<std::vector<double>, std::vector<double>> lagged_pair(std::size_t n, long shift) {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> g;
    std::vector<double> a(n), b(n);
    for (auto& v : b) v = g(gen);
    for (std::size_t i = 0; i < n; ++i) {
        const long j = static_cast<long>(i) - shift;
        a[i] = (j >= 0 ? b[static_cast<std::size_t>(j)] : 0.0) + 0.5 * g(gen);
    }
    return {a, b};
}

template <kernels::LagScore (*Search)(std::span<const double>, std::span<const double>, long)>
void BM_LagSearch(benchmark::State& st) {
    const auto [a, b] = lagged_pair(1u << 15, 300);
    const long max_lag = st.range(0);
    for (auto _ : st) benchmark::DoNotOptimize(Search(a, b, max_lag));
    st.SetItemsProcessed(st.iterations() * (2 * max_lag + 1));
}
BENCHMARK(BM_LagSearch<kernels::best_lag_pearson_serial>)->Name("lag_search/serial")->Arg(64)->Arg(512);
BENCHMARK(BM_LagSearch<kernels::best_lag_pearson_omp>)->Name("lag_search/omp")->Arg(64)->Arg(512);
BENCHMARK(BM_LagSearch<kernels::best_lag_pearson_fft>)->Name("lag_search/fft")->Arg(64)->Arg(512)->Arg(4096);

struct HarmonicInput {
    std::vector<double> power;
    double df = 0.0;
    std::vector<double> periods;
};

const HarmonicInput& harmonic_input() {
    static const HarmonicInput in = [] {
        HarmonicInput h;
        const auto sc = make_diffuse_scene(10, 10, 9600, 2e6, 0.06, 1);
        const auto ev = extract_events(SampledWaveform{sc.sample_rate, 0.0, sc.sum}, 1.0);
        h.periods = ui_spectrum(ev).periods;
        std::vector<double> x(1u << 16, 0.0);
        for (const auto& e : ev) {
            const auto k = static_cast<std::size_t>((e.time - ev.front().time) / 0.5e-6);
            if (k < x.size()) x[k] += e.magnitude;
        }
        h.power = dsp::power_spectrum(x, 1u << 17);
        h.df = 1.0 / ((1u << 17) * 0.5e-6);
        return h;
    }();
    return in;
}

void BM_HarmonicSerial(benchmark::State& st) {
    const auto& h = harmonic_input();
    for (auto _ : st) benchmark::DoNotOptimize(kernels::harmonic_scan_serial(h.power, h.df, h.periods, 32));
}
void BM_HarmonicOmp(benchmark::State& st) {
    const auto& h = harmonic_input();
    for (auto _ : st) benchmark::DoNotOptimize(kernels::harmonic_scan_omp(h.power, h.df, h.periods, 32));
}
BENCHMARK(BM_HarmonicSerial)->Name("harmonic_scan/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HarmonicOmp)->Name("harmonic_scan/omp")->Unit(benchmark::kMillisecond);

SweepSpec small_sweep() {
    SweepSpec s;
    s.distances = {5, 20, 38};
    s.rates = {4800, 9600, 19200};
    return s;
}

void BM_SweepSerial(benchmark::State& st) {
    const auto payload = random_bytes(64, 2);
    for (auto _ : st) benchmark::DoNotOptimize(run_sweep_serial(small_sweep(), payload, ChannelModel{}, LedModel{}));
}
void BM_SweepOmp(benchmark::State& st) {
    const auto payload = random_bytes(64, 2);
    for (auto _ : st) benchmark::DoNotOptimize(run_sweep_omp(small_sweep(), payload, ChannelModel{}, LedModel{}));
}
BENCHMARK(BM_SweepSerial)->Name("sweep/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepOmp)->Name("sweep/omp")->Unit(benchmark::kMillisecond);

void BM_Demix(benchmark::State& st) {
    const auto sc = make_diffuse_scene(10, 10, 9600, 2e6, 0.06, 1);
    const auto ev = extract_events(SampledWaveform{sc.sample_rate, 0.0, sc.sum}, 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(demix(ev, sc.unit_interval, FrameFormat(9600)));
}
BENCHMARK(BM_Demix)->Name("demix/10_streams");

}  // namespace

BENCHMARK_MAIN();
