#include <doctest.h>

#include <random>

#include "ledtap/dsp.hpp"
#include "ledtap/kernels.hpp"
#include "ledtap/rng.hpp"
#include "ledtap/sweep.hpp"
#include "oracles/stats.hpp"

using namespace ledtap;

TEST_CASE("lag search: serial and parallel agree with the oracle") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> n;
    std::vector<double> a(5000), b(5000);
    for (auto& v : b) v = n(gen);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (i >= 37 ? b[i - 37] : 0.0) + 0.5 * n(gen);
    const auto s = kernels::best_lag_pearson_serial(a, b, 100);
    const auto p = kernels::best_lag_pearson_omp(a, b, 100);
    CHECK(s.lag == 37);
    CHECK(p.lag == s.lag);
    CHECK(p.k == s.k);
    CHECK(s.k == doctest::Approx(oracle::pearson(a, b, 37)).epsilon(1e-9));
    for (long lag : {-20L, 0L, 5L, 99L})
        CHECK(kernels::pearson_at(a, b, lag).k == doctest::Approx(oracle::pearson(a, b, lag)).epsilon(1e-9));
}

TEST_CASE("harmonic scan: serial and parallel are identical") {
    std::vector<double> power(4096);
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (auto& v : power) v = u(gen);
    std::vector<double> periods;
    for (int i = 0; i < 500; ++i) periods.push_back(1e-4 * (1 + i * 0.01));
    const auto s = kernels::harmonic_scan_serial(power, 10.0, periods, 16);
    const auto p = kernels::harmonic_scan_omp(power, 10.0, periods, 16);
    CHECK(s == p);
}

TEST_CASE("dsp helpers") {
    const std::vector<double> x{5, 1, 4, 2, 3};
    CHECK(dsp::quantile(x, 0.5) == 3);
    CHECK(dsp::quantile(x, 0.0) == 1);
    CHECK(dsp::quantile(x, 1.0) == 5);
    CHECK(dsp::quantile(x, 0.25) == 2);
    CHECK(dsp::next_pow2(1000) == 1024);
    CHECK(dsp::next_pow2(1024) == 1024);
    // Power spectrum of a pure bin-centred tone concentrates in that bin.
    std::vector<double> tone(256);
    for (std::size_t i = 0; i < tone.size(); ++i) tone[i] = std::cos(2 * std::numbers::pi * 8 * static_cast<double>(i) / 256);
    const auto ps = dsp::power_spectrum(tone, 256);
    CHECK(ps[8] == doctest::Approx(128.0 * 128.0));
    CHECK(ps[9] < 1e-12);
}

TEST_CASE("sweep: serial and parallel tables are byte-identical") {
    SweepSpec spec;
    spec.distances = {5, 20};
    spec.rates = {2400, 9600};
    spec.ambients = {"dark_room", "fluorescent_office"};
    spec.seeds = {1, 2};
    const auto payload = random_bytes(16, 5);
    ChannelModel base;
    const auto s = run_sweep_serial(spec, payload, base, LedModel{});
    const auto p = run_sweep_omp(spec, payload, base, LedModel{});
    CHECK(sweep_csv(s) == sweep_csv(p));
    CHECK(s.size() == spec.cells());
    CHECK(s.front().distance == 5);
    CHECK(s.front().ber == 0.0);

    SweepSpec bad = spec;
    bad.distances = {};
    CHECK_THROWS(bad.validate());
    bad = spec;
    bad.distances = {-1};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("FFT lag search matches the direct search") {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> n;
    for (long shift : {-60L, -3L, 0L, 12L, 150L}) {
        std::vector<double> a(20000), b(20000);
        for (auto& v : b) v = 5.0 + n(gen);  // offset exercises the centring
        for (long i = 0; i < 20000; ++i) {
            const long j = i - shift;
            a[static_cast<std::size_t>(i)] = (j >= 0 && j < 20000 ? b[static_cast<std::size_t>(j)] : 5.0) + n(gen);
        }
        const auto d = kernels::best_lag_pearson_serial(a, b, 200);
        const auto f = kernels::best_lag_pearson_fft(a, b, 200);
        CHECK(f.lag == shift);
        CHECK(f.lag == d.lag);
        CHECK(f.k == d.k);
    }
}
