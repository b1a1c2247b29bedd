#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "spinsim/pulse_gen.hpp"

using namespace spinsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

TEST_CASE("carrier outside the tuning range is rejected") {
    VcoSpec spec;
    spec.f_carrier_hz = 56e9;
    CHECK_THROWS_AS(synthesize_vco(spec, 1e-9, 240e9, 1), std::invalid_argument);
    spec.f_carrier_hz = 66e9;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("undersampled synthesis is rejected") {
    VcoSpec spec;
    CHECK_THROWS_AS(synthesize_vco(spec, 1e-9, 100e9, 1), std::invalid_argument);
}

TEST_CASE("noiseless spec gives a pure enveloped sinusoid") {
    VcoSpec spec;
    spec.pn_at_1mhz_dbc = -inf;
    spec.startup_tau_s = 0.0;
    const auto w = synthesize_vco(spec, 1e-9, 240e9, 42);
    REQUIRE(w.samples.size() == 240);
    for (std::size_t k = 0; k < w.samples.size(); ++k) {
        const double expect =
            spec.amplitude_v * std::cos(2.0 * std::numbers::pi * spec.f_carrier_hz * w.time_at(k));
        CHECK_THAT(w.samples[k], WithinAbs(expect, 1e-12));
    }
}

TEST_CASE("synthesis is bit-identical per seed") {
    VcoSpec spec;
    const auto a = synthesize_vco(spec, 2e-9, 240e9, 1234);
    const auto b = synthesize_vco(spec, 2e-9, 240e9, 1234);
    const auto c = synthesize_vco(spec, 2e-9, 240e9, 1235);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
}

TEST_CASE("startup envelope settles as 1 - exp(-t/tau)") {
    VcoSpec spec;
    spec.startup_tau_s = 50e-12;
    CHECK_THAT(startup_settling_time(spec, 0.98), WithinRel(195.6e-12, 1e-3));
    CHECK_THAT(startup_settling_time(spec, 0.99), WithinRel(230.3e-12, 1e-3));
    CHECK_THAT(startup_settling_time(spec, 1e-9), WithinAbs(0.0, 1e-18));
    CHECK_THROWS_AS(startup_settling_time(spec, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(startup_settling_time(spec, 0.0), std::invalid_argument);
}

TEST_CASE("phase increments are stationary across the trace") {
    VcoSpec spec;
    spec.startup_tau_s = 0.0;
    const std::size_t lag = 64;
    double var_early = 0.0;
    double var_late = 0.0;
    const int n_seeds = 400;
    for (int s = 0; s < n_seeds; ++s) {
        const auto t = synthesize_vco_phase(spec, 4096.0 / 64e6, 64e6, derive_seed(99, s));
        const std::size_t n = t.phase.size();
        const double d_early = t.phase[lag] - t.phase[0];
        const double d_late = t.phase[n - 1] - t.phase[n - 1 - lag];
        var_early += d_early * d_early;
        var_late += d_late * d_late;
    }
    var_early /= n_seeds;
    var_late /= n_seeds;
    CHECK_THAT(var_early / var_late, WithinAbs(1.0, 0.3));

    // variance of the increment matches 2*pi^2*S_f*lag/fs
    const double s_f = freq_noise_psd_from_pn(spec.pn_at_1mhz_dbc);
    const double expected = 2.0 * std::numbers::pi * std::numbers::pi * s_f * lag / 64e6;
    CHECK_THAT(var_early, WithinRel(expected, 0.25));
}

TEST_CASE("ideal rectangular gating zeroes the off region exactly") {
    VcoSpec spec;
    spec.pn_at_1mhz_dbc = -inf;
    spec.startup_tau_s = 0.0;
    const auto w = synthesize_vco(spec, 2e-9, 240e9, 7);

    SwitchSpec sw;
    sw.t_start_s = 0.5e-9;
    sw.t_on_s = 0.5e-9;
    sw.off_isolation_db = inf;
    const auto gated = gate_switch(w, sw);
    for (std::size_t k = 0; k < gated.samples.size(); ++k) {
        const double t = gated.time_at(k);
        if (t < sw.t_start_s || t > sw.support_end()) {
            CHECK(gated.samples[k] == 0.0);
        } else {
            CHECK(gated.samples[k] == w.samples[k]);
        }
    }
    // idempotent on the on-window
    const auto twice = gate_switch(gated, sw);
    CHECK(twice.samples == gated.samples);
}

TEST_CASE("finite isolation leaks an attenuated copy outside the window") {
    VcoSpec spec;
    spec.pn_at_1mhz_dbc = -inf;
    spec.startup_tau_s = 0.0;
    const auto w = synthesize_vco(spec, 2e-9, 240e9, 7);

    SwitchSpec sw;
    sw.t_start_s = 1.0e-9;
    sw.t_on_s = 0.5e-9;
    sw.off_isolation_db = 40.0;
    const auto gated = gate_switch(w, sw);
    CHECK_THAT(gated.samples[10], WithinRel(w.samples[10] * 1e-2, 1e-9));
}

TEST_CASE("a 20 ps gate of a 60 GHz carrier holds 1.2 carrier cycles") {
    VcoSpec spec;  // 60 GHz
    SwitchSpec sw;
    sw.t_on_s = 20e-12;
    CHECK_THAT(carrier_cycles(spec, sw), WithinAbs(1.2, 1e-12));
}

TEST_CASE("switch edges stretch the effective pulse beyond the commanded on-time") {
    SwitchSpec sw;
    sw.t_start_s = 0.2e-9;
    sw.t_on_s = 20e-12;
    sw.rise_s = 2e-12;
    sw.fall_s = 2e-12;
    CHECK_THAT(effective_on_time(sw), WithinRel(22e-12, 1e-12));

    // numerical integral of the envelope agrees with the trapezoid area
    const double fs = 240e9 * 64.0;
    double area = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(1e-9 * fs); ++k) {
        area += switch_envelope(sw, (k + 0.5) / fs) / fs;
    }
    CHECK_THAT(area, WithinRel(effective_on_time(sw), 1e-4));
}

TEST_CASE("switch window beyond the waveform support is rejected") {
    VcoSpec spec;
    spec.pn_at_1mhz_dbc = -inf;
    const auto w = synthesize_vco(spec, 1e-9, 240e9, 7);
    SwitchSpec sw;
    sw.t_start_s = 0.9e-9;
    sw.t_on_s = 0.5e-9;
    CHECK_THROWS_AS(gate_switch(w, sw), std::invalid_argument);
}

TEST_CASE("drive conversion scales pointwise and checks units") {
    std::vector<double> s{1.0, -2.0, 0.5};
    const Waveform v(std::move(s), 1e9, 0.0, SignalUnit::volt);

    DriveConversion c;
    c.mode = DriveConversion::Mode::edsr;
    c.alpha = 0.0;
    const auto zero = drive_field(v, c);
    CHECK(zero.unit == SignalUnit::tesla);
    for (double x : zero.samples) {
        CHECK(x == 0.0);
    }

    c.alpha = 3.5e-3;
    const auto b = drive_field(v, c);
    Waveform v2 = v;
    for (double& x : v2.samples) {
        x *= 2.0;
    }
    const auto b2 = drive_field(v2, c);
    for (std::size_t k = 0; k < b.samples.size(); ++k) {
        CHECK_THAT(b2.samples[k], WithinAbs(2.0 * b.samples[k], 1e-18));
    }

    c.mode = DriveConversion::Mode::esr;
    CHECK_THROWS_AS(drive_field(v, c), std::invalid_argument);
}

TEST_CASE("default alpha_v reproduces the 750 MHz operating point from 0.8 V") {
    const double b1 = default_alpha_v() * 0.8;
    CHECK_THAT(rabi_from_field(2.0, b1), WithinRel(750e6, 1e-12));
    CHECK_THAT(b1, WithinRel(53.586e-3, 1e-3));
}
