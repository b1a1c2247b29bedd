#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "spinsim/readout.hpp"

using namespace spinsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double binomial_sigma(double p, int n) {
    return std::sqrt(p * (1.0 - p) / n);
}

}  // namespace

TEST_CASE("ground-state electron produces an empty ERO trace") {
    const auto trace = ero_trace({}, {}, SpinLabel::ground, 1e-6, 1);
    CHECK(trace.events.empty());
    CHECK(trace.decision == "GS");
}

TEST_CASE("ERO bias precondition names the violated inequality") {
    EroBias bad;
    bad.es_offset_ev = -10e-6;
    CHECK_THROWS_WITH(ero_trace(bad, {}, SpinLabel::excited, 1e-6, 1),
                      Catch::Matchers::ContainsSubstring("E_ES"));
    EroBias bad2;
    bad2.gs_offset_ev = 10e-6;
    CHECK_THROWS_WITH(ero_trace(bad2, {}, SpinLabel::excited, 1e-6, 1),
                      Catch::Matchers::ContainsSubstring("E_GS"));
}

TEST_CASE("ERO detection probability follows the exponential CDF") {
    TunnelSpec ts;
    ts.gamma_es_hz = 20e6;
    const double window = 1e-6;  // gamma*window = 20
    const int n = 10000;
    int detected = 0;
    for (int i = 0; i < n; ++i) {
        if (ero_trace({}, ts, SpinLabel::excited, window, derive_seed(5, i)).decision == "ES") {
            ++detected;
        }
    }
    const double expected = 1.0 - std::exp(-ts.gamma_es_hz * window);
    CHECK_THAT(static_cast<double>(detected) / n,
               WithinAbs(expected, 3.0 * binomial_sigma(expected, n) + 1e-6));
}

TEST_CASE("ERO miss rate matches exp(-gamma*window) within 3 sigma") {
    TunnelSpec ts;
    ts.gamma_es_hz = 3e6;
    const double window = 1e-6;  // miss probability e^{-3} = 5.0e-2
    const int n = 10000;
    int missed = 0;
    for (int i = 0; i < n; ++i) {
        if (ero_trace({}, ts, SpinLabel::excited, window, derive_seed(17, i)).decision == "GS") {
            ++missed;
        }
    }
    const double expected = ero_miss_probability(ts, window);
    CHECK_THAT(static_cast<double>(missed) / n,
               WithinAbs(expected, 3.0 * binomial_sigma(expected, n)));
}

TEST_CASE("ERO event times are ordered and inside the window") {
    TunnelSpec ts;
    for (int i = 0; i < 200; ++i) {
        const auto trace = ero_trace({}, ts, SpinLabel::excited, 1e-6, derive_seed(23, i));
        double prev = -1.0;
        for (const auto& ev : trace.events) {
            CHECK(ev.time_s > prev);
            CHECK(ev.time_s < trace.window_s);
            prev = ev.time_s;
        }
        if (trace.events.size() == 2) {
            CHECK(trace.events[0].kind == EventKind::tunnel_out);
            CHECK(trace.events[1].kind == EventKind::tunnel_in);
        }
    }
}

TEST_CASE("tunneling waiting times have the right mean and are memoryless") {
    TunnelSpec ts;
    ts.gamma_es_hz = 10e6;
    const int n = 10000;
    std::vector<double> times;
    times.reserve(n);
    for (int i = 0; i < n; ++i) {
        times.push_back(trro_decision(ts, 1.0, SpinLabel::excited, derive_seed(31, i)).tunnel_time_s);
    }
    double mean = 0.0;
    for (double t : times) {
        mean += t;
    }
    mean /= n;
    const double expected_mean = 1.0 / ts.gamma_es_hz;
    // std of the sample mean of Exp(rate) is mean/sqrt(n)
    CHECK_THAT(mean, WithinAbs(expected_mean, 3.0 * expected_mean / std::sqrt(n)));

    // memorylessness: P(T > a+b | T > a) = P(T > b)
    const double a = expected_mean;
    const double b = 0.5 * expected_mean;
    int past_a = 0;
    int past_ab = 0;
    int past_b = 0;
    for (double t : times) {
        past_a += t > a;
        past_ab += t > a + b;
        past_b += t > b;
    }
    const double conditional = static_cast<double>(past_ab) / past_a;
    const double unconditional = static_cast<double>(past_b) / n;
    CHECK_THAT(conditional, WithinAbs(unconditional, 0.05));
}

TEST_CASE("TR-RO error rates match the closed forms within 3 sigma") {
    TunnelSpec ts;
    ts.gamma_es_hz = 10e6;
    ts.gamma_gs_hz = 0.1e6;
    const double tau = 1e-6;  // G_ES*tau = 10, G_GS*tau = 0.1
    const int n = 10000;

    int err_es = 0;
    int err_gs = 0;
    for (int i = 0; i < n; ++i) {
        if (trro_decision(ts, tau, SpinLabel::excited, derive_seed(41, i)).decision !=
            SpinLabel::excited) {
            ++err_es;
        }
        if (trro_decision(ts, tau, SpinLabel::ground, derive_seed(43, i)).decision !=
            SpinLabel::ground) {
            ++err_gs;
        }
    }
    const double p_es = trro_error_excited(ts, tau);
    const double p_gs = trro_error_ground(ts, tau);
    CHECK_THAT(p_es, WithinRel(std::exp(-10.0), 1e-9));
    CHECK_THAT(p_gs, WithinRel(1.0 - std::exp(-0.1), 1e-9));
    CHECK_THAT(static_cast<double>(err_es) / n,
               WithinAbs(p_es, 3.0 * binomial_sigma(p_es, n) + 1e-4));
    CHECK_THAT(static_cast<double>(err_gs) / n, WithinAbs(p_gs, 3.0 * binomial_sigma(p_gs, n)));
}

TEST_CASE("TR-RO with zero ground rate never false-positives") {
    TunnelSpec ts;
    ts.gamma_gs_hz = 0.0;
    for (int i = 0; i < 500; ++i) {
        CHECK(trro_decision(ts, 1e-6, SpinLabel::ground, derive_seed(47, i)).decision ==
              SpinLabel::ground);
    }
}

TEST_CASE("TR-RO carries no information when the rates coincide") {
    TunnelSpec ts;
    ts.gamma_es_hz = 1e6;
    ts.gamma_gs_hz = 1e6;
    const double tau = std::log(2.0) / 1e6;  // P(tunnel by tau) = 1/2
    const int n = 10000;
    int correct = 0;
    for (int i = 0; i < n; ++i) {
        const auto spin = (i % 2 == 0) ? SpinLabel::excited : SpinLabel::ground;
        if (trro_decision(ts, tau, spin, derive_seed(53, i)).decision == spin) {
            ++correct;
        }
    }
    CHECK_THAT(static_cast<double>(correct) / n, WithinAbs(0.5, 3.0 * binomial_sigma(0.5, n)));
}

TEST_CASE("singlet converts immediately, blocked triplet stays put") {
    const auto s = spin_blockade_trace(TwoSpinState::singlet, 1e-3, 1e-3, 1);
    REQUIRE(s.events.size() == 1);
    CHECK(s.events[0].kind == EventKind::interdot);
    CHECK(s.events[0].time_s == 0.0);
    CHECK(s.decision == "S");

    const auto t = spin_blockade_trace(TwoSpinState::triplet0, 1e-6, 10.0, 2);
    CHECK(t.events.empty());
    CHECK(t.decision == "T");
}

TEST_CASE("triplet release times pass a KS test against Exp(1/T1)") {
    const double t1 = 0.2e-3;
    const double window = 10e-3;  // wide enough that almost every release lands inside
    const int n = 10000;
    std::vector<double> releases;
    for (int i = 0; i < n; ++i) {
        const auto trace = spin_blockade_trace(TwoSpinState::triplet0, window, t1,
                                               derive_seed(61, i), 0.0);
        if (!trace.events.empty()) {
            releases.push_back(trace.events[0].time_s);
        }
    }
    REQUIRE(releases.size() > 0.99 * n);
    std::sort(releases.begin(), releases.end());
    double ks = 0.0;
    const auto m = static_cast<double>(releases.size());
    for (std::size_t i = 0; i < releases.size(); ++i) {
        const double cdf = 1.0 - std::exp(-releases[i] / t1);
        ks = std::max(ks, std::abs(cdf - (static_cast<double>(i) + 1.0) / m));
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / m));
    }
    const double critical_5pct = 1.358 / std::sqrt(m);
    CHECK(ks < critical_5pct);
}

TEST_CASE("late triplet relaxation is not mistaken for a singlet") {
    // latency well below T1: essentially no triplet relaxes early enough
    const double t1 = 1e-3;
    const double window = 10e-3;
    const double latency = 1e-6;
    int mislabeled = 0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        if (spin_blockade_trace(TwoSpinState::triplet0, window, t1, derive_seed(67, i),
                                latency)
                .decision == "S") {
            ++mislabeled;
        }
    }
    // expected rate 1 - exp(-latency/T1) = 1e-3
    CHECK(mislabeled < 10);
}

TEST_CASE("events map to rectangular current pulses that superpose") {
    EventTrace trace;
    trace.window_s = 1e-6;
    trace.events.push_back({0.2e-6, EventKind::tunnel_out});
    const double i_peak = 10e-9;
    const double width = 50e-9;
    const auto w = events_to_current(trace, i_peak, width, 1e9);
    CHECK(w.unit == SignalUnit::ampere);
    double integral = 0.0;
    double peak = 0.0;
    for (double s : w.samples) {
        integral += s / w.fs;
        peak = std::max(peak, s);
    }
    CHECK_THAT(peak, WithinRel(i_peak, 1e-12));
    CHECK_THAT(integral, WithinRel(i_peak * width, 0.05));

    // a second overlapping event doubles the overlap region
    trace.events.push_back({0.22e-6, EventKind::tunnel_in});
    const auto w2 = events_to_current(trace, i_peak, width, 1e9);
    double peak2 = 0.0;
    for (double s : w2.samples) {
        peak2 = std::max(peak2, s);
    }
    CHECK_THAT(peak2, WithinRel(2.0 * i_peak, 1e-12));
}

TEST_CASE("empty trace maps to an all-zero waveform") {
    EventTrace trace;
    trace.window_s = 1e-6;
    const auto w = events_to_current(trace, 1e-9, 50e-9, 1e9);
    for (double s : w.samples) {
        CHECK(s == 0.0);
    }
}

TEST_CASE("insufficient sample rate for the pulse width is rejected") {
    EventTrace trace;
    trace.window_s = 1e-6;
    CHECK_THROWS_AS(events_to_current(trace, 1e-9, 50e-9, 1e8), std::invalid_argument);
}

TEST_CASE("paper current range helper") {
    CHECK(current_in_specified_range(10e-12));
    CHECK(current_in_specified_range(10e-9));
    CHECK_FALSE(current_in_specified_range(1e-12));
    CHECK_FALSE(current_in_specified_range(1e-6));
}

TEST_CASE("stochastic traces are seed-deterministic") {
    TunnelSpec ts;
    const auto a = ero_trace({}, ts, SpinLabel::excited, 1e-6, 99);
    const auto b = ero_trace({}, ts, SpinLabel::excited, 1e-6, 99);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].time_s == b.events[i].time_s);
    }
    CHECK(trro_decision(ts, 1e-7, SpinLabel::excited, 7).tunnel_time_s ==
          trro_decision(ts, 1e-7, SpinLabel::excited, 7).tunnel_time_s);
}
