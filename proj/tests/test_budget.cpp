#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "spinsim/budget.hpp"

using namespace spinsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Simpson quadrature of f against the N(mu, sigma) density over +-8 sigma.
double gaussian_expectation(const std::function<double(double)>& f, double mu, double sigma) {
    const int n = 4000;  // even
    const double lo = mu - 8.0 * sigma;
    const double hi = mu + 8.0 * sigma;
    const double h = (hi - lo) / n;
    auto integrand = [&](double x) {
        const double z = (x - mu) / sigma;
        return f(x) * std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    };
    double acc = integrand(lo) + integrand(hi);
    for (int i = 1; i < n; ++i) {
        acc += integrand(lo + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    }
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("detuning infidelity reproduces both paper operating points") {
    CHECK_THAT(detuning_infidelity(11.8e6, 750e6), WithinRel(1.24e-4, 5e-3));
    CHECK_THAT(detuning_infidelity(190e6, 12e9), WithinRel(1.25e-4, 5e-3));
    CHECK(detuning_infidelity(0.0, 750e6) == 0.0);
}

TEST_CASE("detuning infidelity approaches the quadratic law for small offsets") {
    for (double eps : {0.001, 0.01, 0.02, 0.05}) {
        const double f_rabi = 750e6;
        const double exact = detuning_infidelity(eps * f_rabi, f_rabi);
        const double quad = detuning_infidelity_quadratic(eps * f_rabi, f_rabi);
        CHECK_THAT(exact / quad, WithinAbs(1.0, 0.01));
    }
}

TEST_CASE("detuning infidelity is even and monotone on [0, f_R/2]") {
    const double f_rabi = 750e6;
    double prev = -1.0;
    for (int k = 0; k <= 20; ++k) {
        const double df = k * f_rabi / 40.0;
        const double inf_p = detuning_infidelity(df, f_rabi);
        const double inf_m = detuning_infidelity(-df, f_rabi);
        CHECK_THAT(inf_p, WithinAbs(inf_m, 1e-12));
        CHECK(inf_p >= prev);
        prev = inf_p;
    }
}

TEST_CASE("timing infidelity closed form") {
    CHECK_THAT(timing_infidelity(0.014), WithinRel(1.2091e-4, 1e-3));
    CHECK(timing_infidelity(0.0) == 0.0);
    CHECK_THAT(timing_infidelity(0.028), WithinRel(4.836e-4, 1e-3));
    CHECK_THROWS_AS(timing_infidelity(1.0), std::invalid_argument);
}

TEST_CASE("timing infidelity follows the quadratic law for small errors") {
    for (double eps : {0.001, 0.005, 0.01, 0.02}) {
        const double quad = std::numbers::pi * std::numbers::pi * eps * eps / 16.0;
        CHECK_THAT(timing_infidelity(eps) / quad, WithinAbs(1.0, 0.01));
    }
}

TEST_CASE("timing tolerance at the paper operating points") {
    CHECK_THAT(timing_tolerance(750e6, 0.014), WithinRel(4.667e-12, 1e-3));
    CHECK_THAT(timing_tolerance(12e9, 0.014), WithinRel(291.7e-15, 1e-3));
    CHECK(timing_tolerance(750e6, 0.0) == 0.0);
}

TEST_CASE("kappa calibration maps the primary anchor exactly and checks the second") {
    const auto cal = calibrate_pn_kappa();
    CHECK_THAT(cal.kappa, WithinRel(2.33, 0.01));
    CHECK_THAT(pn_to_rms_detuning(-74.0, 750e6, cal), WithinRel(11.8e6, 1e-12));
    CHECK_THAT(pn_to_rms_detuning(-62.0, 12e9, cal), WithinRel(190e6, 0.05));
}

TEST_CASE("pn to rms detuning scaling laws") {
    const auto cal = calibrate_pn_kappa();
    const double base = pn_to_rms_detuning(-74.0, 750e6, cal);
    // +20 dB PN -> 10x detuning
    CHECK_THAT(pn_to_rms_detuning(-54.0, 750e6, cal), WithinRel(10.0 * base, 1e-9));
    // 4x f_R -> 2x detuning
    CHECK_THAT(pn_to_rms_detuning(-74.0, 3000e6, cal), WithinRel(2.0 * base, 1e-9));
    // noiseless
    CHECK(pn_to_rms_detuning(-std::numeric_limits<double>::infinity(), 750e6, cal) == 0.0);
}

TEST_CASE("budget report sums, allocates and flags overruns") {
    CHECK_THAT(equal_allocation(0.999, 8), WithinRel(1.25e-4, 1e-12));
    CHECK_THAT(equal_allocation(0.999, 1), WithinRel(1e-3, 1e-12));

    std::vector<BudgetEntry> entries;
    entries.push_back({BudgetSource::carrier_detuning, 1.24e-4, {}});
    entries.push_back({BudgetSource::timing, 1.21e-4, {}});
    const auto rep = budget_report(0.999, entries);
    CHECK_THAT(rep.total_infidelity, WithinRel(2.45e-4, 1e-12));
    CHECK(rep.pass);

    entries.push_back({BudgetSource::other, 9e-4, {}});
    const auto over = budget_report(0.999, entries);
    CHECK_FALSE(over.pass);
}

TEST_CASE("mc estimator is exact for zero noise") {
    const auto est = mc_gate_infidelity({}, 750e6, 200, 1);
    CHECK(est.mean == 0.0);
    CHECK(est.ci95_half_width == 0.0);
}

TEST_CASE("mc estimator with a fixed offset matches the analytic path") {
    GateNoiseModel noise;
    noise.detuning_mean_hz = 11.8e6;
    const auto est = mc_gate_infidelity(noise, 750e6, 200, 1);
    CHECK_THAT(est.mean, WithinAbs(detuning_infidelity(11.8e6, 750e6), 1e-9));
    CHECK(est.ci95_half_width < 1e-12);
}

TEST_CASE("mc estimator with gaussian detuning matches quadrature") {
    GateNoiseModel noise;
    noise.detuning_sigma_hz = 11.8e6;
    const double f_rabi = 750e6;
    const auto est = mc_gate_infidelity(noise, f_rabi, 40000, 9);
    const double expected = gaussian_expectation(
        [&](double df) { return detuning_infidelity(df, f_rabi); }, 0.0, 11.8e6);
    // E[delta^2] = sigma^2, so in the quadratic regime the Gaussian mean
    // coincides with the fixed offset evaluated at delta = sigma.
    CHECK_THAT(expected / detuning_infidelity(11.8e6, f_rabi), WithinAbs(1.0, 0.01));
    CHECK_THAT(est.mean, WithinAbs(expected, 4.0 * est.ci95_half_width / 1.96 * 3.0));
}

TEST_CASE("mc estimator runs identically for any job count") {
    GateNoiseModel noise;
    noise.detuning_sigma_hz = 5e6;
    noise.timing_sigma = 0.01;
    const auto a = mc_gate_infidelity(noise, 750e6, 500, 77, 1);
    const auto b = mc_gate_infidelity(noise, 750e6, 500, 77, 8);
    CHECK(a.mean == b.mean);
    CHECK(a.ci95_half_width == b.ci95_half_width);
}

TEST_CASE("mc confidence interval shrinks as 1/sqrt(trials)") {
    GateNoiseModel noise;
    noise.detuning_sigma_hz = 11.8e6;
    const auto small = mc_gate_infidelity(noise, 750e6, 100, 3);
    const auto large = mc_gate_infidelity(noise, 750e6, 10000, 3);
    const double ratio = small.ci95_half_width / large.ci95_half_width;
    CHECK(ratio > 5.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("pn-distorted pulses cost roughly the pn budget entry") {
    // With the calibrated kappa, PN at the anchor level should produce an
    // infidelity of the same order as the static-detuning entry.
    GateNoiseModel noise;
    noise.pn_at_1mhz_dbc = -74.0;
    const auto est = mc_gate_infidelity(noise, 750e6, 2000, 5);
    const double anchor = detuning_infidelity(11.8e6, 750e6);
    CHECK(est.mean > 0.1 * anchor);
    CHECK(est.mean < 10.0 * anchor);
}

TEST_CASE("trial floor is enforced") {
    CHECK_THROWS_AS(mc_gate_infidelity({}, 750e6, 50, 1), std::invalid_argument);
}
