#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsim/detail/parallel.hpp"
#include "spinsim/propagator.hpp"
#include "spinsim/pulse_gen.hpp"
#include "spinsim/rng.hpp"

// Error-budget engine for the pi/2 gate: per-source infidelity contributions
// (carrier detuning, timing, oscillator phase noise), budget allocation, and
// a Monte-Carlo estimator cross-checking the analytic entries.

namespace spinsim {

enum class BudgetSource { carrier_detuning, timing, pn, rwa, other };

inline const char* to_string(BudgetSource s) {
    switch (s) {
        case BudgetSource::carrier_detuning: return "carrier-detuning";
        case BudgetSource::timing: return "timing";
        case BudgetSource::pn: return "pn";
        case BudgetSource::rwa: return "rwa";
        case BudgetSource::other: return "other";
    }
    return "?";
}

struct BudgetEntry {
    BudgetSource source = BudgetSource::other;
    double infidelity = 0.0;
    std::map<std::string, double> parameters;
};

inline SpinPropagator ideal_pi2() {
    return propagator_rwa({1.0, 0.0, 0.0, 0.25});
}

/// Infidelity of a pi/2 gate driven at a carrier offset of delta_f. Exact
/// propagator evaluation, worst-case-state metric. For small eps = df/f_R the
/// value approaches eps^2/2 (see detuning_infidelity_quadratic).
inline double detuning_infidelity(double delta_f_hz, double f_rabi_hz) {
    if (!(f_rabi_hz > 0.0)) {
        throw std::invalid_argument("detuning_infidelity: f_R must be > 0");
    }
    const double t = 1.0 / (4.0 * f_rabi_hz);  // nominal resonant pi/2
    const auto u = propagator_rwa({f_rabi_hz, delta_f_hz, 0.0, t});
    return gate_fidelity(u, propagator_rwa({f_rabi_hz, 0.0, 0.0, t})).infidelity;
}

/// Small-detuning limit (df/f_R)^2 / 2.
inline double detuning_infidelity_quadratic(double delta_f_hz, double f_rabi_hz) {
    const double eps = delta_f_hz / f_rabi_hz;
    return 0.5 * eps * eps;
}

/// Infidelity of a pi/2 gate whose duration is off by the fraction epsilon:
/// rotation-angle error (pi/2)*epsilon, worst-case metric sin^2(pi*eps/4).
inline double timing_infidelity(double epsilon) {
    if (!(std::abs(epsilon) < 1.0)) {
        throw std::invalid_argument("timing_infidelity: |epsilon| must be < 1");
    }
    const double s = std::sin(std::numbers::pi * epsilon / 4.0);
    return s * s;
}

/// Absolute duration tolerance for a fractional error on the pi/2 pulse:
/// dt = epsilon / (4 f_R).
inline double timing_tolerance(double f_rabi_hz, double epsilon) {
    if (!(f_rabi_hz > 0.0)) {
        throw std::invalid_argument("timing_tolerance: f_R must be > 0");
    }
    return epsilon / (4.0 * f_rabi_hz);
}

// ---------------------------------------------------------------------------
// Phase noise -> rms carrier detuning
// ---------------------------------------------------------------------------

/// Integration-bandwidth calibration for the white-FM PN model: the rms
/// detuning is sigma = sqrt(S_f * kappa * f_R). kappa is fixed by requiring
/// that -74 dBc/Hz at 750 MHz maps to 11.8 MHz; the (-62 dBc/Hz, 12 GHz,
/// 190 MHz) pair then follows within a few percent and serves as a
/// consistency check, not a second fit.
struct PnCalibration {
    double kappa = 0.0;
};

struct PnAnchor {
    double pn_at_1mhz_dbc;
    double f_rabi_hz;
    double rms_detuning_hz;
};

inline constexpr PnAnchor pn_anchor_primary{-74.0, 750e6, 11.8e6};
inline constexpr PnAnchor pn_anchor_check{-62.0, 12e9, 190e6};

inline PnCalibration calibrate_pn_kappa(const PnAnchor& anchor = pn_anchor_primary) {
    const double s_f = freq_noise_psd_from_pn(anchor.pn_at_1mhz_dbc);
    PnCalibration cal;
    cal.kappa = anchor.rms_detuning_hz * anchor.rms_detuning_hz / (s_f * anchor.f_rabi_hz);
    return cal;
}

/// RMS carrier detuning implied by an oscillator PN level under the
/// white-FM (-20 dB/dec) model, integrated over a kappa*f_R bandwidth.
inline double pn_to_rms_detuning(double pn_at_1mhz_dbc, double f_rabi_hz,
                                 const PnCalibration& cal) {
    if (!(f_rabi_hz > 0.0)) {
        throw std::invalid_argument("pn_to_rms_detuning: f_R must be > 0");
    }
    if (!(cal.kappa > 0.0)) {
        throw std::invalid_argument("pn_to_rms_detuning: calibration kappa must be > 0");
    }
    const double s_f = freq_noise_psd_from_pn(pn_at_1mhz_dbc);
    return std::sqrt(s_f * cal.kappa * f_rabi_hz);
}

// ---------------------------------------------------------------------------
// Budget aggregation
// ---------------------------------------------------------------------------

struct BudgetReport {
    double target_fidelity = 0.0;
    double budget_infidelity = 0.0;  // 1 - target
    std::vector<BudgetEntry> entries;
    double total_infidelity = 0.0;
    bool pass = true;
};

/// Per-source slice when splitting the budget evenly over n contributions.
inline double equal_allocation(double target_fidelity, int n_sources) {
    if (!(target_fidelity > 0.0) || !(target_fidelity < 1.0)) {
        throw std::invalid_argument("equal_allocation: target must be in (0,1)");
    }
    if (n_sources < 1) {
        throw std::invalid_argument("equal_allocation: need >= 1 source");
    }
    return (1.0 - target_fidelity) / static_cast<double>(n_sources);
}

inline BudgetReport budget_report(double target_fidelity, std::vector<BudgetEntry> entries) {
    if (!(target_fidelity > 0.0) || !(target_fidelity < 1.0)) {
        throw std::invalid_argument("budget_report: target must be in (0,1)");
    }
    BudgetReport rep;
    rep.target_fidelity = target_fidelity;
    rep.budget_infidelity = 1.0 - target_fidelity;
    rep.entries = std::move(entries);
    for (const auto& e : rep.entries) {
        if (e.infidelity < 0.0) {
            throw std::invalid_argument("budget_report: negative infidelity entry");
        }
        rep.total_infidelity += e.infidelity;
    }
    rep.pass = rep.total_infidelity <= rep.budget_infidelity;
    return rep;
}

// ---------------------------------------------------------------------------
// Monte-Carlo estimator
// ---------------------------------------------------------------------------

/// Shot-to-shot noise model for one pi/2 gate. Means express deterministic
/// offsets, sigmas Gaussian spread; the PN path distorts the pulse with a
/// Wiener phase trajectory instead of a static draw.
struct GateNoiseModel {
    double detuning_mean_hz = 0.0;
    double detuning_sigma_hz = 0.0;
    double timing_mean = 0.0;   // fractional duration error
    double timing_sigma = 0.0;
    double pn_at_1mhz_dbc = -std::numeric_limits<double>::infinity();
    int pn_steps = 64;
};

struct McEstimate {
    double mean = 0.0;
    double ci95_half_width = 0.0;
    int trials = 0;
};

namespace detail {

/// pi/2 pulse distorted by a Wiener phase trajectory, stepped in the
/// rotating frame with exact per-step exponentials.
inline SpinPropagator pn_distorted_pi2(double f_rabi_hz, double detuning_hz, double duration_s,
                                       double s_f, int steps, Rng& rng) {
    const double dt = duration_s / steps;
    const double sigma_w =
        std::sqrt(2.0 * std::numbers::pi * std::numbers::pi * s_f * dt);
    double phi = 0.0;
    Mat2 u = Mat2::identity();
    for (int k = 0; k < steps; ++k) {
        phi += sigma_w * rng.gaussian();
        const double wx = std::numbers::pi * f_rabi_hz * std::cos(phi);
        const double wy = std::numbers::pi * f_rabi_hz * std::sin(phi);
        const double wz = std::numbers::pi * detuning_hz;
        const double w = std::sqrt(wx * wx + wy * wy + wz * wz);
        u = rotation(2.0 * w * dt, wx, wy, wz) * u;
    }
    return SpinPropagator(u);
}

}  // namespace detail

/// Monte-Carlo worst-case infidelity of the noisy pi/2 gate. Per-trial RNG
/// streams are derived from (seed, trial), so the result is independent of
/// the job count.
inline McEstimate mc_gate_infidelity(const GateNoiseModel& noise, double f_rabi_hz, int trials,
                                     std::uint64_t seed, int jobs = 1) {
    if (trials < 100) {
        throw std::invalid_argument("mc_gate_infidelity: need >= 100 trials");
    }
    if (!(f_rabi_hz > 0.0)) {
        throw std::invalid_argument("mc_gate_infidelity: f_R must be > 0");
    }
    const auto ideal = propagator_rwa({f_rabi_hz, 0.0, 0.0, 1.0 / (4.0 * f_rabi_hz)});
    const double s_f = freq_noise_psd_from_pn(noise.pn_at_1mhz_dbc);
    std::vector<double> scores(static_cast<std::size_t>(trials));
    detail::parallel_for_indexed(scores.size(), jobs, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        const double df = noise.detuning_mean_hz +
                          (noise.detuning_sigma_hz > 0.0
                               ? noise.detuning_sigma_hz * rng.gaussian()
                               : 0.0);
        const double eps =
            noise.timing_mean + (noise.timing_sigma > 0.0 ? noise.timing_sigma * rng.gaussian()
                                                          : 0.0);
        const double t = (1.0 + eps) / (4.0 * f_rabi_hz);
        SpinPropagator u = (s_f > 0.0)
                               ? detail::pn_distorted_pi2(f_rabi_hz, df, t, s_f,
                                                          noise.pn_steps, rng)
                               : propagator_rwa({f_rabi_hz, df, 0.0, t});
        scores[i] = gate_fidelity(u, ideal).infidelity;
    });
    McEstimate est;
    est.trials = trials;
    double sum = 0.0;
    for (double s : scores) {
        sum += s;
    }
    est.mean = sum / trials;
    double var = 0.0;
    for (double s : scores) {
        var += (s - est.mean) * (s - est.mean);
    }
    var /= (trials > 1 ? trials - 1 : 1);
    est.ci95_half_width = 1.96 * std::sqrt(var / trials);
    return est;
}

}  // namespace spinsim
