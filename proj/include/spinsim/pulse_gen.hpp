#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsim/resonance.hpp"
#include "spinsim/rng.hpp"
#include "spinsim/waveform.hpp"

// Behavioral pulse generator: free-running VCO with Wiener phase noise and a
// startup transient, encapsulated by gating switches with finite edges and
// off-state isolation, followed by drive-to-field conversion.

namespace spinsim {

inline constexpr double vco_tuning_min_hz = 57e9;
inline constexpr double vco_tuning_max_hz = 65e9;

struct VcoSpec {
    double f_carrier_hz = 60e9;
    /// Single-sideband phase noise L(1 MHz) in dBc/Hz; -inf means noiseless.
    double pn_at_1mhz_dbc = -90.0;
    double amplitude_v = 0.8;
    /// Startup envelope time constant; 0 disables the startup transient.
    double startup_tau_s = 50e-12;

    void validate() const {
        if (f_carrier_hz < vco_tuning_min_hz || f_carrier_hz > vco_tuning_max_hz) {
            throw std::invalid_argument(
                "VcoSpec: carrier " + std::to_string(f_carrier_hz / 1e9) +
                " GHz outside the 57-65 GHz tuning range");
        }
        if (!(amplitude_v > 0.0)) {
            throw std::invalid_argument("VcoSpec: amplitude must be > 0");
        }
        if (startup_tau_s < 0.0) {
            throw std::invalid_argument("VcoSpec: startup tau must be >= 0");
        }
    }
};

/// One-sided white frequency-noise PSD [Hz^2/Hz] reproducing L(1 MHz) = pn
/// under the -20 dB/dec Wiener-phase model with L(f) = S_phi(f)/2:
///   S_f = 2 * (1 MHz)^2 * 10^(pn/10)
inline double freq_noise_psd_from_pn(double pn_at_1mhz_dbc) {
    if (pn_at_1mhz_dbc == -std::numeric_limits<double>::infinity()) {
        return 0.0;
    }
    return 2.0 * 1e12 * std::pow(10.0, pn_at_1mhz_dbc / 10.0);
}

/// Phase samples [rad] of the oscillator, without the carrier ramp.
struct PhaseTrace {
    std::vector<double> phase;
    double fs = 0.0;

    double duration() const { return static_cast<double>(phase.size()) / fs; }
};

/// Wiener phase realization: increments are i.i.d. Gaussian with variance
/// 2*pi^2*S_f/fs per sample. Deterministic per seed.
inline PhaseTrace synthesize_vco_phase(const VcoSpec& spec, double duration_s, double fs,
                                       std::uint64_t seed) {
    spec.validate();
    if (!(duration_s > 0.0) || !(fs > 0.0)) {
        throw std::invalid_argument("synthesize_vco_phase: duration and fs must be > 0");
    }
    const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
    if (n == 0) {
        throw std::invalid_argument("synthesize_vco_phase: duration shorter than one sample");
    }
    const double s_f = freq_noise_psd_from_pn(spec.pn_at_1mhz_dbc);
    const double sigma_w = std::sqrt(2.0 * std::numbers::pi * std::numbers::pi * s_f / fs);
    PhaseTrace trace;
    trace.fs = fs;
    trace.phase.resize(n);
    Rng rng(seed);
    double phi = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        phi += sigma_w * rng.gaussian();
        trace.phase[k] = phi;
    }
    return trace;
}

/// Full passband VCO output: A * env(t) * cos(2*pi*f_c*t + phi(t)).
inline Waveform synthesize_vco(const VcoSpec& spec, double duration_s, double fs,
                               std::uint64_t seed) {
    spec.validate();
    if (fs < 4.0 * spec.f_carrier_hz) {
        throw std::invalid_argument("synthesize_vco: fs must be >= 4*f_carrier (" +
                                    std::to_string(4.0 * spec.f_carrier_hz) + " Hz)");
    }
    const PhaseTrace noise = synthesize_vco_phase(spec, duration_s, fs, seed);
    const double w_c = 2.0 * std::numbers::pi * spec.f_carrier_hz;
    std::vector<double> v(noise.phase.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double t = static_cast<double>(k) / fs;
        double env = 1.0;
        if (spec.startup_tau_s > 0.0) {
            env = 1.0 - std::exp(-t / spec.startup_tau_s);
        }
        v[k] = spec.amplitude_v * env * std::cos(w_c * t + noise.phase[k]);
    }
    return Waveform(std::move(v), fs, 0.0, SignalUnit::volt);
}

/// Time for the startup envelope 1 - exp(-t/tau) to reach `threshold`.
/// With the default tau of 50 ps, 98% settling takes about 196 ps.
inline double startup_settling_time(const VcoSpec& spec, double threshold) {
    if (!(threshold > 0.0) || !(threshold < 1.0)) {
        throw std::invalid_argument("startup_settling_time: threshold must be in (0,1)");
    }
    return -spec.startup_tau_s * std::log(1.0 - threshold);
}

// ---------------------------------------------------------------------------
// Gating switches
// ---------------------------------------------------------------------------

struct SwitchSpec {
    double t_start_s = 0.0;
    double t_on_s = 0.0;   // flat-top duration between the ramps
    double rise_s = 0.0;
    double fall_s = 0.0;
    /// Off-state isolation in dB; infinity = ideal switch.
    double off_isolation_db = 40.0;

    void validate() const {
        if (t_on_s < 0.0 || rise_s < 0.0 || fall_s < 0.0) {
            throw std::invalid_argument("SwitchSpec: t_on, rise and fall must be >= 0");
        }
        if (off_isolation_db < 0.0) {
            throw std::invalid_argument("SwitchSpec: off_isolation must be >= 0 dB");
        }
    }

    double support_end() const { return t_start_s + rise_s + t_on_s + fall_s; }
};

/// Piecewise-linear pass envelope: 0 -> 1 over `rise`, hold for `t_on`,
/// 1 -> 0 over `fall`.
inline double switch_envelope(const SwitchSpec& sw, double t) {
    const double u = t - sw.t_start_s;
    if (u < 0.0) return 0.0;
    if (u < sw.rise_s) return u / sw.rise_s;
    if (u <= sw.rise_s + sw.t_on_s) return 1.0;
    const double v = u - sw.rise_s - sw.t_on_s;
    if (v < sw.fall_s) return 1.0 - v / sw.fall_s;
    return 0.0;
}

/// Integral of the pass envelope: t_on + (rise + fall)/2. Nonzero edges make
/// the emitted pulse slightly longer than the commanded on-time.
inline double effective_on_time(const SwitchSpec& sw) {
    return sw.t_on_s + 0.5 * (sw.rise_s + sw.fall_s);
}

/// Carrier cycles contained in the gated pulse.
inline double carrier_cycles(const VcoSpec& vco, const SwitchSpec& sw) {
    return vco.f_carrier_hz * effective_on_time(sw);
}

/// Apply the switch pair: pass path scaled by the envelope, leakage path
/// scaled by the off-isolation on the envelope complement.
inline Waveform gate_switch(const Waveform& w, const SwitchSpec& sw) {
    sw.validate();
    if (sw.t_start_s < w.t0 || sw.support_end() > w.end_time()) {
        throw std::invalid_argument("gate_switch: switch window [" +
                                    std::to_string(sw.t_start_s) + ", " +
                                    std::to_string(sw.support_end()) +
                                    "] s exceeds the waveform support");
    }
    const double leak = std::isinf(sw.off_isolation_db)
                            ? 0.0
                            : std::pow(10.0, -sw.off_isolation_db / 20.0);
    Waveform out = w;
    for (std::size_t k = 0; k < out.samples.size(); ++k) {
        const double e = switch_envelope(sw, w.time_at(k));
        out.samples[k] = w.samples[k] * e + w.samples[k] * leak * (1.0 - e);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Drive conversion
// ---------------------------------------------------------------------------

/// B(t) = alpha_I * I(t) for ESR (current line) or alpha_V * V(t) for EDSR
/// (gate drive). The conversion factor is geometry-dependent and must be
/// supplied; defaults below are synthetic calibrations, not measured values.
struct DriveConversion {
    enum class Mode { esr, edsr };
    Mode mode = Mode::edsr;
    double alpha = 0.0;  // tesla/ampere (esr) or tesla/volt (edsr)

    void validate() const {
        if (alpha < 0.0) {
            throw std::invalid_argument("DriveConversion: alpha must be >= 0");
        }
    }
};

/// Synthetic alpha_V such that a 0.8 V drive amplitude yields the field for a
/// 750 MHz Rabi frequency (g = 2).
inline double default_alpha_v() {
    return field_from_rabi(2.0, 750e6) / 0.8;
}

inline Waveform drive_field(const Waveform& w, const DriveConversion& c) {
    c.validate();
    const SignalUnit expected =
        c.mode == DriveConversion::Mode::esr ? SignalUnit::ampere : SignalUnit::volt;
    if (w.unit != expected) {
        throw std::invalid_argument(std::string("drive_field: input unit must be ") +
                                    to_string(expected) + " for this mode, got " +
                                    to_string(w.unit));
    }
    Waveform out = w;
    out.unit = SignalUnit::tesla;
    for (double& s : out.samples) {
        s *= c.alpha;
    }
    return out;
}

}  // namespace spinsim
