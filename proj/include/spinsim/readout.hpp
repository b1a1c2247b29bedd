#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsim/rng.hpp"
#include "spinsim/waveform.hpp"

// Stochastic spin-to-charge conversion: energy-selective readout (ERO),
// tunnel-rate-selective readout (TR-RO), singlet/triplet spin blockade, and
// the event-to-current mapping feeding the TIA.

namespace spinsim {

struct TunnelSpec {
    double gamma_es_hz = 10e6;  // |ES> -> reservoir
    double gamma_gs_hz = 10e3;  // |GS> -> reservoir
    double gamma_in_hz = 10e6;  // reservoir -> dot reload
    double t1_s = 1e-3;         // spin/triplet relaxation

    void validate() const {
        if (gamma_es_hz < 0.0 || gamma_gs_hz < 0.0 || gamma_in_hz < 0.0 || t1_s < 0.0) {
            throw std::invalid_argument("TunnelSpec: rates and T1 must be >= 0");
        }
    }
};

enum class EventKind { tunnel_out, tunnel_in, interdot, blocked_release };

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::tunnel_out: return "tunnel_out";
        case EventKind::tunnel_in: return "tunnel_in";
        case EventKind::interdot: return "interdot";
        case EventKind::blocked_release: return "blocked_release";
    }
    return "?";
}

struct ChargeEvent {
    double time_s = 0.0;
    EventKind kind = EventKind::tunnel_out;
};

/// Charge-detector signal abstraction: what the sensor sees during one
/// measurement window, plus the label inferred from it.
struct EventTrace {
    std::vector<ChargeEvent> events;
    double window_s = 0.0;
    std::string decision;  // "ES"/"GS" for single-spin, "S"/"T" for blockade
};

enum class SpinLabel { excited, ground };

inline const char* to_string(SpinLabel s) {
    return s == SpinLabel::excited ? "ES" : "GS";
}

/// Dot-level alignment against the reservoir chemical potential for ERO.
struct EroBias {
    double es_offset_ev = 50e-6;   // E_ES - mu_res, must be > 0
    double gs_offset_ev = -50e-6;  // E_GS - mu_res, must be < 0
};

/// Energy-selective readout: only an electron in |ES> can tunnel to the
/// reservoir; the empty dot then reloads a |GS> electron from below mu_res.
inline EventTrace ero_trace(const EroBias& bias, const TunnelSpec& ts, SpinLabel spin,
                            double window_s, std::uint64_t seed) {
    ts.validate();
    if (!(window_s > 0.0)) {
        throw std::invalid_argument("ero_trace: window must be > 0");
    }
    if (!(bias.es_offset_ev > 0.0)) {
        throw std::invalid_argument(
            "ero_trace: ERO bias requires E_ES > mu_res, but E_ES - mu_res = " +
            std::to_string(bias.es_offset_ev) + " eV");
    }
    if (!(bias.gs_offset_ev < 0.0)) {
        throw std::invalid_argument(
            "ero_trace: ERO bias requires E_GS < mu_res, but E_GS - mu_res = " +
            std::to_string(bias.gs_offset_ev) + " eV");
    }
    EventTrace trace;
    trace.window_s = window_s;
    trace.decision = "GS";
    if (spin == SpinLabel::excited) {
        Rng rng(seed);
        const double t_out = rng.exponential(ts.gamma_es_hz);
        if (t_out < window_s) {
            trace.events.push_back({t_out, EventKind::tunnel_out});
            trace.decision = "ES";
            const double t_in = t_out + rng.exponential(ts.gamma_in_hz);
            if (t_in < window_s) {
                trace.events.push_back({t_in, EventKind::tunnel_in});
            }
        }
    }
    return trace;
}

/// P(no tunnel-out within the window | ES): the ERO miss probability.
inline double ero_miss_probability(const TunnelSpec& ts, double window_s) {
    return std::exp(-ts.gamma_es_hz * window_s);
}

struct TrroOutcome {
    SpinLabel decision = SpinLabel::ground;
    double tunnel_time_s = std::numeric_limits<double>::infinity();
};

/// Tunnel-rate-selective readout: the spin is inferred from whether a tunnel
/// event happened by tau. Errors: P(err|ES) = exp(-G_ES tau),
/// P(err|GS) = 1 - exp(-G_GS tau).
inline TrroOutcome trro_decision(const TunnelSpec& ts, double tau_s, SpinLabel spin,
                                 std::uint64_t seed) {
    ts.validate();
    if (!(tau_s > 0.0)) {
        throw std::invalid_argument("trro_decision: tau must be > 0");
    }
    Rng rng(seed);
    const double rate = spin == SpinLabel::excited ? ts.gamma_es_hz : ts.gamma_gs_hz;
    TrroOutcome out;
    out.tunnel_time_s = rng.exponential(rate);
    out.decision = out.tunnel_time_s <= tau_s ? SpinLabel::excited : SpinLabel::ground;
    return out;
}

inline double trro_error_excited(const TunnelSpec& ts, double tau_s) {
    return std::exp(-ts.gamma_es_hz * tau_s);
}

inline double trro_error_ground(const TunnelSpec& ts, double tau_s) {
    return 1.0 - std::exp(-ts.gamma_gs_hz * tau_s);
}

enum class TwoSpinState { singlet, triplet0 };

/// Pauli spin blockade at the (1,1) -> (0,2) transition. A singlet converts
/// immediately; a triplet is blocked until it relaxes (rate 1/T1), at which
/// point the charge moves and the sensor sees a delayed step. The decision is
/// "S" iff the charge moved before `latency_s`.
inline EventTrace spin_blockade_trace(TwoSpinState state, double window_s, double t1_s,
                                      std::uint64_t seed,
                                      double latency_s = std::numeric_limits<double>::infinity()) {
    if (!(window_s > 0.0)) {
        throw std::invalid_argument("spin_blockade_trace: window must be > 0");
    }
    if (t1_s < 0.0) {
        throw std::invalid_argument("spin_blockade_trace: T1 must be >= 0");
    }
    const double latency = std::min(latency_s, window_s);
    EventTrace trace;
    trace.window_s = window_s;
    if (state == TwoSpinState::singlet) {
        trace.events.push_back({0.0, EventKind::interdot});
        trace.decision = "S";
        return trace;
    }
    trace.decision = "T";
    Rng rng(seed);
    const double t_rel = t1_s > 0.0 ? rng.exponential(1.0 / t1_s)
                                    : std::numeric_limits<double>::infinity();
    if (t_rel < window_s) {
        trace.events.push_back({t_rel, EventKind::blocked_release});
        if (t_rel < latency) {
            trace.decision = "S";  // relaxed early enough to mimic a singlet
        }
    }
    return trace;
}

/// Peak-current range the readout electronics are specified against.
inline constexpr double readout_current_min_a = 10e-12;
inline constexpr double readout_current_max_a = 10e-9;

inline bool current_in_specified_range(double i_peak_a) {
    return i_peak_a >= readout_current_min_a && i_peak_a <= readout_current_max_a;
}

/// Render each charge event as a rectangular current pulse of height i_peak
/// and the given width; overlapping pulses superpose.
inline Waveform events_to_current(const EventTrace& trace, double i_peak_a,
                                  double pulse_width_s, double fs) {
    if (!(pulse_width_s > 0.0)) {
        throw std::invalid_argument("events_to_current: pulse width must be > 0");
    }
    if (fs * pulse_width_s < 10.0) {
        throw std::invalid_argument("events_to_current: fs must give >= 10 samples per pulse (" +
                                    std::to_string(10.0 / pulse_width_s) + " Hz required)");
    }
    const auto n = static_cast<std::size_t>(std::ceil(trace.window_s * fs));
    std::vector<double> samples(std::max<std::size_t>(n, 1), 0.0);
    for (const auto& ev : trace.events) {
        const auto k0 = static_cast<std::size_t>(std::ceil(ev.time_s * fs - 0.5));
        const auto k1 = static_cast<std::size_t>(std::ceil((ev.time_s + pulse_width_s) * fs - 0.5));
        for (std::size_t k = k0; k < std::min(k1, samples.size()); ++k) {
            samples[k] += i_peak_a;
        }
    }
    return Waveform(std::move(samples), fs, 0.0, SignalUnit::ampere);
}

}  // namespace spinsim
