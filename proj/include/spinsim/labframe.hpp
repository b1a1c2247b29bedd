#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spinsim/constants.hpp"
#include "spinsim/propagator.hpp"
#include "spinsim/resonance.hpp"
#include "spinsim/waveform.hpp"

// Time-stepped lab-frame evolution. Unlike the RWA propagator this keeps the
// counter-rotating drive component, so it serves as the reference for
// RWA-violation studies.

namespace spinsim {

/// Minimum sample rate, in samples per Larmor cycle, accepted by
/// evolve_labframe.
inline constexpr double labframe_min_samples_per_cycle = 50.0;

/// Evolve under H_k = 2*pi*(f_L/2) sigma_z + 2*pi*(gamma*B1_k/2) sigma_x with
/// gamma = g*mu_B/h, applying the exact exponential of each per-sample
/// Hamiltonian. Returns the lab-frame propagator over the waveform support.
inline SpinPropagator evolve_labframe(const Waveform& b_field, double f_larmor_hz,
                                      double g_factor) {
    if (b_field.unit != SignalUnit::tesla) {
        throw std::invalid_argument("evolve_labframe: drive waveform must be in tesla");
    }
    const double required = labframe_min_samples_per_cycle * f_larmor_hz;
    if (b_field.fs < required) {
        throw std::invalid_argument(
            "evolve_labframe: sample rate " + std::to_string(b_field.fs) +
            " Hz is below the required " + std::to_string(required) +
            " Hz (>= " + std::to_string(labframe_min_samples_per_cycle) +
            " samples per Larmor cycle)");
    }
    const double gamma = g_factor * constants::bohr_magneton / constants::planck;  // Hz/T
    const double dt = b_field.dt();
    const double wz = 2.0 * std::numbers::pi * 0.5 * f_larmor_hz;
    Mat2 u = Mat2::identity();
    for (double b : b_field.samples) {
        const double wx = 2.0 * std::numbers::pi * 0.5 * gamma * b;
        const double w = std::hypot(wx, wz);
        // exp(-i dt (wx sx + wz sz)) as a rotation by 2*w*dt about (wx,0,wz)
        u = rotation(2.0 * w * dt, wx, 0.0, wz) * u;
    }
    return SpinPropagator(u);
}

/// Resonant linear-drive B1 waveform for a pi/2 pulse at f_R = f_L/ratio.
/// Samples are taken at interval midpoints so the piecewise-constant stepping
/// in evolve_labframe is second-order accurate.
inline Waveform linear_drive_pi2_waveform(double f_larmor_hz, double ratio, double phase_rad,
                                          double samples_per_cycle) {
    const double f_rabi = f_larmor_hz / ratio;
    const double duration = 1.0 / (4.0 * f_rabi);
    const double b1 = field_from_rabi(2.0, f_rabi);  // g = 2; cancels in evolve
    const double fs = samples_per_cycle * f_larmor_hz;
    const auto n = static_cast<std::size_t>(std::llround(duration * fs));
    std::vector<double> samples(n);
    const double w = 2.0 * std::numbers::pi * f_larmor_hz;
    for (std::size_t k = 0; k < n; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) / fs;
        samples[k] = b1 * std::cos(w * t_mid + phase_rad);
    }
    return Waveform(std::move(samples), fs, 0.0, SignalUnit::tesla);
}

/// Undo the deterministic Larmor frame rotation accumulated over `t`:
/// conjugation by exp(+i*2*pi*f_L*t*sigma_z/2). RWA propagators live in the
/// rotating frame, lab-frame ones do not.
inline Mat2 remove_frame_rotation(const Mat2& u_lab, double f_larmor_hz, double t_s) {
    const double half = std::numbers::pi * f_larmor_hz * t_s;
    const cplx i(0.0, 1.0);
    const Mat2 r{std::exp(i * half), 0.0, 0.0, std::exp(-i * half)};
    return r * u_lab;
}

/// Infidelity of a resonant lab-frame linear-drive pi/2 pulse against the
/// ideal RWA pi/2 propagator, at Larmor/Rabi ratio `ratio`. The counter-
/// rotating term is the only error source, so this measures the RWA floor.
inline double rwa_gate_infidelity(double ratio, double phase_rad,
                                  double samples_per_cycle = 2048.0) {
    if (ratio < 2.0) {
        throw std::invalid_argument("rwa_gate_infidelity: ratio must be >= 2, got " +
                                    std::to_string(ratio));
    }
    const double f_larmor = 1.0;  // scale-free: everything is relative to f_L
    const double f_rabi = f_larmor / ratio;
    const Waveform drive =
        linear_drive_pi2_waveform(f_larmor, ratio, phase_rad, samples_per_cycle);
    const SpinPropagator u_lab = evolve_labframe(drive, f_larmor, 2.0);
    const Mat2 u_rot = remove_frame_rotation(u_lab.matrix(), f_larmor, drive.duration());
    const SpinPropagator ideal =
        propagator_rwa({f_rabi, 0.0, phase_rad, 1.0 / (4.0 * f_rabi)});
    return gate_fidelity(SpinPropagator(u_rot), ideal).infidelity;
}

/// Worst case of rwa_gate_infidelity over an evenly spaced drive-phase grid.
inline double rwa_gate_infidelity_worst(double ratio, int phase_points = 8,
                                        double samples_per_cycle = 2048.0) {
    if (phase_points < 1) {
        throw std::invalid_argument("rwa_gate_infidelity_worst: need >= 1 phase point");
    }
    double worst = 0.0;
    for (int k = 0; k < phase_points; ++k) {
        const double phase =
            2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(phase_points);
        worst = std::max(worst, rwa_gate_infidelity(ratio, phase, samples_per_cycle));
    }
    return worst;
}

}  // namespace spinsim
