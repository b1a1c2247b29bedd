#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spinsim/constants.hpp"

// Closed-form spin-resonance relations: Zeeman splitting, Larmor frequency,
// thermal splitting floor, Rabi frequency vs drive amplitude, rotation timing.
// All public frequencies are cyclic (Hz); angular forms appear only inside
// dynamics kernels.

namespace spinsim {

struct ZeemanSplitting {
    double energy_ev = 0.0;    // E_z = g * mu_B * B0
    double larmor_hz = 0.0;    // f_L = E_z / h
};

struct ThermalSplitting {
    double energy_ev = 0.0;    // E_min = k_B * T
    double frequency_hz = 0.0; // f_min = E_min / h
};

/// Zeeman energy splitting and Larmor frequency of a spin in a static field.
inline ZeemanSplitting zeeman_splitting(double g_factor, double b0_tesla) {
    if (!(g_factor > 0.0)) {
        throw std::invalid_argument("zeeman_splitting: g_factor must be > 0, got " +
                                    std::to_string(g_factor));
    }
    if (b0_tesla < 0.0) {
        throw std::invalid_argument("zeeman_splitting: B0 must be >= 0, got " +
                                    std::to_string(b0_tesla));
    }
    ZeemanSplitting z;
    z.energy_ev = g_factor * constants::bohr_magneton_ev * b0_tesla;
    z.larmor_hz = g_factor * constants::bohr_magneton * b0_tesla / constants::planck;
    return z;
}

/// Smallest usable splitting at temperature T: E >= k_B T.
inline ThermalSplitting min_splitting_for_temperature(double temperature_k) {
    if (temperature_k < 0.0) {
        throw std::invalid_argument("min_splitting_for_temperature: T must be >= 0, got " +
                                    std::to_string(temperature_k));
    }
    ThermalSplitting t;
    t.energy_ev = constants::boltzmann_ev * temperature_k;
    t.frequency_hz = constants::boltzmann * temperature_k / constants::planck;
    return t;
}

/// Time to rotate by `angle` at cyclic Rabi frequency f_R: t = angle / (2*pi*f_R).
inline double rotation_duration(double angle_rad, double f_rabi_hz) {
    if (!(f_rabi_hz > 0.0)) {
        throw std::invalid_argument("rotation_duration: f_R must be > 0, got " +
                                    std::to_string(f_rabi_hz));
    }
    if (angle_rad < 0.0) {
        throw std::invalid_argument("rotation_duration: angle must be >= 0");
    }
    return angle_rad / (2.0 * std::numbers::pi * f_rabi_hz);
}

/// Cyclic Rabi frequency of a linear drive of amplitude B1.
/// The factor 2 comes from the counter-rotating decomposition of a linear
/// oscillation: only half the amplitude co-rotates with the spin.
inline double rabi_from_field(double g_factor, double b1_tesla) {
    if (!(g_factor > 0.0)) {
        throw std::invalid_argument("rabi_from_field: g_factor must be > 0");
    }
    if (b1_tesla < 0.0) {
        throw std::invalid_argument("rabi_from_field: B1 must be >= 0, got " +
                                    std::to_string(b1_tesla));
    }
    return g_factor * constants::bohr_magneton * b1_tesla / (2.0 * constants::planck);
}

/// Linear-drive amplitude required for a given cyclic Rabi frequency.
inline double field_from_rabi(double g_factor, double f_rabi_hz) {
    if (!(g_factor > 0.0)) {
        throw std::invalid_argument("field_from_rabi: g_factor must be > 0");
    }
    if (f_rabi_hz < 0.0) {
        throw std::invalid_argument("field_from_rabi: f_R must be >= 0");
    }
    return 2.0 * constants::planck * f_rabi_hz / (g_factor * constants::bohr_magneton);
}

/// Static-field spin system: splitting and Larmor frequency are derived on
/// construction and kept consistent by construction.
struct SpinSystem {
    double g_factor = 2.0;
    double b0_tesla = 0.0;
    double zeeman_ev = 0.0;
    double larmor_hz = 0.0;

    SpinSystem() = default;
    SpinSystem(double g, double b0) : g_factor(g), b0_tesla(b0) {
        const auto z = zeeman_splitting(g, b0);
        zeeman_ev = z.energy_ev;
        larmor_hz = z.larmor_hz;
    }
};

/// Drive parameters in the rotating frame.
struct DriveSpec {
    double f_rabi_hz = 0.0;
    double b1_tesla = 0.0;
    double phase_rad = 0.0;

    DriveSpec() = default;

    static DriveSpec from_field(double g_factor, double b1, double phase = 0.0) {
        DriveSpec d;
        d.b1_tesla = b1;
        d.f_rabi_hz = rabi_from_field(g_factor, b1);
        d.phase_rad = phase;
        return d;
    }

    static DriveSpec from_rabi(double g_factor, double f_rabi, double phase = 0.0) {
        DriveSpec d;
        d.f_rabi_hz = f_rabi;
        d.b1_tesla = field_from_rabi(g_factor, f_rabi);
        d.phase_rad = phase;
        return d;
    }
};

}  // namespace spinsim
