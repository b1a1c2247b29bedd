#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spinsim/mat2.hpp"

// Rotating-frame propagators and gate fidelity metrics.

namespace spinsim {

inline constexpr double unitarity_tol = 1e-10;

/// 2x2 unitary representing gate action on a single spin. Construction
/// rejects matrices that are not unitary (or whose determinant modulus is
/// not 1) within `unitarity_tol`.
class SpinPropagator {
  public:
    SpinPropagator() : u_(Mat2::identity()) {}

    explicit SpinPropagator(const Mat2& u) : u_(u) {
        const double defect = unitarity_defect(u);
        if (defect > unitarity_tol) {
            throw std::invalid_argument("SpinPropagator: matrix is not unitary, defect " +
                                        std::to_string(defect));
        }
        if (std::abs(std::abs(u.det()) - 1.0) > unitarity_tol) {
            throw std::invalid_argument("SpinPropagator: |det| differs from 1");
        }
    }

    const Mat2& matrix() const { return u_; }

    friend SpinPropagator operator*(const SpinPropagator& a, const SpinPropagator& b) {
        SpinPropagator p;
        p.u_ = a.u_ * b.u_;
        return p;
    }

    Vec2 apply(const Vec2& v) const { return u_ * v; }

  private:
    Mat2 u_;
};

/// Control pulse as seen in the frame rotating at the drive frequency.
/// `detuning_hz` is f_drive - f_larmor (cyclic).
struct RotatingFramePulse {
    double f_rabi_hz = 0.0;
    double detuning_hz = 0.0;
    double phase_rad = 0.0;
    double duration_s = 0.0;
};

/// Closed-form RWA propagator:
///   U = cos(Theta/2) I - i sin(Theta/2) n·sigma
/// with generalized Rabi Omega = 2*pi*sqrt(f_R^2 + df^2), Theta = Omega*t and
/// n = (f_R cos(phi), f_R sin(phi), df) / sqrt(f_R^2 + df^2).
inline SpinPropagator propagator_rwa(const RotatingFramePulse& p) {
    if (p.duration_s < 0.0) {
        throw std::invalid_argument("propagator_rwa: duration must be >= 0");
    }
    if (p.f_rabi_hz < 0.0) {
        throw std::invalid_argument("propagator_rwa: f_R must be >= 0");
    }
    const double f_gen = std::hypot(p.f_rabi_hz, p.detuning_hz);
    if (f_gen == 0.0) {
        return SpinPropagator{};  // free evolution in its own frame: identity
    }
    const double theta = 2.0 * std::numbers::pi * f_gen * p.duration_s;
    return SpinPropagator(rotation(theta,
                                   p.f_rabi_hz * std::cos(p.phase_rad),
                                   p.f_rabi_hz * std::sin(p.phase_rad),
                                   p.detuning_hz));
}

enum class FidelityMetric { worst_case_state, average_gate };

struct FidelityReport {
    double fidelity = 1.0;
    double infidelity = 0.0;
    FidelityMetric metric = FidelityMetric::worst_case_state;
};

/// Closeness of `u` to the ideal `u_id`, insensitive to global phase.
///
/// worst_case_state (default): I = 1 - (|Tr(u_id† u)|/2)^2, i.e. sin^2(a/2)
/// where a is the rotation angle of the error unitary. This is the metric
/// that reproduces the 125e-6 detuning/timing budget figures.
/// average_gate: F = (|Tr(u_id† u)|^2 + 2) / 6.
inline FidelityReport gate_fidelity(const SpinPropagator& u, const SpinPropagator& u_id,
                                    FidelityMetric metric = FidelityMetric::worst_case_state) {
    const double t = std::abs((u_id.matrix().adjoint() * u.matrix()).trace());
    FidelityReport r;
    r.metric = metric;
    if (metric == FidelityMetric::worst_case_state) {
        r.fidelity = (t / 2.0) * (t / 2.0);
    } else {
        r.fidelity = (t * t + 2.0) / 6.0;
    }
    r.fidelity = std::min(r.fidelity, 1.0);
    r.infidelity = 1.0 - r.fidelity;
    return r;
}

/// Spin-up probability after driving an initial |down> for time t:
///   P = f_R^2/(f_R^2+df^2) * sin^2(pi*sqrt(f_R^2+df^2)*t)
inline double rabi_lineshape(double f_rabi_hz, double detuning_hz, double t_s) {
    if (t_s < 0.0) {
        throw std::invalid_argument("rabi_lineshape: t must be >= 0");
    }
    const double f2 = f_rabi_hz * f_rabi_hz;
    const double d2 = detuning_hz * detuning_hz;
    if (f2 + d2 == 0.0) {
        return 0.0;
    }
    const double s = std::sin(std::numbers::pi * std::sqrt(f2 + d2) * t_s);
    return f2 / (f2 + d2) * s * s;
}

}  // namespace spinsim
