#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

// Constant-interaction double-quantum-dot electrostatics: ground-state
// charge configuration versus the two plunger voltages.

namespace spinsim {

struct DQDConfig {
    double e_cl_ev = 5e-3;   // left charging energy
    double e_cr_ev = 5e-3;   // right charging energy
    double e_m_ev = 1e-3;    // mutual charging energy
    double alpha_ll = 0.1;   // lever arms [eV/V]: dot <- gate
    double alpha_lr = 0.02;
    double alpha_rl = 0.02;
    double alpha_rr = 0.1;
    int max_occupancy = 4;

    void validate() const {
        if (!(e_cl_ev > 0.0) || !(e_cr_ev > 0.0)) {
            throw std::invalid_argument("DQDConfig: charging energies must be > 0");
        }
        if (e_m_ev < 0.0 || e_m_ev >= std::min(e_cl_ev, e_cr_ev)) {
            throw std::invalid_argument(
                "DQDConfig: mutual charging energy must satisfy 0 <= E_m < min(E_CL, E_CR)");
        }
        if (alpha_ll < 0.0 || alpha_lr < 0.0 || alpha_rl < 0.0 || alpha_rr < 0.0) {
            throw std::invalid_argument("DQDConfig: lever arms must be >= 0");
        }
        if (max_occupancy < 0) {
            throw std::invalid_argument("DQDConfig: max_occupancy must be >= 0");
        }
    }
};

struct ChargeState {
    int n_left = 0;
    int n_right = 0;

    bool operator==(const ChargeState&) const = default;
};

/// Total electrostatic energy of occupation (n_L, n_R) at gate voltages
/// (V_L, V_R):
///   E = E_CL n_L^2/2 + E_CR n_R^2/2 + E_m n_L n_R
///       - (a_LL V_L + a_LR V_R) n_L - (a_RL V_L + a_RR V_R) n_R
inline double dqd_energy(int n_l, int n_r, double v_l, double v_r, const DQDConfig& cfg) {
    const double nl = n_l;
    const double nr = n_r;
    return 0.5 * cfg.e_cl_ev * nl * nl + 0.5 * cfg.e_cr_ev * nr * nr +
           cfg.e_m_ev * nl * nr - (cfg.alpha_ll * v_l + cfg.alpha_lr * v_r) * nl -
           (cfg.alpha_rl * v_l + cfg.alpha_rr * v_r) * nr;
}

/// Ground-state charge configuration: argmin of dqd_energy over occupancies
/// in [0, max_occupancy]^2. Exact ties break toward lower total occupancy,
/// then lower n_L; degenerate points are measure-zero in voltage space.
inline ChargeState charge_state(double v_l, double v_r, const DQDConfig& cfg) {
    cfg.validate();
    ChargeState best;
    double best_e = dqd_energy(0, 0, v_l, v_r, cfg);
    for (int n_l = 0; n_l <= cfg.max_occupancy; ++n_l) {
        for (int n_r = 0; n_r <= cfg.max_occupancy; ++n_r) {
            const double e = dqd_energy(n_l, n_r, v_l, v_r, cfg);
            bool better = e < best_e;
            if (e == best_e) {
                const int total = n_l + n_r;
                const int best_total = best.n_left + best.n_right;
                better = total < best_total ||
                         (total == best_total && n_l < best.n_left);
            }
            if (better) {
                best = {n_l, n_r};
                best_e = e;
            }
        }
    }
    return best;
}

}  // namespace spinsim
