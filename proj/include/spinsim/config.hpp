#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "spinsim/dqd.hpp"
#include "spinsim/readout.hpp"
#include "spinsim/resonance.hpp"
#include "spinsim/sequence.hpp"
#include "spinsim/tia.hpp"

// JSON model bundle shared by the CLI and the sequence interpreter. Missing
// sections or fields fall back to the built-in defaults, so partial configs
// are fine.

namespace spinsim {

struct ModelBundle {
    ExecutionModels exec;  // spin, drive, dqd, tunnel, ero bias/window
    TiaModel tia;
    double i_peak_a = 10e-9;
    double pulse_width_s = 50e-9;
    double blockade_latency_s = 1e-6;
    double blockade_window_s = 10e-3;
    double pn_kappa = 0.0;  // 0: calibrate at load time
};

namespace detail {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) {
        out = j.at(key).get<T>();
    }
}

}  // namespace detail

inline ModelBundle models_from_json(const nlohmann::json& j) {
    ModelBundle m;
    if (j.contains("spin")) {
        const auto& s = j.at("spin");
        double g = 2.0;
        double b0 = 2.143;
        detail::read_field(s, "g_factor", g);
        detail::read_field(s, "b0_tesla", b0);
        m.exec.spin = SpinSystem(g, b0);
    }
    if (j.contains("drive")) {
        const auto& d = j.at("drive");
        double f_rabi = 750e6;
        double phase = 0.0;
        detail::read_field(d, "f_rabi_hz", f_rabi);
        detail::read_field(d, "phase_rad", phase);
        m.exec.drive = DriveSpec::from_rabi(m.exec.spin.g_factor, f_rabi, phase);
    }
    if (j.contains("dqd")) {
        const auto& d = j.at("dqd");
        detail::read_field(d, "e_cl_ev", m.exec.dqd.e_cl_ev);
        detail::read_field(d, "e_cr_ev", m.exec.dqd.e_cr_ev);
        detail::read_field(d, "e_m_ev", m.exec.dqd.e_m_ev);
        detail::read_field(d, "alpha_ll", m.exec.dqd.alpha_ll);
        detail::read_field(d, "alpha_lr", m.exec.dqd.alpha_lr);
        detail::read_field(d, "alpha_rl", m.exec.dqd.alpha_rl);
        detail::read_field(d, "alpha_rr", m.exec.dqd.alpha_rr);
        detail::read_field(d, "max_occupancy", m.exec.dqd.max_occupancy);
        m.exec.dqd.validate();
    }
    if (j.contains("tunnel")) {
        const auto& t = j.at("tunnel");
        detail::read_field(t, "gamma_es_hz", m.exec.tunnel.gamma_es_hz);
        detail::read_field(t, "gamma_gs_hz", m.exec.tunnel.gamma_gs_hz);
        detail::read_field(t, "gamma_in_hz", m.exec.tunnel.gamma_in_hz);
        detail::read_field(t, "t1_s", m.exec.tunnel.t1_s);
        m.exec.tunnel.validate();
    }
    if (j.contains("tia")) {
        const auto& t = j.at("tia");
        detail::read_field(t, "z21_db_ohm", m.tia.z21_db_ohm);
        detail::read_field(t, "f3db_hz", m.tia.f3db_hz);
        detail::read_field(t, "n_poles", m.tia.n_poles);
        detail::read_field(t, "in_noise_a_rthz", m.tia.in_noise_a_rthz);
        detail::read_field(t, "temperature_tag", m.tia.temperature_tag);
        m.tia.validate();
    }
    if (j.contains("readout")) {
        const auto& r = j.at("readout");
        detail::read_field(r, "es_offset_ev", m.exec.ero_bias.es_offset_ev);
        detail::read_field(r, "gs_offset_ev", m.exec.ero_bias.gs_offset_ev);
        detail::read_field(r, "ero_window_s", m.exec.ero_window_s);
        detail::read_field(r, "i_peak_a", m.i_peak_a);
        detail::read_field(r, "pulse_width_s", m.pulse_width_s);
        detail::read_field(r, "blockade_latency_s", m.blockade_latency_s);
        detail::read_field(r, "blockade_window_s", m.blockade_window_s);
    }
    detail::read_field(j, "pn_kappa", m.pn_kappa);
    return m;
}

inline ModelBundle load_models(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open model config: " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("bad JSON in " + path + ": " + e.what());
    }
    return models_from_json(j);
}

inline nlohmann::json models_to_json(const ModelBundle& m) {
    nlohmann::json j;
    j["spin"] = {{"g_factor", m.exec.spin.g_factor}, {"b0_tesla", m.exec.spin.b0_tesla}};
    j["drive"] = {{"f_rabi_hz", m.exec.drive.f_rabi_hz}, {"phase_rad", m.exec.drive.phase_rad}};
    j["dqd"] = {{"e_cl_ev", m.exec.dqd.e_cl_ev},   {"e_cr_ev", m.exec.dqd.e_cr_ev},
                {"e_m_ev", m.exec.dqd.e_m_ev},     {"alpha_ll", m.exec.dqd.alpha_ll},
                {"alpha_lr", m.exec.dqd.alpha_lr}, {"alpha_rl", m.exec.dqd.alpha_rl},
                {"alpha_rr", m.exec.dqd.alpha_rr}, {"max_occupancy", m.exec.dqd.max_occupancy}};
    j["tunnel"] = {{"gamma_es_hz", m.exec.tunnel.gamma_es_hz},
                   {"gamma_gs_hz", m.exec.tunnel.gamma_gs_hz},
                   {"gamma_in_hz", m.exec.tunnel.gamma_in_hz},
                   {"t1_s", m.exec.tunnel.t1_s}};
    j["tia"] = {{"z21_db_ohm", m.tia.z21_db_ohm},
                {"f3db_hz", m.tia.f3db_hz},
                {"n_poles", m.tia.n_poles},
                {"in_noise_a_rthz", m.tia.in_noise_a_rthz},
                {"temperature_tag", m.tia.temperature_tag}};
    j["readout"] = {{"es_offset_ev", m.exec.ero_bias.es_offset_ev},
                    {"gs_offset_ev", m.exec.ero_bias.gs_offset_ev},
                    {"ero_window_s", m.exec.ero_window_s},
                    {"i_peak_a", m.i_peak_a},
                    {"pulse_width_s", m.pulse_width_s},
                    {"blockade_latency_s", m.blockade_latency_s},
                    {"blockade_window_s", m.blockade_window_s}};
    if (m.pn_kappa > 0.0) {
        j["pn_kappa"] = m.pn_kappa;
    }
    return j;
}

}  // namespace spinsim
