// spinsim: command-line front end over the co-simulation library.
// Subcommands: constants, budget, pulse, rabi, rwa, readout, sweep, sequence.
// All stochastic runs require a seed (--seed or SPINSIM_SEED) and rerun
// byte-identically for any --jobs value.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinsim/budget.hpp"
#include "spinsim/config.hpp"
#include "spinsim/constants.hpp"
#include "spinsim/labframe.hpp"
#include "spinsim/phase_noise.hpp"
#include "spinsim/propagator.hpp"
#include "spinsim/pulse_gen.hpp"
#include "spinsim/readout.hpp"
#include "spinsim/resonance.hpp"
#include "spinsim/sequence.hpp"
#include "spinsim/tia.hpp"
#include "spinsim/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spinsim;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_usage = 2;

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct CommonOpts {
    std::string out_dir = ".";
    std::string format = "csv";
    std::string config_path;
    std::optional<std::uint64_t> seed;
    bool seedless = false;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--config", opts.config_path, "model bundle JSON");
    cmd->add_option("--seed", opts.seed, "master seed for stochastic runs");
    cmd->add_flag("--seedless", opts.seedless, "assert that this run needs no seed");
    cmd->add_option("--jobs", opts.jobs, "worker threads (output-invariant)")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
}

std::uint64_t require_seed(const CommonOpts& opts) {
    if (opts.seedless) {
        throw std::invalid_argument("this subcommand is stochastic; --seedless does not apply");
    }
    if (opts.seed) {
        return *opts.seed;
    }
    if (const char* env = std::getenv("SPINSIM_SEED")) {
        std::uint64_t v = 0;
        const auto* end = env + std::string_view(env).size();
        if (std::from_chars(env, end, v).ec == std::errc{} &&
            std::from_chars(env, end, v).ptr == end) {
            return v;
        }
        throw std::invalid_argument("SPINSIM_SEED is not an unsigned integer");
    }
    throw std::invalid_argument("stochastic run needs --seed (or SPINSIM_SEED)");
}

ModelBundle load_bundle(const CommonOpts& opts) {
    if (opts.config_path.empty()) {
        return ModelBundle{};
    }
    return load_models(opts.config_path);
}

void write_file(const fs::path& path, const std::string& contents) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::invalid_argument("cannot write " + path.string());
    }
    out << contents;
}

void append_manifest(const CommonOpts& opts, const std::string& subcommand,
                     const json& params) {
    json line;
    line["subcommand"] = subcommand;
    line["config_hash"] = hex64(fnv1a(params.dump()));
    if (opts.seed) {
        line["seed"] = *opts.seed;
    } else {
        line["seed"] = nullptr;
    }
    line["version"] = version;
    fs::create_directories(opts.out_dir);
    std::ofstream out(fs::path(opts.out_dir) / "runs.log", std::ios::app);
    out << line.dump() << "\n";
}

/// Two-column table emitted as CSV (parameter,value) or as the table JSON.
struct Table {
    std::vector<std::pair<std::string, double>> rows;

    std::string to_csv() const {
        std::string out = "parameter,value\n";
        for (const auto& [k, v] : rows) {
            out += k + "," + fmt(v) + "\n";
        }
        return out;
    }

    json to_json() const {
        json j;
        j["rows"] = json::array();
        for (const auto& [k, v] : rows) {
            j["rows"].push_back({{"parameter", k}, {"value", v}});
        }
        return j;
    }
};

void emit_table(const CommonOpts& opts, const std::string& stem, const Table& table) {
    const fs::path dir(opts.out_dir);
    if (opts.format == "json") {
        write_file(dir / (stem + ".json"), table.to_json().dump(2) + "\n");
    } else {
        write_file(dir / (stem + ".csv"), table.to_csv());
    }
    std::cout << table.to_csv();
}

void write_waveform_csv(const fs::path& path, const Waveform& w) {
    std::string out = "time_s,value\n";
    out.reserve(w.samples.size() * 32);
    for (std::size_t k = 0; k < w.samples.size(); ++k) {
        out += fmt(w.time_at(k)) + "," + fmt(w.samples[k]) + "\n";
    }
    write_file(path, out);
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int run_constants(const CommonOpts& opts) {
    Table t;
    t.rows = {
        {"planck_j_s", constants::planck},
        {"hbar_j_s", constants::hbar},
        {"boltzmann_j_per_k", constants::boltzmann},
        {"boltzmann_ev_per_k", constants::boltzmann_ev},
        {"bohr_magneton_j_per_t", constants::bohr_magneton},
        {"bohr_magneton_ev_per_t", constants::bohr_magneton_ev},
        {"elementary_charge_c", constants::elementary_charge},
    };
    const auto t3 = min_splitting_for_temperature(3.0);
    t.rows.emplace_back("min_splitting_3k_ev", t3.energy_ev);
    t.rows.emplace_back("min_splitting_3k_hz", t3.frequency_hz);
    const auto z = zeeman_splitting(2.0, 2.143);
    t.rows.emplace_back("zeeman_2p143t_ev", z.energy_ev);
    t.rows.emplace_back("larmor_2p143t_hz", z.larmor_hz);
    emit_table(opts, "constants", t);
    append_manifest(opts, "constants", json::object());
    return exit_ok;
}

struct BudgetOpts {
    double target = 0.999;
    double f_rabi = 750e6;
    std::optional<double> pn_dbc;
    std::optional<double> dt_frac;
    std::optional<double> delta_f;
    std::optional<double> ratio;
    double kappa = 0.0;  // 0: calibrate
    int mc_trials = 0;
};

int run_budget(const CommonOpts& opts, const BudgetOpts& b) {
    const PnCalibration cal =
        b.kappa > 0.0 ? PnCalibration{b.kappa} : calibrate_pn_kappa();
    std::vector<BudgetEntry> entries;
    if (b.delta_f) {
        BudgetEntry e;
        e.source = BudgetSource::carrier_detuning;
        e.infidelity = detuning_infidelity(*b.delta_f, b.f_rabi);
        e.parameters = {{"delta_f_hz", *b.delta_f}, {"f_rabi_hz", b.f_rabi}};
        entries.push_back(std::move(e));
    }
    if (b.pn_dbc) {
        BudgetEntry e;
        e.source = BudgetSource::pn;
        const double sigma = pn_to_rms_detuning(*b.pn_dbc, b.f_rabi, cal);
        e.infidelity = detuning_infidelity(sigma, b.f_rabi);
        e.parameters = {{"pn_at_1mhz_dbc", *b.pn_dbc},
                        {"rms_detuning_hz", sigma},
                        {"kappa", cal.kappa},
                        {"f_rabi_hz", b.f_rabi}};
        entries.push_back(std::move(e));
    }
    if (b.dt_frac) {
        BudgetEntry e;
        e.source = BudgetSource::timing;
        e.infidelity = timing_infidelity(*b.dt_frac);
        e.parameters = {{"epsilon", *b.dt_frac},
                        {"tolerance_s", timing_tolerance(b.f_rabi, *b.dt_frac)}};
        entries.push_back(std::move(e));
    }
    if (b.ratio) {
        BudgetEntry e;
        e.source = BudgetSource::rwa;
        e.infidelity = rwa_gate_infidelity_worst(*b.ratio);
        e.parameters = {{"larmor_to_rabi_ratio", *b.ratio}};
        entries.push_back(std::move(e));
    }
    const auto rep = budget_report(b.target, std::move(entries));

    json out;
    out["target"] = rep.target_fidelity;
    out["budget_infidelity"] = rep.budget_infidelity;
    out["equal_allocation_per_source"] =
        rep.entries.empty() ? json(nullptr)
                            : json(equal_allocation(rep.target_fidelity,
                                                    static_cast<int>(rep.entries.size())));
    out["sources"] = json::array();
    for (const auto& e : rep.entries) {
        json src;
        src["source"] = to_string(e.source);
        src["infidelity"] = e.infidelity;
        src["parameters"] = e.parameters;
        out["sources"].push_back(std::move(src));
    }
    out["total_infidelity"] = rep.total_infidelity;
    out["pass"] = rep.pass;

    if (b.mc_trials > 0 && b.delta_f) {
        GateNoiseModel noise;
        noise.detuning_mean_hz = *b.delta_f;
        const auto mc = mc_gate_infidelity(noise, b.f_rabi, b.mc_trials, require_seed(opts));
        out["mc_check"] = {{"mean", mc.mean},
                           {"ci95_half_width", mc.ci95_half_width},
                           {"trials", mc.trials}};
    }

    write_file(fs::path(opts.out_dir) / "budget.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    append_manifest(opts, "budget", out);
    return rep.pass ? exit_ok : exit_ok;  // an over-budget report is still a successful run
}

struct PulseOpts {
    double f_carrier = 60e9;
    double pn_dbc = -90.0;
    double amplitude = 0.8;
    double startup_tau = 50e-12;
    double duration = 1e-9;
    double fs = 0.0;  // 0: 4*f_carrier
    std::optional<double> t_on;
    double t_start = 0.0;
    double rise = 0.0;
    double fall = 0.0;
    double isolation = 40.0;
    std::optional<double> alpha_v;
    bool baseband = false;
};

int run_pulse(const CommonOpts& opts, const PulseOpts& p) {
    const std::uint64_t seed = require_seed(opts);
    VcoSpec spec;
    spec.f_carrier_hz = p.f_carrier;
    spec.pn_at_1mhz_dbc = p.pn_dbc;
    spec.amplitude_v = p.amplitude;
    spec.startup_tau_s = p.startup_tau;

    const fs::path dir(opts.out_dir);
    json sidecar;
    sidecar["spec"] = {{"f_carrier_hz", spec.f_carrier_hz},
                       {"pn_at_1mhz_dbc", spec.pn_at_1mhz_dbc},
                       {"amplitude_v", spec.amplitude_v},
                       {"startup_tau_s", spec.startup_tau_s}};
    sidecar["seed"] = seed;

    if (p.baseband) {
        const double fs_bb = p.fs > 0.0 ? p.fs : 64e6;
        const auto trace = synthesize_vco_phase(spec, p.duration, fs_bb, seed);
        std::string out = "time_s,value\n";
        for (std::size_t k = 0; k < trace.phase.size(); ++k) {
            out += fmt(static_cast<double>(k) / trace.fs) + "," + fmt(trace.phase[k]) + "\n";
        }
        write_file(dir / "pulse.csv", out);
        sidecar["kind"] = "phase";
        sidecar["unit"] = "rad";
        sidecar["fs_hz"] = trace.fs;
        sidecar["t0_s"] = 0.0;
        sidecar["n_samples"] = trace.phase.size();
    } else {
        const double fs_pb = p.fs > 0.0 ? p.fs : 4.0 * spec.f_carrier_hz;
        Waveform w = synthesize_vco(spec, p.duration, fs_pb, seed);
        if (p.t_on) {
            SwitchSpec sw;
            sw.t_start_s = p.t_start;
            sw.t_on_s = *p.t_on;
            sw.rise_s = p.rise;
            sw.fall_s = p.fall;
            sw.off_isolation_db = p.isolation;
            w = gate_switch(w, sw);
            sidecar["switch"] = {{"t_start_s", sw.t_start_s},
                                 {"t_on_s", sw.t_on_s},
                                 {"rise_s", sw.rise_s},
                                 {"fall_s", sw.fall_s},
                                 {"off_isolation_db", sw.off_isolation_db},
                                 {"effective_on_time_s", effective_on_time(sw)},
                                 {"carrier_cycles", carrier_cycles(spec, sw)}};
        }
        if (p.alpha_v) {
            DriveConversion conv;
            conv.mode = DriveConversion::Mode::edsr;
            conv.alpha = *p.alpha_v;
            w = drive_field(w, conv);
            sidecar["alpha_v_t_per_v"] = *p.alpha_v;
        }
        write_waveform_csv(dir / "pulse.csv", w);
        sidecar["kind"] = "waveform";
        sidecar["unit"] = to_string(w.unit);
        sidecar["fs_hz"] = w.fs;
        sidecar["t0_s"] = w.t0;
        sidecar["n_samples"] = w.samples.size();
    }
    write_file(dir / "pulse.json", sidecar.dump(2) + "\n");
    append_manifest(opts, "pulse", sidecar);
    return exit_ok;
}

struct RabiOpts {
    double f_rabi = 750e6;
    double detuning = 0.0;
    double t_max = 0.0;  // 0: two Rabi periods
    int points = 200;
};

int run_rabi(const CommonOpts& opts, const RabiOpts& r) {
    const double t_max = r.t_max > 0.0 ? r.t_max : 2.0 / r.f_rabi;
    Table t;
    for (int i = 0; i <= r.points; ++i) {
        const double ti = t_max * static_cast<double>(i) / r.points;
        t.rows.emplace_back(fmt(ti), rabi_lineshape(r.f_rabi, r.detuning, ti));
    }
    emit_table(opts, "rabi", t);
    append_manifest(opts, "rabi",
                    json{{"f_rabi_hz", r.f_rabi}, {"detuning_hz", r.detuning},
                         {"t_max_s", t_max}, {"points", r.points}});
    return exit_ok;
}

struct RwaOpts {
    std::vector<double> ratios{5.0};
    int phase_points = 8;
    double samples_per_cycle = 2048.0;
};

int run_rwa(const CommonOpts& opts, const RwaOpts& r) {
    Table t;
    for (double ratio : r.ratios) {
        t.rows.emplace_back(fmt(ratio),
                            rwa_gate_infidelity_worst(ratio, r.phase_points,
                                                      r.samples_per_cycle));
    }
    emit_table(opts, "rwa", t);
    append_manifest(opts, "rwa",
                    json{{"ratios", r.ratios}, {"phase_points", r.phase_points}});
    return exit_ok;
}

struct ReadoutOpts {
    int trials = 1000;
};

int run_readout(const CommonOpts& opts, const ReadoutOpts& r) {
    const std::uint64_t seed = require_seed(opts);
    const ModelBundle m = load_bundle(opts);

    int ero_miss = 0;
    int trro_err_es = 0;
    int trro_err_gs = 0;
    int blockade_sing_ok = 0;
    int blockade_trip_as_s = 0;
    for (int i = 0; i < r.trials; ++i) {
        const auto ero = ero_trace(m.exec.ero_bias, m.exec.tunnel, SpinLabel::excited,
                                   m.exec.ero_window_s, derive_seed(seed, 4 * i));
        ero_miss += ero.decision == "GS";
        const auto tr_es = trro_decision(m.exec.tunnel, m.exec.ero_window_s,
                                         SpinLabel::excited, derive_seed(seed, 4 * i + 1));
        trro_err_es += tr_es.decision != SpinLabel::excited;
        const auto tr_gs = trro_decision(m.exec.tunnel, m.exec.ero_window_s,
                                         SpinLabel::ground, derive_seed(seed, 4 * i + 2));
        trro_err_gs += tr_gs.decision != SpinLabel::ground;
        const auto bl =
            spin_blockade_trace(i % 2 == 0 ? TwoSpinState::singlet : TwoSpinState::triplet0,
                                m.blockade_window_s, m.exec.tunnel.t1_s,
                                derive_seed(seed, 4 * i + 3), m.blockade_latency_s);
        if (i % 2 == 0) {
            blockade_sing_ok += bl.decision == "S";
        } else {
            blockade_trip_as_s += bl.decision == "S";
        }
    }
    const double n = r.trials;

    // one example trace through the full electrical chain
    const auto example = ero_trace(m.exec.ero_bias, m.exec.tunnel, SpinLabel::excited,
                                   m.exec.ero_window_s, derive_seed(seed, 1));
    const double fs = 10.0 * m.tia.f3db_hz;
    const auto current = events_to_current(example, m.i_peak_a, m.pulse_width_s, fs);
    const auto volts = tia_response(current, m.tia, derive_seed(seed, 2));
    const double snr =
        m.i_peak_a * m.tia.z0_ohm() / detect_noise_std(m.tia, fs, m.pulse_width_s);

    json out;
    out["trials"] = r.trials;
    out["ero"] = {{"miss_rate", ero_miss / n},
                  {"miss_rate_formula", ero_miss_probability(m.exec.tunnel, m.exec.ero_window_s)}};
    out["trro"] = {{"error_excited", trro_err_es / n},
                   {"error_excited_formula", trro_error_excited(m.exec.tunnel, m.exec.ero_window_s)},
                   {"error_ground", trro_err_gs / n},
                   {"error_ground_formula", trro_error_ground(m.exec.tunnel, m.exec.ero_window_s)}};
    out["blockade"] = {{"singlet_correct_rate", blockade_sing_ok / (n / 2.0)},
                       {"triplet_early_release_rate", blockade_trip_as_s / (n / 2.0)}};
    out["chain"] = {{"i_peak_a", m.i_peak_a},
                    {"pulse_width_s", m.pulse_width_s},
                    {"tia", m.tia.temperature_tag},
                    {"snr_single_pulse", snr},
                    {"output_peak_v", *std::max_element(volts.samples.begin(),
                                                        volts.samples.end())}};
    if (!current_in_specified_range(m.i_peak_a)) {
        out["chain"]["warning"] = "i_peak outside the specified 10 pA - 10 nA range";
        std::cerr << "warning: i_peak outside the specified 10 pA - 10 nA range\n";
    }
    write_file(fs::path(opts.out_dir) / "readout.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    append_manifest(opts, "readout", out);
    return exit_ok;
}

struct SweepOpts {
    std::vector<double> i_peaks{1e-10, 1e-9, 1e-8};
    std::vector<double> windows{5e-10, 2e-9, 8e-9};
    int trials = 200;
};

int run_sweep(const CommonOpts& opts, const SweepOpts& s) {
    const std::uint64_t seed = require_seed(opts);
    const ModelBundle m = load_bundle(opts);
    const auto cells =
        readout_error_sweep(s.i_peaks, s.windows, m.tia, s.trials, seed, opts.jobs);
    std::string csv = "i_peak,window,error_rate,snr\n";
    for (const auto& c : cells) {
        csv += fmt(c.i_peak_a) + "," + fmt(c.window_s) + "," + fmt(c.error_rate) + "," +
               fmt(c.snr) + "\n";
    }
    write_file(fs::path(opts.out_dir) / "sweep.csv", csv);
    std::cout << csv;
    append_manifest(opts, "sweep",
                    json{{"i_peaks", s.i_peaks},
                         {"windows", s.windows},
                         {"trials", s.trials},
                         {"tia", m.tia.temperature_tag}});
    return exit_ok;
}

struct SequenceOpts {
    std::string mode;  // run | validate | fmt
    std::string file;
    int shots = 1000;
};

int run_sequence(const CommonOpts& opts, const SequenceOpts& s) {
    std::ifstream in(s.file);
    if (!in) {
        throw std::invalid_argument("cannot open sequence file: " + s.file);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto prog = parse_sequence(ss.str());

    if (s.mode == "fmt") {
        std::cout << serialize(prog);
        return exit_ok;
    }

    const ModelBundle m = load_bundle(opts);
    if (s.mode == "validate") {
        const auto diags = validate(prog, m.exec.dqd);
        for (const auto& d : diags) {
            std::cout << "line " << d.line << ": " << d.message << "\n";
        }
        std::cout << (diags.empty() ? "ok" : "invalid") << "\n";
        return diags.empty() ? exit_ok : exit_validation;
    }

    // run
    const std::uint64_t seed = require_seed(opts);
    const auto summary = execute(prog, m.exec, s.shots, seed, opts.jobs);

    json out;
    out["shots"] = s.shots;
    out["seed"] = seed;
    auto dot_json = [](const DotEstimate& e) {
        return json{{"shots", e.shots}, {"ups", e.ups}, {"p_up", e.p_up}, {"ci95", e.ci95}};
    };
    out["left"] = dot_json(summary.left);
    out["right"] = dot_json(summary.right);
    out["charge_path"] = json::array();
    for (const auto& cs : charge_path(prog, m.exec.dqd)) {
        out["charge_path"].push_back({cs.n_left, cs.n_right});
    }
    write_file(fs::path(opts.out_dir) / "sequence_outcomes.json", out.dump(2) + "\n");

    // per-step timeline of the first shot plus ensemble-mean probabilities
    std::string csv = "step,t_s,n_left,n_right,mean_p_up_left,mean_p_up_right\n";
    const auto& first = summary.records.front().timeline;
    for (std::size_t i = 0; i < first.size(); ++i) {
        double pl = 0.0;
        double pr = 0.0;
        for (const auto& rec : summary.records) {
            pl += rec.timeline[i].p_up_left;
            pr += rec.timeline[i].p_up_right;
        }
        pl /= static_cast<double>(summary.records.size());
        pr /= static_cast<double>(summary.records.size());
        csv += std::to_string(i) + "," + fmt(first[i].t_s) + "," +
               std::to_string(first[i].charge.n_left) + "," +
               std::to_string(first[i].charge.n_right) + "," + fmt(pl) + "," + fmt(pr) + "\n";
    }
    write_file(fs::path(opts.out_dir) / "sequence_timeline.csv", csv);
    std::cout << out.dump(2) << "\n";
    append_manifest(opts, "sequence", out);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-qubit control/readout electronics co-simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version);

    CommonOpts common;
    BudgetOpts budget_opts;
    PulseOpts pulse_opts;
    RabiOpts rabi_opts;
    RwaOpts rwa_opts;
    ReadoutOpts readout_opts;
    SweepOpts sweep_opts;
    SequenceOpts seq_opts;

    auto* c_constants = app.add_subcommand("constants", "CODATA values and derived splittings");
    add_common(c_constants, common);

    auto* c_budget = app.add_subcommand("budget", "pi/2 gate error budget report");
    add_common(c_budget, common);
    c_budget->add_option("--target", budget_opts.target, "target gate fidelity")
        ->capture_default_str();
    c_budget->add_option("--fr", budget_opts.f_rabi, "Rabi frequency [Hz]")
        ->capture_default_str();
    c_budget->add_option("--pn", budget_opts.pn_dbc, "VCO phase noise at 1 MHz [dBc/Hz]");
    c_budget->add_option("--dt-frac", budget_opts.dt_frac, "fractional timing error");
    c_budget->add_option("--delta-f", budget_opts.delta_f, "static carrier offset [Hz]");
    c_budget->add_option("--ratio", budget_opts.ratio, "Larmor/Rabi ratio for the RWA entry");
    c_budget->add_option("--kappa", budget_opts.kappa,
                         "PN integration-bandwidth factor (0 = calibrate)");
    c_budget->add_option("--mc-trials", budget_opts.mc_trials,
                         "cross-check the detuning entry by Monte Carlo");

    auto* c_pulse = app.add_subcommand("pulse", "synthesize a gated VCO pulse");
    add_common(c_pulse, common);
    c_pulse->add_option("--fc", pulse_opts.f_carrier, "carrier [Hz]")->capture_default_str();
    c_pulse->add_option("--pn", pulse_opts.pn_dbc, "PN at 1 MHz [dBc/Hz]")
        ->capture_default_str();
    c_pulse->add_option("--amplitude", pulse_opts.amplitude, "VCO amplitude [V]")
        ->capture_default_str();
    c_pulse->add_option("--startup-tau", pulse_opts.startup_tau, "startup tau [s]")
        ->capture_default_str();
    c_pulse->add_option("--duration", pulse_opts.duration, "waveform length [s]")
        ->capture_default_str();
    c_pulse->add_option("--fs", pulse_opts.fs, "sample rate [Hz] (0 = 4*fc)");
    c_pulse->add_option("--ton", pulse_opts.t_on, "switch on-time [s]");
    c_pulse->add_option("--tstart", pulse_opts.t_start, "switch opening time [s]");
    c_pulse->add_option("--rise", pulse_opts.rise, "switch rise time [s]");
    c_pulse->add_option("--fall", pulse_opts.fall, "switch fall time [s]");
    c_pulse->add_option("--isolation", pulse_opts.isolation, "off isolation [dB]")
        ->capture_default_str();
    c_pulse->add_option("--alpha-v", pulse_opts.alpha_v,
                        "EDSR conversion [T/V]; emits a tesla waveform");
    c_pulse->add_flag("--baseband", pulse_opts.baseband, "emit the phase trace instead");

    auto* c_rabi = app.add_subcommand("rabi", "Rabi lineshape sweep (CSV)");
    add_common(c_rabi, common);
    c_rabi->add_option("--fr", rabi_opts.f_rabi, "Rabi frequency [Hz]")->capture_default_str();
    c_rabi->add_option("--detuning", rabi_opts.detuning, "drive detuning [Hz]")
        ->capture_default_str();
    c_rabi->add_option("--tmax", rabi_opts.t_max, "sweep end [s] (0 = two periods)");
    c_rabi->add_option("--points", rabi_opts.points, "sweep points")->capture_default_str();

    auto* c_rwa = app.add_subcommand("rwa", "RWA-violation infidelity vs Larmor/Rabi ratio");
    add_common(c_rwa, common);
    c_rwa->add_option("--ratio", rwa_opts.ratios, "ratios to evaluate")->capture_default_str();
    c_rwa->add_option("--phase-points", rwa_opts.phase_points, "phase grid size")
        ->capture_default_str();
    c_rwa->add_option("--spc", rwa_opts.samples_per_cycle, "samples per Larmor cycle")
        ->capture_default_str();

    auto* c_readout = app.add_subcommand("readout", "spin-to-charge Monte Carlo + TIA chain");
    add_common(c_readout, common);
    c_readout->add_option("--trials", readout_opts.trials, "trials per mode")
        ->capture_default_str();

    auto* c_sweep = app.add_subcommand("sweep", "readout error-rate sweep (CSV)");
    add_common(c_sweep, common);
    c_sweep->add_option("--ipeak", sweep_opts.i_peaks, "peak currents [A]")
        ->capture_default_str();
    c_sweep->add_option("--window", sweep_opts.windows, "integration windows [s]")
        ->capture_default_str();
    c_sweep->add_option("--trials", sweep_opts.trials, "trials per cell")->capture_default_str();

    auto* c_seq = app.add_subcommand("sequence", "parse/validate/run .seq programs");
    add_common(c_seq, common);
    c_seq->add_option("mode", seq_opts.mode, "run | validate | fmt")
        ->required()
        ->check(CLI::IsMember({"run", "validate", "fmt"}));
    c_seq->add_option("file", seq_opts.file, ".seq program")->required();
    c_seq->add_option("--shots", seq_opts.shots, "shots")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (app.got_subcommand(c_constants)) return run_constants(common);
        if (app.got_subcommand(c_budget)) return run_budget(common, budget_opts);
        if (app.got_subcommand(c_pulse)) return run_pulse(common, pulse_opts);
        if (app.got_subcommand(c_rabi)) return run_rabi(common, rabi_opts);
        if (app.got_subcommand(c_rwa)) return run_rwa(common, rwa_opts);
        if (app.got_subcommand(c_readout)) return run_readout(common, readout_opts);
        if (app.got_subcommand(c_sweep)) return run_sweep(common, sweep_opts);
        if (app.got_subcommand(c_seq)) return run_sequence(common, seq_opts);
    } catch (const SequenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    }
    return exit_usage;
}
