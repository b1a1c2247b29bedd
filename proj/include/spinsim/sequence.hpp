#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinsim/detail/parallel.hpp"
#include "spinsim/dqd.hpp"
#include "spinsim/propagator.hpp"
#include "spinsim/readout.hpp"
#include "spinsim/resonance.hpp"
#include "spinsim/rng.hpp"

// Declarative control-sequence language over the DQD charge stability
// diagram, and its interpreter. The grammar is line-oriented:
//
//   # comment
//   point <name> vl=<volt> vr=<volt>
//   step <point> dwell=<time> [ramp=<time>] [<action> [key=value ...]]
//
// Actions: init | pulse dur=<time> [f=<freq>] [phase=<rad>] target=<side>
//        | measure target=<side> | empty target=<side>
// Numbers accept SI suffixes (fs ps ns us ms s, Hz kHz MHz GHz, uV mV V, rad).
// A pulse with f=0 (or no f field) runs on resonance.

namespace spinsim {

class SequenceError : public std::runtime_error {
  public:
    SequenceError(int line, int column, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", col " +
                             std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

enum class DotSide { left, right };

inline const char* to_string(DotSide s) { return s == DotSide::left ? "left" : "right"; }

enum class ActionKind { none, init, pulse, measure_ero, empty };

inline const char* to_string(ActionKind a) {
    switch (a) {
        case ActionKind::none: return "none";
        case ActionKind::init: return "init";
        case ActionKind::pulse: return "pulse";
        case ActionKind::measure_ero: return "measure";
        case ActionKind::empty: return "empty";
    }
    return "?";
}

struct SeqPoint {
    std::string name;
    double v_left = 0.0;
    double v_right = 0.0;
    int line = 0;

    friend bool operator==(const SeqPoint& a, const SeqPoint& b) {
        return a.name == b.name && a.v_left == b.v_left && a.v_right == b.v_right;
    }
};

struct SeqStep {
    std::string point;
    double dwell_s = 0.0;
    double ramp_s = 0.0;
    ActionKind action = ActionKind::none;
    // pulse fields
    double pulse_f_hz = 0.0;  // 0 = resonant
    double pulse_duration_s = 0.0;
    double pulse_phase_rad = 0.0;
    // pulse/measure/empty target
    DotSide target = DotSide::left;
    int line = 0;

    friend bool operator==(const SeqStep& a, const SeqStep& b) {
        return a.point == b.point && a.dwell_s == b.dwell_s && a.ramp_s == b.ramp_s &&
               a.action == b.action && a.pulse_f_hz == b.pulse_f_hz &&
               a.pulse_duration_s == b.pulse_duration_s &&
               a.pulse_phase_rad == b.pulse_phase_rad &&
               (a.action == ActionKind::none || a.action == ActionKind::init ||
                a.target == b.target);
    }
};

struct SequenceProgram {
    std::vector<SeqPoint> points;
    std::vector<SeqStep> steps;

    const SeqPoint* find_point(std::string_view name) const {
        for (const auto& p : points) {
            if (p.name == name) {
                return &p;
            }
        }
        return nullptr;
    }

    friend bool operator==(const SequenceProgram& a, const SequenceProgram& b) {
        return a.points == b.points && a.steps == b.steps;
    }
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
    std::string_view text;
    int column;  // 1-based
};

inline std::vector<Token> tokenize_line(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') {
            break;
        }
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
               line[j] != '#') {
            ++j;
        }
        out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
        i = j;
    }
    return out;
}

inline const std::vector<std::pair<std::string_view, double>>& si_suffixes() {
    static const std::vector<std::pair<std::string_view, double>> table = {
        {"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0},  {"rad", 1.0},
        {"fs", 1e-15}, {"ps", 1e-12}, {"ns", 1e-9}, {"us", 1e-6}, {"ms", 1e-3},
        {"mV", 1e-3}, {"uV", 1e-6},  {"V", 1.0},   {"s", 1.0},
    };
    return table;
}

inline std::optional<double> parse_double_exact(std::string_view s) {
    if (s.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

inline std::optional<double> parse_si_number(std::string_view s) {
    if (auto plain = parse_double_exact(s)) {
        return plain;
    }
    for (const auto& [suffix, mult] : si_suffixes()) {
        if (s.size() > suffix.size() && s.ends_with(suffix)) {
            if (auto prefix = parse_double_exact(s.substr(0, s.size() - suffix.size()))) {
                return *prefix * mult;
            }
        }
    }
    return std::nullopt;
}

inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct KeyValue {
    std::string_view key;
    double value;
};

inline std::optional<std::string_view> split_key(std::string_view token) {
    const auto eq = token.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 >= token.size()) {
        return std::nullopt;
    }
    return token.substr(0, eq);
}

}  // namespace detail

inline SequenceProgram parse_sequence(std::string_view text) {
    SequenceProgram prog;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        ++line_no;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        const auto tokens = detail::tokenize_line(line);
        if (tokens.empty()) {
            continue;
        }
        const auto& head = tokens.front();

        auto parse_value = [&](const detail::Token& tok,
                               std::string_view key) -> double {
            const auto v = detail::parse_si_number(tok.text.substr(key.size() + 1));
            if (!v) {
                throw SequenceError(line_no, tok.column,
                                    "bad numeric value for '" + std::string(key) + "'");
            }
            return *v;
        };
        auto parse_target = [&](const detail::Token& tok, std::string_view key) -> DotSide {
            const auto v = tok.text.substr(key.size() + 1);
            if (v == "left") return DotSide::left;
            if (v == "right") return DotSide::right;
            throw SequenceError(line_no, tok.column, "target must be 'left' or 'right'");
        };

        if (head.text == "point") {
            if (tokens.size() < 2) {
                throw SequenceError(line_no, head.column, "expected: point <name> vl=... vr=...");
            }
            SeqPoint p;
            p.name = std::string(tokens[1].text);
            p.line = line_no;
            if (prog.find_point(p.name) != nullptr) {
                throw SequenceError(line_no, tokens[1].column,
                                    "duplicate point name '" + p.name + "'");
            }
            bool have_vl = false;
            bool have_vr = false;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                const auto key = detail::split_key(tokens[i].text);
                if (!key) {
                    throw SequenceError(line_no, tokens[i].column,
                                        "expected key=value, got '" +
                                            std::string(tokens[i].text) + "'");
                }
                if (*key == "vl") {
                    p.v_left = parse_value(tokens[i], *key);
                    have_vl = true;
                } else if (*key == "vr") {
                    p.v_right = parse_value(tokens[i], *key);
                    have_vr = true;
                } else {
                    throw SequenceError(line_no, tokens[i].column,
                                        "unknown point field '" + std::string(*key) +
                                            "' (expected vl, vr)");
                }
            }
            if (!have_vl || !have_vr) {
                throw SequenceError(line_no, head.column,
                                    "point '" + p.name + "' needs both vl and vr");
            }
            prog.points.push_back(std::move(p));
            continue;
        }

        if (head.text == "step") {
            if (tokens.size() < 2) {
                throw SequenceError(line_no, head.column, "expected: step <point> ...");
            }
            SeqStep st;
            st.point = std::string(tokens[1].text);
            st.line = line_no;
            if (prog.find_point(st.point) == nullptr) {
                throw SequenceError(line_no, tokens[1].column,
                                    "undeclared point '" + st.point + "'");
            }
            bool have_target = false;
            bool have_dur = false;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                const auto& tok = tokens[i];
                const auto key = detail::split_key(tok.text);
                if (!key) {
                    // bare keyword: an action
                    ActionKind act;
                    if (tok.text == "init") {
                        act = ActionKind::init;
                    } else if (tok.text == "pulse") {
                        act = ActionKind::pulse;
                    } else if (tok.text == "measure") {
                        act = ActionKind::measure_ero;
                    } else if (tok.text == "empty") {
                        act = ActionKind::empty;
                    } else {
                        throw SequenceError(line_no, tok.column,
                                            "unknown keyword '" + std::string(tok.text) +
                                                "' (expected init, pulse, measure or empty)");
                    }
                    if (st.action != ActionKind::none) {
                        throw SequenceError(line_no, tok.column, "second action on one step");
                    }
                    st.action = act;
                    continue;
                }
                // key=value fields; which are legal depends on the action so far
                if (st.action == ActionKind::none) {
                    if (*key == "dwell") {
                        st.dwell_s = parse_value(tok, *key);
                    } else if (*key == "ramp") {
                        st.ramp_s = parse_value(tok, *key);
                    } else {
                        throw SequenceError(line_no, tok.column,
                                            "unknown step field '" + std::string(*key) +
                                                "' (expected dwell, ramp)");
                    }
                } else if (st.action == ActionKind::pulse) {
                    if (*key == "f") {
                        st.pulse_f_hz = parse_value(tok, *key);
                    } else if (*key == "dur") {
                        st.pulse_duration_s = parse_value(tok, *key);
                        have_dur = true;
                    } else if (*key == "phase") {
                        st.pulse_phase_rad = parse_value(tok, *key);
                    } else if (*key == "target") {
                        st.target = parse_target(tok, *key);
                        have_target = true;
                    } else {
                        throw SequenceError(line_no, tok.column,
                                            "unknown pulse field '" + std::string(*key) +
                                                "' (expected f, dur, phase, target)");
                    }
                } else if (st.action == ActionKind::measure_ero ||
                           st.action == ActionKind::empty) {
                    if (*key == "target") {
                        st.target = parse_target(tok, *key);
                        have_target = true;
                    } else {
                        throw SequenceError(line_no, tok.column,
                                            "unknown field '" + std::string(*key) +
                                                "' (expected target)");
                    }
                } else {
                    throw SequenceError(line_no, tok.column, "init takes no fields");
                }
            }
            if (st.dwell_s < 0.0) {
                throw SequenceError(line_no, head.column, "dwell must be >= 0");
            }
            if (st.action == ActionKind::pulse) {
                if (!have_dur || !(st.pulse_duration_s > 0.0)) {
                    throw SequenceError(line_no, head.column, "pulse needs dur > 0");
                }
                if (!have_target) {
                    throw SequenceError(line_no, head.column, "pulse needs target=left|right");
                }
            }
            if ((st.action == ActionKind::measure_ero || st.action == ActionKind::empty) &&
                !have_target) {
                throw SequenceError(line_no, head.column, "action needs target=left|right");
            }
            prog.steps.push_back(std::move(st));
            continue;
        }

        throw SequenceError(line_no, head.column,
                            "unknown keyword '" + std::string(head.text) +
                                "' (expected point or step)");
    }
    return prog;
}

/// Canonical text: points alphabetical, numbers in shortest round-trip form,
/// optional fields omitted at their defaults. parse(serialize(p)) == p.
inline std::string serialize(const SequenceProgram& prog) {
    std::ostringstream out;
    std::vector<const SeqPoint*> points;
    points.reserve(prog.points.size());
    for (const auto& p : prog.points) {
        points.push_back(&p);
    }
    std::sort(points.begin(), points.end(),
              [](const SeqPoint* a, const SeqPoint* b) { return a->name < b->name; });
    for (const auto* p : points) {
        out << "point " << p->name << " vl=" << detail::format_number(p->v_left)
            << " vr=" << detail::format_number(p->v_right) << "\n";
    }
    for (const auto& st : prog.steps) {
        out << "step " << st.point << " dwell=" << detail::format_number(st.dwell_s);
        if (st.ramp_s != 0.0) {
            out << " ramp=" << detail::format_number(st.ramp_s);
        }
        switch (st.action) {
            case ActionKind::none:
                break;
            case ActionKind::init:
                out << " init";
                break;
            case ActionKind::pulse:
                out << " pulse dur=" << detail::format_number(st.pulse_duration_s);
                if (st.pulse_f_hz != 0.0) {
                    out << " f=" << detail::format_number(st.pulse_f_hz);
                }
                if (st.pulse_phase_rad != 0.0) {
                    out << " phase=" << detail::format_number(st.pulse_phase_rad);
                }
                out << " target=" << to_string(st.target);
                break;
            case ActionKind::measure_ero:
                out << " measure target=" << to_string(st.target);
                break;
            case ActionKind::empty:
                out << " empty target=" << to_string(st.target);
                break;
        }
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Diagnostic {
    int step_index = -1;  // -1: program-level
    int line = 0;
    std::string message;
};

/// Static checks against a DQD configuration: the charge path must move at
/// most one electron per hop, and ERO must run where the target dot's ground
/// configuration is empty (the loaded electron is metastable there).
inline std::vector<Diagnostic> validate(const SequenceProgram& prog, const DQDConfig& cfg) {
    std::vector<Diagnostic> diags;
    std::optional<ChargeState> prev;
    for (std::size_t i = 0; i < prog.steps.size(); ++i) {
        const auto& st = prog.steps[i];
        const auto* pt = prog.find_point(st.point);
        if (pt == nullptr) {
            diags.push_back({static_cast<int>(i), st.line,
                             "step references undeclared point '" + st.point + "'"});
            continue;
        }
        const ChargeState cs = charge_state(pt->v_left, pt->v_right, cfg);
        if (prev) {
            const int moved = std::abs(cs.n_left - prev->n_left) +
                              std::abs(cs.n_right - prev->n_right);
            if (moved > 1) {
                diags.push_back({static_cast<int>(i), st.line,
                                 "non-adjacent charge transition (" +
                                     std::to_string(prev->n_left) + "," +
                                     std::to_string(prev->n_right) + ") -> (" +
                                     std::to_string(cs.n_left) + "," +
                                     std::to_string(cs.n_right) + ")"});
            }
        }
        if (st.action == ActionKind::measure_ero) {
            const int occ = st.target == DotSide::left ? cs.n_left : cs.n_right;
            if (occ != 0) {
                diags.push_back({static_cast<int>(i), st.line,
                                 std::string("measure outside the ERO region: ground state ") +
                                     "still holds " + std::to_string(occ) + " electron(s) on the " +
                                     to_string(st.target) + " dot"});
            }
        }
        prev = cs;
    }
    return diags;
}

/// Charge configuration visited at each step.
inline std::vector<ChargeState> charge_path(const SequenceProgram& prog, const DQDConfig& cfg) {
    std::vector<ChargeState> path;
    path.reserve(prog.steps.size());
    for (const auto& st : prog.steps) {
        const auto* pt = prog.find_point(st.point);
        if (pt == nullptr) {
            throw std::invalid_argument("charge_path: undeclared point " + st.point);
        }
        path.push_back(charge_state(pt->v_left, pt->v_right, cfg));
    }
    return path;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// Everything the interpreter needs beyond the program itself.
struct ExecutionModels {
    SpinSystem spin{2.0, 2.143};
    DriveSpec drive = DriveSpec::from_rabi(2.0, 750e6);
    DQDConfig dqd;
    TunnelSpec tunnel;
    EroBias ero_bias;
    double ero_window_s = 2e-6;
};

struct TimelineEntry {
    double t_s = 0.0;
    ChargeState charge;
    double p_up_left = 0.0;
    double p_up_right = 0.0;
};

struct MeasurementOutcome {
    int step_index = -1;
    DotSide target = DotSide::left;
    bool spin_was_up = false;   // collapsed state entering the readout
    std::string decision;       // what the charge detector inferred
};

/// One shot: what happened, when.
struct ExecutionRecord {
    std::vector<TimelineEntry> timeline;
    std::vector<MeasurementOutcome> outcomes;
};

struct DotEstimate {
    int shots = 0;
    int ups = 0;
    double p_up = 0.0;
    double ci95 = 0.0;
};

struct ExecutionSummary {
    std::vector<ExecutionRecord> records;
    DotEstimate left;
    DotEstimate right;
};

namespace detail {

inline void finalize(DotEstimate& est) {
    if (est.shots == 0) {
        return;
    }
    est.p_up = static_cast<double>(est.ups) / est.shots;
    est.ci95 = 1.96 * std::sqrt(est.p_up * (1.0 - est.p_up) / est.shots);
}

}  // namespace detail

/// Run the program `shots` times. Each shot tracks a left (x) right product
/// state starting undefined until `init` pins |down,down>; pulses apply
/// rotating-frame propagators to one spin; `measure` collapses the target
/// spin and pushes it through an ERO trace (up -> |ES>). Shots use derived
/// seeds, so results are identical for any job count.
inline ExecutionSummary execute(const SequenceProgram& prog, const ExecutionModels& models,
                                int shots, std::uint64_t seed, int jobs = 1) {
    if (shots < 1) {
        throw std::invalid_argument("execute: shots must be >= 1");
    }
    const auto diags = validate(prog, models.dqd);
    if (!diags.empty()) {
        std::string msg = "execute: program failed validation:";
        for (const auto& d : diags) {
            msg += "\n  line " + std::to_string(d.line) + ": " + d.message;
        }
        throw std::invalid_argument(msg);
    }

    ExecutionSummary summary;
    summary.records.resize(static_cast<std::size_t>(shots));
    detail::parallel_for_indexed(summary.records.size(), jobs, [&](std::size_t shot) {
        Rng rng(derive_seed(seed, shot));
        ExecutionRecord rec;
        Vec2 spin_l = Vec2::spin_down();
        Vec2 spin_r = Vec2::spin_down();
        double t = 0.0;
        for (std::size_t i = 0; i < prog.steps.size(); ++i) {
            const auto& st = prog.steps[i];
            const auto* pt = prog.find_point(st.point);
            const ChargeState cs = charge_state(pt->v_left, pt->v_right, models.dqd);
            switch (st.action) {
                case ActionKind::none:
                    break;
                case ActionKind::init:
                    spin_l = Vec2::spin_down();
                    spin_r = Vec2::spin_down();
                    break;
                case ActionKind::pulse: {
                    RotatingFramePulse pulse;
                    pulse.f_rabi_hz = models.drive.f_rabi_hz;
                    pulse.detuning_hz =
                        st.pulse_f_hz == 0.0 ? 0.0 : st.pulse_f_hz - models.spin.larmor_hz;
                    pulse.phase_rad = st.pulse_phase_rad + models.drive.phase_rad;
                    pulse.duration_s = st.pulse_duration_s;
                    const auto u = propagator_rwa(pulse);
                    if (st.target == DotSide::left) {
                        spin_l = u.apply(spin_l);
                    } else {
                        spin_r = u.apply(spin_r);
                    }
                    break;
                }
                case ActionKind::measure_ero: {
                    Vec2& spin = st.target == DotSide::left ? spin_l : spin_r;
                    const bool up = rng.uniform() <= spin.prob_up();
                    const auto trace =
                        ero_trace(models.ero_bias, models.tunnel,
                                  up ? SpinLabel::excited : SpinLabel::ground,
                                  models.ero_window_s, rng.next_u64());
                    rec.outcomes.push_back(
                        {static_cast<int>(i), st.target, up, trace.decision});
                    spin = Vec2::spin_down();  // tunneled out or stayed in |GS>
                    break;
                }
                case ActionKind::empty: {
                    Vec2& spin = st.target == DotSide::left ? spin_l : spin_r;
                    spin = Vec2::spin_down();
                    break;
                }
            }
            rec.timeline.push_back({t, cs, spin_l.prob_up(), spin_r.prob_up()});
            t += st.ramp_s + st.dwell_s;
        }
        summary.records[shot] = std::move(rec);
    });

    for (const auto& rec : summary.records) {
        for (const auto& out : rec.outcomes) {
            DotEstimate& est = out.target == DotSide::left ? summary.left : summary.right;
            ++est.shots;
            est.ups += out.decision == "ES" ? 1 : 0;
        }
    }
    detail::finalize(summary.left);
    detail::finalize(summary.right);
    return summary;
}

}  // namespace spinsim
