#pragma once

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinsim {

enum class SignalUnit { volt, ampere, tesla };

inline const char* to_string(SignalUnit u) {
    switch (u) {
        case SignalUnit::volt: return "volt";
        case SignalUnit::ampere: return "ampere";
        case SignalUnit::tesla: return "tesla";
    }
    return "?";
}

inline SignalUnit signal_unit_from_string(const std::string& s) {
    if (s == "volt") return SignalUnit::volt;
    if (s == "ampere") return SignalUnit::ampere;
    if (s == "tesla") return SignalUnit::tesla;
    throw std::invalid_argument("unknown signal unit: " + s);
}

/// Uniformly sampled real signal. Sample k represents the value on
/// [t0 + k/fs, t0 + (k+1)/fs).
struct Waveform {
    std::vector<double> samples;
    double fs = 0.0;
    double t0 = 0.0;
    SignalUnit unit = SignalUnit::volt;

    Waveform() = default;
    Waveform(std::vector<double> s, double sample_rate, double start, SignalUnit u)
        : samples(std::move(s)), fs(sample_rate), t0(start), unit(u) {
        if (!(fs > 0.0)) {
            throw std::invalid_argument("Waveform: fs must be > 0");
        }
        if (samples.empty()) {
            throw std::invalid_argument("Waveform: at least one sample required");
        }
    }

    std::size_t size() const { return samples.size(); }
    double dt() const { return 1.0 / fs; }
    double duration() const { return static_cast<double>(samples.size()) / fs; }
    double time_at(std::size_t k) const { return t0 + static_cast<double>(k) / fs; }
    double end_time() const { return t0 + duration(); }
};

}  // namespace spinsim
