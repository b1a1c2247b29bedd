#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "spinsim/detail/fft.hpp"
#include "spinsim/pulse_gen.hpp"
#include "spinsim/waveform.hpp"

// Phase-noise estimation: Welch PSD of the oscillator phase, ensemble
// averaged, reported as single-sideband L(f) = S_phi(f)/2 in dBc/Hz.

namespace spinsim {

struct PsdEstimate {
    std::vector<double> freq_hz;  // bin centers, DC excluded
    std::vector<double> psd;      // one-sided [x^2/Hz]
    double resolution_hz = 0.0;
};

/// Welch PSD: Hann window, 50% overlap, per-segment mean removal.
inline PsdEstimate welch_psd(const std::vector<double>& x, double fs, std::size_t nfft) {
    if (!detail::is_power_of_two(nfft)) {
        throw std::invalid_argument("welch_psd: nfft must be a power of two");
    }
    if (x.size() < nfft) {
        throw std::invalid_argument("welch_psd: signal shorter than one segment");
    }
    std::vector<double> window(nfft);
    double win_power = 0.0;
    for (std::size_t k = 0; k < nfft; ++k) {
        window[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                          static_cast<double>(nfft)));
        win_power += window[k] * window[k];
    }
    const std::size_t hop = nfft / 2;
    const std::size_t n_seg = (x.size() - nfft) / hop + 1;

    PsdEstimate est;
    est.resolution_hz = fs / static_cast<double>(nfft);
    est.psd.assign(nfft / 2 - 1, 0.0);
    est.freq_hz.resize(nfft / 2 - 1);
    for (std::size_t i = 0; i < est.freq_hz.size(); ++i) {
        est.freq_hz[i] = static_cast<double>(i + 1) * est.resolution_hz;
    }

    std::vector<std::complex<double>> seg(nfft);
    for (std::size_t s = 0; s < n_seg; ++s) {
        const double* base = x.data() + s * hop;
        double mean = 0.0;
        for (std::size_t k = 0; k < nfft; ++k) {
            mean += base[k];
        }
        mean /= static_cast<double>(nfft);
        for (std::size_t k = 0; k < nfft; ++k) {
            seg[k] = {(base[k] - mean) * window[k], 0.0};
        }
        detail::fft_inplace(seg);
        for (std::size_t i = 0; i < est.psd.size(); ++i) {
            est.psd[i] += std::norm(seg[i + 1]);
        }
    }
    const double scale = 2.0 / (fs * win_power * static_cast<double>(n_seg));
    for (double& p : est.psd) {
        p *= scale;
    }
    return est;
}

struct PhaseNoiseEstimate {
    std::vector<double> offsets_hz;
    std::vector<double> l_dbc_per_hz;
};

namespace detail {

/// Average PSD bins within +-5% of each requested offset and convert to
/// L(f) = S_phi/2 in dBc/Hz.
inline PhaseNoiseEstimate read_offsets(const PsdEstimate& avg,
                                       const std::vector<double>& offsets_hz) {
    PhaseNoiseEstimate out;
    out.offsets_hz = offsets_hz;
    for (double f : offsets_hz) {
        const double lo = 0.95 * f;
        const double hi = 1.05 * f;
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < avg.freq_hz.size(); ++i) {
            if (avg.freq_hz[i] >= lo && avg.freq_hz[i] <= hi) {
                acc += avg.psd[i];
                ++count;
            }
        }
        if (count == 0) {
            // fall back to the nearest bin
            std::size_t best = 0;
            double dist = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < avg.freq_hz.size(); ++i) {
                const double d = std::abs(avg.freq_hz[i] - f);
                if (d < dist) {
                    dist = d;
                    best = i;
                }
            }
            acc = avg.psd[best];
            count = 1;
        }
        const double s_phi = acc / static_cast<double>(count);
        const double floor_db = -300.0;
        const double l = s_phi > 0.0 ? 10.0 * std::log10(0.5 * s_phi) : floor_db;
        out.l_dbc_per_hz.push_back(std::max(l, floor_db));
    }
    return out;
}

inline std::size_t welch_segment_length(std::size_t trace_len) {
    std::size_t nfft = 1;
    while (nfft * 2 <= trace_len && nfft < 8192) {
        nfft *= 2;
    }
    return nfft;
}

}  // namespace detail

/// Ensemble phase-noise estimate from baseband phase traces.
inline PhaseNoiseEstimate estimate_phase_noise(const std::vector<PhaseTrace>& ensemble,
                                               const std::vector<double>& offsets_hz) {
    if (ensemble.size() < 10) {
        throw std::invalid_argument("estimate_phase_noise: need >= 10 realizations, got " +
                                    std::to_string(ensemble.size()));
    }
    const double fs = ensemble.front().fs;
    const double duration = ensemble.front().duration();
    for (const auto& t : ensemble) {
        if (t.fs != fs || t.phase.size() != ensemble.front().phase.size()) {
            throw std::invalid_argument("estimate_phase_noise: mixed-format ensemble");
        }
    }
    for (double f : offsets_hz) {
        if (f < 1.0 / duration) {
            throw std::invalid_argument("estimate_phase_noise: offset " + std::to_string(f) +
                                        " Hz below 1/duration (" +
                                        std::to_string(1.0 / duration) + " Hz)");
        }
        if (f >= fs / 2.0) {
            throw std::invalid_argument("estimate_phase_noise: offset beyond Nyquist");
        }
    }
    const std::size_t nfft = detail::welch_segment_length(ensemble.front().phase.size());
    PsdEstimate avg;
    for (const auto& t : ensemble) {
        PsdEstimate e = welch_psd(t.phase, fs, nfft);
        if (avg.psd.empty()) {
            avg = e;
            continue;
        }
        for (std::size_t i = 0; i < avg.psd.size(); ++i) {
            avg.psd[i] += e.psd[i];
        }
    }
    for (double& p : avg.psd) {
        p /= static_cast<double>(ensemble.size());
    }
    return detail::read_offsets(avg, offsets_hz);
}

/// IQ-demodulate a passband waveform into its phase. `decim` must be even so
/// the boxcar decimator nulls the 2*f_c image exactly at fs/2.
inline PhaseTrace demodulate_phase(const Waveform& w, double f_carrier_hz, std::size_t decim) {
    if (decim < 2 || decim % 2 != 0) {
        throw std::invalid_argument("demodulate_phase: decim must be even and >= 2");
    }
    if (w.samples.size() < decim) {
        throw std::invalid_argument("demodulate_phase: waveform shorter than one decimate");
    }
    const double w_c = 2.0 * std::numbers::pi * f_carrier_hz;
    const std::size_t n_out = w.samples.size() / decim;
    PhaseTrace trace;
    trace.fs = w.fs / static_cast<double>(decim);
    trace.phase.resize(n_out);
    double prev = 0.0;
    for (std::size_t j = 0; j < n_out; ++j) {
        double i_acc = 0.0;
        double q_acc = 0.0;
        for (std::size_t k = j * decim; k < (j + 1) * decim; ++k) {
            const double t = w.time_at(k);
            i_acc += 2.0 * w.samples[k] * std::cos(w_c * t);
            q_acc += -2.0 * w.samples[k] * std::sin(w_c * t);
        }
        double phi = std::atan2(q_acc, i_acc);
        // unwrap against the previous sample
        while (phi - prev > std::numbers::pi) phi -= 2.0 * std::numbers::pi;
        while (phi - prev < -std::numbers::pi) phi += 2.0 * std::numbers::pi;
        trace.phase[j] = phi;
        prev = phi;
    }
    return trace;
}

/// Ensemble phase-noise estimate straight from passband waveforms.
inline PhaseNoiseEstimate estimate_phase_noise(const std::vector<Waveform>& ensemble,
                                               double f_carrier_hz,
                                               const std::vector<double>& offsets_hz,
                                               std::size_t decim = 2048) {
    if (ensemble.size() < 10) {
        throw std::invalid_argument("estimate_phase_noise: need >= 10 realizations, got " +
                                    std::to_string(ensemble.size()));
    }
    std::vector<PhaseTrace> traces;
    traces.reserve(ensemble.size());
    for (const auto& w : ensemble) {
        traces.push_back(demodulate_phase(w, f_carrier_hz, decim));
    }
    return estimate_phase_noise(traces, offsets_hz);
}

/// Least-squares slope of L(f) between two offsets, in dB per decade.
inline double pn_slope_db_per_decade(const std::vector<PhaseTrace>& ensemble, double f_lo_hz,
                                     double f_hi_hz, int points = 7) {
    if (points < 2) {
        throw std::invalid_argument("pn_slope_db_per_decade: need >= 2 points");
    }
    std::vector<double> offsets(points);
    for (int i = 0; i < points; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(points - 1);
        offsets[i] = f_lo_hz * std::pow(f_hi_hz / f_lo_hz, frac);
    }
    const PhaseNoiseEstimate est = estimate_phase_noise(ensemble, offsets);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = std::log10(offsets[i]);
        const double y = est.l_dbc_per_hz[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(points);
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace spinsim
