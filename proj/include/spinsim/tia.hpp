#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsim/detail/parallel.hpp"
#include "spinsim/rng.hpp"
#include "spinsim/waveform.hpp"

// Behavioral transimpedance amplifier: n identical real poles with the
// composite -3 dB point pinned at f3db, dc gain 10^(z21/20) ohm, and white
// input-referred current noise.

namespace spinsim {

struct TiaModel {
    double z21_db_ohm = 108.5;
    double f3db_hz = 18e9;
    int n_poles = 3;  // input stage + two Cherry-Hooper stages
    double in_noise_a_rthz = 0.89e-12;
    std::string temperature_tag = "300K";

    void validate() const {
        if (!(z21_db_ohm > 0.0)) {
            throw std::invalid_argument("TiaModel: z21 must be > 0 dBohm");
        }
        if (!(f3db_hz > 0.0)) {
            throw std::invalid_argument("TiaModel: f3db must be > 0");
        }
        if (n_poles < 1) {
            throw std::invalid_argument("TiaModel: need >= 1 pole");
        }
        if (in_noise_a_rthz < 0.0) {
            throw std::invalid_argument("TiaModel: input noise must be >= 0");
        }
    }

    double z0_ohm() const { return std::pow(10.0, z21_db_ohm / 20.0); }

    static TiaModel at_300k() { return {}; }

    static TiaModel at_77k() {
        TiaModel m;
        m.z21_db_ohm = 110.7;
        m.f3db_hz = 25e9;
        m.in_noise_a_rthz = 0.44e-12;
        m.temperature_tag = "77K";
        return m;
    }
};

namespace detail {

/// Squared magnitude of one discrete pole y[k] = a*y[k-1] + (1-a)*x[k].
inline double one_pole_mag2(double a, double f, double fs) {
    const double c = std::cos(2.0 * std::numbers::pi * f / fs);
    return (1.0 - a) * (1.0 - a) / (1.0 - 2.0 * a * c + a * a);
}

/// Pole coefficient such that the n-pole cascade is exactly -3 dB at f3db.
/// |H1(f3db)|^2 = 2^(-1/n) is monotone in a, so bisection suffices.
inline double tia_pole_coeff(const TiaModel& m, double fs) {
    const double target = std::pow(2.0, -1.0 / static_cast<double>(m.n_poles));
    double lo = 0.0;
    double hi = 1.0 - 1e-12;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (one_pole_mag2(mid, m.f3db_hz, fs) > target) {
            lo = mid;  // too little smoothing -> response too flat
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Transimpedance magnitude |Z(f)| [ohm] of the discrete model at sample
/// rate fs. Output noise PSD follows |Z(f)|^2 * in_noise^2.
inline double tia_magnitude(const TiaModel& m, double f_hz, double fs) {
    m.validate();
    const double a = detail::tia_pole_coeff(m, fs);
    return m.z0_ohm() *
           std::pow(detail::one_pole_mag2(a, f_hz, fs),
                    0.5 * static_cast<double>(m.n_poles));
}

/// Amplify a current waveform. With a seed, white Gaussian input-referred
/// noise of one-sided density in_noise is added ahead of the filter.
inline Waveform tia_response(const Waveform& current, const TiaModel& m,
                             std::optional<std::uint64_t> seed = std::nullopt) {
    m.validate();
    if (current.unit != SignalUnit::ampere) {
        throw std::invalid_argument("tia_response: input must be a current waveform");
    }
    if (current.fs < 10.0 * m.f3db_hz) {
        throw std::invalid_argument("tia_response: fs must be >= 10*f3db (" +
                                    std::to_string(10.0 * m.f3db_hz) + " Hz)");
    }
    const double a = detail::tia_pole_coeff(m, current.fs);
    const double z0 = m.z0_ohm();
    const double sigma =
        seed ? m.in_noise_a_rthz * std::sqrt(current.fs / 2.0) : 0.0;
    Rng rng(seed.value_or(0));

    std::vector<double> y(current.samples.size());
    std::vector<double> state(static_cast<std::size_t>(m.n_poles), 0.0);
    for (std::size_t k = 0; k < y.size(); ++k) {
        double x = current.samples[k];
        if (sigma > 0.0) {
            x += sigma * rng.gaussian();
        }
        for (auto& s : state) {
            s = a * s + (1.0 - a) * x;
            x = s;
        }
        y[k] = z0 * x;
    }
    return Waveform(std::move(y), current.fs, current.t0, SignalUnit::volt);
}

/// Averaging kernel of boxcar(window) o filter: the exact per-sample weights
/// the detector applies to input noise. Used for the predicted decision-noise
/// standard deviation.
inline double detect_noise_std(const TiaModel& m, double fs, double window_s) {
    m.validate();
    const double a = detail::tia_pole_coeff(m, fs);
    const auto window_n = static_cast<std::size_t>(std::llround(window_s * fs));
    if (window_n == 0) {
        throw std::invalid_argument("detect_noise_std: window shorter than one sample");
    }
    // impulse response of the pole cascade, truncated once the tail is dust
    std::vector<double> h;
    {
        std::vector<double> state(static_cast<std::size_t>(m.n_poles), 0.0);
        double tail = 1.0;
        for (std::size_t k = 0; k < 64 * 1024 && tail > 1e-12; ++k) {
            double x = (k == 0) ? 1.0 : 0.0;
            for (auto& s : state) {
                s = a * s + (1.0 - a) * x;
                x = s;
            }
            h.push_back(x);
            tail -= x;
        }
    }
    // c_j = (1/m) sum_{k in window} h[k - j]; via prefix sums of h
    std::vector<double> prefix(h.size() + 1, 0.0);
    for (std::size_t k = 0; k < h.size(); ++k) {
        prefix[k + 1] = prefix[k] + h[k];
    }
    auto h_prefix = [&](std::ptrdiff_t n) {
        if (n <= 0) return 0.0;
        return prefix[std::min<std::size_t>(static_cast<std::size_t>(n), h.size())];
    };
    double sum_c2 = 0.0;
    const auto wn = static_cast<std::ptrdiff_t>(window_n);
    const auto hn = static_cast<std::ptrdiff_t>(h.size());
    for (std::ptrdiff_t j = -hn; j < wn; ++j) {
        const double c = (h_prefix(wn - j) - h_prefix(-j)) / static_cast<double>(window_n);
        sum_c2 += c * c;
    }
    const double sigma_in = m.in_noise_a_rthz * std::sqrt(fs / 2.0);
    return sigma_in * m.z0_ohm() * std::sqrt(sum_c2);
}

struct DetectResult {
    bool detected = false;
    double mean_v = 0.0;
    double threshold_v = 0.0;
    double noise_std_v = 0.0;
    double snr = 0.0;
};

/// Boxcar-integrate the TIA output over [start, start+window] and threshold
/// the mean. The reported snr is mean / predicted noise std.
inline DetectResult detect(const Waveform& v, double start_s, double window_s,
                           double threshold_v, const TiaModel& m) {
    if (v.unit != SignalUnit::volt) {
        throw std::invalid_argument("detect: expected a voltage waveform");
    }
    const double slack = 0.5 * v.dt();
    if (start_s < v.t0 - slack || start_s + window_s > v.end_time() + slack ||
        !(window_s > 0.0)) {
        throw std::invalid_argument("detect: window outside the waveform support");
    }
    const auto k0 = static_cast<std::size_t>(std::llround((start_s - v.t0) * v.fs));
    const auto k1 = static_cast<std::size_t>(std::llround((start_s + window_s - v.t0) * v.fs));
    double mean = 0.0;
    for (std::size_t k = k0; k < k1 && k < v.samples.size(); ++k) {
        mean += v.samples[k];
    }
    mean /= static_cast<double>(std::max<std::size_t>(k1 - k0, 1));

    DetectResult r;
    r.mean_v = mean;
    r.threshold_v = threshold_v;
    r.noise_std_v = detect_noise_std(m, v.fs, window_s);
    r.snr = r.noise_std_v > 0.0 ? mean / r.noise_std_v
                                : std::numeric_limits<double>::infinity();
    r.detected = mean > threshold_v;
    return r;
}

struct SweepCell {
    double i_peak_a = 0.0;
    double window_s = 0.0;
    double error_rate = 0.0;
    double snr = 0.0;
};

/// Monte-Carlo misclassification rate of plateau-vs-nothing detection with a
/// mid-level threshold, per (i_peak, window) cell. Balanced hypotheses; both
/// are simulated per trial with derived seeds.
inline std::vector<SweepCell> readout_error_sweep(const std::vector<double>& i_peak_grid,
                                                  const std::vector<double>& window_grid,
                                                  const TiaModel& m, int trials,
                                                  std::uint64_t seed, int jobs = 1) {
    m.validate();
    if (trials < 100) {
        throw std::invalid_argument("readout_error_sweep: need >= 100 trials");
    }
    const double fs = 10.0 * m.f3db_hz;
    const double lead = 2.0 / m.f3db_hz;  // let the filter settle before integrating
    std::vector<SweepCell> cells;
    for (double i_peak : i_peak_grid) {
        for (double window : window_grid) {
            const auto n = static_cast<std::size_t>(std::llround((lead + window) * fs));
            const Waveform on(std::vector<double>(n, i_peak), fs, 0.0, SignalUnit::ampere);
            const Waveform off(std::vector<double>(n, 0.0), fs, 0.0, SignalUnit::ampere);
            const double plateau = i_peak * m.z0_ohm();
            const double threshold = 0.5 * plateau;

            std::vector<int> errors(static_cast<std::size_t>(trials), 0);
            const std::uint64_t cell_seed =
                derive_seed(seed, std::hash<double>{}(i_peak) ^ std::hash<double>{}(window));
            detail::parallel_for_indexed(errors.size(), jobs, [&](std::size_t t) {
                const auto v_on = tia_response(on, m, derive_seed(cell_seed, 2 * t));
                const auto v_off = tia_response(off, m, derive_seed(cell_seed, 2 * t + 1));
                int e = 0;
                if (!detect(v_on, lead, window, threshold, m).detected) {
                    ++e;
                }
                if (detect(v_off, lead, window, threshold, m).detected) {
                    ++e;
                }
                errors[t] = e;
            });
            int total = 0;
            for (int e : errors) {
                total += e;
            }
            SweepCell cell;
            cell.i_peak_a = i_peak;
            cell.window_s = window;
            cell.error_rate = static_cast<double>(total) / (2.0 * trials);
            cell.snr = plateau / detect_noise_std(m, fs, window);
            cells.push_back(cell);
        }
    }
    return cells;
}

}  // namespace spinsim
