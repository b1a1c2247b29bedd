#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

// Seeded RNG with explicit draw algorithms. Distributions are hand-rolled on
// top of the raw 64-bit stream so that results do not depend on the standard
// library's unspecified std::*_distribution implementations.

namespace spinsim {

/// splitmix64; used both as a stream generator and as a seed mixer.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on (0, 1] (never 0, so log() is safe).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Exponential waiting time with the given rate; +inf when rate == 0.
    double exponential(double rate) {
        if (rate <= 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        return -std::log(uniform()) / rate;
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Derive an independent stream seed from (master seed, stream index).
/// Trials seeded this way can run in any order (or in parallel) and still
/// reproduce bit-identical results.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    Rng mixer(master ^ (0x6a09e667f3bcc909ULL + index * 0x9e3779b97f4a7c15ULL));
    mixer.next_u64();
    return mixer.next_u64();
}

}  // namespace spinsim
