#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "spinsim/labframe.hpp"

using namespace spinsim;
using Catch::Matchers::WithinAbs;

TEST_CASE("zero drive leaves populations untouched") {
    const double f_larmor = 1.0;
    std::vector<double> zeros(5000, 0.0);
    const Waveform w(std::move(zeros), 100.0, 0.0, SignalUnit::tesla);
    const auto u = evolve_labframe(w, f_larmor, 2.0);
    CHECK_THAT(u.apply(Vec2::spin_down()).prob_down(), WithinAbs(1.0, 1e-12));
    // pure sigma_z evolution: off-diagonals vanish
    CHECK_THAT(std::abs(u.matrix().m01), WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(u.matrix().m10), WithinAbs(0.0, 1e-12));
}

TEST_CASE("undersampled waveform is rejected with the required rate") {
    std::vector<double> s(10, 0.0);
    const Waveform w(std::move(s), 10.0, 0.0, SignalUnit::tesla);
    CHECK_THROWS_WITH(evolve_labframe(w, 1.0, 2.0),
                      Catch::Matchers::ContainsSubstring("50"));
}

TEST_CASE("wrong unit is rejected") {
    std::vector<double> s(10, 0.0);
    const Waveform w(std::move(s), 1000.0, 0.0, SignalUnit::volt);
    CHECK_THROWS_AS(evolve_labframe(w, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("resonant quarter-period drive at ratio 80 approaches P_up = 1/2") {
    const double ratio = 80.0;
    const Waveform drive = linear_drive_pi2_waveform(1.0, ratio, 0.0, 512.0);
    const auto u = evolve_labframe(drive, 1.0, 2.0);
    CHECK_THAT(u.apply(Vec2::spin_down()).prob_up(), WithinAbs(0.5, 2e-3));
}

TEST_CASE("halving the step changes the propagator below 1e-6 at ratio 80") {
    const Waveform coarse = linear_drive_pi2_waveform(1.0, 80.0, 0.0, 2048.0);
    const Waveform fine = linear_drive_pi2_waveform(1.0, 80.0, 0.0, 4096.0);
    const auto uc = evolve_labframe(coarse, 1.0, 2.0);
    const auto uf = evolve_labframe(fine, 1.0, 2.0);
    CHECK(max_abs_diff(uc.matrix(), uf.matrix()) < 1e-6);
}

TEST_CASE("lab evolution stays unitary over long pulses") {
    const Waveform drive = linear_drive_pi2_waveform(1.0, 300.0, 0.3, 256.0);
    const auto u = evolve_labframe(drive, 1.0, 2.0);
    CHECK(unitarity_defect(u.matrix()) < 1e-10);
}

TEST_CASE("rwa floor at ratio 5 sits in the expected band") {
    const double inf = rwa_gate_infidelity_worst(5.0, 8);
    CHECK(inf > 3e-3);
    CHECK(inf < 1.2e-2);
}

TEST_CASE("rwa infidelity shrinks toward the rotating-frame limit") {
    const double i80 = rwa_gate_infidelity(80.0, 0.0);
    CHECK(i80 < 2e-4);

    double prev = 1.0;
    for (double ratio : {1e1, 1e2, 1e3, 1e4}) {
        const double inf = rwa_gate_infidelity(ratio, 0.0, 512.0);
        CHECK(inf < prev);
        prev = inf;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("ratio below 2 is rejected") {
    CHECK_THROWS_AS(rwa_gate_infidelity(1.5, 0.0), std::invalid_argument);
}
