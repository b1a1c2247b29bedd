#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "spinsim/resonance.hpp"

using namespace spinsim;
using Catch::Matchers::WithinRel;

// Expected values below are CODATA 2018 arithmetic:
//   mu_B/h   = 1.39962449361e10 Hz/T
//   k_B/h    = 2.08366191239e10 Hz/K
//   k_B      = 8.617333262e-5 eV/K

TEST_CASE("zeeman splitting at the 60 GHz operating point") {
    const auto z = zeeman_splitting(2.0, 2.143);
    CHECK_THAT(z.energy_ev, WithinRel(2.48090e-4, 1e-4));
    CHECK_THAT(z.larmor_hz, WithinRel(5.99879e10, 1e-4));
}

TEST_CASE("zeeman splitting at 1 T and 0 T") {
    const auto z1 = zeeman_splitting(2.0, 1.0);
    CHECK_THAT(z1.energy_ev, WithinRel(1.157676e-4, 1e-5));
    CHECK_THAT(z1.larmor_hz, WithinRel(2.799249e10, 1e-5));

    const auto z0 = zeeman_splitting(2.0, 0.0);
    CHECK(z0.energy_ev == 0.0);
    CHECK(z0.larmor_hz == 0.0);
}

TEST_CASE("zeeman splitting rejects bad domain") {
    CHECK_THROWS_AS(zeeman_splitting(2.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(zeeman_splitting(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(zeeman_splitting(-2.0, 1.0), std::invalid_argument);
}

TEST_CASE("thermal splitting floor") {
    const auto t3 = min_splitting_for_temperature(3.0);
    CHECK_THAT(t3.energy_ev, WithinRel(2.5852e-4, 1e-4));
    CHECK_THAT(t3.frequency_hz, WithinRel(6.251e10, 1e-3));

    const auto t0 = min_splitting_for_temperature(0.0);
    CHECK(t0.energy_ev == 0.0);
    CHECK(t0.frequency_hz == 0.0);

    const auto t01 = min_splitting_for_temperature(0.1);
    CHECK_THAT(t01.energy_ev, WithinRel(8.617e-6, 1e-3));
    CHECK_THAT(t01.frequency_hz, WithinRel(2.0837e9, 1e-3));

    CHECK_THROWS_AS(min_splitting_for_temperature(-1.0), std::invalid_argument);
}

TEST_CASE("pi/2 durations at the two paper operating points") {
    CHECK_THAT(rotation_duration(std::numbers::pi / 2, 750e6), WithinRel(333.33e-12, 1e-4));
    CHECK_THAT(rotation_duration(std::numbers::pi / 2, 12e9), WithinRel(20.833e-12, 1e-4));
    CHECK(rotation_duration(0.0, 1e9) == 0.0);
    CHECK_THROWS_AS(rotation_duration(std::numbers::pi, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(rotation_duration(std::numbers::pi, -1.0), std::invalid_argument);
}

TEST_CASE("rabi frequency from linear drive amplitude") {
    CHECK_THAT(rabi_from_field(2.0, 53.6e-3), WithinRel(750e6, 1e-3));
    CHECK(rabi_from_field(2.0, 0.0) == 0.0);
    CHECK_THAT(rabi_from_field(2.0, 1e-3), WithinRel(13.996e6, 1e-3));
    CHECK_THROWS_AS(rabi_from_field(2.0, -1e-3), std::invalid_argument);
}

TEST_CASE("field/rabi round trip") {
    for (double b1 : {1e-6, 5.36e-2, 0.3, 2.0}) {
        CHECK_THAT(field_from_rabi(2.0, rabi_from_field(2.0, b1)), WithinRel(b1, 1e-12));
    }
}

TEST_CASE("zeeman linearity in B0") {
    for (double b0 : {0.1, 1.0, 2.143, 7.7}) {
        const auto a = zeeman_splitting(2.0, b0);
        const auto b = zeeman_splitting(2.0, 2.0 * b0);
        CHECK_THAT(b.energy_ev, WithinRel(2.0 * a.energy_ev, 1e-12));
    }
}

TEST_CASE("rotation duration is linear in angle") {
    const double f = 750e6;
    CHECK(rotation_duration(std::numbers::pi, f) ==
          2.0 * rotation_duration(std::numbers::pi / 2, f));
}

TEST_CASE("spin system derives consistent fields") {
    const SpinSystem s(2.0, 1.0);
    CHECK_THAT(s.zeeman_ev, WithinRel(zeeman_splitting(2.0, 1.0).energy_ev, 1e-15));
    CHECK_THAT(s.larmor_hz * constants::planck * constants::joule_to_ev,
               WithinRel(s.zeeman_ev, 1e-12));
}

TEST_CASE("drive spec round trip") {
    const auto d = DriveSpec::from_rabi(2.0, 750e6);
    CHECK_THAT(d.b1_tesla, WithinRel(53.586e-3, 1e-3));
    const auto d2 = DriveSpec::from_field(2.0, d.b1_tesla);
    CHECK_THAT(d2.f_rabi_hz, WithinRel(750e6, 1e-12));
}
