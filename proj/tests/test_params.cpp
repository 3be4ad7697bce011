#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "lightshift/params.hpp"

using namespace lightshift;
using Catch::Matchers::WithinRel;

TEST_CASE("recoil and Doppler frequencies from physical input", "[params]") {
  const double hbar = constants::reduced_planck;
  const PhysicalInput in{1.6e7, 1.4e-25, 0.0, hbar};

  SECTION("p0 = hbar K / 2 gives unit Doppler ratio") {
    auto x = in;
    x.initial_momentum_p0 = 0.5 * hbar * x.wavenumber_K;
    const auto p = derive_params(x, 0.0, Direction::Plus);
    CHECK_THAT(doppler_ratio(p), WithinRel(1.0, 1e-12));
    CHECK_THAT(p.recoil_omega_K,
               WithinRel(hbar * 1.6e7 * 1.6e7 / (2 * 1.4e-25), 1e-15));
  }

  SECTION("zero momentum") {
    const auto p = derive_params(in, 0.3, Direction::Minus);
    CHECK(p.doppler_nu_K == 0.0);
    CHECK(doppler_ratio(p) == 0.0);
    CHECK(p.laser_phase_theta == 0.3);
    CHECK(p.direction == Direction::Minus);
  }

  SECTION("non-positive K or M is rejected") {
    auto bad = in;
    bad.wavenumber_K = 0.0;
    CHECK_THROWS_AS(derive_params(bad, 0, Direction::Plus), Error);
    bad = in;
    bad.mass_M = -1.0;
    try {
      derive_params(bad, 0, Direction::Plus);
      FAIL("expected an error");
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::InvalidInput);
      CHECK(e.detail() == "mass_M");
    }
  }
}

TEST_CASE("rubidium preset", "[params]") {
  using Rb = species::Rubidium87;
  const auto p = derive_params(Rb::input(2.0 * Rb::photon_kick()), 0.0,
                               Direction::Plus);
  // The customary 2 pi x 15 kHz is a rounded figure; the D2-line constants
  // give 15.08 kHz.
  CHECK_THAT(p.recoil_omega_K, WithinRel(2 * std::numbers::pi * 15e3, 1e-2));
  CHECK_THAT(doppler_ratio(p), WithinRel(4.0, 1e-12));
  CHECK(Rb::nominal_recoil_omega == 2 * std::numbers::pi * 15e3);
}

TEST_CASE("doppler ratio is the plain quotient", "[params]") {
  CHECK(doppler_ratio(LatticeParams{1.0, 10.0, 0.0, Direction::Plus}) == 10.0);
  CHECK(doppler_ratio(LatticeParams{2.0, 0.0, 0.0, Direction::Plus}) == 0.0);
  CHECK(doppler_ratio(LatticeParams{2.0, -3.0, 0.0, Direction::Plus}) == -1.5);
}

TEST_CASE("effective Doppler follows the direction", "[params]") {
  CHECK(effective_doppler({1.0, 3.0, 0.0, Direction::Plus}) == 3.0);
  CHECK(effective_doppler({1.0, -3.0, 0.0, Direction::Plus}) == 3.0);
  CHECK(effective_doppler({1.0, 3.0, 0.0, Direction::Minus}) == -3.0);
  CHECK(effective_doppler({1.0, -3.0, 0.0, Direction::Minus}) == -3.0);
}

TEST_CASE("derive_params properties over random inputs", "[params][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log10K(5.0, 8.0), log10M(-27.0, -24.0),
      kicks(-50.0, 50.0), scale(-4.0, 4.0);
  for (int i = 0; i < 2000; ++i) {
    PhysicalInput in;
    in.wavenumber_K = std::pow(10.0, log10K(rng));
    in.mass_M = std::pow(10.0, log10M(rng));
    in.initial_momentum_p0 =
        kicks(rng) * in.reduced_planck * in.wavenumber_K;
    const auto p = derive_params(in, 0.0, Direction::Plus);
    const double expected =
        2.0 * in.initial_momentum_p0 / (in.reduced_planck * in.wavenumber_K);
    if (expected != 0.0)
      REQUIRE_THAT(doppler_ratio(p), WithinRel(expected, 1e-12));

    // Scaling p0 scales nu_K by exactly the same factor (c = 2^k is exact).
    const double c = std::ldexp(1.0, static_cast<int>(scale(rng)));
    auto scaled = in;
    scaled.initial_momentum_p0 *= c;
    REQUIRE(derive_params(scaled, 0.0, Direction::Plus).doppler_nu_K ==
            c * p.doppler_nu_K);
  }
}

TEST_CASE("direction parsing", "[params]") {
  CHECK(parse_direction("plus") == Direction::Plus);
  CHECK(parse_direction("minus") == Direction::Minus);
  CHECK_THROWS_AS(parse_direction("sideways"), Error);
}
