#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lightshift/analytic.hpp"

using namespace lightshift;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string pole_detail(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    if (e.code() == ErrorCode::Pole)
      return e.detail();
    return "other:" + std::string(to_string(e.code()));
  }
  return "none";
}

} // namespace

TEST_CASE("closed forms at reference points", "[analytic]") {
  // Rational values worked out by hand.
  CHECK_THAT(raman_phase(0.1, 1.0, 2.0), WithinRel(0.009375, 1e-15));
  CHECK_THAT(bragg_box_phase(0.1, 1.0, 10.0),
             WithinRel(0.1 * 241.0 / 5280.0, 1e-15));
  CHECK_THAT(bragg_box_first_term(0.1, 1.0, 10.0),
             WithinRel(0.1 / 22.0, 1e-15));
  CHECK_THAT(adiabatic_phase(0.025, 1.0, 10.0),
             WithinRel(0.025 / 1320.0, 1e-15));

  const auto r = bragg_box_shift(0.1, dimensionless_params(10.0));
  CHECK(r.method == ShiftMethod::BraggBoxAnalytic);
  CHECK_THAT(r.phase, WithinRel(4.564393939393939e-3, 1e-14));
  CHECK_THAT(r.phi, WithinRel(0.025, 1e-15));
}

TEST_CASE("formulas are unit-free", "[analytic][property]") {
  // Rescaling all frequencies by c leaves the phase unchanged.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> nu(3.0, 100.0), c(1e-3, 1e5);
  for (int i = 0; i < 500; ++i) {
    const double x = nu(rng), k = c(rng);
    REQUIRE_THAT(bragg_box_phase(0.1 * k, k, x * k),
                 WithinRel(bragg_box_phase(0.1, 1.0, x), 1e-13));
    REQUIRE_THAT(raman_phase(0.1 * k, k, x * k),
                 WithinRel(raman_phase(0.1, 1.0, x), 1e-13));
    REQUIRE_THAT(adiabatic_phase(0.01, k, x * k),
                 WithinRel(adiabatic_phase(0.01, 1.0, x), 1e-13));
  }
}

TEST_CASE("poles are reported per denominator", "[analytic]") {
  CHECK(pole_detail([] { raman_phase(0.1, 1.0, 0.0); }) == "nu");
  CHECK(pole_detail([] { raman_phase(0.1, 1.0, -2.0); }) == "2omega_K+nu");
  CHECK(pole_detail([] { bragg_box_phase(0.1, 1.0, -1.0); }) == "omega_K+nu");
  CHECK(pole_detail([] { bragg_box_phase(0.1, 1.0, 1e-9); }) == "nu");
  CHECK(pole_detail([] { adiabatic_phase(0.1, 1.0, -2.0 + 1e-8); }) ==
        "2omega_K+nu");
  CHECK(pole_detail([] { bragg_box_first_term(0.1, 1.0, 0.0); }) == "none");
  CHECK(pole_detail([] { bragg_box_phase(0.1, 1.0, 1e-5); }) == "none");
  CHECK(pole_detail([] {
          bragg_box_shift(0.1, dimensionless_params(0.0));
        }) == "nu");
  CHECK(pole_detail([] {
          raman_shift(0.1, LatticeParams{0.0, 1.0, 0.0, Direction::Plus});
        }) == "other:invalid-input");
}

TEST_CASE("minus direction is the plus formula at -nu", "[analytic][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> nu(2.5, 200.0);
  for (int i = 0; i < 500; ++i) {
    const double x = nu(rng);
    const auto p = dimensionless_params(x, 0.0, Direction::Minus);
    REQUIRE_THAT(bragg_box_shift(0.1, p).phase,
                 WithinAbs(bragg_box_phase(0.1, 1.0, -x), 1e-15));
    REQUIRE_THAT(raman_shift(0.1, p).phase,
                 WithinAbs(raman_phase(0.1, 1.0, -x), 1e-15));
    REQUIRE_THAT(adiabatic_shift(0.02, p).phase,
                 WithinAbs(adiabatic_phase(0.02, 1.0, -x), 1e-15));
    // The lower sign gives a negative, larger-magnitude shift.
    REQUIRE(bragg_box_shift(0.1, p).phase < 0.0);
    REQUIRE(std::abs(bragg_box_shift(0.1, p).phase) >
            bragg_box_shift(0.1, dimensionless_params(x)).phase);
  }
}

TEST_CASE("laser phase does not enter the closed forms", "[analytic]") {
  for (double th : {0.0, 0.3, 1.0, 2.5}) {
    const auto p = dimensionless_params(7.0, th);
    CHECK(bragg_box_shift(0.1, p).phase ==
          bragg_box_shift(0.1, dimensionless_params(7.0)).phase);
    CHECK(adiabatic_shift(0.01, p).phase ==
          adiabatic_shift(0.01, dimensionless_params(7.0)).phase);
  }
}

TEST_CASE("box second term equals the adiabatic form with Phi = Omega/4omega",
          "[analytic][property]") {
  for (double x = 2.5; x < 200.0; x *= 1.37)
    CHECK_THAT(bragg_box_second_term(0.2, 1.0, x),
               WithinRel(adiabatic_phase(0.2 / 4.0, 1.0, x), 1e-14));
}

TEST_CASE("Bragg box shift approaches twice the Raman shift", "[analytic]") {
  double prev = 0.0;
  for (double x : {10.0, 30.0, 100.0, 1000.0, 1e5}) {
    const double ratio = bragg_box_phase(0.1, 1.0, x) / raman_phase(0.1, 1.0, x);
    CHECK(std::abs(ratio - 2.0) < 3.0 / x);
    if (prev != 0.0)
      CHECK(std::abs(ratio - 2.0) < std::abs(prev - 2.0));
    prev = ratio;
  }
}

TEST_CASE("first term dominates at large Doppler", "[analytic]") {
  for (double x : {5.0, 20.0, 100.0}) {
    const double a = bragg_box_first_term(0.1, 1.0, x);
    const double b = bragg_box_second_term(0.1, 1.0, x);
    CHECK(b > 0.0);
    CHECK(b / a < 1.0 / (x * x));
  }
}

TEST_CASE("asymptotic forms match the closed forms", "[analytic]") {
  const auto p = dimensionless_params(20.0);
  CHECK_THAT(asymptotic_shift(AsymptoticModel::BoxLeading, 0.2, p).phase,
             WithinRel(5e-3, 1e-15));
  CHECK_THAT(asymptotic_shift(AsymptoticModel::AdiabaticLeading, 0.2, p).phase,
             WithinRel(2.5e-5, 1e-15));
  for (double x : {1e3, 1e4, 1e5}) {
    const auto q = dimensionless_params(x);
    CHECK_THAT(asymptotic_shift(AsymptoticModel::BoxLeading, 0.1, q).phase,
               WithinRel(bragg_box_shift(0.1, q).phase, 2.0 / x));
    CHECK_THAT(
        asymptotic_shift(AsymptoticModel::AdiabaticLeading, 0.01, q).phase,
        WithinRel(adiabatic_shift(0.01, q).phase, 4.0 / x));
  }
  CHECK_THROWS_AS(asymptotic_shift(AsymptoticModel::BoxLeading, 0.1,
                                   dimensionless_params(0.0)),
                  Error);
}

TEST_CASE("adiabatic shift is below the box shift of the same Rabi frequency",
          "[analytic][property]") {
  for (double x = 3.0; x <= 100.0; x += 0.5) {
    const auto p = dimensionless_params(x);
    CHECK(adiabatic_shift(0.125 / 4.0, p).phase < bragg_box_shift(0.125, p).phase);
  }
}

TEST_CASE("method names round-trip", "[analytic]") {
  for (auto m : {ShiftMethod::RamanAnalytic, ShiftMethod::BraggBoxAnalytic,
                 ShiftMethod::AdiabaticAnalytic, ShiftMethod::BoxAsymptotic,
                 ShiftMethod::AdiabaticAsymptotic, ShiftMethod::Numeric})
    CHECK(parse_shift_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_shift_method("nope"), Error);
}

TEST_CASE("approach to the leading-order laws", "[analytic][property]") {
  double prev = INFINITY;
  for (double x : {10.0, 30.0, 100.0, 300.0}) {
    const auto p = dimensionless_params(x);
    const double lead = asymptotic_shift(AsymptoticModel::BoxLeading, 0.1, p).phase;
    const double gap = std::abs(bragg_box_shift(0.1, p).phase - lead) / lead;
    CHECK(gap < prev);
    prev = gap;
  }
  // Doubling the Doppler frequency divides the adiabatic shift by about 8.
  const double ratio = adiabatic_phase(0.025, 1.0, 20.0) / adiabatic_phase(0.025, 1.0, 40.0);
  CHECK_THAT(ratio, WithinRel(8.0, 0.15));
  // The first addend carries more than 95% of the box shift from 20 on.
  for (double x = 20.0; x <= 1000.0; x *= 1.5)
    CHECK(bragg_box_first_term(0.1, 1.0, x) > 0.95 * bragg_box_phase(0.1, 1.0, x));
}
