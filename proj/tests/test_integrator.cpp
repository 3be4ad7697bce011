#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "lightshift/integrator.hpp"

using namespace lightshift;
using Catch::Matchers::WithinAbs;

namespace {

// y' = i lambda y, exact solution e^{i lambda t}
struct Rotation {
  double lambda;
  void operator()(double, std::span<const cplx> y, std::span<cplx> dy) const {
    for (std::size_t i = 0; i < y.size(); ++i)
      dy[i] = cplx{0.0, lambda * static_cast<double>(i + 1)} * y[i];
  }
};

// y' = cos(t) y  ->  y = exp(sin t)
struct Driven {
  void operator()(double t, std::span<const cplx> y, std::span<cplx> dy) const {
    dy[0] = std::cos(t) * y[0];
  }
};

auto ignore = [](double, std::span<const cplx>) {};

} // namespace

TEST_CASE("adaptive integrator reproduces exact rotations", "[integrator]") {
  std::vector<cplx> y{1.0, 1.0, 1.0};
  AdaptiveSettings cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  const auto stats = integrate_adaptive(Rotation{1.3}, y, 0.0, 20.0, cfg, ignore);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const cplx exact = std::polar(1.0, 1.3 * static_cast<double>(i + 1) * 20.0);
    CHECK(std::abs(y[i] - exact) < 1e-8);
  }
  CHECK(stats.accepted_steps > 0);
  CHECK(stats.rhs_evaluations >= 6 * stats.accepted_steps);
}

TEST_CASE("adaptive integrator with time-dependent rhs", "[integrator]") {
  std::vector<cplx> y{1.0};
  AdaptiveSettings cfg;
  integrate_adaptive(Driven{}, y, 0.0, 7.0, cfg, ignore);
  CHECK_THAT(y[0].real(), WithinAbs(std::exp(std::sin(7.0)), 1e-9));
  CHECK_THAT(y[0].imag(), WithinAbs(0.0, 1e-15));
}

TEST_CASE("max step is respected and the endpoint is hit exactly",
          "[integrator]") {
  std::vector<cplx> y{1.0};
  AdaptiveSettings cfg;
  cfg.rel_tol = 1e-3;
  cfg.max_step = 0.037;
  double last_t = 0.0;
  std::size_t calls = 0;
  const auto stats = integrate_adaptive(
      Rotation{0.01}, y, 0.0, 3.0, cfg, [&](double t, std::span<const cplx>) {
        CHECK(t > last_t);
        last_t = t;
        ++calls;
      });
  CHECK(stats.largest_step <= 0.037);
  CHECK(last_t == 3.0);
  CHECK(calls == stats.accepted_steps);
}

TEST_CASE("step budget and degenerate intervals", "[integrator]") {
  std::vector<cplx> y{1.0};
  AdaptiveSettings cfg;
  cfg.max_steps = 5;
  cfg.max_step = 0.01;
  try {
    integrate_adaptive(Rotation{1.0}, y, 0.0, 1.0, cfg, ignore);
    FAIL("expected a step-budget error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::IntegrationFailure);
    CHECK(e.detail() == "max_steps");
  }

  std::vector<cplx> z{2.0};
  const auto stats = integrate_adaptive(Rotation{1.0}, z, 1.0, 1.0, {}, ignore);
  CHECK(stats.accepted_steps == 0);
  CHECK(z[0] == cplx{2.0});
}

TEST_CASE("non-finite rhs is reported", "[integrator]") {
  std::vector<cplx> y{1.0};
  auto bad = [](double, std::span<const cplx>, std::span<cplx> dy) {
    dy[0] = std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(integrate_adaptive(bad, y, 0.0, 1.0, {}, ignore), Error);
}

TEST_CASE("classical RK4 is fourth order", "[integrator][property]") {
  auto error_at = [](double h) {
    std::vector<cplx> y{1.0};
    integrate_fixed_rk4(Driven{}, y, 0.0, 4.0, h, ignore);
    return std::abs(y[0] - std::exp(std::sin(4.0)));
  };
  const double e1 = error_at(0.1), e2 = error_at(0.05), e3 = error_at(0.025);
  const double order1 = std::log2(e1 / e2), order2 = std::log2(e2 / e3);
  CHECK(order1 > 3.8);
  CHECK(order1 < 4.2);
  CHECK(order2 > 3.8);
  CHECK(order2 < 4.2);
}

TEST_CASE("RK4 uses the smallest uniform step under the bound",
          "[integrator]") {
  std::vector<cplx> y{1.0};
  const auto stats = integrate_fixed_rk4(Driven{}, y, 0.0, 1.0, 0.3, ignore);
  CHECK(stats.accepted_steps == 4);
  CHECK(stats.largest_step == 0.25);
  CHECK_THROWS_AS(integrate_fixed_rk4(Driven{}, y, 0.0, 1.0, 0.0, ignore), Error);
}
