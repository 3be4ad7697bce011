// Compare simulated and closed-form light shifts of a pi/2 box pulse and a
// pi/2 Gaussian pulse at a few Doppler ratios.
#include <cstdio>

#include "lightshift/lightshift.hpp"

int main() {
  using namespace lightshift;

  const PulseShape box = half_pi_box(0.05);
  const PulseShape gauss = half_pi_gaussian(8.0);
  const IntegratorOptions opts;

  std::printf("%6s %14s %14s %14s %14s\n", "ratio", "box num", "box eq",
              "gauss num", "gauss eq");
  for (double ratio : {4.0, 6.5, 10.0, 25.0}) {
    const auto params = dimensionless_params(ratio);
    std::printf("%6.2f %14.6e %14.6e %14.6e %14.6e\n", ratio,
                simulate_light_shift(params, box, opts).phase,
                bragg_box_shift(peak_rabi(box), params).phase,
                simulate_light_shift(params, gauss, opts).phase,
                adiabatic_shift(gauss, params).phase);
  }
}
