#include "doctest.h"
#include "wavegain/core/errors.hpp"
#include "wavegain/transform/cost.hpp"

using namespace wavegain;

TEST_CASE("mac count from filter lengths") {
  // near_sym_a: 5 and 7 taps analysis, 7 and 5 synthesis; qshift_a: 10 taps.
  LayerCostSpec s;
  s.levels = 1;
  auto m = mac_count(s);
  CHECK(m.forward_per_pixel == 3.0 * 12);
  CHECK(m.inverse_per_pixel == 3.0 * 12);

  s.levels = 2;
  m = mac_count(s);
  CHECK(m.forward_per_level == std::vector<double>{36.0, 20.0});
  CHECK(m.forward_per_pixel == 56.0);
  CHECK(m.inverse_per_pixel == 56.0);
  // Within 20% of the quoted ~60 for both directions each.
  CHECK(m.forward_per_pixel >= 48.0);
  CHECK(m.forward_per_pixel <= 72.0);

  s.levels = 4;
  m = mac_count(s);
  CHECK(m.forward_per_pixel == doctest::Approx(36.0 + 20.0 + 5.0 + 1.25));

  s.levels = 2;
  s.filter_set = "near_sym_b_bp";
  CHECK_THROWS_AS(mac_count(s), ConfigError);
  s.filter_set = "near_sym_b+qshift_b";
  m = mac_count(s);
  CHECK(m.forward_per_pixel == 3.0 * (13 + 19) + 2.0 * 14);
}

TEST_CASE("overhead does not depend on F; conv baseline is K^2 F") {
  LayerCostSpec s;
  s.channels_in = 3;
  double first = -1.0;
  for (int f : {1, 6, 16, 64}) {
    s.channels_out = f;
    const auto m = mac_count(s);
    if (first < 0) first = m.overhead_per_pixel();
    CHECK(m.overhead_per_pixel() == first);
    CHECK(m.conv_equivalent == 25.0 * f);
    // 6 complex 1x1 gains at 1/4 and 1/16 of the pixels, 3x3 lowpass at 1/4.
    CHECK(m.mixing_per_input_pixel == doctest::Approx(f * (24.0 / 4 + 24.0 / 16 + 9.0 / 4)));
    CHECK(m.overhead_per_input_pixel == doctest::Approx(56.0 + f / 3.0 * 56.0));
    CHECK(m.layer_per_input_pixel == doctest::Approx(m.overhead_per_input_pixel + m.mixing_per_input_pixel));
  }
  s.conv_size = 3;
  CHECK(mac_count(s).conv_equivalent == 9.0 * s.channels_out);
  s.levels = 0;
  CHECK_THROWS_AS(mac_count(s), ConfigError);
}
