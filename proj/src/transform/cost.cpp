#include "wavegain/transform/cost.hpp"

#include <cmath>

#include "wavegain/core/errors.hpp"

namespace wavegain {

// Level 1 filters the full-size image without decimation: the row pass runs
// both filters on every sample, the column pass runs both on the lo and hi
// images. Levels >= 2 decimate (analysis) or interpolate (synthesis) by two
// per axis; each output sample of an m-tap q-shift filter costs m/2 MACs on
// the interpolating side and m on the decimating side, which works out to 2m
// per sample of the level's composite input either way. Level j >= 2 sees a
// composite image of (H x W) / 4^(j-2).
MacCount mac_count(const LayerCostSpec& spec) {
  if (spec.levels < 1 || spec.channels_in < 1 || spec.channels_out < 1 || spec.gain_size < 1 ||
      spec.lowpass_size < 1 || spec.conv_size < 1) {
    throw ConfigError("mac_count: sizes must be positive");
  }
  const auto fs = load_filter_set(spec.filter_set);
  const double analysis1 = static_cast<double>(fs.level1.h0.size() + fs.level1.h1.size());
  const double synthesis1 = static_cast<double>(fs.level1.g0.size() + fs.level1.g1.size());
  const double q = static_cast<double>(fs.qshift.h0a.size());

  MacCount m;
  m.forward_per_level.push_back(3.0 * analysis1);
  m.inverse_per_level.push_back(3.0 * synthesis1);
  for (int j = 2; j <= spec.levels; ++j) {
    const double area = std::pow(0.25, j - 2);
    m.forward_per_level.push_back(2.0 * q * area);
    m.inverse_per_level.push_back(2.0 * q * area);
  }
  for (double v : m.forward_per_level) m.forward_per_pixel += v;
  for (double v : m.inverse_per_level) m.inverse_per_pixel += v;

  // Complex gain: 4 real MACs per tap; 6 subbands at 4^-j of the pixels.
  // The composite lowpass holds 4^-(J-1) of the pixels.
  const double k2 = static_cast<double>(spec.gain_size) * spec.gain_size;
  double per_pair = 0.0;
  for (int j = 1; j <= spec.levels; ++j) per_pair += 6.0 * 4.0 * k2 * std::pow(0.25, j);
  per_pair += static_cast<double>(spec.lowpass_size) * spec.lowpass_size * std::pow(0.25, spec.levels - 1);
  const double F = spec.channels_out, C = spec.channels_in;
  m.mixing_per_input_pixel = F * per_pair;
  m.overhead_per_input_pixel = m.forward_per_pixel + (F / C) * m.inverse_per_pixel;
  m.layer_per_input_pixel = m.overhead_per_input_pixel + m.mixing_per_input_pixel;
  m.conv_equivalent = static_cast<double>(spec.conv_size) * spec.conv_size * F;
  return m;
}

}  // namespace wavegain
