#pragma once

#include <string>
#include <vector>

#include "wavegain/transform/filters.hpp"

namespace wavegain {

struct LayerCostSpec {
  int channels_in = 1;   // C
  int channels_out = 1;  // F
  int levels = 2;        // J
  int gain_size = 1;     // kh = kw of every highpass gain
  int lowpass_size = 3;  // klp
  int conv_size = 5;     // K of the convolution being replaced
  std::string filter_set = std::string(kDefaultFilterSet);
};

/// Multiplies counted from filter lengths and decimation factors. Additions
/// and the 1/sqrt(2) scalings of the quad-to-complex step are not counted.
struct MacCount {
  // Per pixel of one transformed plane. Neither depends on C or F.
  double forward_per_pixel = 0.0;
  double inverse_per_pixel = 0.0;
  std::vector<double> forward_per_level, inverse_per_level;

  // Per input pixel (C x H x W of them), as for a convolution.
  double mixing_per_input_pixel = 0.0;    // F * (highpass + lowpass gain MACs)
  double overhead_per_input_pixel = 0.0;  // forward + (F / C) * inverse
  double layer_per_input_pixel = 0.0;     // overhead + mixing
  double conv_equivalent = 0.0;           // K^2 F

  double overhead_per_pixel() const { return forward_per_pixel + inverse_per_pixel; }
};

MacCount mac_count(const LayerCostSpec& spec);

}  // namespace wavegain
