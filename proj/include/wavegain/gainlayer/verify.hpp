#pragma once

// Verification suites for the gain layer, shared by the tests, the
// acceptance binary and `wavegain selftest` / `wavegain gradcheck`.

#include <cstdint>

#include "wavegain/core/gradcheck.hpp"
#include "wavegain/gainlayer/gain.hpp"

namespace wavegain {

struct GainCheckConfig {
  Index batch = 2, in_channels = 2, out_channels = 3, rows = 8, cols = 8;
  int levels = 1;
  Index lowpass_size = 3;
  Index gain_size = 1;
  std::uint64_t seed = 0;
  std::string filter_set = std::string(kDefaultFilterSet);
};

/// Central differences (step 1e-5) on every gain parameter and every input
/// entry of a glorot-initialised layer, with loss <y, r> for a random r.
/// Analytic gradients come from the Scalar-precision layer; the finite
/// differences always use the double-precision layer, so the float variant
/// measures how far 32-bit backprop strays from the exact derivative.
template <typename Scalar>
GradcheckReport gain_layer_gradcheck(const GainCheckConfig& cfg);

struct DenseOracleReport {
  double transpose_error = 0.0;  // max |A^T dy - gain_backward(dy).dx|
  double forward_error = 0.0;    // max |A x - gain_forward(x)|
};

/// Materialises the layer of `cfg` (batch forced to 1) and compares.
DenseOracleReport dense_operator_check(const GainCheckConfig& cfg);

/// max |gain_forward(x) - x| for identity_params on random x.
double identity_reduction_error(Index channels, Index rows, Index cols, int levels, std::uint64_t seed,
                                const std::string& filter_set = std::string(kDefaultFilterSet));

/// |<gain_forward(x), dy> - <x, dx>| / max(1, |<gain_forward(x), dy>|).
double gain_adjoint_error(const GainCheckConfig& cfg);

}  // namespace wavegain
