#pragma once

#include <cstdint>

#include "wavegain/core/gradcheck.hpp"
#include "wavegain/nn/model.hpp"

namespace wavegain::nn {

/// Finite differences of L = <layer(x), r> against backward(), over every
/// parameter entry and every input entry. r is N(0,1) from `seed`.
GradcheckReport layer_gradcheck(Layer<double>& layer, Tensor<double> x, std::uint64_t seed, double step = 1e-5);

/// Conv2d on a 2x3x6x6 input, K=3, four filters, pad 1. With
/// single_precision the analytic gradients come from a 32-bit copy of the
/// layer while the finite differences stay in 64-bit.
GradcheckReport conv2d_gradcheck(std::uint64_t seed, bool single_precision = false);

/// Largest |A^T - B| where A is the conv as a dense matrix on C x rows x cols
/// (bias zeroed) and B is its backward pass applied to basis vectors.
double conv2d_dense_transpose_error(Index channels, Index filters, Index kernel, Index pad, Index rows, Index cols,
                                    std::uint64_t seed);

/// End-to-end loss gradient of a freshly initialized model on a random batch
/// of `samples` N(0,1) images, checked on `subset` parameter entries drawn
/// uniformly over all parameters.
GradcheckReport model_gradcheck(const ModelConfig& config, std::uint64_t seed, Index samples = 4, Index subset = 20,
                                double step = 1e-5);

}  // namespace wavegain::nn
