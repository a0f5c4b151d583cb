#pragma once

#include "wavegain/core/tensor.hpp"

namespace wavegain {

/// Multichannel 2-D cross-correlation, stride 1, zero padding `pad` on every
/// side:
///
///   y[n,f,i,j] = sum_{c,u,v} w[f,c,u,v] * x[n,c,i+u-pad,j+v-pad]
///
/// x: [N x C x H x W], w: [F x C x K x K'], y: [N x F x (H+2pad-K+1) x (W+2pad-K'+1)].
/// Implemented as im2col followed by a GEMM.
template <typename Scalar>
Tensor<Scalar> correlate2d(const Tensor<Scalar>& x, const Tensor<Scalar>& w, Index pad);

/// Transpose of correlate2d with respect to x (the input-gradient map).
template <typename Scalar>
Tensor<Scalar> correlate2d_input_adjoint(const Tensor<Scalar>& dy, const Tensor<Scalar>& w, Index pad,
                                         const Shape& input_shape);

/// Transpose of correlate2d with respect to w, summed over the batch axis.
template <typename Scalar>
Tensor<Scalar> correlate2d_weight_adjoint(const Tensor<Scalar>& x, const Tensor<Scalar>& dy, Index pad,
                                          Index kernel_rows, Index kernel_cols);

}  // namespace wavegain
