#pragma once

// One-dimensional multirate building blocks. Every stage is a fixed linear map
// between signal lengths and is materialised as a sparse matrix, so the
// adjoint of a stage is exactly its transpose (symmetric extension folds back
// into the boundary samples).

#include <Eigen/SparseCore>

#include <span>

#include "wavegain/core/tensor.hpp"

namespace wavegain {

template <typename Scalar>
using SparseOp = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

/// Half-sample symmetric reflection of index i into [0, n): ... 1 0 | 0 1 ... n-1 | n-1 n-2 ...
inline Index reflect_index(Index i, Index n) {
  const Index period = 2 * n;
  Index k = i % period;
  if (k < 0) k += period;
  return k < n ? k : period - 1 - k;
}

/// n x n. y[o] = sum_k h[k] x[reflect(o + (m-1)/2 - k)] for a length-m filter.
template <typename Scalar>
SparseOp<Scalar> filter_operator(std::span<const double> h, Index n);

/// n/2 x n. Rows tree_offset, tree_offset+2, ... of filter_operator.
template <typename Scalar>
SparseOp<Scalar> decimation_operator(std::span<const double> h, Index n, Index tree_offset);

/// 2n x n. Zero-interleave onto phase tree_offset, then filter_operator(h, 2n).
template <typename Scalar>
SparseOp<Scalar> interpolation_operator(std::span<const double> h, Index n, Index tree_offset);

/// n/2 x n, n % 4 == 0. Q-shift decimation of a composite signal holding both
/// trees: `ha` filters one tree, `hb` the other, outputs interleaved. Boundary
/// reflection crosses trees.
template <typename Scalar>
SparseOp<Scalar> qshift_decimation_operator(std::span<const double> ha, std::span<const double> hb, Index n);

/// 2n x n, n even. Q-shift interpolation back to the composite signal.
template <typename Scalar>
SparseOp<Scalar> qshift_interpolation_operator(std::span<const double> ha, std::span<const double> hb,
                                               Index n);

/// Applies `op` (rows = output extent, cols = input extent) along `axis`.
template <typename Scalar>
Tensor<Scalar> apply_along_axis(const SparseOp<Scalar>& op, const Tensor<Scalar>& x, int axis);

/// Applies op^T along `axis`.
template <typename Scalar>
Tensor<Scalar> apply_transpose_along_axis(const SparseOp<Scalar>& op, const Tensor<Scalar>& x, int axis);

// Tensor-level forms of the level-1 stage and its adjoints.

template <typename Scalar>
Tensor<Scalar> filter_decimate(const Tensor<Scalar>& x, std::span<const double> h, int axis, Index tree_offset);

template <typename Scalar>
Tensor<Scalar> filter_decimate_adjoint(const Tensor<Scalar>& g, std::span<const double> h, int axis,
                                       Index tree_offset);

template <typename Scalar>
Tensor<Scalar> upsample_filter(const Tensor<Scalar>& x, std::span<const double> h, int axis, Index tree_offset);

template <typename Scalar>
Tensor<Scalar> upsample_filter_adjoint(const Tensor<Scalar>& g, std::span<const double> h, int axis,
                                       Index tree_offset);

}  // namespace wavegain
