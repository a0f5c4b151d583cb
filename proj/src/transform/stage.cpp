#include "wavegain/transform/stage.hpp"

#include <string>
#include <vector>

namespace wavegain {
namespace {

template <typename Scalar>
using Triplets = std::vector<Eigen::Triplet<Scalar>>;

template <typename Scalar>
SparseOp<Scalar> from_triplets(Index rows, Index cols, const Triplets<Scalar>& t) {
  SparseOp<Scalar> op(rows, cols);
  op.setFromTriplets(t.begin(), t.end());  // duplicates are summed
  op.makeCompressed();
  return op;
}

std::vector<double> taps(std::span<const double> h, Index first) {
  std::vector<double> out;
  for (Index k = first; k < static_cast<Index>(h.size()); k += 2) out.push_back(h[k]);
  return out;
}

double tree_alignment(std::span<const double> ha, std::span<const double> hb) {
  double s = 0.0;
  for (std::size_t k = 0; k < ha.size(); ++k) s += ha[k] * hb[k];
  return s;
}

void require_even_pair(std::span<const double> ha, std::span<const double> hb, const char* what) {
  if (ha.size() != hb.size() || ha.size() % 2 != 0 || ha.empty()) {
    throw DimensionError(std::string(what) + ": q-shift filters must be even length and equal size");
  }
}

}  // namespace

template <typename Scalar>
SparseOp<Scalar> filter_operator(std::span<const double> h, Index n) {
  const Index m = static_cast<Index>(h.size());
  const Index centre = (m - 1) / 2;
  Triplets<Scalar> t;
  t.reserve(static_cast<std::size_t>(n * m));
  for (Index o = 0; o < n; ++o) {
    for (Index k = 0; k < m; ++k) {
      t.emplace_back(o, reflect_index(o + centre - k, n), static_cast<Scalar>(h[k]));
    }
  }
  return from_triplets(n, n, t);
}

template <typename Scalar>
SparseOp<Scalar> decimation_operator(std::span<const double> h, Index n, Index tree_offset) {
  if (n % 2 != 0) throw DimensionError("filter_decimate: odd extent " + std::to_string(n));
  if (tree_offset != 0 && tree_offset != 1) throw DimensionError("filter_decimate: tree_offset must be 0 or 1");
  const Index m = static_cast<Index>(h.size());
  const Index centre = (m - 1) / 2;
  Triplets<Scalar> t;
  for (Index k = 0; k < n / 2; ++k) {
    const Index o = 2 * k + tree_offset;
    for (Index j = 0; j < m; ++j) t.emplace_back(k, reflect_index(o + centre - j, n), static_cast<Scalar>(h[j]));
  }
  return from_triplets(n / 2, n, t);
}

template <typename Scalar>
SparseOp<Scalar> interpolation_operator(std::span<const double> h, Index n, Index tree_offset) {
  if (tree_offset != 0 && tree_offset != 1) throw DimensionError("upsample_filter: tree_offset must be 0 or 1");
  const Index m = static_cast<Index>(h.size());
  const Index centre = (m - 1) / 2;
  const Index out = 2 * n;
  Triplets<Scalar> t;
  for (Index o = 0; o < out; ++o) {
    for (Index j = 0; j < m; ++j) {
      const Index src = reflect_index(o + centre - j, out);
      if ((src - tree_offset) % 2 == 0) t.emplace_back(o, (src - tree_offset) / 2, static_cast<Scalar>(h[j]));
    }
  }
  return from_triplets(out, n, t);
}

template <typename Scalar>
SparseOp<Scalar> qshift_decimation_operator(std::span<const double> ha, std::span<const double> hb, Index n) {
  require_even_pair(ha, hb, "qshift_decimate");
  if (n % 4 != 0) throw DimensionError("qshift_decimate: extent must be a multiple of 4, got " + std::to_string(n));
  const Index m = static_cast<Index>(ha.size());
  const Index q = m / 2;
  const auto hao = taps(ha, 0), hae = taps(ha, 1), hbo = taps(hb, 0), hbe = taps(hb, 1);
  // Extended sample t of the composite signal maps to x[reflect(t - m)];
  // filtering positions are t_i = 5 + 4i.
  auto ext = [&](Index tpos) { return reflect_index(tpos - m, n); };
  auto tpos = [](Index i) { return 5 + 4 * i; };
  const Index a_phase = tree_alignment(ha, hb) > 0 ? 0 : 1;
  Triplets<Scalar> t;
  for (Index o = 0; o < n / 4; ++o) {
    for (Index k = 0; k < q; ++k) {
      const Index ti = tpos(o + q - 1 - k);
      t.emplace_back(2 * o + a_phase, ext(ti - 1), static_cast<Scalar>(hao[k]));
      t.emplace_back(2 * o + a_phase, ext(ti - 3), static_cast<Scalar>(hae[k]));
      t.emplace_back(2 * o + 1 - a_phase, ext(ti), static_cast<Scalar>(hbo[k]));
      t.emplace_back(2 * o + 1 - a_phase, ext(ti - 2), static_cast<Scalar>(hbe[k]));
    }
  }
  return from_triplets(n / 2, n, t);
}

template <typename Scalar>
SparseOp<Scalar> qshift_interpolation_operator(std::span<const double> ha, std::span<const double> hb,
                                               Index n) {
  require_even_pair(ha, hb, "qshift_interpolate");
  if (n % 2 != 0) throw DimensionError("qshift_interpolate: odd extent " + std::to_string(n));
  const Index m = static_cast<Index>(ha.size());
  const Index q = m / 2;
  const auto hao = taps(ha, 0), hae = taps(ha, 1), hbo = taps(hb, 0), hbe = taps(hb, 1);
  auto ext = [&](Index tpos) { return reflect_index(tpos - q, n); };
  const bool aligned = tree_alignment(ha, hb) > 0;
  Triplets<Scalar> t;
  if (q % 2 == 0) {
    auto tpos = [](Index i) { return 3 + 2 * i; };
    for (Index o = 0; o < n / 2; ++o) {
      for (Index k = 0; k < q; ++k) {
        const Index ti = tpos(o + q - 1 - k);
        const Index ta = aligned ? ti : ti - 1;
        const Index tb = aligned ? ti - 1 : ti;
        t.emplace_back(4 * o, ext(tb - 2), static_cast<Scalar>(hae[k]));
        t.emplace_back(4 * o + 1, ext(ta - 2), static_cast<Scalar>(hbe[k]));
        t.emplace_back(4 * o + 2, ext(tb), static_cast<Scalar>(hao[k]));
        t.emplace_back(4 * o + 3, ext(ta), static_cast<Scalar>(hbo[k]));
      }
    }
  } else {
    auto tpos = [](Index i) { return 2 + 2 * i; };
    for (Index o = 0; o < n / 2; ++o) {
      for (Index k = 0; k < q; ++k) {
        const Index ti = tpos(o + q - 1 - k);
        const Index ta = aligned ? ti : ti - 1;
        const Index tb = aligned ? ti - 1 : ti;
        t.emplace_back(4 * o, ext(tb), static_cast<Scalar>(hao[k]));
        t.emplace_back(4 * o + 1, ext(ta), static_cast<Scalar>(hbo[k]));
        t.emplace_back(4 * o + 2, ext(tb), static_cast<Scalar>(hae[k]));
        t.emplace_back(4 * o + 3, ext(ta), static_cast<Scalar>(hbe[k]));
      }
    }
  }
  return from_triplets(2 * n, n, t);
}

namespace {

template <typename Scalar, typename Op>
Tensor<Scalar> apply_axis_impl(const Op& op, Index in_extent, Index out_extent, const Tensor<Scalar>& x, int axis) {
  if (axis < 0) axis += x.rank();
  if (axis < 0 || axis >= x.rank()) throw DimensionError("axis out of range for " + to_string(x.shape()));
  if (x.dim(axis) != in_extent) {
    throw DimensionError("stage expects extent " + std::to_string(in_extent) + " along axis " +
                         std::to_string(axis) + ", got " + to_string(x.shape()));
  }
  Index outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= x.dim(a);
  for (int a = axis + 1; a < x.rank(); ++a) inner *= x.dim(a);
  Shape out_shape = x.shape();
  out_shape[axis] = out_extent;
  Tensor<Scalar> y(out_shape);
  if (inner == 1) {
    Eigen::Map<const RowMatrix<Scalar>> xm(x.data(), outer, in_extent);
    Eigen::Map<RowMatrix<Scalar>> ym(y.data(), outer, out_extent);
    ym.noalias() = xm * op.transpose();
    return y;
  }
  for (Index o = 0; o < outer; ++o) {
    Eigen::Map<const RowMatrix<Scalar>> xm(x.data() + o * in_extent * inner, in_extent, inner);
    Eigen::Map<RowMatrix<Scalar>> ym(y.data() + o * out_extent * inner, out_extent, inner);
    ym.noalias() = op * xm;
  }
  return y;
}

}  // namespace

template <typename Scalar>
Tensor<Scalar> apply_along_axis(const SparseOp<Scalar>& op, const Tensor<Scalar>& x, int axis) {
  return apply_axis_impl(op, op.cols(), op.rows(), x, axis);
}

template <typename Scalar>
Tensor<Scalar> apply_transpose_along_axis(const SparseOp<Scalar>& op, const Tensor<Scalar>& x, int axis) {
  const SparseOp<Scalar> t = op.transpose();
  return apply_axis_impl(t, op.rows(), op.cols(), x, axis);
}

namespace {
Index axis_extent(const Shape& s, int axis) {
  const int r = static_cast<int>(s.size());
  if (axis < 0) axis += r;
  if (axis < 0 || axis >= r) throw DimensionError("axis out of range for " + to_string(s));
  return s[axis];
}
}  // namespace

template <typename Scalar>
Tensor<Scalar> filter_decimate(const Tensor<Scalar>& x, std::span<const double> h, int axis, Index tree_offset) {
  const Index n = axis_extent(x.shape(), axis);
  return apply_along_axis(decimation_operator<Scalar>(h, n, tree_offset), x, axis);
}

template <typename Scalar>
Tensor<Scalar> filter_decimate_adjoint(const Tensor<Scalar>& g, std::span<const double> h, int axis,
                                       Index tree_offset) {
  const Index n = 2 * axis_extent(g.shape(), axis);
  return apply_transpose_along_axis(decimation_operator<Scalar>(h, n, tree_offset), g, axis);
}

template <typename Scalar>
Tensor<Scalar> upsample_filter(const Tensor<Scalar>& x, std::span<const double> h, int axis, Index tree_offset) {
  const Index n = axis_extent(x.shape(), axis);
  return apply_along_axis(interpolation_operator<Scalar>(h, n, tree_offset), x, axis);
}

template <typename Scalar>
Tensor<Scalar> upsample_filter_adjoint(const Tensor<Scalar>& g, std::span<const double> h, int axis,
                                       Index tree_offset) {
  const Index out = axis_extent(g.shape(), axis);
  if (out % 2 != 0) throw DimensionError("upsample_filter_adjoint: odd extent " + std::to_string(out));
  return apply_transpose_along_axis(interpolation_operator<Scalar>(h, out / 2, tree_offset), g, axis);
}

#define WAVEGAIN_INSTANTIATE(S)                                                                          \
  template SparseOp<S> filter_operator<S>(std::span<const double>, Index);                               \
  template SparseOp<S> decimation_operator<S>(std::span<const double>, Index, Index);                    \
  template SparseOp<S> interpolation_operator<S>(std::span<const double>, Index, Index);                 \
  template SparseOp<S> qshift_decimation_operator<S>(std::span<const double>, std::span<const double>, Index); \
  template SparseOp<S> qshift_interpolation_operator<S>(std::span<const double>, std::span<const double>,     \
                                                        Index);                                          \
  template Tensor<S> apply_along_axis<S>(const SparseOp<S>&, const Tensor<S>&, int);                     \
  template Tensor<S> apply_transpose_along_axis<S>(const SparseOp<S>&, const Tensor<S>&, int);           \
  template Tensor<S> filter_decimate<S>(const Tensor<S>&, std::span<const double>, int, Index);          \
  template Tensor<S> filter_decimate_adjoint<S>(const Tensor<S>&, std::span<const double>, int, Index);  \
  template Tensor<S> upsample_filter<S>(const Tensor<S>&, std::span<const double>, int, Index);          \
  template Tensor<S> upsample_filter_adjoint<S>(const Tensor<S>&, std::span<const double>, int, Index);
WAVEGAIN_INSTANTIATE(float)
WAVEGAIN_INSTANTIATE(double)
#undef WAVEGAIN_INSTANTIATE

}  // namespace wavegain
