#include "wavegain/core/conv.hpp"

namespace wavegain {
namespace {

struct Geometry {
  Index n, c, h, w, f, kh, kw, pad, ho, wo;

  Geometry(const Shape& in, Index filters, Index kr, Index kc, Index p)
      : n(in.at(0)), c(in.at(1)), h(in.at(2)), w(in.at(3)), f(filters), kh(kr), kw(kc), pad(p),
        ho(h + 2 * p - kr + 1), wo(w + 2 * p - kc + 1) {
    if (ho <= 0 || wo <= 0) throw DimensionError("correlate2d: kernel larger than padded input");
  }
  Index patch() const { return c * kh * kw; }
  Index pixels() const { return ho * wo; }
};

// Rows of `cols` are (c, u, v); columns are output pixels (i, j).
template <typename Scalar>
void im2col(const Scalar* x, const Geometry& g, Matrix<Scalar>& cols) {
  cols.setZero(g.patch(), g.pixels());
  for (Index ch = 0; ch < g.c; ++ch) {
    const Scalar* xc = x + ch * g.h * g.w;
    for (Index u = 0; u < g.kh; ++u) {
      for (Index v = 0; v < g.kw; ++v) {
        const Index row = (ch * g.kh + u) * g.kw + v;
        for (Index i = 0; i < g.ho; ++i) {
          const Index si = i + u - g.pad;
          if (si < 0 || si >= g.h) continue;
          for (Index j = 0; j < g.wo; ++j) {
            const Index sj = j + v - g.pad;
            if (sj < 0 || sj >= g.w) continue;
            cols(row, i * g.wo + j) = xc[si * g.w + sj];
          }
        }
      }
    }
  }
}

template <typename Scalar>
void col2im(const Matrix<Scalar>& cols, const Geometry& g, Scalar* x) {
  for (Index ch = 0; ch < g.c; ++ch) {
    Scalar* xc = x + ch * g.h * g.w;
    for (Index u = 0; u < g.kh; ++u) {
      for (Index v = 0; v < g.kw; ++v) {
        const Index row = (ch * g.kh + u) * g.kw + v;
        for (Index i = 0; i < g.ho; ++i) {
          const Index si = i + u - g.pad;
          if (si < 0 || si >= g.h) continue;
          for (Index j = 0; j < g.wo; ++j) {
            const Index sj = j + v - g.pad;
            if (sj < 0 || sj >= g.w) continue;
            xc[si * g.w + sj] += cols(row, i * g.wo + j);
          }
        }
      }
    }
  }
}

template <typename Scalar>
Eigen::Map<const RowMatrix<Scalar>> weight_matrix(const Tensor<Scalar>& w) {
  return {w.data(), w.dim(0), w.size() / w.dim(0)};
}

}  // namespace

template <typename Scalar>
Tensor<Scalar> correlate2d(const Tensor<Scalar>& x, const Tensor<Scalar>& w, Index pad) {
  if (x.rank() != 4 || w.rank() != 4 || x.dim(1) != w.dim(1)) {
    throw DimensionError("correlate2d: input " + to_string(x.shape()) + " vs weights " + to_string(w.shape()));
  }
  const Geometry g(x.shape(), w.dim(0), w.dim(2), w.dim(3), pad);
  Tensor<Scalar> y({g.n, g.f, g.ho, g.wo});
  const auto wm = weight_matrix(w);
  Matrix<Scalar> cols;
  for (Index s = 0; s < g.n; ++s) {
    im2col(x.data() + s * g.c * g.h * g.w, g, cols);
    Eigen::Map<RowMatrix<Scalar>> ys(y.data() + s * g.f * g.pixels(), g.f, g.pixels());
    ys.noalias() = wm * cols;
  }
  return y;
}

template <typename Scalar>
Tensor<Scalar> correlate2d_input_adjoint(const Tensor<Scalar>& dy, const Tensor<Scalar>& w, Index pad,
                                         const Shape& input_shape) {
  const Geometry g(input_shape, w.dim(0), w.dim(2), w.dim(3), pad);
  if (dy.shape() != Shape{g.n, g.f, g.ho, g.wo}) {
    throw DimensionError("correlate2d_input_adjoint: gradient shape " + to_string(dy.shape()));
  }
  Tensor<Scalar> dx(input_shape);
  const auto wm = weight_matrix(w);
  Matrix<Scalar> cols;
  for (Index s = 0; s < g.n; ++s) {
    Eigen::Map<const RowMatrix<Scalar>> dys(dy.data() + s * g.f * g.pixels(), g.f, g.pixels());
    cols.noalias() = wm.transpose() * dys;
    col2im(cols, g, dx.data() + s * g.c * g.h * g.w);
  }
  return dx;
}

template <typename Scalar>
Tensor<Scalar> correlate2d_weight_adjoint(const Tensor<Scalar>& x, const Tensor<Scalar>& dy, Index pad,
                                          Index kernel_rows, Index kernel_cols) {
  const Geometry g(x.shape(), dy.dim(1), kernel_rows, kernel_cols, pad);
  if (dy.shape() != Shape{g.n, g.f, g.ho, g.wo}) {
    throw DimensionError("correlate2d_weight_adjoint: gradient shape " + to_string(dy.shape()));
  }
  Tensor<Scalar> dw({g.f, g.c, g.kh, g.kw});
  Eigen::Map<RowMatrix<Scalar>> dwm(dw.data(), g.f, g.patch());
  Matrix<Scalar> cols;
  for (Index s = 0; s < g.n; ++s) {
    im2col(x.data() + s * g.c * g.h * g.w, g, cols);
    Eigen::Map<const RowMatrix<Scalar>> dys(dy.data() + s * g.f * g.pixels(), g.f, g.pixels());
    dwm.noalias() += dys * cols.transpose();
  }
  return dw;
}

#define WAVEGAIN_INSTANTIATE(S)                                                                    \
  template Tensor<S> correlate2d<S>(const Tensor<S>&, const Tensor<S>&, Index);                    \
  template Tensor<S> correlate2d_input_adjoint<S>(const Tensor<S>&, const Tensor<S>&, Index,       \
                                                  const Shape&);                                   \
  template Tensor<S> correlate2d_weight_adjoint<S>(const Tensor<S>&, const Tensor<S>&, Index, Index, Index);
WAVEGAIN_INSTANTIATE(float)
WAVEGAIN_INSTANTIATE(double)
#undef WAVEGAIN_INSTANTIATE

}  // namespace wavegain
