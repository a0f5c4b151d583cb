#include "wavegain/transform/verify.hpp"

#include <cmath>

#include "wavegain/core/random.hpp"

namespace wavegain {

double stage_reconstruction_error(const FilterSet& fs, int level, Index n) {
  if (level < 1) throw ConfigError("stage_reconstruction_error: level must be >= 1");
  // A plan whose level-`level` stage sees n rows exposes that stage's
  // matrices along the row axis.
  if (n % 4 != 0 || n < 4) throw DimensionError("stage_reconstruction_error: n must be a positive multiple of 4");
  const Index rows = level == 1 ? n : n << (level - 2);
  Dtcwt<double> t(fs, level, rows, Index{1} << level);
  const auto& a = t.analysis(level - 1);
  const auto& s = t.synthesis(level - 1);
  const Matrix<double> recon = Matrix<double>(s.row_lo * a.row_lo) + Matrix<double>(s.row_hi * a.row_hi);
  return (recon - Matrix<double>::Identity(recon.rows(), recon.cols())).cwiseAbs().maxCoeff();
}

double perfect_reconstruction_error(const FilterSet& fs, int levels, Index channels, Index rows, Index cols,
                                    int trials, std::uint64_t seed) {
  Dtcwt<double> t(fs, levels, rows, cols);
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    const auto x = rng.normal_tensor<double>({channels, rows, cols});
    worst = std::max(worst, max_abs_diff(t.inverse(t.forward(x)), x));
  }
  return worst;
}

namespace {

double dot_mismatch(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

double stage_adjoint_error(const FilterSet& fs, int levels, Index rows, Index cols, int trials, std::uint64_t seed) {
  Dtcwt<double> t(fs, levels, rows, cols);
  Rng rng(seed);
  double worst = 0.0;
  auto check = [&](const SparseOp<double>& op, int axis) {
    // Input extent along `axis` is op.cols(); the other axis is arbitrary.
    const Shape in = axis == 0 ? Shape{op.cols(), 5} : Shape{5, op.cols()};
    const Shape out = axis == 0 ? Shape{op.rows(), 5} : Shape{5, op.rows()};
    const auto x = rng.normal_tensor<double>(in);
    const auto y = rng.normal_tensor<double>(out);
    worst = std::max(worst, dot_mismatch(inner_product(apply_along_axis(op, x, axis), y),
                                         inner_product(x, apply_transpose_along_axis(op, y, axis))));
  };
  for (int k = 0; k < trials; ++k)
    for (int j = 0; j < levels; ++j)
      for (const auto* ops : {&t.analysis(j), &t.synthesis(j)})
        for (const auto* op : {&ops->row_lo, &ops->row_hi, &ops->col_lo, &ops->col_hi})
          for (int axis : {0, 1}) check(*op, axis);
  return worst;
}

AdjointErrors transform_adjoint_errors(const FilterSet& fs, int levels, Index channels, Index rows, Index cols,
                                       int trials, std::uint64_t seed) {
  Dtcwt<double> t(fs, levels, rows, cols);
  Rng rng(seed);
  AdjointErrors e;
  for (int k = 0; k < trials; ++k) {
    const auto x = rng.normal_tensor<double>({channels, rows, cols});
    auto p = t.zeros({channels});
    rng.fill_normal(p.lowpass);
    for (auto& b : p.highpass) {
      rng.fill_normal(b.re);
      rng.fill_normal(b.im);
    }
    e.forward = std::max(e.forward, dot_mismatch(inner_product(t.forward(x), p), inner_product(x, t.forward_adjoint(p))));
    e.inverse = std::max(e.inverse, dot_mismatch(inner_product(t.inverse(p), x), inner_product(p, t.inverse_adjoint(x))));
  }
  return e;
}

}  // namespace wavegain
