#include "wavegain/gainlayer/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>

#include "wavegain/core/random.hpp"

namespace wavegain {

Matrix<double> build_dense_operator(const GainParams<double>& p, Index rows, Index cols, const FilterSet& fs) {
  if (rows * cols > kDenseOperatorMaxPixels) {
    throw ConfigError("build_dense_operator: " + std::to_string(rows) + "x" + std::to_string(cols) +
                      " exceeds the " + std::to_string(kDenseOperatorMaxPixels) + "-pixel limit");
  }
  const Index c = p.in_channels(), f = p.out_channels(), n_in = c * rows * cols, n_out = f * rows * cols;
  Tensor<double> basis({n_in, c, rows, cols});
  for (Index k = 0; k < n_in; ++k) basis.values()[k * n_in + k] = 1.0;
  const auto y = gain_forward(basis, p, fs);
  // Sample k of y is column k.
  return Eigen::Map<const RowMatrix<double>>(y.data(), n_in, n_out).transpose();
}

Tensor<double> impulse_response(const GainParams<double>& p, Index size, const FilterSet& fs) {
  if (size < 1 || size % 2 == 0) throw ConfigError("impulse_response: size must be odd");
  const Index c = p.in_channels(), f = p.out_channels(), mid = size / 2;
  Tensor<double> x({c, c, size, size});
  for (Index k = 0; k < c; ++k) x(k, k, mid, mid) = 1.0;
  const auto y = gain_forward(x, p, fs);  // [C x F x size x size]
  Tensor<double> out({f, c, size, size});
  for (Index i = 0; i < f; ++i)
    for (Index k = 0; k < c; ++k) out.plane(i * c + k) = y.plane(k * f + i);
  return out;
}

double box_energy_fraction(const RowMatrix<double>& plane, Index box) {
  const double total = plane.squaredNorm();
  if (total == 0.0) return 0.0;
  const Index r0 = plane.rows() / 2 - box / 2, c0 = plane.cols() / 2 - box / 2;
  return plane.block(std::max<Index>(r0, 0), std::max<Index>(c0, 0), std::min(box, plane.rows()),
                     std::min(box, plane.cols()))
             .squaredNorm() /
         total;
}

RowMatrix<double> power_spectrum(const RowMatrix<double>& plane) {
  using Complex = std::complex<double>;
  const Index rows = plane.rows(), cols = plane.cols();
  Eigen::FFT<double> fft;
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> spec(rows, cols);
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> in, out;
  for (Index r = 0; r < rows; ++r) {
    in = plane.row(r).transpose().cast<Complex>();
    fft.fwd(out, in);
    spec.row(r) = out.transpose();
  }
  for (Index c = 0; c < cols; ++c) {
    in = spec.col(c);
    fft.fwd(out, in);
    spec.col(c) = out;
  }
  return spec.cwiseAbs2();
}

double bin_frequency(Index k, Index n) {
  const Index wrapped = 2 * k > n ? k - n : k;
  return 2.0 * M_PI * static_cast<double>(wrapped) / static_cast<double>(n);
}

namespace {

template <typename Pred>
double spectral_fraction(const RowMatrix<double>& plane, Pred in_region) {
  const auto ps = power_spectrum(plane);
  double inside = 0.0, total = 0.0;
  for (Index r = 0; r < ps.rows(); ++r) {
    const double wr = bin_frequency(r, ps.rows());
    for (Index c = 0; c < ps.cols(); ++c) {
      const double wc = bin_frequency(c, ps.cols());
      total += ps(r, c);
      if (in_region(wr, wc)) inside += ps(r, c);
    }
  }
  return total == 0.0 ? 0.0 : inside / total;
}

}  // namespace

double annulus_energy_fraction(const RowMatrix<double>& plane, double lo, double hi) {
  return spectral_fraction(plane, [&](double wr, double wc) {
    const double m = std::max(std::abs(wr), std::abs(wc));
    return m > lo && m < hi;
  });
}

bool in_subband_region(double w_row, double w_col, int scale, int subband) {
  const double hi = M_PI / std::ldexp(1.0, scale - 1), lo = M_PI / std::ldexp(1.0, scale);
  double u = w_col, v = -w_row;
  if (v < 0 || (v == 0 && u < 0)) {
    u = -u;
    v = -v;
  }
  const double au = std::abs(u);
  const bool v_band = v >= lo && v <= hi, v_low = v < lo;
  const bool u_band = au >= lo && au <= hi, u_low = au < lo;
  switch (subband) {
    case 3: return u > 0 && u_band && v_low;
    case 4: return u > 0 && u_band && v_band;
    case 5: return u >= 0 && u_low && v_band;
    case 0: return u < 0 && u_low && v_band;
    case 1: return u < 0 && u_band && v_band;
    case 2: return u < 0 && u_band && v_low;
    default: throw ConfigError("subband index must be in [0, 6)");
  }
}

double subband_region_energy_fraction(const RowMatrix<double>& plane, int scale, int subband) {
  return spectral_fraction(plane, [&](double wr, double wc) { return in_subband_region(wr, wc, scale, subband); });
}

RowMatrix<double> sinusoid(Index n, double w_row, double w_col, double phase) {
  RowMatrix<double> img(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) img(r, c) = std::cos(w_row * r + w_col * c + phase);
  return img;
}

std::vector<std::vector<double>> highpass_energy_split(const RowMatrix<double>& image, int levels,
                                                       const FilterSet& fs) {
  Dtcwt<double> t(fs, levels, image.rows(), image.cols());
  Tensor<double> x({image.rows(), image.cols()});
  x.plane(0) = image;
  const auto p = t.forward(x);
  std::vector<std::vector<double>> split(levels, std::vector<double>(6, 0.0));
  double total = 0.0;
  for (int j = 0; j < levels; ++j) {
    const auto& band = p.highpass[j];
    const Index hw = band.re.dim(-2) * band.re.dim(-1);
    for (int s = 0; s < 6; ++s) {
      const double e = band.re.values().segment(s * hw, hw).square().sum() +
                       band.im.values().segment(s * hw, hw).square().sum();
      split[j][s] = e;
      total += e;
    }
  }
  if (total > 0)
    for (auto& row : split)
      for (auto& e : row) e /= total;
  return split;
}

DofEstimate estimate_dof(const std::vector<Vector<double>>& shapes) {
  if (shapes.size() < 2) throw NumericError("estimate_dof: need at least two shapes");
  const Index dim = shapes[0].size();
  Matrix<double> unit(dim, static_cast<Index>(shapes.size()));
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (shapes[i].size() != dim) throw DimensionError("estimate_dof: shapes differ in size");
    const double norm = shapes[i].norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericError("estimate_dof: zero or non-finite shape");
    unit.col(static_cast<Index>(i)) = shapes[i] / norm;
  }
  const Matrix<double> gram = unit.transpose() * unit;
  DofEstimate est;
  const Index n = gram.rows();
  est.correlations.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) est.correlations.push_back(gram(i, j));
  double sum = 0.0;
  for (double r : est.correlations) sum += r;
  est.mean = sum / static_cast<double>(est.correlations.size());
  double ss = 0.0;
  for (double r : est.correlations) ss += (r - est.mean) * (r - est.mean);
  est.variance = ss / static_cast<double>(est.correlations.size());
  if (est.variance < 1e-12) throw NumericError("estimate_dof: correlations have no spread (degenerate shapes)");
  est.dof = 1.0 / est.variance;
  return est;
}

std::vector<RowMatrix<double>> random_scale2_shapes(int num_shapes, std::uint64_t seed, Index size,
                                                    const FilterSet& fs) {
  std::vector<RowMatrix<double>> shapes;
  shapes.reserve(static_cast<std::size_t>(num_shapes));
  for (int i = 0; i < num_shapes; ++i) {
    const auto p = scale2_demo_params<double>(Rng::derived(seed, static_cast<std::uint64_t>(i)).engine()());
    shapes.emplace_back(impulse_response(p, size, fs).plane(0));
  }
  return shapes;
}

DofEstimate corr_dof(int num_shapes, std::uint64_t seed, const FilterSet& fs, Index size) {
  if (num_shapes < 2) throw ConfigError("corr_dof: need at least two shapes");
  std::vector<Vector<double>> flat;
  for (const auto& s : random_scale2_shapes(num_shapes, seed, size, fs)) {
    flat.emplace_back(Eigen::Map<const Vector<double>>(s.data(), s.size()));
  }
  return estimate_dof(flat);
}

DofEstimate white_noise_dof(int num_vectors, int d, std::uint64_t seed) {
  if (num_vectors < 2 || d < 1) throw ConfigError("white_noise_dof: need >= 2 vectors of dimension >= 1");
  Rng rng(seed);
  std::vector<Vector<double>> v(static_cast<std::size_t>(num_vectors), Vector<double>(d));
  for (auto& x : v)
    for (Index i = 0; i < d; ++i) x[i] = rng.normal();
  return estimate_dof(v);
}

std::pair<double, double> dof_confidence_interval(const DofEstimate& est, Index num_shapes, int resamples,
                                                  std::uint64_t seed, double level) {
  const Index n = num_shapes;
  if (n < 3 || static_cast<Index>(est.correlations.size()) != n * (n - 1) / 2 || resamples < 10 || !(level > 0.0) ||
      !(level < 1.0)) {
    throw ConfigError("dof_confidence_interval: inconsistent shape count, resamples or level");
  }
  // Pair (i < j) sits at i*n - i*(i+1)/2 + (j - i - 1) in est.correlations.
  auto corr = [&](Index i, Index j) {
    if (i > j) std::swap(i, j);
    return est.correlations[static_cast<std::size_t>(i * n - i * (i + 1) / 2 + (j - i - 1))];
  };
  Rng rng(seed);
  std::vector<Index> pick(static_cast<std::size_t>(n));
  std::vector<double> dofs;
  for (int b = 0; b < resamples; ++b) {
    for (auto& k : pick) k = static_cast<Index>(rng.engine()() % static_cast<std::uint64_t>(n));
    double sum = 0.0, sq = 0.0;
    Index count = 0;
    for (Index a = 0; a < n; ++a)
      for (Index c = a + 1; c < n; ++c) {
        if (pick[a] == pick[c]) continue;
        const double r = corr(pick[a], pick[c]);
        sum += r;
        sq += r * r;
        ++count;
      }
    if (count < 2) continue;
    const double m = sum / count, var = sq / count - m * m;
    if (var > 1e-12) dofs.push_back(1.0 / var);
  }
  if (dofs.empty()) throw NumericError("dof_confidence_interval: every resample was degenerate");
  std::sort(dofs.begin(), dofs.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(dofs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, dofs.size() - 1);
    return dofs[lo] + (pos - static_cast<double>(lo)) * (dofs[hi] - dofs[lo]);
  };
  return {quantile((1.0 - level) / 2.0), quantile((1.0 + level) / 2.0)};
}

}  // namespace wavegain
