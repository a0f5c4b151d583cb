#include "wavegain/transform/dtcwt.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

#include "wavegain/core/npy.hpp"

namespace wavegain {
namespace {

template <typename Scalar>
using Plane = RowMatrix<Scalar>;

// Quad image -> two complex subbands. With a,b,c,d the 2x2 polyphase
// components: z0 = ((a-d) + j(b+c))/sqrt2, z1 = ((a+d) + j(b-c))/sqrt2.
template <typename Scalar>
void quad_to_complex(const Plane<Scalar>& q, Scalar* z0r, Scalar* z0i, Scalar* z1r, Scalar* z1i) {
  const Index h = q.rows() / 2, w = q.cols() / 2;
  const Scalar s = static_cast<Scalar>(std::sqrt(0.5));
  for (Index i = 0; i < h; ++i) {
    for (Index j = 0; j < w; ++j) {
      const Scalar a = q(2 * i, 2 * j), b = q(2 * i, 2 * j + 1);
      const Scalar c = q(2 * i + 1, 2 * j), d = q(2 * i + 1, 2 * j + 1);
      const Index k = i * w + j;
      z0r[k] = (a - d) * s;
      z0i[k] = (b + c) * s;
      z1r[k] = (a + d) * s;
      z1i[k] = (b - c) * s;
    }
  }
}

// Exact transpose (and inverse) of quad_to_complex.
template <typename Scalar>
void complex_to_quad(const Scalar* z0r, const Scalar* z0i, const Scalar* z1r, const Scalar* z1i, Index h, Index w,
                     Plane<Scalar>& q) {
  q.resize(2 * h, 2 * w);
  const Scalar s = static_cast<Scalar>(std::sqrt(0.5));
  for (Index i = 0; i < h; ++i) {
    for (Index j = 0; j < w; ++j) {
      const Index k = i * w + j;
      q(2 * i, 2 * j) = (z0r[k] + z1r[k]) * s;
      q(2 * i, 2 * j + 1) = (z0i[k] + z1i[k]) * s;
      q(2 * i + 1, 2 * j) = (z0i[k] - z1i[k]) * s;
      q(2 * i + 1, 2 * j + 1) = (z1r[k] - z0r[k]) * s;
    }
  }
}

// Subband pairs produced by each quad: horizontal (0,5), diagonal (1,4),
// vertical (2,3).
constexpr int kQuadSubbands[3][2] = {{0, 5}, {2, 3}, {1, 4}};

template <typename Scalar>
struct Quads {
  Plane<Scalar> ll, horizontal, vertical, diagonal;
};

// LL = R_lo X C_lo^T, H = R_hi X C_lo^T, V = R_lo X C_hi^T, D = R_hi X C_hi^T.
template <typename Scalar, typename Ops>
Quads<Scalar> analyse(const Plane<Scalar>& x, const Ops& ops) {
  const Plane<Scalar> lo = ops.row_lo * x;
  const Plane<Scalar> hi = ops.row_hi * x;
  Quads<Scalar> q;
  q.ll = lo * ops.col_lo.transpose();
  q.horizontal = hi * ops.col_lo.transpose();
  q.vertical = lo * ops.col_hi.transpose();
  q.diagonal = hi * ops.col_hi.transpose();
  return q;
}

// X = (R_lo LL + R_hi H) C_lo^T + (R_lo V + R_hi D) C_hi^T.
template <typename Scalar, typename Ops>
Plane<Scalar> synthesise(const Quads<Scalar>& q, const Ops& ops) {
  const Plane<Scalar> y1 = ops.row_lo * q.ll + ops.row_hi * q.horizontal;
  const Plane<Scalar> y2 = ops.row_lo * q.vertical + ops.row_hi * q.diagonal;
  return y1 * ops.col_lo.transpose() + y2 * ops.col_hi.transpose();
}

template <typename Scalar>
void store_quads(const Quads<Scalar>& q, ComplexTensor<Scalar>& band, Index batch_index) {
  const Index h = band.re.dim(-2), w = band.re.dim(-1);
  const Plane<Scalar>* quads[3] = {&q.horizontal, &q.vertical, &q.diagonal};
  for (int k = 0; k < 3; ++k) {
    const Index p0 = (batch_index * 6 + kQuadSubbands[k][0]) * h * w;
    const Index p1 = (batch_index * 6 + kQuadSubbands[k][1]) * h * w;
    quad_to_complex(*quads[k], band.re.data() + p0, band.im.data() + p0, band.re.data() + p1,
                    band.im.data() + p1);
  }
}

template <typename Scalar>
void load_quads(const ComplexTensor<Scalar>& band, Index batch_index, Quads<Scalar>& q) {
  const Index h = band.re.dim(-2), w = band.re.dim(-1);
  Plane<Scalar>* quads[3] = {&q.horizontal, &q.vertical, &q.diagonal};
  for (int k = 0; k < 3; ++k) {
    const Index p0 = (batch_index * 6 + kQuadSubbands[k][0]) * h * w;
    const Index p1 = (batch_index * 6 + kQuadSubbands[k][1]) * h * w;
    complex_to_quad(band.re.data() + p0, band.im.data() + p0, band.re.data() + p1, band.im.data() + p1, h, w,
                    *quads[k]);
  }
}

Shape with_trailing(Shape batch, std::initializer_list<Index> tail) {
  batch.insert(batch.end(), tail.begin(), tail.end());
  return batch;
}

Shape batch_axes(const Shape& s, std::size_t trailing) { return Shape(s.begin(), s.end() - trailing); }

template <typename Scalar>
typename Dtcwt<Scalar>::StageOps transposed(const typename Dtcwt<Scalar>::StageOps& o) {
  return {o.row_lo.transpose(), o.row_hi.transpose(), o.col_lo.transpose(), o.col_hi.transpose()};
}

// Analysis recursion shared by forward (A) and inverse_adjoint (S^T).
template <typename Scalar>
Pyramid<Scalar> run_analysis(const Dtcwt<Scalar>& t, const Tensor<Scalar>& x,
                             const std::vector<typename Dtcwt<Scalar>::StageOps>& ops) {
  const Shape batch = batch_axes(x.shape(), 2);
  Pyramid<Scalar> p = t.zeros(batch);
  const Index planes = x.planes();
  for (Index b = 0; b < planes; ++b) {
    Plane<Scalar> ll = x.plane(b);
    for (int j = 0; j < t.levels(); ++j) {
      Quads<Scalar> q = analyse(ll, ops[j]);
      store_quads(q, p.highpass[j], b);
      ll = std::move(q.ll);
    }
    p.lowpass.plane(b) = ll;
  }
  return p;
}

// Synthesis recursion shared by inverse (S) and forward_adjoint (A^T).
template <typename Scalar>
Tensor<Scalar> run_synthesis(const Dtcwt<Scalar>& t, const Pyramid<Scalar>& p,
                             const std::vector<typename Dtcwt<Scalar>::StageOps>& ops) {
  const Shape batch = batch_axes(p.lowpass.shape(), 2);
  Tensor<Scalar> x(with_trailing(batch, {t.rows(), t.cols()}));
  const Index planes = p.lowpass.planes();
  for (Index b = 0; b < planes; ++b) {
    Quads<Scalar> q;
    q.ll = p.lowpass.plane(b);
    for (int j = t.levels() - 1; j >= 0; --j) {
      load_quads(p.highpass[j], b, q);
      q.ll = synthesise(q, ops[j]);
    }
    x.plane(b) = q.ll;
  }
  return x;
}

}  // namespace

template <typename Scalar>
double inner_product(const Pyramid<Scalar>& a, const Pyramid<Scalar>& b) {
  if (a.levels() != b.levels()) throw DimensionError("pyramid inner product: level mismatch");
  double acc = inner_product(a.lowpass, b.lowpass);
  for (int j = 0; j < a.levels(); ++j) acc += inner_product(a.highpass[j], b.highpass[j]);
  return acc;
}

template <typename Scalar>
Dtcwt<Scalar>::Dtcwt(const FilterSet& filters, int levels, Index rows, Index cols)
    : filters_(filters), levels_(levels), rows_(rows), cols_(cols) {
  if (levels < 1) throw ConfigError("dtcwt: levels must be >= 1");
  const Index m = Index{1} << levels;
  if (rows % m != 0 || cols % m != 0 || rows == 0 || cols == 0) {
    throw DimensionError("dtcwt: image " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " not divisible by 2^J = " + std::to_string(m));
  }
  const auto& b = filters_.level1;
  const auto& q = filters_.qshift;
  analysis_.push_back({filter_operator<Scalar>(b.h0, rows), filter_operator<Scalar>(b.h1, rows),
                       filter_operator<Scalar>(b.h0, cols), filter_operator<Scalar>(b.h1, cols)});
  synthesis_.push_back({filter_operator<Scalar>(b.g0, rows), filter_operator<Scalar>(b.g1, rows),
                        filter_operator<Scalar>(b.g0, cols), filter_operator<Scalar>(b.g1, cols)});
  Index r = rows, c = cols;
  for (int j = 1; j < levels; ++j) {
    analysis_.push_back({qshift_decimation_operator<Scalar>(q.h0b, q.h0a, r),
                         qshift_decimation_operator<Scalar>(q.h1b, q.h1a, r),
                         qshift_decimation_operator<Scalar>(q.h0b, q.h0a, c),
                         qshift_decimation_operator<Scalar>(q.h1b, q.h1a, c)});
    synthesis_.push_back({qshift_interpolation_operator<Scalar>(q.g0b, q.g0a, r / 2),
                          qshift_interpolation_operator<Scalar>(q.g1b, q.g1a, r / 2),
                          qshift_interpolation_operator<Scalar>(q.g0b, q.g0a, c / 2),
                          qshift_interpolation_operator<Scalar>(q.g1b, q.g1a, c / 2)});
    r /= 2;
    c /= 2;
  }
  for (const auto& o : analysis_) analysis_t_.push_back(transposed<Scalar>(o));
  for (const auto& o : synthesis_) synthesis_t_.push_back(transposed<Scalar>(o));
}

template <typename Scalar>
Index Dtcwt<Scalar>::lowpass_rows() const {
  return rows_ >> (levels_ - 1);
}
template <typename Scalar>
Index Dtcwt<Scalar>::lowpass_cols() const {
  return cols_ >> (levels_ - 1);
}

template <typename Scalar>
Pyramid<Scalar> Dtcwt<Scalar>::zeros(const Shape& batch) const {
  Pyramid<Scalar> p;
  p.lowpass = Tensor<Scalar>(with_trailing(batch, {lowpass_rows(), lowpass_cols()}));
  for (int j = 0; j < levels_; ++j) {
    p.highpass.emplace_back(with_trailing(batch, {6, rows_ >> (j + 1), cols_ >> (j + 1)}));
  }
  p.source_rows = rows_;
  p.source_cols = cols_;
  return p;
}

template <typename Scalar>
void Dtcwt<Scalar>::check_image(const Tensor<Scalar>& x, const char* what) const {
  if (x.rank() < 2 || x.dim(-2) != rows_ || x.dim(-1) != cols_) {
    throw DimensionError(std::string(what) + ": expected [..., " + std::to_string(rows_) + ", " +
                         std::to_string(cols_) + "], got " + to_string(x.shape()));
  }
}

template <typename Scalar>
void Dtcwt<Scalar>::check_pyramid(const Pyramid<Scalar>& p, const char* what) const {
  if (p.levels() != levels_) {
    throw DimensionError(std::string(what) + ": pyramid has " + std::to_string(p.levels()) + " levels, expected " +
                         std::to_string(levels_));
  }
  const Pyramid<Scalar> ref = zeros(batch_axes(p.lowpass.shape(), 2));
  bool ok = p.lowpass.shape() == ref.lowpass.shape();
  for (int j = 0; ok && j < levels_; ++j) {
    ok = p.highpass[j].re.shape() == ref.highpass[j].re.shape() && p.highpass[j].im.shape() == ref.highpass[j].re.shape();
  }
  if (!ok) throw DimensionError(std::string(what) + ": malformed pyramid for a " + std::to_string(rows_) + "x" +
                                std::to_string(cols_) + " transform");
}

template <typename Scalar>
Pyramid<Scalar> Dtcwt<Scalar>::forward(const Tensor<Scalar>& x) const {
  check_image(x, "dtcwt_forward");
  return run_analysis(*this, x, analysis_);
}

template <typename Scalar>
Tensor<Scalar> Dtcwt<Scalar>::inverse(const Pyramid<Scalar>& p) const {
  check_pyramid(p, "dtcwt_inverse");
  return run_synthesis(*this, p, synthesis_);
}

template <typename Scalar>
Tensor<Scalar> Dtcwt<Scalar>::forward_adjoint(const Pyramid<Scalar>& p) const {
  check_pyramid(p, "dtcwt_forward_adjoint");
  return run_synthesis(*this, p, analysis_t_);
}

template <typename Scalar>
Pyramid<Scalar> Dtcwt<Scalar>::inverse_adjoint(const Tensor<Scalar>& x) const {
  check_image(x, "dtcwt_inverse_adjoint");
  return run_analysis(*this, x, synthesis_t_);
}

template <typename Scalar>
Pyramid<Scalar> dtcwt_forward(const Tensor<Scalar>& x, int levels, const FilterSet& fs) {
  if (x.rank() < 2) throw DimensionError("dtcwt_forward: need at least 2 axes");
  return Dtcwt<Scalar>(fs, levels, x.dim(-2), x.dim(-1)).forward(x);
}

template <typename Scalar>
Tensor<Scalar> dtcwt_inverse(const Pyramid<Scalar>& p, const FilterSet& fs) {
  return Dtcwt<Scalar>(fs, p.levels(), p.source_rows, p.source_cols).inverse(p);
}

template <typename Scalar>
Tensor<Scalar> dtcwt_forward_adjoint(const Pyramid<Scalar>& p, const FilterSet& fs) {
  return Dtcwt<Scalar>(fs, p.levels(), p.source_rows, p.source_cols).forward_adjoint(p);
}

template <typename Scalar>
Pyramid<Scalar> dtcwt_inverse_adjoint(const Tensor<Scalar>& x, int levels, const FilterSet& fs) {
  if (x.rank() < 2) throw DimensionError("dtcwt_inverse_adjoint: need at least 2 axes");
  return Dtcwt<Scalar>(fs, levels, x.dim(-2), x.dim(-1)).inverse_adjoint(x);
}

template <typename Scalar>
void save_pyramid(const std::filesystem::path& dir, const Pyramid<Scalar>& p, const std::string& filter_set) {
  std::filesystem::create_directories(dir);
  npy::save(dir / "lowpass.npy", p.lowpass);
  nlohmann::json manifest;
  manifest["levels"] = p.levels();
  manifest["filter_set"] = filter_set;
  manifest["source_shape"] = {p.source_rows, p.source_cols};
  manifest["lowpass_shape"] = p.lowpass.shape();
  manifest["orientations_deg"] = kOrientations;
  for (int j = 0; j < p.levels(); ++j) {
    const std::string stem = "scale" + std::to_string(j + 1);
    npy::save_complex(dir / stem, p.highpass[j]);
    manifest["highpass_shapes"].push_back(p.highpass[j].shape());
  }
  std::ofstream os(dir / "manifest.json");
  if (!os) throw IoError("cannot write " + (dir / "manifest.json").string());
  os << manifest.dump(2) << '\n';
}

template <typename Scalar>
Pyramid<Scalar> load_pyramid(const std::filesystem::path& dir, std::string* filter_set) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw IoError("missing " + (dir / "manifest.json").string());
  nlohmann::json manifest;
  try {
    is >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad pyramid manifest: " + std::string(e.what()));
  }
  Pyramid<Scalar> p;
  p.lowpass = npy::load<Scalar>(dir / "lowpass.npy");
  const int levels = manifest.at("levels").get<int>();
  for (int j = 0; j < levels; ++j) {
    p.highpass.push_back(npy::load_complex<Scalar>(dir / ("scale" + std::to_string(j + 1))));
  }
  p.source_rows = manifest.at("source_shape").at(0).get<Index>();
  p.source_cols = manifest.at("source_shape").at(1).get<Index>();
  if (filter_set) *filter_set = manifest.at("filter_set").get<std::string>();
  return p;
}

#define WAVEGAIN_INSTANTIATE(S)                                                                           \
  template class Dtcwt<S>;                                                                                \
  template double inner_product<S>(const Pyramid<S>&, const Pyramid<S>&);                                 \
  template Pyramid<S> dtcwt_forward<S>(const Tensor<S>&, int, const FilterSet&);                          \
  template Tensor<S> dtcwt_inverse<S>(const Pyramid<S>&, const FilterSet&);                               \
  template Tensor<S> dtcwt_forward_adjoint<S>(const Pyramid<S>&, const FilterSet&);                       \
  template Pyramid<S> dtcwt_inverse_adjoint<S>(const Tensor<S>&, int, const FilterSet&);                  \
  template void save_pyramid<S>(const std::filesystem::path&, const Pyramid<S>&, const std::string&);     \
  template Pyramid<S> load_pyramid<S>(const std::filesystem::path&, std::string*);
WAVEGAIN_INSTANTIATE(float)
WAVEGAIN_INSTANTIATE(double)
#undef WAVEGAIN_INSTANTIATE

}  // namespace wavegain
