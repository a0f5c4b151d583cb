#include "wavegain/gainlayer/gain.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "wavegain/core/conv.hpp"
#include "wavegain/core/npy.hpp"
#include "wavegain/core/random.hpp"

namespace wavegain {

InitScheme parse_init_scheme(const std::string& name) {
  if (name == "unit-normal") return InitScheme::UnitNormal;
  if (name == "glorot") return InitScheme::Glorot;
  if (name == "zeros") return InitScheme::Zeros;
  throw ConfigError("unknown init scheme '" + name + "' (expected unit-normal, glorot or zeros)");
}

std::string to_string(InitScheme scheme) {
  switch (scheme) {
    case InitScheme::UnitNormal: return "unit-normal";
    case InitScheme::Glorot: return "glorot";
    case InitScheme::Zeros: return "zeros";
  }
  return "zeros";
}

Index padded_extent(Index n, int levels) {
  const Index m = Index{1} << levels;
  return (n + m - 1) / m * m;
}

template <typename Scalar>
Index GainParams<Scalar>::parameter_count() const {
  Index n = g_lp.size();
  for (const auto& g : g_hp) n += g.re.size() + g.im.size();
  return n;
}

template <typename Scalar>
GainParams<Scalar> GainParams<Scalar>::zeros_like() const {
  GainParams z = *this;
  for (auto& g : z.g_hp) {
    g.re.values().setZero();
    g.im.values().setZero();
  }
  z.g_lp.values().setZero();
  return z;
}

template <typename Scalar>
template <typename Other>
GainParams<Other> GainParams<Scalar>::cast() const {
  GainParams<Other> out;
  for (const auto& g : g_hp) out.g_hp.emplace_back(g.re.template cast<Other>(), g.im.template cast<Other>());
  out.g_lp = g_lp.template cast<Other>();
  out.levels = levels;
  out.filter_set = filter_set;
  out.scheme = scheme;
  out.seed = seed;
  return out;
}

namespace {

void require_odd(Index k, const char* what) {
  if (k < 1 || k % 2 == 0) throw ConfigError(std::string(what) + " must be odd and >= 1, got " + std::to_string(k));
}

template <typename Scalar>
void check_params(const GainParams<Scalar>& p) {
  if (p.g_lp.rank() != 4 || p.g_lp.dim(2) != p.g_lp.dim(3)) {
    throw DimensionError("gain params: g_lp must be [F x C x klp x klp], got " + to_string(p.g_lp.shape()));
  }
  require_odd(p.lowpass_size(), "lowpass gain size");
  if (static_cast<int>(p.g_hp.size()) != p.levels) {
    throw DimensionError("gain params: " + std::to_string(p.g_hp.size()) + " highpass gains for " +
                         std::to_string(p.levels) + " levels");
  }
  for (const auto& g : p.g_hp) {
    if (g.re.rank() != 5 || g.re.dim(0) != p.out_channels() || g.re.dim(1) != p.in_channels() || g.re.dim(2) != 6 ||
        g.im.shape() != g.re.shape()) {
      throw DimensionError("gain params: highpass gain shape " + to_string(g.re.shape()));
    }
    require_odd(g.re.dim(3), "highpass gain rows");
    require_odd(g.re.dim(4), "highpass gain cols");
  }
}

// Subband s of a [N x K x 6 x h x w] band as real channels [N x 2K x h x w]:
// real parts first, then imaginary parts.
template <typename Scalar>
Tensor<Scalar> gather_subband(const ComplexTensor<Scalar>& band, int s) {
  const Index n = band.re.dim(0), k = band.re.dim(1), h = band.re.dim(3), w = band.re.dim(4);
  Tensor<Scalar> out({n, 2 * k, h, w});
  for (Index b = 0; b < n; ++b) {
    for (Index c = 0; c < k; ++c) {
      const Index src = (b * k + c) * 6 + s;
      out.plane(b * 2 * k + c) = band.re.plane(src);
      out.plane(b * 2 * k + k + c) = band.im.plane(src);
    }
  }
  return out;
}

template <typename Scalar>
void scatter_subband(const Tensor<Scalar>& pair, ComplexTensor<Scalar>& band, int s) {
  const Index n = band.re.dim(0), k = band.re.dim(1);
  for (Index b = 0; b < n; ++b) {
    for (Index c = 0; c < k; ++c) {
      const Index dst = (b * k + c) * 6 + s;
      band.re.plane(dst) = pair.plane(b * 2 * k + c);
      band.im.plane(dst) = pair.plane(b * 2 * k + k + c);
    }
  }
}

// Real form of the complex gain of subband s: [[G_r, -G_i], [G_i, G_r]],
// shape [2F x 2C x kh x kw], so that [W_r; W_i] = G2 * [V_r; V_i].
template <typename Scalar>
Tensor<Scalar> real_gain(const ComplexTensor<Scalar>& g, int s) {
  const Index f = g.re.dim(0), c = g.re.dim(1), kh = g.re.dim(3), kw = g.re.dim(4);
  Tensor<Scalar> out({2 * f, 2 * c, kh, kw});
  for (Index i = 0; i < f; ++i) {
    for (Index j = 0; j < c; ++j) {
      const Index src = (i * c + j) * 6 + s;
      const auto gr = g.re.plane(src);
      const auto gi = g.im.plane(src);
      out.plane(i * 2 * c + j) = gr;
      out.plane(i * 2 * c + c + j) = -gi;
      out.plane((f + i) * 2 * c + j) = gi;
      out.plane((f + i) * 2 * c + c + j) = gr;
    }
  }
  return out;
}

template <typename Scalar>
void accumulate_gain_grad(const Tensor<Scalar>& d2, ComplexTensor<Scalar>& dg, int s) {
  const Index f = dg.re.dim(0), c = dg.re.dim(1);
  for (Index i = 0; i < f; ++i) {
    for (Index j = 0; j < c; ++j) {
      const Index dst = (i * c + j) * 6 + s;
      dg.re.plane(dst) += d2.plane(i * 2 * c + j) + d2.plane((f + i) * 2 * c + c + j);
      dg.im.plane(dst) += d2.plane((f + i) * 2 * c + j) - d2.plane(i * 2 * c + c + j);
    }
  }
}

template <typename Scalar>
void check_input(const Tensor<Scalar>& x, const GainParams<Scalar>& p, const GainLayerPlan<Scalar>& plan) {
  if (x.rank() != 4 || x.dim(1) != p.in_channels() || x.dim(2) != plan.rows() || x.dim(3) != plan.cols()) {
    throw DimensionError("gain_forward: expected [N x " + std::to_string(p.in_channels()) + " x " +
                         std::to_string(plan.rows()) + " x " + std::to_string(plan.cols()) + "], got " +
                         to_string(x.shape()));
  }
  if (plan.transform().levels() != p.levels) throw DimensionError("gain layer: plan and params disagree on J");
}

}  // namespace

template <typename Scalar>
GainParams<Scalar> gain_init(Index out_channels, Index in_channels, int levels, Index lowpass_size,
                             std::uint64_t seed, InitScheme scheme, Index gain_size, const std::string& filter_set) {
  if (out_channels < 1 || in_channels < 1) throw ConfigError("gain_init: F and C must be >= 1");
  if (levels < 1) throw ConfigError("gain_init: J must be >= 1");
  require_odd(lowpass_size, "lowpass gain size");
  require_odd(gain_size, "highpass gain size");
  GainParams<Scalar> p;
  p.levels = levels;
  p.filter_set = filter_set;
  p.scheme = scheme;
  p.seed = seed;
  for (int j = 0; j < levels; ++j) p.g_hp.emplace_back(Shape{out_channels, in_channels, 6, gain_size, gain_size});
  p.g_lp = Tensor<Scalar>({out_channels, in_channels, lowpass_size, lowpass_size});
  if (scheme == InitScheme::Zeros) return p;

  const double fan = static_cast<double>(in_channels + out_channels);
  const double hp_std = scheme == InitScheme::UnitNormal ? 1.0 : std::sqrt(2.0 / (fan * 6 * gain_size * gain_size));
  const double lp_std =
      scheme == InitScheme::UnitNormal ? 1.0 : std::sqrt(2.0 / (fan * lowpass_size * lowpass_size));
  Rng rng(seed);
  for (auto& g : p.g_hp) {
    rng.fill_normal(g.re, hp_std);
    rng.fill_normal(g.im, hp_std);
  }
  rng.fill_normal(p.g_lp, lp_std);
  return p;
}

template <typename Scalar>
GainParams<Scalar> scale2_demo_params(std::uint64_t seed) {
  auto p = gain_init<Scalar>(1, 1, 2, 1, seed, InitScheme::Zeros);
  p.scheme = InitScheme::UnitNormal;
  Rng rng(seed);
  rng.fill_normal(p.g_hp[1].re);
  rng.fill_normal(p.g_hp[1].im);
  return p;
}

template <typename Scalar>
GainParams<Scalar> identity_params(Index channels, int levels, Index lowpass_size) {
  auto p = gain_init<Scalar>(channels, channels, levels, lowpass_size, 0, InitScheme::Zeros);
  const Index mid = lowpass_size / 2;
  for (Index f = 0; f < channels; ++f) {
    for (auto& g : p.g_hp)
      for (Index s = 0; s < 6; ++s) g.re(f, f, s, 0, 0) = 1;
    p.g_lp(f, f, mid, mid) = 1;
  }
  return p;
}

template <typename Scalar>
GainLayerPlan<Scalar>::GainLayerPlan(const FilterSet& fs, int levels, Index rows, Index cols)
    : rows_(rows),
      cols_(cols),
      top_((padded_extent(rows, levels) - rows) / 2),
      left_((padded_extent(cols, levels) - cols) / 2),
      transform_(fs, levels, padded_extent(rows, levels), padded_extent(cols, levels)) {
  if (rows < 1 || cols < 1) throw DimensionError("gain layer: empty image");
}

template <typename Scalar>
Tensor<Scalar> GainLayerPlan<Scalar>::pad(const Tensor<Scalar>& x) const {
  const Index hp = padded_rows(), wp = padded_cols();
  if (hp == rows_ && wp == cols_) return x;
  Shape s = x.shape();
  s[s.size() - 2] = hp;
  s[s.size() - 1] = wp;
  Tensor<Scalar> out(s);
  for (Index p = 0; p < x.planes(); ++p) {
    const auto src = x.plane(p);
    auto dst = out.plane(p);
    for (Index i = 0; i < hp; ++i)
      for (Index j = 0; j < wp; ++j) dst(i, j) = src(reflect_index(i - top_, rows_), reflect_index(j - left_, cols_));
  }
  return out;
}

template <typename Scalar>
Tensor<Scalar> GainLayerPlan<Scalar>::pad_adjoint(const Tensor<Scalar>& xp) const {
  const Index hp = padded_rows(), wp = padded_cols();
  if (hp == rows_ && wp == cols_) return xp;
  Shape s = xp.shape();
  s[s.size() - 2] = rows_;
  s[s.size() - 1] = cols_;
  Tensor<Scalar> out(s);
  for (Index p = 0; p < xp.planes(); ++p) {
    const auto src = xp.plane(p);
    auto dst = out.plane(p);
    for (Index i = 0; i < hp; ++i)
      for (Index j = 0; j < wp; ++j) dst(reflect_index(i - top_, rows_), reflect_index(j - left_, cols_)) += src(i, j);
  }
  return out;
}

template <typename Scalar>
Tensor<Scalar> GainLayerPlan<Scalar>::crop(const Tensor<Scalar>& yp) const {
  if (padded_rows() == rows_ && padded_cols() == cols_) return yp;
  Shape s = yp.shape();
  s[s.size() - 2] = rows_;
  s[s.size() - 1] = cols_;
  Tensor<Scalar> out(s);
  for (Index p = 0; p < yp.planes(); ++p) out.plane(p) = yp.plane(p).block(top_, left_, rows_, cols_);
  return out;
}

template <typename Scalar>
Tensor<Scalar> GainLayerPlan<Scalar>::crop_adjoint(const Tensor<Scalar>& y) const {
  if (padded_rows() == rows_ && padded_cols() == cols_) return y;
  Shape s = y.shape();
  s[s.size() - 2] = padded_rows();
  s[s.size() - 1] = padded_cols();
  Tensor<Scalar> out(s);
  for (Index p = 0; p < y.planes(); ++p) out.plane(p).block(top_, left_, rows_, cols_) = y.plane(p);
  return out;
}

template <typename Scalar>
Tensor<Scalar> gain_forward(const Tensor<Scalar>& x, const GainParams<Scalar>& p, const GainLayerPlan<Scalar>& plan,
                            GainLayerCache<Scalar>* cache) {
  check_params(p);
  check_input(x, p, plan);
  const auto& t = plan.transform();
  const Index n = x.dim(0), f = p.out_channels();
  auto v = t.forward(plan.pad(x));
  auto w = t.zeros({n, f});
  for (int j = 0; j < p.levels; ++j) {
    const Index pad = p.g_hp[j].re.dim(3) / 2;
    for (int s = 0; s < 6; ++s) {
      const auto y2 = correlate2d(gather_subband(v.highpass[j], s), real_gain(p.g_hp[j], s), pad);
      scatter_subband(y2, w.highpass[j], s);
    }
  }
  w.lowpass = correlate2d(v.lowpass, p.g_lp, p.lowpass_size() / 2);
  auto y = plan.crop(t.inverse(w));
  if (cache) {
    cache->inputs = std::move(v);
    cache->input_shape = x.shape();
  }
  return y;
}

template <typename Scalar>
GainBackward<Scalar> gain_backward(const Tensor<Scalar>& dy, const GainLayerCache<Scalar>& cache,
                                   const GainParams<Scalar>& p, const GainLayerPlan<Scalar>& plan) {
  check_params(p);
  const auto& t = plan.transform();
  const auto& v = cache.inputs;
  if (cache.input_shape.size() != 4 || cache.input_shape[1] != p.in_channels() || v.levels() != p.levels ||
      v.lowpass.rank() != 4 || v.lowpass.dim(0) != cache.input_shape[0] || v.lowpass.dim(1) != p.in_channels()) {
    throw DimensionError("gain_backward: cache does not match the parameters");
  }
  const Index n = cache.input_shape[0];
  const Shape out_shape{n, p.out_channels(), plan.rows(), plan.cols()};
  if (dy.shape() != out_shape) {
    throw DimensionError("gain_backward: dy " + to_string(dy.shape()) + ", expected " + to_string(out_shape));
  }

  GainBackward<Scalar> out;
  out.grads = p.zeros_like();
  const auto dw = t.inverse_adjoint(plan.crop_adjoint(dy));
  auto dv = t.zeros({n, p.in_channels()});
  for (int j = 0; j < p.levels; ++j) {
    const Index kh = p.g_hp[j].re.dim(3), kw = p.g_hp[j].re.dim(4);
    for (int s = 0; s < 6; ++s) {
      const auto v2 = gather_subband(v.highpass[j], s);
      const auto dw2 = gather_subband(dw.highpass[j], s);
      const auto g2 = real_gain(p.g_hp[j], s);
      scatter_subband(correlate2d_input_adjoint(dw2, g2, kh / 2, v2.shape()), dv.highpass[j], s);
      accumulate_gain_grad(correlate2d_weight_adjoint(v2, dw2, kh / 2, kh, kw), out.grads.g_hp[j], s);
    }
  }
  const Index klp = p.lowpass_size();
  dv.lowpass = correlate2d_input_adjoint(dw.lowpass, p.g_lp, klp / 2, v.lowpass.shape());
  out.grads.g_lp = correlate2d_weight_adjoint(v.lowpass, dw.lowpass, klp / 2, klp, klp);
  out.dx = plan.pad_adjoint(t.forward_adjoint(dv));
  return out;
}

template <typename Scalar>
Tensor<Scalar> gain_forward(const Tensor<Scalar>& x, const GainParams<Scalar>& p, const FilterSet& fs,
                            GainLayerCache<Scalar>* cache) {
  if (x.rank() != 4) throw DimensionError("gain_forward: expected [N x C x H x W], got " + to_string(x.shape()));
  return gain_forward(x, p, GainLayerPlan<Scalar>(fs, p.levels, x.dim(2), x.dim(3)), cache);
}

template <typename Scalar>
GainBackward<Scalar> gain_backward(const Tensor<Scalar>& dy, const GainLayerCache<Scalar>& cache,
                                   const GainParams<Scalar>& p, const FilterSet& fs) {
  if (dy.rank() != 4) throw DimensionError("gain_backward: expected [N x F x H x W], got " + to_string(dy.shape()));
  return gain_backward(dy, cache, p, GainLayerPlan<Scalar>(fs, p.levels, dy.dim(2), dy.dim(3)));
}

template <typename Scalar>
void save_gain_params(const std::filesystem::path& dir, const GainParams<Scalar>& p) {
  check_params(p);
  std::filesystem::create_directories(dir);
  npy::save(dir / "g_lp.npy", p.g_lp);
  for (int j = 0; j < p.levels; ++j) npy::save_complex(dir / ("g_hp" + std::to_string(j + 1)), p.g_hp[j]);
  nlohmann::json m;
  m["F"] = p.out_channels();
  m["C"] = p.in_channels();
  m["J"] = p.levels;
  m["klp"] = p.lowpass_size();
  m["gain_size"] = p.g_hp.empty() ? 1 : p.g_hp[0].re.dim(3);
  m["filter_set"] = p.filter_set;
  m["init_scheme"] = to_string(p.scheme);
  m["seed"] = p.seed;
  m["parameter_count"] = p.parameter_count();
  std::ofstream os(dir / "manifest.json");
  if (!os) throw IoError("cannot write " + (dir / "manifest.json").string());
  os << m.dump(2) << '\n';
}

template <typename Scalar>
GainParams<Scalar> load_gain_params(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw IoError("missing " + (dir / "manifest.json").string());
  nlohmann::json m;
  try {
    is >> m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad gain manifest: " + std::string(e.what()));
  }
  GainParams<Scalar> p;
  p.levels = m.at("J").get<int>();
  p.filter_set = m.at("filter_set").get<std::string>();
  p.scheme = parse_init_scheme(m.at("init_scheme").get<std::string>());
  p.seed = m.at("seed").get<std::uint64_t>();
  p.g_lp = npy::load<Scalar>(dir / "g_lp.npy");
  for (int j = 0; j < p.levels; ++j) p.g_hp.push_back(npy::load_complex<Scalar>(dir / ("g_hp" + std::to_string(j + 1))));
  check_params(p);
  return p;
}

#define WAVEGAIN_INSTANTIATE(S)                                                                                   \
  template struct GainParams<S>;                                                                                  \
  template class GainLayerPlan<S>;                                                                                \
  template GainParams<S> gain_init<S>(Index, Index, int, Index, std::uint64_t, InitScheme, Index,                 \
                                      const std::string&);                                                        \
  template GainParams<S> scale2_demo_params<S>(std::uint64_t);                                                    \
  template GainParams<S> identity_params<S>(Index, int, Index);                                                   \
  template Tensor<S> gain_forward<S>(const Tensor<S>&, const GainParams<S>&, const GainLayerPlan<S>&,             \
                                     GainLayerCache<S>*);                                                         \
  template GainBackward<S> gain_backward<S>(const Tensor<S>&, const GainLayerCache<S>&, const GainParams<S>&,     \
                                            const GainLayerPlan<S>&);                                             \
  template Tensor<S> gain_forward<S>(const Tensor<S>&, const GainParams<S>&, const FilterSet&, GainLayerCache<S>*); \
  template GainBackward<S> gain_backward<S>(const Tensor<S>&, const GainLayerCache<S>&, const GainParams<S>&,     \
                                            const FilterSet&);                                                    \
  template void save_gain_params<S>(const std::filesystem::path&, const GainParams<S>&);                          \
  template GainParams<S> load_gain_params<S>(const std::filesystem::path&);
WAVEGAIN_INSTANTIATE(float)
WAVEGAIN_INSTANTIATE(double)
#undef WAVEGAIN_INSTANTIATE

template GainParams<float> GainParams<double>::cast<float>() const;
template GainParams<double> GainParams<float>::cast<double>() const;
template GainParams<double> GainParams<double>::cast<double>() const;
template GainParams<float> GainParams<float>::cast<float>() const;

}  // namespace wavegain
