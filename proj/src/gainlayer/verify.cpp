#include "wavegain/gainlayer/verify.hpp"

#include "wavegain/core/random.hpp"
#include "wavegain/gainlayer/analysis.hpp"

namespace wavegain {

template <typename Scalar>
GradcheckReport gain_layer_gradcheck(const GainCheckConfig& cfg) {
  const auto fs = load_filter_set(cfg.filter_set);
  auto p = gain_init<double>(cfg.out_channels, cfg.in_channels, cfg.levels, cfg.lowpass_size, cfg.seed,
                             InitScheme::Glorot, cfg.gain_size, cfg.filter_set);
  Rng rng(cfg.seed + 1);
  auto x = rng.normal_tensor<double>({cfg.batch, cfg.in_channels, cfg.rows, cfg.cols});
  const auto r = rng.normal_tensor<double>({cfg.batch, cfg.out_channels, cfg.rows, cfg.cols});

  // Analytic gradients in the precision under test.
  const GainLayerPlan<Scalar> plan(fs, cfg.levels, cfg.rows, cfg.cols);
  const auto ps = p.template cast<Scalar>();
  GainLayerCache<Scalar> cache;
  gain_forward(x.template cast<Scalar>(), ps, plan, &cache);
  const auto back = gain_backward(r.template cast<Scalar>(), cache, ps, plan);
  const auto grads = back.grads.template cast<double>();
  const auto dx = back.dx.template cast<double>();

  // Reference derivatives: central differences of the double-precision layer.
  const GainLayerPlan<double> plan64(fs, cfg.levels, cfg.rows, cfg.cols);
  auto loss = [&] { return inner_product(gain_forward(x, p, plan64), r); };
  constexpr double step = 1e-5;
  GradcheckReport report;
  for (int j = 0; j < cfg.levels; ++j) {
    const std::string tag = "g_hp" + std::to_string(j + 1);
    report.merge(finite_difference_check(p.g_hp[j].re, grads.g_hp[j].re, loss, step, tag + ".re"));
    report.merge(finite_difference_check(p.g_hp[j].im, grads.g_hp[j].im, loss, step, tag + ".im"));
  }
  report.merge(finite_difference_check(p.g_lp, grads.g_lp, loss, step, "g_lp"));
  report.merge(finite_difference_check(x, dx, loss, step, "x"));
  return report;
}

DenseOracleReport dense_operator_check(const GainCheckConfig& cfg) {
  const auto fs = load_filter_set(cfg.filter_set);
  const auto p = gain_init<double>(cfg.out_channels, cfg.in_channels, cfg.levels, cfg.lowpass_size, cfg.seed,
                                   InitScheme::Glorot, cfg.gain_size, cfg.filter_set);
  const Matrix<double> a = build_dense_operator(p, cfg.rows, cfg.cols, fs);
  Rng rng(cfg.seed + 2);
  const auto x = rng.normal_tensor<double>({1, cfg.in_channels, cfg.rows, cfg.cols});
  const auto dy = rng.normal_tensor<double>({1, cfg.out_channels, cfg.rows, cfg.cols});
  GainLayerCache<double> cache;
  const auto y = gain_forward(x, p, fs, &cache);
  const auto dx = gain_backward(dy, cache, p, fs).dx;

  DenseOracleReport rep;
  const Vector<double> ax = a * x.values().matrix();
  rep.forward_error = (ax - y.values().matrix()).cwiseAbs().maxCoeff();
  const Vector<double> aty = a.transpose() * dy.values().matrix();
  rep.transpose_error = (aty - dx.values().matrix()).cwiseAbs().maxCoeff();
  return rep;
}

double identity_reduction_error(Index channels, Index rows, Index cols, int levels, std::uint64_t seed,
                                const std::string& filter_set) {
  const auto fs = load_filter_set(filter_set);
  auto p = identity_params<double>(channels, levels);
  p.filter_set = filter_set;
  Rng rng(seed);
  const auto x = rng.normal_tensor<double>({2, channels, rows, cols});
  return max_abs_diff(gain_forward(x, p, fs), x);
}

double gain_adjoint_error(const GainCheckConfig& cfg) {
  const auto fs = load_filter_set(cfg.filter_set);
  const auto p = gain_init<double>(cfg.out_channels, cfg.in_channels, cfg.levels, cfg.lowpass_size, cfg.seed,
                                   InitScheme::UnitNormal, cfg.gain_size, cfg.filter_set);
  Rng rng(cfg.seed + 3);
  const auto x = rng.normal_tensor<double>({cfg.batch, cfg.in_channels, cfg.rows, cfg.cols});
  const auto dy = rng.normal_tensor<double>({cfg.batch, cfg.out_channels, cfg.rows, cfg.cols});
  GainLayerCache<double> cache;
  const double lhs = inner_product(gain_forward(x, p, fs, &cache), dy);
  const double rhs = inner_product(x, gain_backward(dy, cache, p, fs).dx);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

template GradcheckReport gain_layer_gradcheck<float>(const GainCheckConfig&);
template GradcheckReport gain_layer_gradcheck<double>(const GainCheckConfig&);

}  // namespace wavegain
