#include "wavegain/nn/verify.hpp"

#include "wavegain/core/random.hpp"

namespace wavegain::nn {

GradcheckReport layer_gradcheck(Layer<double>& layer, Tensor<double> x, std::uint64_t seed, double step) {
  Rng rng(seed);
  const auto y0 = layer.forward(x);
  const auto r = rng.normal_tensor<double>(y0.shape());
  auto params = layer.params();
  for (auto& p : params) p.grad->values().setZero();
  const auto dx = layer.backward(r);
  std::vector<Tensor<double>> analytic;
  for (auto& p : params) analytic.push_back(*p.grad);

  auto loss = [&] { return inner_product(layer.forward(x), r); };
  GradcheckReport report;
  for (std::size_t i = 0; i < params.size(); ++i)
    report.merge(finite_difference_check(*params[i].value, analytic[i], loss, step, params[i].name));
  report.merge(finite_difference_check(x, dx, loss, step, "input"));
  return report;
}

GradcheckReport conv2d_gradcheck(std::uint64_t seed, bool single_precision) {
  Rng rng(seed);
  Conv2d<double> conv(3, 4, 3, 1, rng);
  auto x = rng.normal_tensor<double>({2, 3, 6, 6});
  if (!single_precision) return layer_gradcheck(conv, x, rng.engine()());

  Rng unused(0);
  Conv2d<float> low(3, 4, 3, 1, unused);
  low.weight = Tensor<float>(conv.weight.shape(), conv.weight.values().cast<float>());
  low.bias = Tensor<float>(conv.bias.shape(), conv.bias.values().cast<float>());
  const auto r = rng.normal_tensor<double>({2, 4, 6, 6});
  low.forward(Tensor<float>(x.shape(), x.values().cast<float>()));
  const auto dx = low.backward(Tensor<float>(r.shape(), r.values().cast<float>()));
  auto widen = [](const Tensor<float>& t) { return Tensor<double>(t.shape(), t.values().cast<double>()); };
  auto loss = [&] { return inner_product(conv.forward(x), r); };
  GradcheckReport report;
  report.merge(finite_difference_check(conv.weight, widen(low.weight_grad), loss, 1e-5, "weight"));
  report.merge(finite_difference_check(conv.bias, widen(low.bias_grad), loss, 1e-5, "bias"));
  report.merge(finite_difference_check(x, widen(dx), loss, 1e-5, "input"));
  return report;
}

double conv2d_dense_transpose_error(Index channels, Index filters, Index kernel, Index pad, Index rows, Index cols,
                                    std::uint64_t seed) {
  Rng rng(seed);
  Conv2d<double> conv(channels, filters, kernel, pad, rng);
  conv.bias.values().setZero();
  const Index n_in = channels * rows * cols;
  Tensor<double> basis({n_in, channels, rows, cols});
  for (Index k = 0; k < n_in; ++k) basis.values()[k * n_in + k] = 1.0;
  const auto y = conv.forward(basis);
  const Index n_out = y.size() / n_in;
  // Sample k of y is column k of the dense operator A (n_out x n_in).
  const Matrix<double> a = Eigen::Map<const RowMatrix<double>>(y.data(), n_in, n_out).transpose();

  Tensor<double> out_basis({n_out, y.dim(1), y.dim(2), y.dim(3)});
  for (Index k = 0; k < n_out; ++k) out_basis.values()[k * n_out + k] = 1.0;
  conv.forward(Tensor<double>({n_out, channels, rows, cols}));
  const auto dx = conv.backward(out_basis);
  // Sample k of dx is A^T e_k, i.e. row k of A.
  const Matrix<double> b = Eigen::Map<const RowMatrix<double>>(dx.data(), n_out, n_in);
  return (a - b).cwiseAbs().maxCoeff();
}

GradcheckReport model_gradcheck(const ModelConfig& config, std::uint64_t seed, Index samples, Index subset,
                                double step) {
  Model<double> model(config, seed);
  Rng rng = Rng::derived(seed, 1000);
  Shape in{samples};
  in.insert(in.end(), config.input.begin(), config.input.end());
  const auto x = rng.normal_tensor<double>(in);
  std::vector<int> labels;
  for (Index i = 0; i < samples; ++i)
    labels.push_back(static_cast<int>(rng.engine()() % static_cast<std::uint64_t>(config.num_classes)));

  model.zero_grad();
  model.forward_backward(x, labels);
  auto params = model.params();
  std::vector<Tensor<double>> analytic;
  Index total = 0;
  for (auto& p : params) {
    analytic.push_back(*p.grad);
    total += p.value->size();
  }
  auto loss = [&] { return softmax_cross_entropy(model.forward(x), labels).loss; };
  GradcheckReport report;
  for (Index k = 0; k < subset; ++k) {
    Index flat = static_cast<Index>(rng.engine()() % static_cast<std::uint64_t>(total));
    std::size_t i = 0;
    while (flat >= params[i].value->size()) flat -= params[i++].value->size();
    report.merge(finite_difference_check(*params[i].value, analytic[i], loss, step, params[i].name, {flat}));
  }
  return report;
}

}  // namespace wavegain::nn
