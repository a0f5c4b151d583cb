#include "wavegain/nn/layers.hpp"

#include <cmath>
#include <limits>

#include "wavegain/core/conv.hpp"

namespace wavegain::nn {
namespace {

template <typename Scalar>
void fill_pytorch_uniform(Tensor<Scalar>& t, Index fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  rng.fill_uniform(t, -bound, bound);
}

void require_rank(const Shape& s, std::size_t rank, const char* what) {
  if (s.size() != rank) throw DimensionError(std::string(what) + ": unexpected input shape " + to_string(s));
}

}  // namespace

// Conv2d

template <typename Scalar>
Conv2d<Scalar>::Conv2d(Index in_channels, Index filters, Index kernel, Index pad_, Rng& rng)
    : weight({filters, in_channels, kernel, kernel}),
      bias({filters}),
      weight_grad({filters, in_channels, kernel, kernel}),
      bias_grad({filters}),
      pad(pad_) {
  fill_pytorch_uniform(weight, in_channels * kernel * kernel, rng);
  fill_pytorch_uniform(bias, in_channels * kernel * kernel, rng);
}

template <typename Scalar>
Shape Conv2d<Scalar>::output_shape(const Shape& input) const {
  require_rank(input, 3, "conv2d");
  if (input[0] != weight.dim(1)) throw DimensionError("conv2d: expected " + std::to_string(weight.dim(1)) + " channels");
  const Index k = weight.dim(2);
  const Index h = input[1] + 2 * pad - k + 1, w = input[2] + 2 * pad - k + 1;
  if (h < 1 || w < 1) throw DimensionError("conv2d: kernel larger than padded input " + to_string(input));
  return {weight.dim(0), h, w};
}

template <typename Scalar>
Tensor<Scalar> Conv2d<Scalar>::forward(const Tensor<Scalar>& x) {
  input_ = x;
  auto y = correlate2d(x, weight, pad);
  const Index hw = y.dim(2) * y.dim(3);
  for (Index p = 0; p < y.planes(); ++p) y.values().segment(p * hw, hw) += bias.values()[p % weight.dim(0)];
  return y;
}

template <typename Scalar>
Tensor<Scalar> Conv2d<Scalar>::backward(const Tensor<Scalar>& dy) {
  weight_grad.values() += correlate2d_weight_adjoint(input_, dy, pad, weight.dim(2), weight.dim(3)).values();
  const Index hw = dy.dim(2) * dy.dim(3);
  for (Index p = 0; p < dy.planes(); ++p) bias_grad.values()[p % weight.dim(0)] += dy.values().segment(p * hw, hw).sum();
  return correlate2d_input_adjoint(dy, weight, pad, input_.shape());
}

template <typename Scalar>
std::vector<ParamRef<Scalar>> Conv2d<Scalar>::params() {
  return {{"weight", &weight, &weight_grad}, {"bias", &bias, &bias_grad}};
}

// WaveGain

template <typename Scalar>
WaveGain<Scalar>::WaveGain(GainParams<Scalar> params, FilterSet filters)
    : gains(std::move(params)), filters_(std::move(filters)) {
  grads = gains.zeros_like();
}

template <typename Scalar>
Shape WaveGain<Scalar>::output_shape(const Shape& input) const {
  require_rank(input, 3, "wavegain");
  if (input[0] != gains.in_channels()) {
    throw DimensionError("wavegain: expected " + std::to_string(gains.in_channels()) + " channels");
  }
  return {gains.out_channels(), input[1], input[2]};
}

template <typename Scalar>
const GainLayerPlan<Scalar>& WaveGain<Scalar>::plan_for(Index rows, Index cols) {
  if (!plan_ || plan_->rows() != rows || plan_->cols() != cols) plan_.emplace(filters_, gains.levels, rows, cols);
  return *plan_;
}

template <typename Scalar>
Tensor<Scalar> WaveGain<Scalar>::forward(const Tensor<Scalar>& x) {
  if (x.rank() != 4) throw DimensionError("wavegain: expected [N x C x H x W], got " + to_string(x.shape()));
  return gain_forward(x, gains, plan_for(x.dim(2), x.dim(3)), &cache_);
}

template <typename Scalar>
Tensor<Scalar> WaveGain<Scalar>::backward(const Tensor<Scalar>& dy) {
  auto out = gain_backward(dy, cache_, gains, plan_for(dy.dim(2), dy.dim(3)));
  for (std::size_t j = 0; j < grads.g_hp.size(); ++j) {
    grads.g_hp[j].re.values() += out.grads.g_hp[j].re.values();
    grads.g_hp[j].im.values() += out.grads.g_hp[j].im.values();
  }
  grads.g_lp.values() += out.grads.g_lp.values();
  return std::move(out.dx);
}

template <typename Scalar>
std::vector<ParamRef<Scalar>> WaveGain<Scalar>::params() {
  std::vector<ParamRef<Scalar>> refs;
  for (std::size_t j = 0; j < gains.g_hp.size(); ++j) {
    const std::string tag = "g_hp" + std::to_string(j + 1);
    refs.push_back({tag + ".re", &gains.g_hp[j].re, &grads.g_hp[j].re});
    refs.push_back({tag + ".im", &gains.g_hp[j].im, &grads.g_hp[j].im});
  }
  refs.push_back({"g_lp", &gains.g_lp, &grads.g_lp});
  return refs;
}

// Relu

template <typename Scalar>
Tensor<Scalar> Relu<Scalar>::forward(const Tensor<Scalar>& x) {
  input_ = x;
  return Tensor<Scalar>(x.shape(), x.values().max(Scalar(0)));
}

template <typename Scalar>
Tensor<Scalar> Relu<Scalar>::backward(const Tensor<Scalar>& dy) {
  require_same_shape(dy, input_, "relu backward");
  return Tensor<Scalar>(dy.shape(), (input_.values() > Scalar(0)).select(dy.values(), Scalar(0)));
}

// MaxPool2

template <typename Scalar>
Shape MaxPool2<Scalar>::output_shape(const Shape& input) const {
  require_rank(input, 3, "maxpool2");
  if (input[1] < 2 || input[2] < 2) throw DimensionError("maxpool2: input smaller than 2x2");
  return {input[0], input[1] / 2, input[2] / 2};
}

template <typename Scalar>
Tensor<Scalar> MaxPool2<Scalar>::forward(const Tensor<Scalar>& x) {
  if (x.rank() != 4) throw DimensionError("maxpool2: expected [N x C x H x W], got " + to_string(x.shape()));
  input_shape_ = x.shape();
  const Index h = x.dim(2), w = x.dim(3), ho = h / 2, wo = w / 2;
  Tensor<Scalar> y({x.dim(0), x.dim(1), ho, wo});
  argmax_.assign(static_cast<std::size_t>(y.size()), 0);
  Index k = 0;
  for (Index p = 0; p < x.planes(); ++p) {
    const Scalar* src = x.data() + p * h * w;
    for (Index i = 0; i < ho; ++i) {
      for (Index j = 0; j < wo; ++j, ++k) {
        Index best = (2 * i) * w + 2 * j;
        for (Index di = 0; di < 2; ++di)
          for (Index dj = 0; dj < 2; ++dj) {
            const Index at = (2 * i + di) * w + 2 * j + dj;
            if (src[at] > src[best]) best = at;
          }
        y.data()[k] = src[best];
        argmax_[static_cast<std::size_t>(k)] = p * h * w + best;
      }
    }
  }
  return y;
}

template <typename Scalar>
Tensor<Scalar> MaxPool2<Scalar>::backward(const Tensor<Scalar>& dy) {
  if (static_cast<std::size_t>(dy.size()) != argmax_.size()) throw DimensionError("maxpool2 backward: shape mismatch");
  Tensor<Scalar> dx(input_shape_);
  for (Index k = 0; k < dy.size(); ++k) dx.data()[argmax_[static_cast<std::size_t>(k)]] += dy.data()[k];
  return dx;
}

// Flatten

template <typename Scalar>
Tensor<Scalar> Flatten<Scalar>::forward(const Tensor<Scalar>& x) {
  input_shape_ = x.shape();
  return x.reshaped({x.dim(0), x.size() / x.dim(0)});
}

template <typename Scalar>
Tensor<Scalar> Flatten<Scalar>::backward(const Tensor<Scalar>& dy) {
  return dy.reshaped(input_shape_);
}

// Linear

template <typename Scalar>
Linear<Scalar>::Linear(Index in, Index out, Rng& rng)
    : weight({out, in}), bias({out}), weight_grad({out, in}), bias_grad({out}) {
  fill_pytorch_uniform(weight, in, rng);
  fill_pytorch_uniform(bias, in, rng);
}

template <typename Scalar>
Shape Linear<Scalar>::output_shape(const Shape& input) const {
  require_rank(input, 1, "linear");
  if (input[0] != weight.dim(1)) {
    throw DimensionError("linear: expected " + std::to_string(weight.dim(1)) + " features, got " +
                         std::to_string(input[0]));
  }
  return {weight.dim(0)};
}

template <typename Scalar>
Tensor<Scalar> Linear<Scalar>::forward(const Tensor<Scalar>& x) {
  if (x.rank() != 2 || x.dim(1) != weight.dim(1)) throw DimensionError("linear: input " + to_string(x.shape()));
  input_ = x;
  Tensor<Scalar> y({x.dim(0), weight.dim(0)});
  auto ym = y.plane(0);
  ym.noalias() = x.plane(0) * weight.plane(0).transpose();
  ym.rowwise() += bias.values().matrix().transpose();
  return y;
}

template <typename Scalar>
Tensor<Scalar> Linear<Scalar>::backward(const Tensor<Scalar>& dy) {
  weight_grad.plane(0).noalias() += dy.plane(0).transpose() * input_.plane(0);
  bias_grad.values() += dy.plane(0).colwise().sum().transpose().array();
  Tensor<Scalar> dx(input_.shape());
  dx.plane(0).noalias() = dy.plane(0) * weight.plane(0);
  return dx;
}

template <typename Scalar>
std::vector<ParamRef<Scalar>> Linear<Scalar>::params() {
  return {{"weight", &weight, &weight_grad}, {"bias", &bias, &bias_grad}};
}

// Loss

template <typename Scalar>
LossResult<Scalar> softmax_cross_entropy(const Tensor<Scalar>& logits, const std::vector<int>& labels) {
  if (logits.rank() != 2 || static_cast<std::size_t>(logits.dim(0)) != labels.size()) {
    throw DimensionError("softmax_cross_entropy: logits " + to_string(logits.shape()) + " for " +
                         std::to_string(labels.size()) + " labels");
  }
  const Index n = logits.dim(0), k = logits.dim(1);
  LossResult<Scalar> out;
  out.dlogits = Tensor<Scalar>(logits.shape());
  const auto z = logits.plane(0);
  auto dz = out.dlogits.plane(0);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= k) throw DimensionError("softmax_cross_entropy: label " + std::to_string(label) + " out of range");
    Index best = 0;
    const Scalar m = z.row(i).maxCoeff(&best);
    if (best == label) ++out.correct;
    const auto shifted = (z.row(i).array() - m).template cast<double>();
    const auto e = shifted.exp();
    const double sum = e.sum();
    total += std::log(sum) - shifted[label];
    for (Index c = 0; c < k; ++c) {
      dz(i, c) = static_cast<Scalar>((e[c] / sum - (c == label ? 1.0 : 0.0)) / static_cast<double>(n));
    }
  }
  out.loss = total / static_cast<double>(n);
  return out;
}

template <typename Scalar>
std::vector<int> argmax_rows(const Tensor<Scalar>& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.dim(0)));
  const auto z = logits.plane(0);
  for (Index i = 0; i < z.rows(); ++i) {
    Index best = 0;
    z.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

#define WAVEGAIN_INSTANTIATE(S)                                                                   \
  template class Conv2d<S>;                                                                       \
  template class WaveGain<S>;                                                                     \
  template class Relu<S>;                                                                         \
  template class MaxPool2<S>;                                                                     \
  template class Flatten<S>;                                                                      \
  template class Linear<S>;                                                                       \
  template LossResult<S> softmax_cross_entropy<S>(const Tensor<S>&, const std::vector<int>&);     \
  template std::vector<int> argmax_rows<S>(const Tensor<S>&);
WAVEGAIN_INSTANTIATE(float)
WAVEGAIN_INSTANTIATE(double)
#undef WAVEGAIN_INSTANTIATE

}  // namespace wavegain::nn
