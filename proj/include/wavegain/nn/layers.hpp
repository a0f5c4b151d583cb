#pragma once

// Differentiable blocks. Each layer caches what its backward pass needs
// during forward(); backward() returns dL/dx and adds parameter gradients
// into the layer's gradient tensors (callers zero them per step).

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wavegain/core/random.hpp"
#include "wavegain/core/tensor.hpp"
#include "wavegain/gainlayer/gain.hpp"

namespace wavegain::nn {

template <typename Scalar>
struct ParamRef {
  std::string name;
  Tensor<Scalar>* value;
  Tensor<Scalar>* grad;
};

template <typename Scalar>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string kind() const = 0;
  virtual Shape output_shape(const Shape& input) const = 0;  // per-sample shapes
  virtual Tensor<Scalar> forward(const Tensor<Scalar>& x) = 0;
  virtual Tensor<Scalar> backward(const Tensor<Scalar>& dy) = 0;
  virtual std::vector<ParamRef<Scalar>> params() { return {}; }
};

/// Stride-1 cross-correlation with zero padding, plus a bias per filter.
/// PyTorch default init: w, b ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
template <typename Scalar>
class Conv2d final : public Layer<Scalar> {
 public:
  Conv2d(Index in_channels, Index filters, Index kernel, Index pad, Rng& rng);
  std::string kind() const override { return "conv2d"; }
  Shape output_shape(const Shape& input) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& dy) override;
  std::vector<ParamRef<Scalar>> params() override;

  Tensor<Scalar> weight, bias, weight_grad, bias_grad;
  Index pad;

 private:
  Tensor<Scalar> input_;
};

/// The wavelet gain layer (no bias). Parameters are the real and imaginary
/// planes of every highpass gain and the real lowpass gain.
template <typename Scalar>
class WaveGain final : public Layer<Scalar> {
 public:
  WaveGain(GainParams<Scalar> params, FilterSet filters);
  std::string kind() const override { return "wavegain"; }
  Shape output_shape(const Shape& input) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& dy) override;
  std::vector<ParamRef<Scalar>> params() override;

  GainParams<Scalar> gains, grads;

 private:
  const GainLayerPlan<Scalar>& plan_for(Index rows, Index cols);

  FilterSet filters_;
  std::optional<GainLayerPlan<Scalar>> plan_;
  GainLayerCache<Scalar> cache_;
};

template <typename Scalar>
class Relu final : public Layer<Scalar> {
 public:
  std::string kind() const override { return "relu"; }
  Shape output_shape(const Shape& input) const override { return input; }
  Tensor<Scalar> forward(const Tensor<Scalar>& x) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& dy) override;

 private:
  Tensor<Scalar> input_;
};

/// 2x2 max pooling, stride 2; odd trailing rows/cols are dropped. Ties go to
/// the first maximum in row-major order.
template <typename Scalar>
class MaxPool2 final : public Layer<Scalar> {
 public:
  std::string kind() const override { return "maxpool2"; }
  Shape output_shape(const Shape& input) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& dy) override;

 private:
  Shape input_shape_;
  std::vector<Index> argmax_;
};

template <typename Scalar>
class Flatten final : public Layer<Scalar> {
 public:
  std::string kind() const override { return "flatten"; }
  Shape output_shape(const Shape& input) const override { return {shape_size(input)}; }
  Tensor<Scalar> forward(const Tensor<Scalar>& x) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& dy) override;

 private:
  Shape input_shape_;
};

/// y = x W^T + b, x: [N x in]. PyTorch default init as for Conv2d.
template <typename Scalar>
class Linear final : public Layer<Scalar> {
 public:
  Linear(Index in, Index out, Rng& rng);
  std::string kind() const override { return "linear"; }
  Shape output_shape(const Shape& input) const override;
  Tensor<Scalar> forward(const Tensor<Scalar>& x) override;
  Tensor<Scalar> backward(const Tensor<Scalar>& dy) override;
  std::vector<ParamRef<Scalar>> params() override;

  Tensor<Scalar> weight, bias, weight_grad, bias_grad;

 private:
  Tensor<Scalar> input_;
};

template <typename Scalar>
struct LossResult {
  double loss = 0.0;        // mean over the batch
  Index correct = 0;        // argmax hits
  Tensor<Scalar> dlogits;   // d(mean loss)/d(logits)
};

/// Softmax cross-entropy on logits [N x K] with integer labels, averaged over
/// the batch. Labels outside [0, K) raise DimensionError.
template <typename Scalar>
LossResult<Scalar> softmax_cross_entropy(const Tensor<Scalar>& logits, const std::vector<int>& labels);

/// Row-wise argmax of [N x K]; the first index wins ties.
template <typename Scalar>
std::vector<int> argmax_rows(const Tensor<Scalar>& logits);

}  // namespace wavegain::nn
