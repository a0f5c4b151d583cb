#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wavegain/data/cifar.hpp"
#include "wavegain/nn/model.hpp"

namespace wavegain::nn {

/// Adam with L2 weight decay folded into the gradient:
///   g' = g + wd p;  m = b1 m + (1-b1) g';  v = b2 v + (1-b2) g'^2
///   p -= lr (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
template <typename Scalar>
struct AdamState {
  double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8, weight_decay = 1e-5;
  std::int64_t step = 0;
  std::vector<Tensor<Scalar>> m, v;  // one pair per parameter, created on the first step
};

template <typename Scalar>
void adam_step(const std::vector<ParamRef<Scalar>>& params, AdamState<Scalar>& state);

struct TrainConfig {
  int epochs = 200;
  double lr = 1e-3;
  double weight_decay = 1e-5;
  Index batch_size = 128;
  std::uint64_t seed = 0;
  bool deterministic = true;
  Index eval_batch_size = 500;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0, train_acc = 0.0, val_acc = 0.0, seconds = 0.0;
};

struct RunMetrics {
  std::uint64_t seed = 0;
  Index batch_size = 0;
  double wall_seconds = 0.0;
  std::vector<EpochMetrics> epochs;

  double final_val_acc() const { return epochs.empty() ? 0.0 : epochs.back().val_acc; }
  /// epoch,train_loss,train_acc,val_acc,seconds
  std::string csv() const;
};

void to_json(nlohmann::json& j, const RunMetrics& m);

/// Top-1 accuracy in [0, 1]; evaluated in batches of `batch`.
template <typename Scalar>
double evaluate(Model<Scalar>& model, const data::Dataset& ds, Index batch = 500);

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Trains `model` in place on `train` and reports validation accuracy on
/// `val` after every epoch. Throws ConfigError when the class counts of the
/// data and model disagree.
template <typename Scalar>
RunMetrics train(Model<Scalar>& model, const data::Dataset& train, const data::Dataset& val, const TrainConfig& cfg,
                 const EpochCallback& on_epoch = {});

}  // namespace wavegain::nn
