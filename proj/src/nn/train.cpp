#include "wavegain/nn/train.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace wavegain::nn {

template <typename Scalar>
void adam_step(const std::vector<ParamRef<Scalar>>& params, AdamState<Scalar>& state) {
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.value->shape());
      state.v.emplace_back(p.value->shape());
    }
  }
  if (state.m.size() != params.size()) throw DimensionError("adam_step: parameter list changed between steps");
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const auto b1 = static_cast<Scalar>(state.beta1), b2 = static_cast<Scalar>(state.beta2);
  const auto wd = static_cast<Scalar>(state.weight_decay);
  const auto step = static_cast<Scalar>(state.lr / c1), root_c2 = static_cast<Scalar>(std::sqrt(c2));
  const auto eps = static_cast<Scalar>(state.eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i].value->values();
    const auto& g = params[i].grad->values();
    auto& m = state.m[i].values();
    auto& v = state.v[i].values();
    if (g.size() != p.size() || m.size() != p.size()) throw DimensionError("adam_step: shape mismatch for " + params[i].name);
    const auto gd = (g + wd * p).eval();
    m = b1 * m + (Scalar(1) - b1) * gd;
    v = b2 * v + (Scalar(1) - b2) * gd.square();
    p -= step * m / (v.sqrt() / root_c2 + eps);
  }
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"epochs", c.epochs},
                     {"lr", c.lr},
                     {"weight_decay", c.weight_decay},
                     {"batch_size", c.batch_size},
                     {"seed", c.seed},
                     {"deterministic", c.deterministic},
                     {"eval_batch_size", c.eval_batch_size}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c = TrainConfig{};
  c.epochs = j.value("epochs", c.epochs);
  c.lr = j.value("lr", c.lr);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.deterministic = j.value("deterministic", c.deterministic);
  c.eval_batch_size = j.value("eval_batch_size", c.eval_batch_size);
}

std::string RunMetrics::csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "epoch,train_loss,train_acc,val_acc,seconds\n";
  for (const auto& e : epochs)
    os << e.epoch << ',' << e.train_loss << ',' << e.train_acc << ',' << e.val_acc << ',' << e.seconds << '\n';
  return os.str();
}

void to_json(nlohmann::json& j, const RunMetrics& m) {
  j = nlohmann::json{{"seed", m.seed},
                     {"batch_size", m.batch_size},
                     {"wall_seconds", m.wall_seconds},
                     {"epochs", m.epochs.size()},
                     {"final_val_acc", m.final_val_acc()},
                     {"final_train_acc", m.epochs.empty() ? 0.0 : m.epochs.back().train_acc},
                     {"final_train_loss", m.epochs.empty() ? 0.0 : m.epochs.back().train_loss}};
}

template <typename Scalar>
double evaluate(Model<Scalar>& model, const data::Dataset& ds, Index batch) {
  if (batch < 1) throw ConfigError("evaluate: batch size must be >= 1");
  if (ds.size() == 0) return 0.0;
  Index correct = 0;
  std::vector<Index> rows;
  for (Index s = 0; s < ds.size(); s += batch) {
    rows.clear();
    for (Index i = s; i < std::min(ds.size(), s + batch); ++i) rows.push_back(i);
    const auto pred = argmax_rows(model.forward(data::gather_images<Scalar>(ds, rows)));
    const auto labels = data::gather_labels(ds, rows);
    for (std::size_t k = 0; k < pred.size(); ++k) correct += pred[k] == labels[k];
  }
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

template <typename Scalar>
RunMetrics train(Model<Scalar>& model, const data::Dataset& train_set, const data::Dataset& val,
                 const TrainConfig& cfg, const EpochCallback& on_epoch) {
  const int k = model.config().num_classes;
  if (train_set.classes != k || val.classes != k) {
    throw ConfigError("train: model has " + std::to_string(k) + " classes, data has " +
                      std::to_string(train_set.classes) + "/" + std::to_string(val.classes));
  }
  if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.lr > 0.0) || cfg.weight_decay < 0.0) {
    throw ConfigError("train: bad epochs, batch size, lr or weight decay");
  }
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  RunMetrics metrics;
  metrics.seed = cfg.seed;
  metrics.batch_size = cfg.batch_size;
  AdamState<Scalar> adam;
  adam.lr = cfg.lr;
  adam.weight_decay = cfg.weight_decay;
  const auto params = model.params();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = clock::now();
    double loss_sum = 0.0;
    Index correct = 0;
    for (const auto& rows : data::batch_indices(train_set.size(), cfg.batch_size, cfg.seed,
                                                static_cast<std::uint64_t>(epoch))) {
      model.zero_grad();
      const auto r = model.forward_backward(data::gather_images<Scalar>(train_set, rows),
                                            data::gather_labels(train_set, rows));
      if (!std::isfinite(r.loss)) throw NumericError("train: loss became non-finite at epoch " + std::to_string(epoch));
      loss_sum += r.loss * static_cast<double>(rows.size());
      correct += r.correct;
      adam_step(params, adam);
    }
    EpochMetrics e;
    e.epoch = epoch;
    e.train_loss = loss_sum / static_cast<double>(train_set.size());
    e.train_acc = static_cast<double>(correct) / static_cast<double>(train_set.size());
    e.val_acc = evaluate(model, val, cfg.eval_batch_size);
    e.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    metrics.epochs.push_back(e);
    if (on_epoch) on_epoch(e);
  }
  metrics.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return metrics;
}

template void adam_step<float>(const std::vector<ParamRef<float>>&, AdamState<float>&);
template void adam_step<double>(const std::vector<ParamRef<double>>&, AdamState<double>&);
template double evaluate<float>(Model<float>&, const data::Dataset&, Index);
template double evaluate<double>(Model<double>&, const data::Dataset&, Index);
template RunMetrics train<float>(Model<float>&, const data::Dataset&, const data::Dataset&, const TrainConfig&,
                                 const EpochCallback&);
template RunMetrics train<double>(Model<double>&, const data::Dataset&, const data::Dataset&, const TrainConfig&,
                                  const EpochCallback&);

}  // namespace wavegain::nn
