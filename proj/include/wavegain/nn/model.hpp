#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "wavegain/nn/layers.hpp"

namespace wavegain::nn {

enum class LayerKind { Conv2d, WaveGain, Relu, MaxPool2, Flatten, Linear, SoftmaxCE };

std::string to_string(LayerKind kind);
LayerKind parse_layer_kind(const std::string& name);

struct LayerSpec {
  LayerKind kind = LayerKind::Relu;
  Index kernel = 0;        // conv2d: K
  Index filters = 0;       // conv2d, wavegain: F
  Index pad = 0;           // conv2d
  int levels = 1;          // wavegain: J
  Index lowpass_size = 3;  // wavegain: klp
  Index gain_size = 1;     // wavegain: kh = kw
  Index out = 0;           // linear

  static LayerSpec conv2d(Index kernel, Index filters, Index pad);
  static LayerSpec wavegain(int levels, Index lowpass_size, Index filters);
  static LayerSpec simple(LayerKind kind);
  static LayerSpec linear(Index out);
};

enum class Precision { F64, F32 };
std::string to_string(Precision p);       // "64" / "32"
Precision parse_precision(const std::string& s);

struct ModelConfig {
  std::string name;
  std::vector<LayerSpec> layers;
  Shape input{3, 32, 32};
  int num_classes = 10;
  Precision precision = Precision::F64;
  std::string filter_set = std::string(kDefaultFilterSet);
  InitScheme gain_init = InitScheme::Glorot;

  /// Per-sample shape after every layer; throws ConfigError when consecutive
  /// shapes are incompatible, the last layer is not the only softmax_ce, or
  /// the logits do not have num_classes entries.
  std::vector<Shape> validate() const;
};

void to_json(nlohmann::json& j, const LayerSpec& s);
void from_json(const nlohmann::json& j, LayerSpec& s);
void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

/// conv5x5(6) relu pool conv5x5(16) relu pool flatten linear(120) relu
/// linear(84) relu linear(K) softmax_ce. Convolutions pad by 2 so both
/// models run at 32 -> 16 -> 8.
ModelConfig build_lenet(int num_classes);
/// LeNet with both convolutions replaced by wavegain(J=1, klp=3), F = 6, 16.
ModelConfig build_wavelenet(int num_classes);
ModelConfig build_model(const std::string& name, int num_classes);  // "lenet" | "wavelenet"

template <typename Scalar>
class Model {
 public:
  Model(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }

  /// Logits [N x num_classes] for images [N x C x H x W].
  Tensor<Scalar> forward(const Tensor<Scalar>& x);
  /// Forward, loss and full backward; gradients accumulate into the layers.
  LossResult<Scalar> forward_backward(const Tensor<Scalar>& x, const std::vector<int>& labels);

  void zero_grad();
  /// Parameters named "layer<i>.<name>" in layer order.
  std::vector<ParamRef<Scalar>> params();
  Index parameter_count();
  /// Stored real scalars of layer i.
  Index layer_parameter_count(std::size_t i);

  std::size_t size() const { return layers_.size(); }
  Layer<Scalar>& layer(std::size_t i) { return *layers_[i]; }

 private:
  ModelConfig config_;
  std::uint64_t seed_;
  std::vector<std::unique_ptr<Layer<Scalar>>> layers_;  // softmax_ce excluded
};

/// Parameters as layer<i>.<name>.npy plus manifest.json holding the model
/// config, seed and any `extra` metadata.
template <typename Scalar>
void save_checkpoint(const std::filesystem::path& dir, Model<Scalar>& model, const nlohmann::json& extra = {});

struct Checkpoint {
  ModelConfig config;
  std::uint64_t seed = 0;
  nlohmann::json manifest;
};

Checkpoint read_checkpoint_manifest(const std::filesystem::path& dir);

/// Overwrites the model's parameters with those stored in `dir`.
template <typename Scalar>
void load_checkpoint_params(const std::filesystem::path& dir, Model<Scalar>& model);

}  // namespace wavegain::nn
