#include "wavegain/nn/model.hpp"

#include <fstream>

#include "wavegain/core/npy.hpp"

namespace wavegain::nn {

namespace {

struct KindName {
  LayerKind kind;
  const char* name;
};
constexpr KindName kKindNames[] = {{LayerKind::Conv2d, "conv2d"},   {LayerKind::WaveGain, "wavegain"},
                                   {LayerKind::Relu, "relu"},       {LayerKind::MaxPool2, "maxpool2"},
                                   {LayerKind::Flatten, "flatten"}, {LayerKind::Linear, "linear"},
                                   {LayerKind::SoftmaxCE, "softmax_ce"}};

}  // namespace

std::string to_string(LayerKind kind) {
  for (const auto& k : kKindNames)
    if (k.kind == kind) return k.name;
  return "?";
}

LayerKind parse_layer_kind(const std::string& name) {
  for (const auto& k : kKindNames)
    if (name == k.name) return k.kind;
  throw ConfigError("unknown layer kind '" + name + "'");
}

LayerSpec LayerSpec::conv2d(Index kernel, Index filters, Index pad) {
  LayerSpec s;
  s.kind = LayerKind::Conv2d;
  s.kernel = kernel;
  s.filters = filters;
  s.pad = pad;
  return s;
}

LayerSpec LayerSpec::wavegain(int levels, Index lowpass_size, Index filters) {
  LayerSpec s;
  s.kind = LayerKind::WaveGain;
  s.levels = levels;
  s.lowpass_size = lowpass_size;
  s.filters = filters;
  return s;
}

LayerSpec LayerSpec::simple(LayerKind kind) {
  LayerSpec s;
  s.kind = kind;
  return s;
}

LayerSpec LayerSpec::linear(Index out) {
  LayerSpec s;
  s.kind = LayerKind::Linear;
  s.out = out;
  return s;
}

std::string to_string(Precision p) { return p == Precision::F64 ? "64" : "32"; }

Precision parse_precision(const std::string& s) {
  if (s == "64" || s == "f64" || s == "double") return Precision::F64;
  if (s == "32" || s == "f32" || s == "float") return Precision::F32;
  throw ConfigError("precision must be 64 or 32, got '" + s + "'");
}

std::vector<Shape> ModelConfig::validate() const {
  if (layers.empty() || layers.back().kind != LayerKind::SoftmaxCE) {
    throw ConfigError("model '" + name + "': the last layer must be softmax_ce");
  }
  if (num_classes < 2) throw ConfigError("model '" + name + "': num_classes must be >= 2");
  std::vector<Shape> shapes;
  Shape s = input;
  auto fail = [&](std::size_t i, const std::string& why) {
    throw ConfigError("model '" + name + "' layer " + std::to_string(i) + " (" + to_string(layers[i].kind) +
                      "): " + why + ", input " + wavegain::to_string(s));
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    switch (l.kind) {
      case LayerKind::Conv2d: {
        if (s.size() != 3) fail(i, "needs a C x H x W input");
        if (l.kernel < 1 || l.filters < 1 || l.pad < 0) fail(i, "bad kernel/filters/pad");
        const Index h = s[1] + 2 * l.pad - l.kernel + 1, w = s[2] + 2 * l.pad - l.kernel + 1;
        if (h < 1 || w < 1) fail(i, "kernel larger than the padded input");
        s = {l.filters, h, w};
        break;
      }
      case LayerKind::WaveGain:
        if (s.size() != 3) fail(i, "needs a C x H x W input");
        if (l.filters < 1 || l.levels < 1 || l.lowpass_size < 1 || l.lowpass_size % 2 == 0 || l.gain_size < 1 ||
            l.gain_size % 2 == 0) {
          fail(i, "bad filters/levels/gain sizes");
        }
        s = {l.filters, s[1], s[2]};
        break;
      case LayerKind::Relu:
        break;
      case LayerKind::MaxPool2:
        if (s.size() != 3 || s[1] < 2 || s[2] < 2) fail(i, "needs a C x H x W input of at least 2 x 2");
        s = {s[0], s[1] / 2, s[2] / 2};
        break;
      case LayerKind::Flatten:
        s = {shape_size(s)};
        break;
      case LayerKind::Linear:
        if (s.size() != 1) fail(i, "needs a flat input");
        if (l.out < 1) fail(i, "bad output size");
        s = {l.out};
        break;
      case LayerKind::SoftmaxCE:
        if (i + 1 != layers.size()) fail(i, "softmax_ce must be the only terminal layer");
        if (s.size() != 1 || s[0] != num_classes) fail(i, "logits must have num_classes entries");
        break;
    }
    shapes.push_back(s);
  }
  return shapes;
}

void to_json(nlohmann::json& j, const LayerSpec& s) {
  j = nlohmann::json{{"type", to_string(s.kind)}};
  switch (s.kind) {
    case LayerKind::Conv2d:
      j["K"] = s.kernel;
      j["F"] = s.filters;
      j["pad"] = s.pad;
      break;
    case LayerKind::WaveGain:
      j["J"] = s.levels;
      j["klp"] = s.lowpass_size;
      j["F"] = s.filters;
      j["gain_size"] = s.gain_size;
      break;
    case LayerKind::Linear:
      j["out"] = s.out;
      break;
    default:
      break;
  }
}

void from_json(const nlohmann::json& j, LayerSpec& s) {
  s = LayerSpec{};
  s.kind = parse_layer_kind(j.at("type").get<std::string>());
  s.kernel = j.value("K", Index{0});
  s.filters = j.value("F", Index{0});
  s.pad = j.value("pad", Index{0});
  s.levels = j.value("J", 1);
  s.lowpass_size = j.value("klp", Index{3});
  s.gain_size = j.value("gain_size", Index{1});
  s.out = j.value("out", Index{0});
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"name", c.name},
                     {"layers", c.layers},
                     {"input", c.input},
                     {"num_classes", c.num_classes},
                     {"precision", to_string(c.precision)},
                     {"filter_set", c.filter_set},
                     {"gain_init", wavegain::to_string(c.gain_init)}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  c = ModelConfig{};
  c.name = j.value("name", std::string("custom"));
  c.layers = j.at("layers").get<std::vector<LayerSpec>>();
  if (j.contains("input")) c.input = j.at("input").get<Shape>();
  c.num_classes = j.value("num_classes", 10);
  c.precision = parse_precision(j.value("precision", std::string("64")));
  c.filter_set = j.value("filter_set", std::string(kDefaultFilterSet));
  c.gain_init = parse_init_scheme(j.value("gain_init", std::string("glorot")));
}

namespace {

ModelConfig lenet_family(const std::string& name, int num_classes, LayerSpec first, LayerSpec second) {
  if (num_classes < 2) throw ConfigError("num_classes must be >= 2");
  ModelConfig c;
  c.name = name;
  c.num_classes = num_classes;
  const auto relu = LayerSpec::simple(LayerKind::Relu);
  const auto pool = LayerSpec::simple(LayerKind::MaxPool2);
  c.layers = {first,
              relu,
              pool,
              second,
              relu,
              pool,
              LayerSpec::simple(LayerKind::Flatten),
              LayerSpec::linear(120),
              relu,
              LayerSpec::linear(84),
              relu,
              LayerSpec::linear(num_classes),
              LayerSpec::simple(LayerKind::SoftmaxCE)};
  return c;
}

}  // namespace

ModelConfig build_lenet(int num_classes) {
  return lenet_family("lenet", num_classes, LayerSpec::conv2d(5, 6, 2), LayerSpec::conv2d(5, 16, 2));
}

ModelConfig build_wavelenet(int num_classes) {
  return lenet_family("wavelenet", num_classes, LayerSpec::wavegain(1, 3, 6), LayerSpec::wavegain(1, 3, 16));
}

ModelConfig build_model(const std::string& name, int num_classes) {
  if (name == "lenet") return build_lenet(num_classes);
  if (name == "wavelenet") return build_wavelenet(num_classes);
  throw ConfigError("unknown model '" + name + "' (expected lenet or wavelenet)");
}

template <typename Scalar>
Model<Scalar>::Model(const ModelConfig& config, std::uint64_t seed) : config_(config), seed_(seed) {
  const auto shapes = config_.validate();
  const auto fs = load_filter_set(config_.filter_set);
  Shape in = config_.input;
  for (std::size_t i = 0; i < config_.layers.size(); ++i) {
    const auto& l = config_.layers[i];
    Rng rng = Rng::derived(seed, i);
    switch (l.kind) {
      case LayerKind::Conv2d:
        layers_.push_back(std::make_unique<Conv2d<Scalar>>(in[0], l.filters, l.kernel, l.pad, rng));
        break;
      case LayerKind::WaveGain: {
        auto p = gain_init<Scalar>(l.filters, in[0], l.levels, l.lowpass_size, rng.engine()(), config_.gain_init,
                                   l.gain_size, config_.filter_set);
        layers_.push_back(std::make_unique<WaveGain<Scalar>>(std::move(p), fs));
        break;
      }
      case LayerKind::Relu:
        layers_.push_back(std::make_unique<Relu<Scalar>>());
        break;
      case LayerKind::MaxPool2:
        layers_.push_back(std::make_unique<MaxPool2<Scalar>>());
        break;
      case LayerKind::Flatten:
        layers_.push_back(std::make_unique<Flatten<Scalar>>());
        break;
      case LayerKind::Linear:
        layers_.push_back(std::make_unique<Linear<Scalar>>(in[0], l.out, rng));
        break;
      case LayerKind::SoftmaxCE:
        break;
    }
    in = shapes[i];
  }
}

template <typename Scalar>
Tensor<Scalar> Model<Scalar>::forward(const Tensor<Scalar>& x) {
  Shape expected = config_.input;
  if (x.rank() != 4 || Shape(x.shape().begin() + 1, x.shape().end()) != expected) {
    throw DimensionError("model '" + config_.name + "': input " + wavegain::to_string(x.shape()) +
                         ", expected [N x " + wavegain::to_string(expected) + "]");
  }
  Tensor<Scalar> h = x;
  for (auto& l : layers_) h = l->forward(h);
  return h;
}

template <typename Scalar>
LossResult<Scalar> Model<Scalar>::forward_backward(const Tensor<Scalar>& x, const std::vector<int>& labels) {
  auto result = softmax_cross_entropy(forward(x), labels);
  Tensor<Scalar> g = result.dlogits;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return result;
}

template <typename Scalar>
void Model<Scalar>::zero_grad() {
  for (auto& p : params()) p.grad->values().setZero();
}

template <typename Scalar>
std::vector<ParamRef<Scalar>> Model<Scalar>::params() {
  std::vector<ParamRef<Scalar>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (auto p : layers_[i]->params()) {
      p.name = "layer" + std::to_string(i) + "." + p.name;
      out.push_back(p);
    }
  }
  return out;
}

template <typename Scalar>
Index Model<Scalar>::parameter_count() {
  Index n = 0;
  for (const auto& p : params()) n += p.value->size();
  return n;
}

template <typename Scalar>
Index Model<Scalar>::layer_parameter_count(std::size_t i) {
  Index n = 0;
  for (const auto& p : layers_.at(i)->params()) n += p.value->size();
  return n;
}

template <typename Scalar>
void save_checkpoint(const std::filesystem::path& dir, Model<Scalar>& model, const nlohmann::json& extra) {
  std::filesystem::create_directories(dir);
  nlohmann::json m = extra.is_object() ? extra : nlohmann::json::object();
  m["model"] = model.config();
  m["seed"] = model.seed();
  m["parameter_count"] = model.parameter_count();
  for (const auto& p : model.params()) {
    npy::save(dir / (p.name + ".npy"), *p.value);
    m["params"].push_back(p.name);
  }
  std::ofstream os(dir / "manifest.json");
  if (!os) throw IoError("cannot write " + (dir / "manifest.json").string());
  os << m.dump(2) << '\n';
}

Checkpoint read_checkpoint_manifest(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw IoError("missing checkpoint manifest " + (dir / "manifest.json").string());
  Checkpoint c;
  try {
    is >> c.manifest;
    c.config = c.manifest.at("model").get<ModelConfig>();
    c.seed = c.manifest.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad checkpoint manifest: " + std::string(e.what()));
  }
  return c;
}

template <typename Scalar>
void load_checkpoint_params(const std::filesystem::path& dir, Model<Scalar>& model) {
  for (auto& p : model.params()) {
    auto t = npy::load<Scalar>(dir / (p.name + ".npy"));
    if (t.shape() != p.value->shape()) {
      throw IoError("checkpoint parameter " + p.name + " has shape " + wavegain::to_string(t.shape()) +
                    ", model expects " + wavegain::to_string(p.value->shape()));
    }
    *p.value = std::move(t);
  }
}

template class Model<float>;
template class Model<double>;
template void save_checkpoint<float>(const std::filesystem::path&, Model<float>&, const nlohmann::json&);
template void save_checkpoint<double>(const std::filesystem::path&, Model<double>&, const nlohmann::json&);
template void load_checkpoint_params<float>(const std::filesystem::path&, Model<float>&);
template void load_checkpoint_params<double>(const std::filesystem::path&, Model<double>&);

}  // namespace wavegain::nn
