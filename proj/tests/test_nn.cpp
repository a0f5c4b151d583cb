#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "wavegain/core/random.hpp"
#include "wavegain/nn/model.hpp"
#include "wavegain/nn/train.hpp"
#include "wavegain/nn/verify.hpp"

using namespace wavegain;
using namespace wavegain::nn;

namespace {

Tensor<double> make(Shape s, std::vector<double> v) {
  return Tensor<double>(std::move(s), Eigen::Map<Eigen::ArrayXd>(v.data(), static_cast<Index>(v.size())));
}

// Entries pushed at least `margin` away from zero, for kinked blocks.
Tensor<double> away_from_zero(Rng& rng, Shape s, double margin = 0.1) {
  auto t = rng.normal_tensor<double>(std::move(s));
  for (Index i = 0; i < t.size(); ++i) t.data()[i] += t.data()[i] < 0 ? -margin : margin;
  return t;
}

data::Dataset random_dataset(Index n, int classes, std::uint64_t seed) {
  Rng rng(seed);
  data::Dataset d;
  d.classes = classes;
  d.images = rng.normal_tensor<float>({n, 3, 32, 32});
  for (Index i = 0; i < n; ++i) d.labels.push_back(static_cast<int>(rng.engine()() % classes));
  return d;
}

double batch_loss(Model<double>& m, const Tensor<double>& x, const std::vector<int>& y) {
  return softmax_cross_entropy(m.forward(x), y).loss;
}

}  // namespace

TEST_CASE("conv2d: identity, naive oracle, gradcheck, dense transpose") {
  Rng rng(1);
  SUBCASE("1x1 identity kernel") {
    Conv2d<double> conv(3, 3, 1, 0, rng);
    conv.weight.values().setZero();
    conv.bias.values().setZero();
    for (Index c = 0; c < 3; ++c) conv.weight(c, c, 0, 0) = 1.0;
    const auto x = rng.normal_tensor<double>({2, 3, 5, 4});
    CHECK(max_abs_diff(conv.forward(x), x) == 0.0);
  }
  SUBCASE("zero-padded cross-correlation loop") {
    Conv2d<double> conv(2, 3, 3, 1, rng);
    const auto x = rng.normal_tensor<double>({2, 2, 5, 6});
    const auto y = conv.forward(x);
    REQUIRE(y.shape() == Shape{2, 3, 5, 6});
    double worst = 0.0;
    for (Index n = 0; n < 2; ++n)
      for (Index f = 0; f < 3; ++f)
        for (Index r = 0; r < 5; ++r)
          for (Index c = 0; c < 6; ++c) {
            double acc = conv.bias.data()[f];
            for (Index k = 0; k < 2; ++k)
              for (Index i = 0; i < 3; ++i)
                for (Index j = 0; j < 3; ++j) {
                  const Index rr = r + i - 1, cc = c + j - 1;
                  if (rr >= 0 && rr < 5 && cc >= 0 && cc < 6) acc += conv.weight(f, k, i, j) * x(n, k, rr, cc);
                }
            worst = std::max(worst, std::abs(acc - y(n, f, r, c)));
          }
    CHECK(worst <= 1e-14);
  }
  SUBCASE("gradcheck 2x3x6x6, K=3") {
    const auto r = conv2d_gradcheck(7);
    CHECK(r.checked == 4 * 3 * 9 + 4 + 2 * 3 * 36);
    CHECK(r.worst_relative <= 1e-6);
  }
  SUBCASE("dense transpose on 8x8") {
    CHECK(conv2d_dense_transpose_error(2, 3, 3, 1, 8, 8, 3) <= 1e-12);
    CHECK(conv2d_dense_transpose_error(1, 2, 5, 2, 8, 8, 4) <= 1e-12);
  }
  SUBCASE("shape errors") {
    Conv2d<double> conv(3, 2, 3, 0, rng);
    CHECK_THROWS_AS(conv.forward(Tensor<double>({1, 2, 6, 6})), DimensionError);
    CHECK_THROWS_AS(conv.forward(Tensor<double>({1, 3, 2, 2})), DimensionError);
  }
}

TEST_CASE("relu, maxpool, flatten, linear") {
  Rng rng(2);
  SUBCASE("relu values and gradcheck away from the kink") {
    Relu<double> relu;
    auto x = make({2}, {-1.0, 2.0});
    const auto y = relu.forward(x);
    CHECK(y.data()[0] == 0.0);
    CHECK(y.data()[1] == 2.0);
    Relu<double> r2;
    CHECK(layer_gradcheck(r2, away_from_zero(rng, {2, 3, 4, 4}), 5).worst_relative <= 1e-6);
  }
  SUBCASE("maxpool picks the block maximum; gradcheck without ties") {
    MaxPool2<double> pool;
    auto x = make({1, 1, 2, 4}, {1, 5, -2, -1, 3, 2, -3, -4});
    const auto y = pool.forward(x);
    REQUIRE(y.shape() == Shape{1, 1, 1, 2});
    CHECK(y.data()[0] == 5.0);
    CHECK(y.data()[1] == -1.0);
    const auto dx = pool.backward(make({1, 1, 1, 2}, {10, 20}));
    CHECK(dx.data()[1] == 10.0);
    CHECK(dx.data()[3] == 20.0);
    CHECK(dx.values().sum() == 30.0);
    MaxPool2<double> p2;
    CHECK(layer_gradcheck(p2, rng.normal_tensor<double>({2, 3, 6, 7}), 6).worst_relative <= 1e-6);
  }
  SUBCASE("flatten is a reshape") {
    Flatten<double> fl;
    const auto x = rng.normal_tensor<double>({2, 3, 2, 2});
    const auto y = fl.forward(x);
    CHECK(y.shape() == Shape{2, 12});
    CHECK(fl.backward(y).shape() == x.shape());
  }
  SUBCASE("linear forward and gradcheck") {
    Linear<double> lin(5, 3, rng);
    const auto x = rng.normal_tensor<double>({4, 5});
    const auto y = lin.forward(x);
    double worst = 0.0;
    for (Index n = 0; n < 4; ++n)
      for (Index o = 0; o < 3; ++o) {
        double acc = lin.bias.data()[o];
        for (Index i = 0; i < 5; ++i) acc += lin.weight(o, i) * x(n, i);
        worst = std::max(worst, std::abs(acc - y(n, o)));
      }
    CHECK(worst <= 1e-14);
    CHECK(layer_gradcheck(lin, x, 8).worst_relative <= 1e-6);
    CHECK_THROWS_AS(lin.forward(Tensor<double>({4, 6})), DimensionError);
  }
  SUBCASE("wavegain block gradcheck") {
    auto p = gain_init<double>(3, 2, 1, 3, 9, InitScheme::Glorot);
    WaveGain<double> wg(p, load_filter_set(std::string(kDefaultFilterSet)));
    const auto r = layer_gradcheck(wg, rng.normal_tensor<double>({2, 2, 8, 8}), 10);
    CHECK(r.checked == 21 * 6 + 2 * 2 * 64);
    CHECK(r.worst_relative <= 1e-6);
  }
}

TEST_CASE("softmax cross-entropy") {
  SUBCASE("uniform logits give ln K for any label") {
    for (int k : {2, 10, 100}) {
      Tensor<double> logits({3, k});
      logits.values().setConstant(0.7);
      const auto r = softmax_cross_entropy(logits, {0, k - 1, k / 2});
      CHECK(r.loss == doctest::Approx(std::log(static_cast<double>(k))).epsilon(1e-14));
    }
  }
  SUBCASE("gradient matches finite differences") {
    Rng rng(3);
    auto logits = rng.normal_tensor<double>({4, 7});
    const std::vector<int> labels{0, 6, 3, 3};
    const auto r = softmax_cross_entropy(logits, labels);
    auto loss = [&] { return softmax_cross_entropy(logits, labels).loss; };
    CHECK(finite_difference_check(logits, r.dlogits, loss, 1e-5, "logits").worst_relative <= 1e-6);
  }
  SUBCASE("large logits stay finite") {
    auto logits = make({1, 3}, {1000.0, 0.0, -1000.0});
    const auto r = softmax_cross_entropy(logits, {0});
    CHECK(std::isfinite(r.loss));
    CHECK(r.loss == doctest::Approx(0.0));
    CHECK(r.correct == 1);
  }
  SUBCASE("bad labels") {
    Tensor<double> logits({2, 3});
    CHECK_THROWS_AS(softmax_cross_entropy(logits, {0, 3}), DimensionError);
    CHECK_THROWS_AS(softmax_cross_entropy(logits, {0}), DimensionError);
  }
}

TEST_CASE("adam") {
  SUBCASE("constant gradient: hand trajectory") {
    // With g constant, m_hat = g and v_hat = g^2 exactly, so every step moves
    // the parameter by lr * g / (|g| + eps).
    auto p = make({1}, {1.0}), g = make({1}, {0.5});
    std::vector<ParamRef<double>> params{{"p", &p, &g}};
    AdamState<double> s;
    s.lr = 0.1;
    s.weight_decay = 0.0;
    const double per_step = 0.1 * 0.5 / (0.5 + 1e-8);
    for (int t = 1; t <= 3; ++t) {
      adam_step(params, s);
      CHECK(p.data()[0] == doctest::Approx(1.0 - t * per_step).epsilon(1e-14));
    }
    CHECK(s.step == 3);
  }
  SUBCASE("varying gradient, hand calculation") {
    // g = 1 then -1, lr 0.01, no decay.
    // t=1: m=0.1, v=0.001; m_hat=1, v_hat=1 -> p = 1 - 0.01/(1+eps)
    // t=2: m=0.09-0.1=-0.01, v=0.000999+0.001=0.001999
    //      m_hat=-0.01/0.19, v_hat=0.001999/0.001999=1 -> p += 0.01*(0.01/0.19)/(1+eps)
    auto p = make({1}, {1.0}), g = make({1}, {1.0});
    std::vector<ParamRef<double>> params{{"p", &p, &g}};
    AdamState<double> s;
    s.lr = 0.01;
    s.weight_decay = 0.0;
    adam_step(params, s);
    const double p1 = 1.0 - 0.01 / (1.0 + 1e-8);
    CHECK(p.data()[0] == doctest::Approx(p1).epsilon(1e-14));
    g.data()[0] = -1.0;
    adam_step(params, s);
    CHECK(p.data()[0] == doctest::Approx(p1 + 0.01 * (0.01 / 0.19) / (1.0 + 1e-8)).epsilon(1e-12));
  }
  SUBCASE("zero gradients and no decay leave parameters unchanged") {
    Rng rng(4);
    auto p = rng.normal_tensor<double>({3, 4});
    const auto before = p;
    Tensor<double> g({3, 4});
    std::vector<ParamRef<double>> params{{"p", &p, &g}};
    AdamState<double> s;
    s.weight_decay = 0.0;
    for (int i = 0; i < 5; ++i) adam_step(params, s);
    CHECK(max_abs_diff(p, before) == 0.0);
  }
  SUBCASE("weight decay shrinks parameters under zero gradients") {
    Rng rng(5);
    auto p = rng.normal_tensor<double>({10});
    const double n0 = p.values().matrix().norm();
    Tensor<double> g({10});
    std::vector<ParamRef<double>> params{{"p", &p, &g}};
    AdamState<double> s;
    s.weight_decay = 1e-5;
    adam_step(params, s);
    const double n1 = p.values().matrix().norm();
    CHECK(n1 < n0);
    adam_step(params, s);
    CHECK(p.values().matrix().norm() < n1);
  }
}

TEST_CASE("model configs") {
  const auto lenet = build_lenet(10), wave = build_wavelenet(10);
  SUBCASE("shapes and parameter counts") {
    Model<double> a(lenet, 1), b(wave, 1);
    auto* conv = dynamic_cast<Conv2d<double>*>(&a.layer(0));
    auto* gain = dynamic_cast<WaveGain<double>*>(&b.layer(0));
    REQUIRE(conv);
    REQUIRE(gain);
    CHECK(conv->weight.size() == 25 * 3 * 6);
    CHECK(gain->gains.parameter_count() == 21 * 3 * 6);
    CHECK(b.layer_parameter_count(0) == 378);
    auto* gain2 = dynamic_cast<WaveGain<double>*>(&b.layer(3));
    REQUIRE(gain2);
    CHECK(gain2->gains.parameter_count() == 21 * 6 * 16);
    CHECK(lenet.validate()[6] == Shape{1024});
    CHECK(wave.validate()[6] == Shape{1024});
  }
  SUBCASE("logits shape and finite output on zero input") {
    for (const auto& cfg : {lenet, wave, build_lenet(100), build_wavelenet(100)}) {
      Model<double> m(cfg, 2);
      const auto y = m.forward(Tensor<double>({2, 3, 32, 32}));
      CHECK(y.shape() == Shape{2, cfg.num_classes});
      CHECK(y.values().isFinite().all());
    }
  }
  SUBCASE("json round trip") {
    nlohmann::json j = wave;
    const auto back = j.get<ModelConfig>();
    CHECK(nlohmann::json(back) == j);
    CHECK(back.layers.size() == wave.layers.size());
  }
  SUBCASE("validation") {
    auto bad = lenet;
    bad.layers.pop_back();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = lenet;
    bad.num_classes = 7;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = lenet;
    bad.layers.insert(bad.layers.begin() + 2, LayerSpec::simple(LayerKind::SoftmaxCE));
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = lenet;
    bad.layers.erase(bad.layers.begin() + 6);  // no flatten before linear
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_THROWS_AS(build_model("resnet", 10), ConfigError);
    CHECK_THROWS_AS(parse_layer_kind("conv3d"), ConfigError);
  }
  SUBCASE("seeded initialization") {
    Model<double> a(wave, 3), b(wave, 3), c(wave, 4);
    const auto pa = a.params(), pb = b.params(), pc = c.params();
    CHECK(max_abs_diff(*pa[0].value, *pb[0].value) == 0.0);
    CHECK(max_abs_diff(*pa[0].value, *pc[0].value) > 0.0);
  }
}

TEST_CASE("full-model gradcheck") {
  CHECK(model_gradcheck(build_wavelenet(10), 11).worst_relative <= 1e-5);
  CHECK(model_gradcheck(build_lenet(10), 12).worst_relative <= 1e-5);
}

TEST_CASE("training smoke properties") {
  SUBCASE("fixed 32-sample batch: loss strictly decreases over 10 steps") {
    for (const auto& cfg : {build_lenet(10), build_wavelenet(10)}) {
      Model<double> m(cfg, 5);
      Rng rng(6);
      const auto x = rng.normal_tensor<double>({32, 3, 32, 32});
      std::vector<int> y;
      for (int i = 0; i < 32; ++i) y.push_back(i % 10);
      AdamState<double> s;
      const auto params = m.params();
      double prev = batch_loss(m, x, y);
      for (int step = 0; step < 10; ++step) {
        m.zero_grad();
        m.forward_backward(x, y);
        adam_step(params, s);
        const double now = batch_loss(m, x, y);
        CHECK_MESSAGE(now < prev, cfg.name << " step " << step);
        prev = now;
      }
    }
  }
  SUBCASE("one epoch on 100 samples lowers the loss") {
    const auto d = random_dataset(100, 10, 7);
    Model<double> m(build_wavelenet(10), 8);
    std::vector<Index> all(100);
    for (Index i = 0; i < 100; ++i) all[i] = i;
    const auto x = data::gather_images<double>(d, all);
    const double before = batch_loss(m, x, d.labels);
    TrainConfig cfg;
    cfg.epochs = 1;
    train(m, d, d, cfg);
    CHECK(batch_loss(m, x, d.labels) < before);
  }
  SUBCASE("deterministic given the seed") {
    const auto d = random_dataset(40, 10, 9);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 16;
    cfg.seed = 3;
    Model<float> a(build_wavelenet(10), 1), b(build_wavelenet(10), 1);
    const auto ra = train(a, d, d, cfg), rb = train(b, d, d, cfg);
    REQUIRE(ra.epochs.size() == 2);
    for (std::size_t e = 0; e < 2; ++e) {
      CHECK(ra.epochs[e].train_loss == rb.epochs[e].train_loss);
      CHECK(ra.epochs[e].val_acc == rb.epochs[e].val_acc);
    }
    const auto pa = a.params(), pb = b.params();
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(max_abs_diff(*pa[i].value, *pb[i].value) == 0.0);
  }
  SUBCASE("class-count mismatch") {
    const auto d = random_dataset(10, 10, 1);
    Model<double> m(build_lenet(100), 1);
    CHECK_THROWS_AS(train(m, d, d, TrainConfig{}), ConfigError);
  }
}

TEST_CASE("evaluate") {
  SUBCASE("random init is near chance") {
    const auto d = random_dataset(2000, 10, 21);
    Model<float> m(build_lenet(10), 22);
    const double acc = evaluate(m, d);
    CHECK(acc >= 0.08);
    CHECK(acc <= 0.12);
  }
  SUBCASE("memorized subset scores 100%, independent of batch size") {
    const auto d = random_dataset(20, 10, 23);
    Model<double> m(build_lenet(10), 24);
    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.batch_size = 20;
    cfg.lr = 3e-3;
    const auto run = train(m, d, d, cfg);
    CHECK(run.final_val_acc() == 1.0);
    CHECK(evaluate(m, d, 1) == 1.0);
    CHECK(evaluate(m, d, 7) == 1.0);
  }
  SUBCASE("checkpoint round trip reproduces accuracy") {
    const auto d = random_dataset(30, 10, 25);
    Model<double> m(build_wavelenet(10), 26);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 8;
    const auto run = train(m, d, d, cfg);
    const auto dir = std::filesystem::temp_directory_path() / "wavegain_test_ckpt";
    std::filesystem::remove_all(dir);
    save_checkpoint(dir, m, {{"val_acc", run.final_val_acc()}});
    const auto ck = read_checkpoint_manifest(dir);
    CHECK(ck.seed == 26);
    Model<double> restored(ck.config, 999);
    load_checkpoint_params(dir, restored);
    CHECK(evaluate(restored, d) == run.final_val_acc());
    CHECK(evaluate(restored, d, 3) == evaluate(m, d, 11));
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("32-bit conv gradients stay within the relaxed threshold") {
  const auto r = conv2d_gradcheck(7, true);
  CHECK(r.worst_relative <= 1e-3);
  CHECK(r.worst_relative > 0.0);
}
