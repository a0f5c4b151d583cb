// train, eval and the dataset size check.

#include <cmath>
#include <cstdlib>
#include <iostream>

#include "cli_common.hpp"
#include "commands.hpp"
#include "wavegain/core/random.hpp"
#include "wavegain/nn/train.hpp"

namespace wavegain::cli {

namespace {

namespace fs = std::filesystem;

std::string default_data_dir() {
  const char* env = std::getenv("WAVEGAIN_CIFAR_DIR");
  return env ? env : "";
}

int download_check(const std::string& dir, const std::string& dataset) {
  if (dir.empty()) throw ConfigError("--data-dir (or WAVEGAIN_CIFAR_DIR) is required");
  bool ok = true;
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : data::verify_cifar_files(dir, data::parse_variant(dataset))) {
    ok = ok && c.ok();
    rows.push_back({c.name, std::to_string(c.expected), c.present ? std::to_string(c.actual) : "missing",
                    c.ok() ? "ok" : "BAD"});
  }
  std::cout << format_table({"file", "expected bytes", "actual bytes", "status"}, rows);
  std::cout << "(sizes only: this tool never downloads; fetch the binary archives yourself)\n";
  return ok ? kOk : kIoError;
}

nlohmann::json normalization_json(const data::Normalization& n) { return {{"mean", n.mean}, {"std", n.stddev}}; }

data::Normalization normalization_from(const nlohmann::json& j) {
  data::Normalization n;
  n.mean = j.at("mean").get<std::array<double, 3>>();
  n.stddev = j.at("std").get<std::array<double, 3>>();
  return n;
}

struct TrainCmdConfig {
  std::string model = "lenet";
  std::string dataset = "cifar10";
  std::string data_dir;
  Index train_size = 1000;
  int seeds = 1;
  std::uint64_t seed_base = 0;
  int epochs = 200;
  double lr = 1e-3;
  double weight_decay = 1e-5;
  Index batch_size = 128;
  Index eval_batch_size = 500;
  std::string precision = "64";
  bool deterministic = true;
  bool checkpoints = true;
  bool download_check = false;
  std::string out_dir = "out/train";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainCmdConfig, model, dataset, data_dir, train_size, seeds,
                                                seed_base, epochs, lr, weight_decay, batch_size, eval_batch_size,
                                                precision, deterministic, checkpoints, download_check, out_dir)

void validate(const TrainCmdConfig& c) {
  if (c.model != "lenet" && c.model != "wavelenet") throw ConfigError("train: --model must be lenet or wavelenet");
  data::parse_variant(c.dataset);
  nn::parse_precision(c.precision);
  static const Index sizes[] = {1000, 2000, 5000, 10000, 20000, 50000};
  if (std::find(std::begin(sizes), std::end(sizes), c.train_size) == std::end(sizes)) {
    throw ConfigError("train: --train-size must be one of 1000, 2000, 5000, 10000, 20000, 50000");
  }
  if (c.seeds < 1 || c.epochs < 1 || c.batch_size < 1 || c.eval_batch_size < 1 || !(c.lr > 0) ||
      c.weight_decay < 0) {
    throw ConfigError("train: seeds, epochs and batch sizes must be >= 1, lr > 0, weight decay >= 0");
  }
  if (!c.deterministic) {
    std::cerr << "train: execution is single-threaded, so runs are deterministic regardless\n";
  }
}

template <typename Scalar>
nn::RunMetrics run_seed(const TrainCmdConfig& cfg, const data::CifarSplits& raw, std::uint64_t seed,
                        const fs::path& out) {
  // One subsample per seed, standardized with its own statistics.
  auto train = data::subsample_per_class(raw.train, cfg.train_size, Rng::derived(seed, 1).engine()());
  auto test = raw.test;
  const auto norm = data::fit_normalization(train);
  data::apply_normalization(train, norm);
  data::apply_normalization(test, norm);

  auto model_cfg = nn::build_model(cfg.model, data::class_count(data::parse_variant(cfg.dataset)));
  model_cfg.precision = nn::parse_precision(cfg.precision);
  nn::Model<Scalar> model(model_cfg, seed);
  nn::TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.lr = cfg.lr;
  tc.weight_decay = cfg.weight_decay;
  tc.batch_size = cfg.batch_size;
  tc.eval_batch_size = cfg.eval_batch_size;
  tc.seed = seed;
  tc.deterministic = cfg.deterministic;
  const auto metrics = nn::train(model, train, test, tc, [&](const nn::EpochMetrics& e) {
    std::cout << "seed " << seed << " epoch " << e.epoch << "/" << cfg.epochs << " loss "
              << format_double(e.train_loss, 4) << " train " << format_double(100 * e.train_acc, 4) << "% val "
              << format_double(100 * e.val_acc, 4) << "% (" << format_double(e.seconds, 3) << " s)\n"
              << std::flush;
  });
  write_text(out / ("seed_" + std::to_string(seed) + ".csv"), metrics.csv());
  if (cfg.checkpoints) {
    nn::save_checkpoint(out / "checkpoints" / ("seed_" + std::to_string(seed)), model,
                        {{"dataset", cfg.dataset},
                         {"train_size", cfg.train_size},
                         {"normalization", normalization_json(norm)},
                         {"val_acc", metrics.final_val_acc()},
                         {"train_config", tc}});
  }
  return metrics;
}

int run_train(const TrainCmdConfig& cfg) {
  if (cfg.download_check) return download_check(cfg.data_dir, cfg.dataset);
  validate(cfg);
  if (cfg.data_dir.empty()) throw ConfigError("train: --data-dir (or WAVEGAIN_CIFAR_DIR) is required");
  const auto raw = data::load_cifar_raw(cfg.data_dir, data::parse_variant(cfg.dataset));
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < cfg.seeds; ++k) seeds.push_back(cfg.seed_base + static_cast<std::uint64_t>(k));
  write_manifest(out, "train", cfg, seeds);

  nlohmann::json runs = nlohmann::json::array();
  std::vector<double> finals;
  for (auto s : seeds) {
    const auto m = nn::parse_precision(cfg.precision) == nn::Precision::F32 ? run_seed<float>(cfg, raw, s, out)
                                                                              : run_seed<double>(cfg, raw, s, out);
    runs.push_back(m);
    finals.push_back(m.final_val_acc());
  }
  double mean = 0.0, var = 0.0;
  for (double a : finals) mean += a;
  mean /= static_cast<double>(finals.size());
  for (double a : finals) var += (a - mean) * (a - mean);
  const double sd = finals.size() > 1 ? std::sqrt(var / static_cast<double>(finals.size() - 1)) : 0.0;
  write_json(out / "summary.json", {{"model", cfg.model},
                                    {"dataset", cfg.dataset},
                                    {"train_size", cfg.train_size},
                                    {"epochs", cfg.epochs},
                                    {"batch_size", cfg.batch_size},
                                    {"runs", runs},
                                    {"final_val_acc", finals},
                                    {"mean_val_acc", mean},
                                    {"std_val_acc", sd}});
  std::cout << cfg.model << " on " << cfg.dataset << " (" << cfg.train_size << " samples, " << seeds.size()
            << " seeds): top-1 " << format_double(100 * mean, 4) << "% +- " << format_double(100 * sd, 3) << '\n';
  return kOk;
}

struct EvalConfig {
  std::string checkpoint;
  std::string data_dir;
  std::string dataset;  // defaults to the checkpoint's
  Index eval_batch_size = 500;
  bool download_check = false;
  std::string out_dir = "out/eval";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EvalConfig, checkpoint, data_dir, dataset, eval_batch_size,
                                                download_check, out_dir)

template <typename Scalar>
double evaluate_checkpoint(const nn::Checkpoint& ck, const fs::path& dir, const data::Dataset& test, Index batch) {
  nn::Model<Scalar> model(ck.config, ck.seed);
  nn::load_checkpoint_params(dir, model);
  return nn::evaluate(model, test, batch);
}

int run_eval(const EvalConfig& cfg) {
  if (cfg.checkpoint.empty()) throw ConfigError("eval: --checkpoint is required");
  const auto ck = nn::read_checkpoint_manifest(cfg.checkpoint);
  const std::string dataset = cfg.dataset.empty() ? ck.manifest.value("dataset", std::string("cifar10")) : cfg.dataset;
  if (cfg.download_check) return download_check(cfg.data_dir, dataset);
  if (cfg.data_dir.empty()) throw ConfigError("eval: --data-dir (or WAVEGAIN_CIFAR_DIR) is required");
  if (cfg.eval_batch_size < 1) throw ConfigError("eval: --eval-batch-size must be >= 1");
  const auto variant = data::parse_variant(dataset);
  if (data::class_count(variant) != ck.config.num_classes) {
    throw ConfigError("eval: checkpoint has " + std::to_string(ck.config.num_classes) + " classes, " + dataset +
                      " has " + std::to_string(data::class_count(variant)));
  }
  auto test = data::load_cifar_raw(cfg.data_dir, variant).test;
  if (ck.manifest.contains("normalization")) data::apply_normalization(test, normalization_from(ck.manifest["normalization"]));
  const double acc = ck.config.precision == nn::Precision::F32
                         ? evaluate_checkpoint<float>(ck, cfg.checkpoint, test, cfg.eval_batch_size)
                         : evaluate_checkpoint<double>(ck, cfg.checkpoint, test, cfg.eval_batch_size);
  nlohmann::json result = {{"val_acc", acc}, {"dataset", dataset}, {"samples", test.size()}};
  bool match = true;
  if (ck.manifest.contains("val_acc") && dataset == ck.manifest.value("dataset", dataset)) {
    const double logged = ck.manifest["val_acc"].get<double>();
    match = logged == acc;
    result["logged_val_acc"] = logged;
    result["matches_logged"] = match;
  }
  const fs::path out(cfg.out_dir);
  write_json(out / "eval.json", result);
  write_manifest(out, "eval", cfg, {ck.seed});
  std::cout << "top-1 " << format_double(100 * acc, 6) << "% on " << test.size() << " " << dataset << " test images";
  if (result.contains("logged_val_acc")) std::cout << (match ? " (matches the logged value)" : " (DIFFERS from the logged value)");
  std::cout << '\n';
  return match ? kOk : kVerificationFailure;
}

}  // namespace

Command add_train(CLI::App& root) {
  auto* app = root.add_subcommand("train", "Train LeNet or WaveLeNet on subsampled CIFAR");
  auto cfg = std::make_shared<TrainCmdConfig>();
  cfg->data_dir = default_data_dir();
  auto ov = std::make_shared<Overrides>();
  auto config_path = std::make_shared<std::string>();
  app->add_option("--config", *config_path, "JSON config file");
  ov->option(app, "--model", cfg->model, "lenet or wavelenet");
  ov->option(app, "--dataset", cfg->dataset, "cifar10 or cifar100");
  ov->option(app, "--data-dir", cfg->data_dir, "Directory with the CIFAR binary files (default $WAVEGAIN_CIFAR_DIR)");
  ov->option(app, "--train-size", cfg->train_size, "Training samples, class balanced");
  ov->option(app, "--seeds", cfg->seeds, "Number of seeds (runs)");
  ov->option(app, "--seed-base", cfg->seed_base, "First seed; runs use seed-base, seed-base+1, ...");
  ov->option(app, "--epochs", cfg->epochs, "Epochs");
  ov->option(app, "--lr", cfg->lr, "Adam learning rate");
  ov->option(app, "--weight-decay", cfg->weight_decay, "L2 weight decay added to the gradient");
  ov->option(app, "--batch-size", cfg->batch_size, "Minibatch size");
  ov->option(app, "--eval-batch-size", cfg->eval_batch_size, "Batch size for validation passes");
  ov->option(app, "--precision", cfg->precision, "64 or 32");
  ov->option(app, "--deterministic", cfg->deterministic, "Deterministic mode (always on: single-threaded)");
  ov->option(app, "--checkpoints", cfg->checkpoints, "Save final parameters per seed");
  ov->flag(app, "--download-check", cfg->download_check, "Only verify the dataset files and exit");
  ov->option(app, "--out-dir", cfg->out_dir, "Output directory");
  return {app, [=] {
            load_config(*config_path, "train", *cfg);
            ov->apply();
            return run_train(*cfg);
          }};
}

Command add_eval(CLI::App& root) {
  auto* app = root.add_subcommand("eval", "Evaluate a saved checkpoint on the CIFAR test split");
  auto cfg = std::make_shared<EvalConfig>();
  cfg->data_dir = default_data_dir();
  auto ov = std::make_shared<Overrides>();
  auto config_path = std::make_shared<std::string>();
  app->add_option("--config", *config_path, "JSON config file");
  ov->option(app, "--checkpoint", cfg->checkpoint, "Checkpoint directory written by train");
  ov->option(app, "--data-dir", cfg->data_dir, "Directory with the CIFAR binary files (default $WAVEGAIN_CIFAR_DIR)");
  ov->option(app, "--dataset", cfg->dataset, "cifar10 or cifar100 (default: the checkpoint's)");
  ov->option(app, "--eval-batch-size", cfg->eval_batch_size, "Batch size");
  ov->flag(app, "--download-check", cfg->download_check, "Only verify the dataset files and exit");
  ov->option(app, "--out-dir", cfg->out_dir, "Output directory");
  return {app, [=] {
            load_config(*config_path, "eval", *cfg);
            ov->apply();
            return run_eval(*cfg);
          }};
}

}  // namespace wavegain::cli
