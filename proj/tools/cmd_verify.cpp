// selftest and gradcheck.

#include <iostream>

#include "cli_common.hpp"
#include "commands.hpp"
#include "wavegain/gainlayer/verify.hpp"
#include "wavegain/nn/verify.hpp"
#include "wavegain/transform/verify.hpp"

namespace wavegain::cli {

namespace {

struct Check {
  std::string name;
  double value = 0.0, threshold = 0.0;
  bool pass() const { return value <= threshold; }
};

void to_json(nlohmann::json& j, const Check& c) {
  j = {{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass()}};
}

int report(const std::vector<Check>& checks, bool as_json, const std::string& out_dir, const std::string& command,
           const nlohmann::json& config, const nlohmann::json& seeds) {
  bool ok = true;
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : checks) {
    ok = ok && c.pass();
    rows.push_back({c.name, format_double(c.value), format_double(c.threshold), c.pass() ? "pass" : "FAIL"});
  }
  const nlohmann::json results = {{"checks", checks}, {"passed", ok}};
  if (as_json) {
    std::cout << results.dump(2) << '\n';
  } else {
    std::cout << format_table({"property", "max error", "threshold", "result"}, rows);
  }
  if (!out_dir.empty()) {
    write_json(std::filesystem::path(out_dir) / "results.json", results);
    write_manifest(out_dir, command, config, seeds);
  }
  for (const auto& c : checks)
    if (!c.pass()) std::cerr << command << ": " << c.name << " failed (" << c.value << " > " << c.threshold << ")\n";
  return ok ? kOk : kVerificationFailure;
}

struct SelftestConfig {
  std::string filter_set = std::string(kDefaultFilterSet);
  std::uint64_t seed = 0;
  int trials = 10;
  bool json = false;
  std::string inject_fault;  // "" or "filter-table"
  std::string out_dir = "out/selftest";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SelftestConfig, filter_set, seed, trials, json, inject_fault, out_dir)

int run_selftest(const SelftestConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("selftest: trials must be >= 1");
  auto fs = load_filter_set(cfg.filter_set);
  if (cfg.inject_fault == "filter-table") {
    fs.level1.h0[1] += 1e-3;  // breaks level-1 perfect reconstruction
  } else if (!cfg.inject_fault.empty()) {
    throw ConfigError("selftest: unknown fault '" + cfg.inject_fault + "' (expected filter-table)");
  }
  std::vector<Check> checks;
  checks.push_back({"stage PR, level 1", stage_reconstruction_error(fs, 1, 32), 1e-12});
  checks.push_back({"stage PR, q-shift", stage_reconstruction_error(fs, 2, 32), 1e-12});
  for (int j = 1; j <= 4; ++j)
    checks.push_back({"transform PR, J=" + std::to_string(j),
                      perfect_reconstruction_error(fs, j, 3, 32, 32, cfg.trials, cfg.seed + j), 1e-9});
  for (int j = 1; j <= 3; ++j) {
    const auto e = transform_adjoint_errors(fs, j, 3, 32, 32, cfg.trials, cfg.seed + 10 + j);
    checks.push_back({"forward adjoint, J=" + std::to_string(j), e.forward, 1e-11});
    checks.push_back({"inverse adjoint, J=" + std::to_string(j), e.inverse, 1e-11});
  }
  GainCheckConfig g;
  g.seed = cfg.seed;
  g.filter_set = cfg.filter_set;
  checks.push_back({"gain layer adjoint", gain_adjoint_error(g), 1e-10});
  checks.push_back({"gain layer gradcheck", gain_layer_gradcheck<double>(g).worst_relative, 1e-6});
  const auto dense = dense_operator_check(g);
  checks.push_back({"dense oracle transpose", dense.transpose_error, 1e-10});
  checks.push_back({"dense oracle forward", dense.forward_error, 1e-10});
  checks.push_back({"identity reduction", identity_reduction_error(3, 16, 16, 2, cfg.seed, cfg.filter_set), 1e-9});
  return report(checks, cfg.json, cfg.out_dir, "selftest", cfg, {cfg.seed});
}

struct GradcheckConfig {
  std::string layer = "wavegain";  // wavegain | conv2d | model | all
  std::string precision = "64";
  std::string filter_set = std::string(kDefaultFilterSet);
  std::uint64_t seed = 0;
  bool json = false;
  std::string out_dir = "out/gradcheck";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GradcheckConfig, layer, precision, filter_set, seed, json, out_dir)

int run_gradcheck(const GradcheckConfig& cfg) {
  const bool f32 = nn::parse_precision(cfg.precision) == nn::Precision::F32;
  const double tol = f32 ? 1e-3 : 1e-6;
  const bool all = cfg.layer == "all";
  if (!all && cfg.layer != "wavegain" && cfg.layer != "conv2d" && cfg.layer != "model") {
    throw ConfigError("gradcheck: --layer must be wavegain, conv2d, model or all");
  }
  std::vector<Check> checks;
  const std::string tag = f32 ? " (32-bit)" : "";
  if (all || cfg.layer == "wavegain") {
    GainCheckConfig g;  // C=2, F=3, 8x8, J=1, klp=3
    g.seed = cfg.seed;
    g.filter_set = cfg.filter_set;
    auto grad = [&](const GainCheckConfig& c) {
      return f32 ? gain_layer_gradcheck<float>(c).worst_relative : gain_layer_gradcheck<double>(c).worst_relative;
    };
    checks.push_back({"wavegain C=2 F=3 8x8 J=1" + tag, grad(g), tol});
    GainCheckConfig g2 = g;
    g2.levels = 2;
    g2.gain_size = 3;
    g2.rows = g2.cols = 12;
    checks.push_back({"wavegain J=2 3x3 gains 12x12" + tag, grad(g2), tol});
    g.batch = 1;
    checks.push_back({"wavegain dense transpose", dense_operator_check(g).transpose_error, 1e-10});
  }
  if (all || cfg.layer == "conv2d") {
    checks.push_back({"conv2d 2x3x6x6 K=3" + tag, nn::conv2d_gradcheck(cfg.seed, f32).worst_relative, tol});
    checks.push_back({"conv2d dense transpose 8x8", nn::conv2d_dense_transpose_error(2, 3, 3, 1, 8, 8, cfg.seed),
                      1e-10});
  }
  if (all || cfg.layer == "model") {
    // End-to-end checks always run in 64-bit.
    checks.push_back({"wavelenet end-to-end, 20 entries",
                      nn::model_gradcheck(nn::build_wavelenet(10), cfg.seed).worst_relative, 1e-5});
    checks.push_back(
        {"lenet end-to-end, 20 entries", nn::model_gradcheck(nn::build_lenet(10), cfg.seed).worst_relative, 1e-5});
  }
  return report(checks, cfg.json, cfg.out_dir, "gradcheck", cfg, {cfg.seed});
}

}  // namespace

Command add_selftest(CLI::App& root) {
  auto* app = root.add_subcommand("selftest", "Run the transform and gain-layer invariant suites");
  auto cfg = std::make_shared<SelftestConfig>();
  auto ov = std::make_shared<Overrides>();
  auto config_path = std::make_shared<std::string>();
  app->add_option("--config", *config_path, "JSON config file");
  ov->option(app, "--filter-set", cfg->filter_set, "Filter set, e.g. near_sym_a+qshift_a");
  ov->option(app, "--seed", cfg->seed, "Random seed");
  ov->option(app, "--trials", cfg->trials, "Random inputs per PR / adjoint check");
  ov->flag(app, "--json", cfg->json, "Print machine-readable results");
  ov->option(app, "--inject-fault", cfg->inject_fault, "Test hook: corrupt a filter table (filter-table)");
  ov->option(app, "--out-dir", cfg->out_dir, "Output directory");
  return {app, [=] {
            load_config(*config_path, "selftest", *cfg);
            ov->apply();
            return run_selftest(*cfg);
          }};
}

Command add_gradcheck(CLI::App& root) {
  auto* app = root.add_subcommand("gradcheck", "Finite-difference and dense-operator gradient checks");
  auto cfg = std::make_shared<GradcheckConfig>();
  auto ov = std::make_shared<Overrides>();
  auto config_path = std::make_shared<std::string>();
  app->add_option("--config", *config_path, "JSON config file");
  ov->option(app, "--layer", cfg->layer, "wavegain, conv2d, model or all");
  ov->option(app, "--precision", cfg->precision, "64 or 32 (32 relaxes the threshold to 1e-3)");
  ov->option(app, "--filter-set", cfg->filter_set, "Filter set");
  ov->option(app, "--seed", cfg->seed, "Random seed");
  ov->flag(app, "--json", cfg->json, "Print machine-readable results");
  ov->option(app, "--out-dir", cfg->out_dir, "Output directory");
  return {app, [=] {
            load_config(*config_path, "gradcheck", *cfg);
            ov->apply();
            return run_gradcheck(*cfg);
          }};
}

}  // namespace wavegain::cli
