// impulse and corrdof: the random scale-2 shapes and their degrees of freedom.

#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cli_common.hpp"
#include "commands.hpp"
#include "wavegain/core/npy.hpp"
#include "wavegain/core/random.hpp"
#include "wavegain/gainlayer/analysis.hpp"

namespace wavegain::cli {

namespace {

namespace fs = std::filesystem;

// 8-bit binary PGM; zero maps to mid-grey, +-max|v| to white / black.
std::string to_pgm(const RowMatrix<double>& img) {
  const double m = img.cwiseAbs().maxCoeff();
  std::ostringstream os;
  os << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
  for (Index r = 0; r < img.rows(); ++r)
    for (Index c = 0; c < img.cols(); ++c) {
      const double v = m > 0 ? img(r, c) / m : 0.0;
      os.put(static_cast<char>(static_cast<unsigned char>(std::lround(127.5 + 127.5 * v))));
    }
  return os.str();
}

struct ImpulseConfig {
  std::uint64_t seed = 0;
  int num_shapes = 8;
  Index size = 63;
  std::string filter_set = std::string(kDefaultFilterSet);
  std::string out_dir = "out/impulse";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ImpulseConfig, seed, num_shapes, size, filter_set, out_dir)

int run_impulse(const ImpulseConfig& cfg) {
  if (cfg.num_shapes < 1) throw ConfigError("impulse: num_shapes must be >= 1");
  if (cfg.size < 17 || cfg.size % 2 == 0) throw ConfigError("impulse: size must be odd and >= 17");
  const auto filters = load_filter_set(cfg.filter_set);
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);

  Tensor<double> stack({cfg.num_shapes, cfg.size, cfg.size});
  std::ostringstream csv;
  csv << std::setprecision(10) << "shape,shape_seed,annulus_energy_fraction\n";
  nlohmann::json shapes = nlohmann::json::array();
  nlohmann::json seeds = nlohmann::json::array();
  double lo = 1.0, sum = 0.0;
  for (int i = 0; i < cfg.num_shapes; ++i) {
    // Same seeding as corr_dof, so shape i here is shape i there.
    const std::uint64_t s = Rng::derived(cfg.seed, static_cast<std::uint64_t>(i)).engine()();
    const auto p = scale2_demo_params<double>(s);
    const RowMatrix<double> img = impulse_response(p, cfg.size, filters).plane(0);
    stack.plane(i) = img;
    const double frac = annulus_energy_fraction(img, M_PI / 4, M_PI / 2);
    lo = std::min(lo, frac);
    sum += frac;
    csv << i << ',' << s << ',' << frac << '\n';
    std::ostringstream name;
    name << "shape_" << std::setw(3) << std::setfill('0') << i << ".pgm";
    write_text(out / name.str(), to_pgm(img));
    nlohmann::json gains = nlohmann::json::array();
    for (int k = 0; k < 6; ++k) gains.push_back({p.g_hp[1].re.data()[k], p.g_hp[1].im.data()[k]});
    shapes.push_back({{"shape", i}, {"seed", s}, {"scale2_gains_re_im", gains}, {"annulus_energy_fraction", frac}});
    seeds.push_back(s);
  }
  npy::save(out / "shapes.npy", stack);
  write_text(out / "annulus.csv", csv.str());
  write_manifest(out, "impulse", cfg, seeds,
                 {{"random_scalars_per_shape", 12},
                  {"configuration", "F=C=1, J=2, scale-2 gains N(0,1), scale-1 and lowpass gains zero"},
                  {"shapes", shapes}});
  std::cout << cfg.num_shapes << " shapes of " << cfg.size << "x" << cfg.size << " written to " << out.string()
            << "\nannulus (pi/4, pi/2) energy fraction: min " << format_double(lo, 4) << ", mean "
            << format_double(sum / cfg.num_shapes, 4) << '\n';
  return kOk;
}

struct CorrdofConfig {
  int num_shapes = 512;
  std::uint64_t seed = 1;
  Index size = 63;
  int synthetic_d = 0;  // > 0: white-noise vectors of this dimension instead of shapes
  int bins = 40;
  int bootstrap = 200;
  std::string filter_set = std::string(kDefaultFilterSet);
  std::string out_dir = "out/corrdof";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CorrdofConfig, num_shapes, seed, size, synthetic_d, bins, bootstrap,
                                                filter_set, out_dir)

int run_corrdof(const CorrdofConfig& cfg) {
  if (cfg.num_shapes < 3) throw ConfigError("corrdof: num_shapes must be >= 3");
  if (cfg.bins < 1 || cfg.bootstrap < 10 || cfg.synthetic_d < 0) {
    throw ConfigError("corrdof: bins >= 1, bootstrap >= 10 and synthetic_d >= 0 required");
  }
  const auto est = cfg.synthetic_d > 0 ? white_noise_dof(cfg.num_shapes, cfg.synthetic_d, cfg.seed)
                                       : corr_dof(cfg.num_shapes, cfg.seed, load_filter_set(cfg.filter_set), cfg.size);
  const auto [ci_lo, ci_hi] = dof_confidence_interval(est, cfg.num_shapes, cfg.bootstrap, cfg.seed);

  std::vector<long> hist(static_cast<std::size_t>(cfg.bins), 0);
  for (double r : est.correlations) {
    auto b = static_cast<long>(std::floor((r + 1.0) / 2.0 * cfg.bins));
    ++hist[static_cast<std::size_t>(std::clamp<long>(b, 0, cfg.bins - 1))];
  }
  std::ostringstream csv;
  csv << std::setprecision(10) << "bin_lo,bin_hi,count,density\n";
  const double width = 2.0 / cfg.bins, n = static_cast<double>(est.correlations.size());
  for (int b = 0; b < cfg.bins; ++b) {
    csv << -1.0 + b * width << ',' << -1.0 + (b + 1) * width << ',' << hist[b] << ',' << hist[b] / (n * width)
        << '\n';
  }
  const fs::path out(cfg.out_dir);
  write_text(out / "histogram.csv", csv.str());
  const nlohmann::json result = {{"dof", est.dof},
                                 {"ci95", {ci_lo, ci_hi}},
                                 {"mean_correlation", est.mean},
                                 {"variance", est.variance},
                                 {"num_shapes", cfg.num_shapes},
                                 {"pairs", est.correlations.size()},
                                 {"mode", cfg.synthetic_d > 0 ? "synthetic" : "scale2-shapes"}};
  write_json(out / "dof.json", result);
  write_manifest(out, "corrdof", cfg, {cfg.seed});
  std::cout << "degrees of freedom " << format_double(est.dof, 4) << " (95% bootstrap " << format_double(ci_lo, 4)
            << " - " << format_double(ci_hi, 4) << ") from " << cfg.num_shapes
            << (cfg.synthetic_d > 0 ? " white-noise vectors of dimension " + std::to_string(cfg.synthetic_d)
                                    : " shapes of " + std::to_string(cfg.size) + "x" + std::to_string(cfg.size))
            << '\n';
  return kOk;
}

}  // namespace

Command add_impulse(CLI::App& root) {
  auto* app = root.add_subcommand("impulse", "Impulse responses of layers with random scale-2 gains only");
  auto cfg = std::make_shared<ImpulseConfig>();
  auto ov = std::make_shared<Overrides>();
  auto config_path = std::make_shared<std::string>();
  app->add_option("--config", *config_path, "JSON config file");
  ov->option(app, "--seed", cfg->seed, "Base seed; shape i uses a stream derived from it");
  ov->option(app, "--num-shapes", cfg->num_shapes, "Number of shapes");
  ov->option(app, "--size", cfg->size, "Odd side length of each response");
  ov->option(app, "--filter-set", cfg->filter_set, "Filter set");
  ov->option(app, "--out-dir", cfg->out_dir, "Output directory");
  return {app, [=] {
            load_config(*config_path, "impulse", *cfg);
            ov->apply();
            return run_impulse(*cfg);
          }};
}

Command add_corrdof(CLI::App& root) {
  auto* app = root.add_subcommand("corrdof", "Degrees of freedom of random scale-2 shapes from pairwise correlations");
  auto cfg = std::make_shared<CorrdofConfig>();
  auto ov = std::make_shared<Overrides>();
  auto config_path = std::make_shared<std::string>();
  app->add_option("--config", *config_path, "JSON config file");
  ov->option(app, "--num-shapes", cfg->num_shapes, "Number of shapes (or vectors)");
  ov->option(app, "--seed", cfg->seed, "Random seed");
  ov->option(app, "--size", cfg->size, "Odd side length of each shape");
  ov->option(app, "--synthetic-d", cfg->synthetic_d, "Estimator self-test on white noise of this dimension");
  ov->option(app, "--bins", cfg->bins, "Histogram bins over [-1, 1]");
  ov->option(app, "--bootstrap", cfg->bootstrap, "Bootstrap resamples for the interval");
  ov->option(app, "--filter-set", cfg->filter_set, "Filter set");
  ov->option(app, "--out-dir", cfg->out_dir, "Output directory");
  return {app, [=] {
            load_config(*config_path, "corrdof", *cfg);
            ov->apply();
            return run_corrdof(*cfg);
          }};
}

}  // namespace wavegain::cli
