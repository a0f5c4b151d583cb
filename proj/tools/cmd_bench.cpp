// bench: analytic multiply counts and measured forward times.

#include <chrono>
#include <iostream>
#include <sstream>

#include "cli_common.hpp"
#include "commands.hpp"
#include "wavegain/core/random.hpp"
#include "wavegain/nn/layers.hpp"
#include "wavegain/transform/cost.hpp"

namespace wavegain::cli {

namespace {

struct BenchConfig {
  std::vector<int> channels{3, 16};
  std::vector<int> filters{6, 16, 64};
  int levels = 2;
  int conv_size = 5;
  int gain_size = 1;
  int lowpass_size = 3;
  Index size = 32;
  Index batch = 8;
  int repeats = 3;
  std::uint64_t seed = 0;
  std::string filter_set = std::string(kDefaultFilterSet);
  std::string out_dir = "out/bench";
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BenchConfig, channels, filters, levels, conv_size, gain_size,
                                                lowpass_size, size, batch, repeats, seed, filter_set, out_dir)

template <typename F>
double best_ms(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

int run_bench(const BenchConfig& cfg) {
  if (cfg.channels.empty() || cfg.filters.empty() || cfg.repeats < 1 || cfg.size < 1 || cfg.batch < 1) {
    throw ConfigError("bench: channels and filters lists must be non-empty; repeats, size, batch >= 1");
  }
  const auto fs = load_filter_set(cfg.filter_set);
  std::ostringstream mac_csv, time_csv;
  mac_csv << "levels,C,F,forward_per_pixel,inverse_per_pixel,overhead_per_pixel,overhead_per_input_pixel,"
             "mixing_per_input_pixel,layer_per_input_pixel,conv_per_input_pixel\n";
  time_csv << "C,F,size,batch,gain_forward_ms,conv2d_forward_ms\n";
  std::vector<std::vector<std::string>> rows;
  Rng rng(cfg.seed);
  for (int c : cfg.channels)
    for (int f : cfg.filters) {
      LayerCostSpec spec;
      spec.channels_in = c;
      spec.channels_out = f;
      spec.levels = cfg.levels;
      spec.gain_size = cfg.gain_size;
      spec.lowpass_size = cfg.lowpass_size;
      spec.conv_size = cfg.conv_size;
      spec.filter_set = cfg.filter_set;
      const auto m = mac_count(spec);
      mac_csv << cfg.levels << ',' << c << ',' << f << ',' << m.forward_per_pixel << ',' << m.inverse_per_pixel
              << ',' << m.overhead_per_pixel() << ',' << m.overhead_per_input_pixel << ','
              << m.mixing_per_input_pixel << ',' << m.layer_per_input_pixel << ',' << m.conv_equivalent << '\n';

      const auto x = rng.normal_tensor<double>({cfg.batch, c, cfg.size, cfg.size});
      nn::WaveGain<double> gain(gain_init<double>(f, c, cfg.levels, cfg.lowpass_size, cfg.seed, InitScheme::Glorot,
                                                  cfg.gain_size, cfg.filter_set),
                                fs);
      nn::Conv2d<double> conv(c, f, cfg.conv_size, cfg.conv_size / 2, rng);
      const double tg = best_ms(cfg.repeats, [&] { gain.forward(x); });
      const double tc = best_ms(cfg.repeats, [&] { conv.forward(x); });
      time_csv << c << ',' << f << ',' << cfg.size << ',' << cfg.batch << ',' << tg << ',' << tc << '\n';
      rows.push_back({std::to_string(c), std::to_string(f), format_double(m.forward_per_pixel, 4),
                      format_double(m.inverse_per_pixel, 4), format_double(m.overhead_per_pixel(), 4),
                      format_double(m.layer_per_input_pixel, 4), format_double(m.conv_equivalent, 4),
                      format_double(tg, 3), format_double(tc, 3)});
    }
  std::cout << format_table({"C", "F", "fwd/px", "inv/px", "overhead/px", "layer/input px", "conv K^2F",
                             "gain ms", "conv ms"},
                            rows);
  std::cout << "overhead/px counts one forward and one inverse transform per plane; it does not depend on F.\n";
  const std::filesystem::path out(cfg.out_dir);
  write_text(out / "mac.csv", mac_csv.str());
  write_text(out / "timing.csv", time_csv.str());
  write_manifest(out, "bench", cfg, {cfg.seed});
  return kOk;
}

}  // namespace

Command add_bench(CLI::App& root) {
  auto* app = root.add_subcommand("bench", "Multiply counts and timings of the gain layer against a convolution");
  auto cfg = std::make_shared<BenchConfig>();
  auto ov = std::make_shared<Overrides>();
  auto config_path = std::make_shared<std::string>();
  app->add_option("--config", *config_path, "JSON config file");
  ov->option(app, "--channels", cfg->channels, "Input channel counts C")->delimiter(',');
  ov->option(app, "--filters", cfg->filters, "Output channel counts F")->delimiter(',');
  ov->option(app, "--levels", cfg->levels, "Transform levels J");
  ov->option(app, "--conv-size", cfg->conv_size, "Kernel size K of the baseline convolution");
  ov->option(app, "--gain-size", cfg->gain_size, "Spatial size of the highpass gains");
  ov->option(app, "--lowpass-size", cfg->lowpass_size, "Spatial size of the lowpass gain");
  ov->option(app, "--size", cfg->size, "Image side for the timings");
  ov->option(app, "--batch", cfg->batch, "Batch for the timings");
  ov->option(app, "--repeats", cfg->repeats, "Timing repeats (best is kept)");
  ov->option(app, "--seed", cfg->seed, "Random seed");
  ov->option(app, "--filter-set", cfg->filter_set, "Filter set");
  ov->option(app, "--out-dir", cfg->out_dir, "Output directory");
  return {app, [=] {
            load_config(*config_path, "bench", *cfg);
            ov->apply();
            return run_bench(*cfg);
          }};
}

}  // namespace wavegain::cli
