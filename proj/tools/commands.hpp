#pragma once

#include <functional>
#include <vector>

#include "CLI11.hpp"

namespace wavegain::cli {

/// A registered subcommand and the action to run once parsing succeeded.
struct Command {
  CLI::App* app = nullptr;
  std::function<int()> run;
};

Command add_selftest(CLI::App& root);
Command add_gradcheck(CLI::App& root);
Command add_impulse(CLI::App& root);
Command add_corrdof(CLI::App& root);
Command add_train(CLI::App& root);
Command add_eval(CLI::App& root);
Command add_bench(CLI::App& root);

}  // namespace wavegain::cli
