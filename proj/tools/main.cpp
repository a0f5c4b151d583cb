#include <iostream>

#include "cli_common.hpp"
#include "commands.hpp"
#include "wavegain/core/errors.hpp"

int main(int argc, char** argv) {
  using namespace wavegain;
  using namespace wavegain::cli;

  CLI::App app{"Learnable DTCWT gain layers: verification, shape analysis and LeNet/WaveLeNet training"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  std::vector<Command> commands{add_selftest(app), add_gradcheck(app), add_impulse(app), add_corrdof(app),
                                add_train(app),    add_eval(app),      add_bench(app)};
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  try {
    for (const auto& c : commands)
      if (c.app->parsed()) return c.run();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const VerificationError& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return kVerificationFailure;
  } catch (const NumericError& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return kVerificationFailure;
  }
  return kConfigError;
}
