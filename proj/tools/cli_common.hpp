#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace wavegain::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kVerificationFailure = 3, kIoError = 4 };

std::string version_string();

/// Options whose values land in a config struct only when given on the
/// command line, so that flags override a --config file which overrides the
/// defaults.
class Overrides {
 public:
  template <typename T>
  CLI::Option* option(CLI::App* app, const std::string& flags, T& target, const std::string& help) {
    auto holder = std::make_shared<T>(target);
    auto* opt = app->add_option(flags, *holder, help)->default_str(describe(target));
    entries_.push_back({opt, [holder, &target] { target = *holder; }});
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& flags, bool& target, const std::string& help) {
    auto holder = std::make_shared<bool>(target);
    auto* opt = app->add_flag(flags, *holder, help);
    entries_.push_back({opt, [holder, &target] { target = *holder; }});
    return opt;
  }

  void apply() const {
    for (const auto& e : entries_)
      if (e.option->count() > 0) e.assign();
  }

 private:
  template <typename T>
  static std::string describe(const T& v) {
    if constexpr (std::is_same_v<T, std::string>) {
      return v;
    } else if constexpr (std::is_arithmetic_v<T>) {
      return std::to_string(v);
    } else {
      return nlohmann::json(v).dump();
    }
  }

  struct Entry {
    CLI::Option* option;
    std::function<void()> assign;
  };
  std::vector<Entry> entries_;
};

/// The object for `command` in a --config file: either a top-level section
/// named after the command or the whole document. Keys not present in
/// `known` raise ConfigError.
nlohmann::json read_config_section(const std::filesystem::path& path, const std::string& command,
                                   const nlohmann::json& known);

/// Loads `path` (if non-empty) into cfg, starting from its current values.
template <typename Config>
void load_config(const std::string& path, const std::string& command, Config& cfg) {
  if (path.empty()) return;
  nlohmann::json merged = cfg;
  const auto section = read_config_section(path, command, merged);
  merged.merge_patch(section);
  cfg = merged.get<Config>();
}

/// manifest.json in out_dir: command, version, the full resolved config,
/// seeds, plus `extra` keys.
void write_manifest(const std::filesystem::path& out_dir, const std::string& command, const nlohmann::json& config,
                    const nlohmann::json& seeds, const nlohmann::json& extra = nlohmann::json::object());

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Fixed-width table for terminal output.
std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);
std::string format_double(double v, int precision = 3);

}  // namespace wavegain::cli
