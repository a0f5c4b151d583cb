#include "cli_common.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "wavegain/core/errors.hpp"

namespace wavegain::cli {

std::string version_string() { return std::string(WAVEGAIN_VERSION) + " (" + WAVEGAIN_GIT_DESCRIBE + ")"; }

nlohmann::json read_config_section(const std::filesystem::path& path, const std::string& command,
                                   const nlohmann::json& known) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file " + path.string());
  nlohmann::json doc;
  try {
    is >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file " + path.string() + " must hold a JSON object");
  nlohmann::json section = doc.contains(command) && doc[command].is_object() ? doc[command] : doc;
  for (const auto& [key, value] : section.items()) {
    if (!known.contains(key)) throw ConfigError("config file " + path.string() + ": unknown key '" + key + "'");
  }
  return section;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os) throw IoError("short write on " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void write_manifest(const std::filesystem::path& out_dir, const std::string& command, const nlohmann::json& config,
                    const nlohmann::json& seeds, const nlohmann::json& extra) {
  nlohmann::json m = extra;
  m["command"] = command;
  m["version"] = WAVEGAIN_VERSION;
  m["git"] = WAVEGAIN_GIT_DESCRIBE;
  m["config"] = config;
  m["seeds"] = seeds;
  write_json(out_dir / "manifest.json", m);
}

std::string format_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string& s = c < cells.size() ? cells[c] : std::string();
      os << s << std::string(width[c] - s.size() + (c + 1 < width.size() ? 2 : 0), ' ');
    }
    os << '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& r : rows) line(r);
  return os.str();
}

}  // namespace wavegain::cli
