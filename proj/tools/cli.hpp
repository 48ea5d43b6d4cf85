#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwr/model.hpp"
#include "dwr/window.hpp"

namespace dwr::cli {

inline constexpr const char* kVersion = "dwr 0.1.0";

enum ExitCode { kOk = 0, kFalsified = 1, kConfigError = 2 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sectioned key=value text. '#' starts a comment; keys before any [section]
// go to section "".
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in);
  static ConfigFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  double number(const std::string& section, const std::string& key, double fallback) const;
  long integer(const std::string& section, const std::string& key, long fallback) const;
  bool flag(const std::string& section, const std::string& key, bool fallback) const;
  std::string text(const std::string& section, const std::string& key, const std::string& fallback) const;
  // "a,b,c" or "lo:hi:step" (inclusive).
  std::vector<double> list(const std::string& section, const std::string& key, std::vector<double> fallback) const;
  // Four numbers "x0 y0 x1 y1".
  std::optional<Window> box(const std::string& section, const std::string& key) const;

  // Throws ConfigError on a section or key outside the allowed set.
  void restrict_to(const std::map<std::string, std::vector<std::string>>& allowed) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return sections_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

std::vector<double> parse_list(const std::string& text);

struct ExperimentConfig {
  std::string command;
  ConfigFile file;
  ModelParams model;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
};

ExperimentConfig make_config(const std::string& command, const ConfigFile& file, std::optional<std::uint64_t> seed,
                             int threads, const std::string& out);

// The config as a JSON object string, with version and seed.
std::string config_json(const ExperimentConfig& config);
// The config as '#'-prefixed comment lines.
std::string config_comment(const ExperimentConfig& config);

int cmd_sample(const ExperimentConfig& config);
int cmd_rc_sample(const ExperimentConfig& config);
int cmd_ncc(const ExperimentConfig& config);
int cmd_percolation(const ExperimentConfig& config);
int cmd_verify_geometry(const ExperimentConfig& config);
int cmd_constants(const ExperimentConfig& config);

// Parses argv and dispatches; returns the exit code.
int run_cli(int argc, char** argv);

}  // namespace dwr::cli
