#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "cli.hpp"

namespace dwr::cli {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", where, text));
  }
  if (trim(text.substr(used)).size() != 0 || !std::isfinite(v))
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", where, text));
  return v;
}

std::string where(const std::string& section, const std::string& key) {
  return section.empty() ? key : fmt::format("[{}] {}", section, key);
}

const std::map<std::string, std::vector<std::string>> kAllowed = {
    {"", {}},
    {"model", {"q", "z", "beta", "R", "gamma"}},
    {"run", {"seed", "threads"}},
    {"grid", {"ell", "n", "rho0", "p_c_site", "input"}},
    {"sample",
     {"window", "delta", "boundary", "boundary_mark", "sweeps", "burn_in", "thinning", "replicas", "resync_every"}},
    {"rc-sample", {"window", "boundary", "boundary_mark", "burn_in"}},
    {"ncc", {"R", "q", "beta", "beta_factor", "intensity", "instances", "sweeps", "burn_in", "exact_limit"}},
    {"percolation",
     {"p_site", "p_bond", "box", "trials", "hammersley_delta", "hammersley_p", "hammersley_p_prime", "compare_p", "cells"}},
    {"verify-geometry", {"instances", "arc_instances"}},
};

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in) {
  ConfigFile c;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(fmt::format("line {}: unterminated section header", lineno));
      section = trim(line.substr(1, line.size() - 2));
      c.sections_[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", lineno));
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", lineno));
    if (c.sections_[section].count(key)) throw ConfigError(fmt::format("line {}: duplicate key {}", lineno, key));
    c.sections_[section][key] = value;
  }
  return c;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path));
  return parse(in);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const { return get(section, key).has_value(); }

std::optional<std::string> ConfigFile::get(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = value;
}

double ConfigFile::number(const std::string& section, const std::string& key, double fallback) const {
  auto v = get(section, key);
  return v ? to_number(*v, where(section, key)) : fallback;
}

long ConfigFile::integer(const std::string& section, const std::string& key, long fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  double x = to_number(*v, where(section, key));
  if (x != std::floor(x) || std::abs(x) > 9.0e15)
    throw ConfigError(fmt::format("{}: '{}' is not an integer", where(section, key), *v));
  return static_cast<long>(x);
}

bool ConfigFile::flag(const std::string& section, const std::string& key, bool fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", where(section, key), *v));
}

std::string ConfigFile::text(const std::string& section, const std::string& key, const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(to_number(trim(item), "range"));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
      throw ConfigError(fmt::format("range '{}' must be lo:hi:step with lo <= hi and step > 0", text));
    long count = std::lround(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(std::round((parts[0] + i * parts[2]) * 1e12) / 1e12);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_number(trim(item), "list"));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<double> ConfigFile::list(const std::string& section, const std::string& key,
                                     std::vector<double> fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  try {
    return parse_list(*v);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", where(section, key), e.what()));
  }
}

std::optional<Window> ConfigFile::box(const std::string& section, const std::string& key) const {
  auto v = get(section, key);
  if (!v) return std::nullopt;
  std::stringstream ss(*v);
  std::vector<double> xs;
  std::string item;
  while (ss >> item) xs.push_back(to_number(item, where(section, key)));
  if (xs.size() != 4 || !(xs[2] > xs[0]) || !(xs[3] > xs[1]))
    throw ConfigError(fmt::format("{}: expected 'x0 y0 x1 y1' with x0 < x1 and y0 < y1", where(section, key)));
  return Window::box(xs[0], xs[1], xs[2], xs[3]);
}

void ConfigFile::restrict_to(const std::map<std::string, std::vector<std::string>>& allowed) const {
  for (const auto& [section, keys] : sections_) {
    auto a = allowed.find(section);
    if (a == allowed.end()) throw ConfigError(fmt::format("unknown section [{}]", section));
    for (const auto& [key, value] : keys)
      if (std::find(a->second.begin(), a->second.end(), key) == a->second.end())
        throw ConfigError(fmt::format("unknown key {}", where(section, key)));
  }
}

ExperimentConfig make_config(const std::string& command, const ConfigFile& file, std::optional<std::uint64_t> seed,
                             int threads, const std::string& out) {
  file.restrict_to(kAllowed);
  ExperimentConfig c;
  c.command = command;
  c.file = file;
  c.model.q = static_cast<int>(file.integer("model", "q", 2));
  c.model.z = file.number("model", "z", 1.0);
  c.model.beta = file.number("model", "beta", 0.0);
  c.model.R = file.number("model", "R", 1.0);
  c.model.gamma = file.number("model", "gamma", 1.0);
  try {
    c.model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("[model] {}", e.what()));
  }
  long s = file.integer("run", "seed", 1);
  if (s < 0) throw ConfigError("[run] seed must be non-negative");
  c.seed = seed.value_or(static_cast<std::uint64_t>(s));
  c.threads = threads > 0 ? threads : static_cast<int>(file.integer("run", "threads", 1));
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  c.out = out;
  return c;
}

std::string config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["command"] = c.command;
  j["seed"] = c.seed;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [section, keys] : c.file.sections())
    for (const auto& [key, value] : keys) cfg[section.empty() ? "_" : section][key] = value;
  j["config"] = cfg;
  return j.dump();
}

std::string config_comment(const ExperimentConfig& c) {
  std::string s = fmt::format("# {}\n# command={} seed={}\n", kVersion, c.command, c.seed);
  for (const auto& [section, keys] : c.file.sections()) {
    s += fmt::format("# [{}]\n", section);
    for (const auto& [key, value] : keys) s += fmt::format("#   {} = {}\n", key, value);
  }
  return s;
}

}  // namespace dwr::cli
