#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using namespace dwr::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  fs::path d = fs::temp_directory_path() / "dwr_cli_test";
  fs::create_directories(d);
  return d;
}

std::string write_file(const std::string& name, const std::string& text) {
  fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dwr");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

ConfigFile parse(const std::string& text) {
  std::stringstream ss(text);
  return ConfigFile::parse(ss);
}

}  // namespace

TEST_CASE("config file parsing") {
  auto c = parse("# comment\n[model]\nq = 3  # trailing\nbeta=2.5\n\n[sample]\nwindow = 0 0 2 1\n");
  CHECK(c.integer("model", "q", 0) == 3);
  CHECK(c.number("model", "beta", 0.0) == 2.5);
  CHECK(c.number("model", "z", 7.0) == 7.0);
  auto w = c.box("sample", "window");
  REQUIRE(w.has_value());
  CHECK(w->area() == doctest::Approx(2.0));
  CHECK_FALSE(c.box("sample", "delta").has_value());

  CHECK_THROWS_AS(parse("[model]\nq\n"), ConfigError);
  CHECK_THROWS_AS(parse("[model\nq=1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[model]\nq=1\nq=2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[model]\nq=abc\n").integer("model", "q", 0), ConfigError);
  CHECK_THROWS_AS(parse("[model]\nq=2.5\n").integer("model", "q", 0), ConfigError);
  CHECK_THROWS_AS(parse("[sample]\nwindow = 0 0 -1 1\n").box("sample", "window"), ConfigError);

  auto grid = parse_list("0.5:0.95:0.05");
  REQUIRE(grid.size() == 10);
  CHECK(grid.front() == 0.5);
  CHECK(grid.back() == 0.95);
  CHECK(grid[6] == 0.8);
  CHECK(parse_list("1, 2,3") == std::vector<double>{1, 2, 3});
  CHECK_THROWS_AS(parse_list("1:0:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_list("0:1:0"), ConfigError);
}

TEST_CASE("experiment config validation") {
  auto ok = make_config("constants", parse("[model]\nq=2\nz=3\n[run]\nseed=9\n"), std::nullopt, 0, "");
  CHECK(ok.model.z == 3.0);
  CHECK(ok.seed == 9);
  CHECK(ok.threads == 1);
  CHECK(make_config("constants", parse("[run]\nseed=9\n"), 4u, 2, "").seed == 4);
  CHECK_THROWS_AS(make_config("x", parse("[model]\nz=0\n"), std::nullopt, 0, ""), ConfigError);
  CHECK_THROWS_AS(make_config("x", parse("[model]\nbogus=1\n"), std::nullopt, 0, ""), ConfigError);
  CHECK_THROWS_AS(make_config("x", parse("[nothing]\n"), std::nullopt, 0, ""), ConfigError);
  auto text = config_json(ok);
  auto j = nlohmann::json::parse(text);
  CHECK(j["version"] == "dwr 0.1.0");
  CHECK(j["config"]["model"]["z"] == "3");
  CHECK(config_comment(ok).find("# dwr 0.1.0") == 0);
}

TEST_CASE("sample command") {
  std::string cfg = write_file("sample.cfg",
                               "[model]\nq = 2\nz = 1\nbeta = 0\n[sample]\nwindow = 0 0 4 4\nsweeps = 2000\n"
                               "burn_in = 50\nreplicas = 2\n");
  std::string a = (scratch() / "a.jsonl").string(), b = (scratch() / "b.jsonl").string();
  CHECK(cli({"sample", "--config", cfg, "--seed", "11", "--out", a}) == 0);
  CHECK(cli({"sample", "--config", cfg, "--seed", "11", "--threads", "2", "--out", b}) == 0);
  CHECK(read_file(a) == read_file(b));
  auto lines = lines_of(read_file(a));
  REQUIRE(lines.size() == 2 + 2 * 2000);
  auto head = nlohmann::json::parse(lines.front());
  CHECK(head["version"] == "dwr 0.1.0");
  CHECK(head["config"]["sample"]["window"] == "0 0 4 4");
  auto rec = nlohmann::json::parse(lines[1]);
  for (const char* k : {"sweep", "N", "N_per_mark", "order_param", "energy", "seed"}) CHECK(rec.contains(k));
  auto sum = nlohmann::json::parse(lines.back())["summary"];
  double m = sum["order_param"]["mean"], se = sum["order_param"]["se"];
  CHECK(std::abs(m) <= 3.0 * se);

  std::string c = (scratch() / "c.jsonl").string();
  CHECK(cli({"sample", "--config", cfg, "--seed", "12", "--out", c}) == 0);
  CHECK(read_file(a) != read_file(c));

  std::string nowin = write_file("nowin.cfg", "[model]\nq = 2\n");
  CHECK(cli({"sample", "--config", nowin}) == 2);
  CHECK(cli({"sample", "--config", (scratch() / "missing.cfg").string()}) == 2);
  CHECK(cli({"sample", "--threads", "0"}) == 2);
  CHECK(cli({}) == 2);
}

TEST_CASE("rc-sample command") {
  std::string cfg = write_file("rc.cfg",
                               "[model]\nq = 3\nz = 40\nbeta = 0.05\nR = 0.3\n[rc-sample]\nwindow = 0 0 1 1\n"
                               "boundary = monochrome\nburn_in = 30\n");
  std::string out = (scratch() / "rc.txt").string();
  CHECK(cli({"rc-sample", "--config", cfg, "--out", out}) == 0);
  auto lines = lines_of(read_file(out));
  std::vector<int> marks;
  bool edges = false;
  int cross = 0, open = 0;
  for (const auto& l : lines) {
    if (l.rfind("# edges", 0) == 0) edges = true;
    if (l.empty() || l[0] == '#') continue;
    std::stringstream ss(l);
    if (!edges) {
      double x, y;
      int m;
      ss >> x >> y >> m;
      marks.push_back(m);
    } else {
      int u, v, o;
      ss >> u >> v >> o;
      open += o;
      if (marks[u] != marks[v] && o) ++cross;
    }
  }
  CHECK(marks.size() > 30);
  CHECK(open > 0);
  CHECK(cross == 0);
}

TEST_CASE("ncc command") {
  std::string cfg = write_file("ncc.cfg", "[ncc]\nR = 0.5\nq = 2\nbeta_factor = 10\nintensity = 2\ninstances = 3\n"
                                          "sweeps = 2000\n");
  std::string out = (scratch() / "ncc.jsonl").string();
  CHECK(cli({"ncc", "--config", cfg, "--out", out}) == 0);
  auto lines = lines_of(read_file(out));
  REQUIRE(lines.size() == 5);
  auto sum = nlohmann::json::parse(lines.back())["summary"];
  CHECK(sum["violations"] == 0);
  CHECK(sum["instances"] == 3);

  std::string low = write_file("ncc_low.cfg", "[ncc]\nR = 1\nq = 3\nbeta = 2\nintensity = 2\ninstances = 1\n");
  CHECK(cli({"ncc", "--config", low, "--out", out}) == 0);
  lines = lines_of(read_file(out));
  auto inst = nlohmann::json::parse(lines[1]);
  CHECK(inst["hypothesis_met"] == false);
  CHECK(inst["note"] == "hypothesis unmet");

  std::string one = write_file("ncc_one.cfg", "[ncc]\nq = 1\ninstances = 1\nsweeps = 1000\n");
  CHECK(cli({"ncc", "--config", one, "--out", out}) == 0);
}

TEST_CASE("percolation command") {
  std::string cfg = write_file("perc.cfg",
                               "[percolation]\np_site = 0.5:0.95:0.05\nbox = 64\ntrials = 200\n"
                               "hammersley_delta = 1\nhammersley_p = 0.9\nhammersley_p_prime = 0.8\n"
                               "[model]\nbeta = 10\n[grid]\nell = 0.25\nn = 1\n");
  std::string a = (scratch() / "p1.csv").string(), b = (scratch() / "p2.csv").string();
  CHECK(cli({"percolation", "--config", cfg, "--seed", "5", "--out", a}) == 0);
  CHECK(cli({"percolation", "--config", cfg, "--seed", "5", "--out", b}) == 0);
  CHECK(read_file(a) == read_file(b));
  std::vector<double> theta;
  bool header = false;
  for (const auto& l : lines_of(read_file(a))) {
    if (l.empty() || l[0] == '#') continue;
    if (!header) {
      CHECK(l == "p_site,p_bond,box,trials,theta_hat,se,seed");
      header = true;
      continue;
    }
    std::stringstream ss(l);
    std::vector<std::string> cols;
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    REQUIRE(cols.size() == 7);
    theta.push_back(std::stod(cols[4]));
  }
  REQUIRE(theta.size() == 10);
  for (std::size_t i = 0; i + 1 < theta.size(); ++i) CHECK(theta[i] <= theta[i + 1]);

  std::string cells = write_file("cells.cfg", "[percolation]\np_site = 0.9\nbox = 16\ntrials = 10\ncells = true\n"
                                              "[model]\nbeta = 10\n[grid]\nell = 0.25\nn = 2\n");
  CHECK(cli({"percolation", "--config", cells, "--out", a}) == 0);
  std::string text = read_file(a);
  CHECK(text.find("good=25 of 25") != std::string::npos);
  CHECK(text.find("chain=1") != std::string::npos);

  std::string bad = write_file("cells_bad.cfg", "[percolation]\ncells = true\n[grid]\nell = 5\n");
  CHECK(cli({"percolation", "--config", bad, "--out", a}) == 2);
  std::string badp = write_file("perc_bad.cfg", "[percolation]\np_site = 1.5\n");
  CHECK(cli({"percolation", "--config", badp, "--out", a}) == 2);
}

TEST_CASE("verify-geometry and constants commands") {
  std::string out = (scratch() / "geo.jsonl").string();
  CHECK(cli({"verify-geometry", "--instances", "0", "--out", out}) == 0);
  CHECK(read_file(out).empty());
  CHECK(cli({"verify-geometry", "--instances", "50", "--out", out}) == 0);
  CHECK(lines_of(read_file(out)).size() == 50);

  std::string cfg = write_file("const.cfg", "[model]\nq = 2\nbeta = 10\nR = 1\n");
  std::string cj = (scratch() / "const.json").string();
  CHECK(cli({"constants", "--config", cfg, "--out", cj}) == 0);
  auto j = nlohmann::json::parse(read_file(cj));
  CHECK(double(j["derived"]["eps"]) == doctest::Approx(0.05752).epsilon(1e-3));
  CHECK(j["alpha"]["hypothesis_met"] == true);
  std::string far = write_file("const_bad.cfg", "[grid]\nell = 1\n");
  CHECK(cli({"constants", "--config", far}) == 2);
}
