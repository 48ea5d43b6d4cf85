#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "cli.hpp"
#include "dwr/configuration.hpp"
#include "dwr/kinks.hpp"
#include "dwr/percolation.hpp"
#include "dwr/random_cluster.hpp"
#include "dwr/sampler.hpp"
#include "dwr/verify.hpp"

namespace dwr::cli {

namespace {

using json = nlohmann::ordered_json;

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ConfigError(fmt::format("cannot write {}", path));
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  // Human-readable notes go to stdout when data goes to a file, else stderr.
  std::ostream& notes() { return file_ ? std::cout : std::cerr; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// Runs job(i) for i in [0, count) on the given number of threads.
void parallel_for(int count, int threads, const std::function<void(int)>& job) {
  threads = std::clamp(threads, 1, std::max(1, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i; (i = next++) < count;) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

long positive(const ConfigFile& f, const std::string& s, const std::string& k, long fallback, long min = 1) {
  long v = f.integer(s, k, fallback);
  if (v < min) throw ConfigError(fmt::format("[{}] {} must be >= {}", s, k, min));
  return v;
}

BoundaryKind boundary_kind(const ConfigFile& f, const std::string& section) {
  std::string b = f.text(section, "boundary", "free");
  if (b == "free") return BoundaryKind::free;
  if (b == "monochrome") return BoundaryKind::monochrome;
  throw ConfigError(fmt::format("[{}] boundary must be free or monochrome, got '{}'", section, b));
}

int boundary_mark(const ExperimentConfig& c, const std::string& section) {
  long m = c.file.integer(section, "boundary_mark", 1);
  if (m < 1 || m > c.model.q) throw ConfigError(fmt::format("[{}] boundary_mark must lie in 1..q", section));
  return static_cast<int>(m);
}

Window required_window(const ConfigFile& f, const std::string& section) {
  auto w = f.box(section, "window");
  if (!w) throw ConfigError(fmt::format("[{}] window is required", section));
  return *w;
}

json estimate_json(const Estimate& e) { return json{{"mean", e.mean}, {"se", e.se}, {"n", e.n}}; }

Estimate combine(const std::vector<Estimate>& es) {
  Estimate out;
  double var = 0.0;
  for (const auto& e : es) {
    out.mean += e.mean;
    var += e.se * e.se;
    out.n += e.n;
  }
  out.mean /= es.size();
  out.se = std::sqrt(var) / es.size();
  return out;
}

double probability(const std::string& s, const std::string& k, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(fmt::format("[{}] {}: {} is not a probability", s, k, x));
  return x;
}

}  // namespace

int cmd_sample(const ExperimentConfig& c) {
  const auto& f = c.file;
  const std::string S = "sample";
  Window window = required_window(f, S);
  Window delta = f.box(S, "delta").value_or(window);
  BoundaryKind kind = boundary_kind(f, S);
  int mark = boundary_mark(c, S);
  RunOptions ro;
  ro.sweeps = static_cast<int>(positive(f, S, "sweeps", 1000));
  ro.burn_in = static_cast<int>(positive(f, S, "burn_in", 100, 0));
  ro.thinning = static_cast<int>(positive(f, S, "thinning", 1));
  ro.delta = delta;
  ro.coupled = kind == BoundaryKind::monochrome;
  const int replicas = static_cast<int>(positive(f, S, "replicas", 1));
  SamplerOptions so;
  so.resync_every = static_cast<int>(positive(f, S, "resync_every", so.resync_every, 0));

  Output out(c.out);
  const Rng master(c.seed);
  std::vector<RunSummary> runs(replicas);
  parallel_for(replicas, c.threads, [&](int r) {
    Rng boundary_rng = master.stream(2 * static_cast<std::uint64_t>(r));
    Configuration init = make_boundary(window, kind, c.model, boundary_rng, mark);
    GibbsSampler sampler(init, c.model, master.stream(2 * static_cast<std::uint64_t>(r) + 1), so);
    runs[r] = run(sampler, ro);
  });

  std::ostream& os = out.stream();
  os << config_json(c) << '\n';
  for (const auto& r : runs)
    for (const auto& rec : r.records) write_sweep_json(os, rec, r.seed);

  std::vector<Estimate> n, order, conn, gap;
  std::vector<std::vector<Estimate>> per_mark(c.model.q);
  double tau = 0.0, drift = 0.0;
  MoveCounters mc;
  for (const auto& r : runs) {
    n.push_back(r.n);
    order.push_back(r.order_param);
    conn.push_back(r.connection_term);
    gap.push_back(r.identity_gap);
    for (int m = 0; m < c.model.q; ++m) per_mark[m].push_back(r.n_per_mark[m]);
    tau = std::max(tau, r.tau_order);
    drift = std::max(drift, r.max_drift);
    for (int k = 0; k < 3; ++k) {
      mc.proposed[k] += r.counters.proposed[k];
      mc.accepted[k] += r.counters.accepted[k];
    }
  }
  json summary;
  summary["replicas"] = replicas;
  summary["N"] = estimate_json(combine(n));
  json marks = json::array();
  for (auto& m : per_mark) marks.push_back(estimate_json(combine(m)));
  summary["N_per_mark"] = marks;
  summary["order_param"] = estimate_json(combine(order));
  if (ro.coupled) {
    summary["connection_term"] = estimate_json(combine(conn));
    summary["identity_gap"] = estimate_json(combine(gap));
  }
  summary["tau_order"] = tau;
  json acc = json::object();
  const char* names[3] = {"birth", "death", "flip"};
  for (int k = 0; k < 3; ++k)
    acc[names[k]] = mc.proposed[k] ? double(mc.accepted[k]) / double(mc.proposed[k]) : 0.0;
  summary["acceptance"] = acc;
  summary["max_energy_drift"] = drift;
  os << json{{"summary", summary}}.dump() << '\n';

  Estimate o = combine(order), nn = combine(n);
  fmt::print(out.notes(), "sample: {} replicas x {} sweeps, N = {:.4f} +- {:.4f}, order parameter = {:.4f} +- {:.4f}\n",
             replicas, ro.sweeps, nn.mean, nn.se, o.mean, o.se);
  return kOk;
}

int cmd_rc_sample(const ExperimentConfig& c) {
  const auto& f = c.file;
  const std::string S = "rc-sample";
  Window window = required_window(f, S);
  BoundaryKind kind = boundary_kind(f, S);
  int mark = boundary_mark(c, S);
  int burn_in = static_cast<int>(positive(f, S, "burn_in", 1000, 0));

  Output out(c.out);
  const Rng master(c.seed);
  Rng boundary_rng = master.stream(0);
  Configuration init = make_boundary(window, kind, c.model, boundary_rng, mark);
  GibbsSampler sampler(init, c.model, master.stream(1));
  for (int i = 0; i < burn_in; ++i) sampler.sweep();
  Rng edge_rng = master.stream(2);
  CoupledSample cs = rc_coupled_sample(sampler, edge_rng);

  std::ostream& os = out.stream();
  os << config_comment(c);
  os << "# points: x y mark\n";
  for (std::size_t i = 0; i < cs.config.points.size(); ++i)
    fmt::print(os, "{:.17g} {:.17g} {}\n", cs.config.points[i].x, cs.config.points[i].y, cs.config.marks[i]);
  os << "# edges: u v open length\n";
  write_edge_config(os, cs.edges, cs.config.points);
  int conn = connection_count(cs.config, cs.edges, window);
  fmt::print(os, "# connected_to_boundary {}\n", conn);
  fmt::print(out.notes(), "rc-sample: {} points, {} edges, {} open, {} connected to the boundary\n",
             cs.config.points.size(), cs.edges.base.size(), cs.edges.open_count(), conn);
  return kOk;
}

int cmd_ncc(const ExperimentConfig& c) {
  const auto& f = c.file;
  const std::string S = "ncc";
  auto Rs = f.list(S, "R", {0.5, 1.0});
  auto qs = f.list(S, "q", {2, 3});
  auto intensities = f.list(S, "intensity", {0.5, 2.0, 8.0});
  bool absolute = f.has(S, "beta");
  auto betas = absolute ? f.list(S, "beta", {}) : f.list(S, "beta_factor", {2.0, 10.0});
  const int per = static_cast<int>(positive(f, S, "instances", 9));
  NccOptions o;
  o.sweeps = positive(f, S, "sweeps", o.sweeps);
  o.burn_in = positive(f, S, "burn_in", o.burn_in, 0);
  o.exact_limit = static_cast<std::size_t>(positive(f, S, "exact_limit", 12, 0));
  if (o.exact_limit > 25) throw ConfigError("[ncc] exact_limit must be <= 25");

  struct Job {
    ModelParams p;
    double intensity;
  };
  std::vector<Job> jobs;
  for (double R : Rs)
    for (double qd : qs)
      for (double b : betas)
        for (double lam : intensities)
          for (int k = 0; k < per; ++k) {
            ModelParams p = c.model;
            p.R = R;
            p.q = static_cast<int>(qd);
            p.beta = absolute ? b : b * p.q;
            if (qd != std::floor(qd)) throw ConfigError("[ncc] q must be integers");
            if (!(lam > 0.0)) throw ConfigError("[ncc] intensity must be positive");
            try {
              p.validate();
            } catch (const std::invalid_argument& e) {
              throw ConfigError(fmt::format("[ncc] {}", e.what()));
            }
            jobs.push_back({p, lam});
          }

  Output out(c.out);
  const Rng master(c.seed);
  std::vector<NccResult> results(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), c.threads, [&](int i) {
    results[i] = ncc_instance(master.stream(static_cast<std::uint64_t>(i)).seed(), jobs[i].p, jobs[i].intensity, o);
  });

  std::ostream& os = out.stream();
  os << config_json(c) << '\n';
  int violations = 0, unmet = 0, unmet_violations = 0;
  double worst = 0.0;
  for (const auto& r : results) {
    json j{{"seed", r.seed},       {"R", r.R},
           {"q", r.q},             {"beta", r.beta},
           {"intensity", r.intensity}, {"points", r.points},
           {"boundary", r.boundary},   {"free_edges", r.free_edges},
           {"exact", r.exact},     {"ncc", r.ncc.mean},
           {"se", r.ncc.se},       {"alpha", r.alpha},
           {"alpha_star", r.alpha_star}, {"hypothesis_met", r.hypothesis_met},
           {"violation", r.violation}};
    if (!r.hypothesis_met) j["note"] = "hypothesis unmet";
    os << j.dump() << '\n';
    if (r.hypothesis_met) {
      violations += r.violation;
      worst = std::max(worst, r.ncc.mean / r.alpha);
    } else {
      ++unmet;
      unmet_violations += r.violation;
    }
  }
  os << json{{"summary",
              {{"instances", results.size()},
               {"violations", violations},
               {"hypothesis_unmet", unmet},
               {"violations_hypothesis_unmet", unmet_violations},
               {"worst_ratio", worst}}}}
            .dump()
     << '\n';
  fmt::print(out.notes(), "ncc: {} instances, {} violations, worst mean/alpha = {:.4f}{}\n", results.size(), violations,
             worst, unmet ? fmt::format(" ({} with beta <= q: hypothesis unmet)", unmet) : "");
  return violations ? kFalsified : kOk;
}

int cmd_percolation(const ExperimentConfig& c) {
  const auto& f = c.file;
  const std::string S = "percolation";
  auto ps = f.list(S, "p_site", parse_list("0.5:0.95:0.05"));
  auto pb = f.list(S, "p_bond", {1.0});
  auto boxes = f.list(S, "box", {64});
  int trials = static_cast<int>(positive(f, S, "trials", 1000));
  auto hd = f.list(S, "hammersley_delta", {});
  auto hp = f.list(S, "hammersley_p", {});
  auto hq = f.list(S, "hammersley_p_prime", {});
  auto compare = f.list(S, "compare_p", {});
  bool cells = f.flag(S, "cells", false);
  if (hd.size() != hp.size() || hd.size() != hq.size())
    throw ConfigError("[percolation] hammersley_delta, hammersley_p and hammersley_p_prime need equal lengths");
  for (double x : ps) probability(S, "p_site", x);
  for (double x : pb) probability(S, "p_bond", x);
  for (auto* v : {&hd, &hp, &hq, &compare})
    for (double x : *v) probability(S, "check parameter", x);
  std::vector<int> box_sizes;
  for (double b : boxes) {
    if (b != std::floor(b) || b < 8) throw ConfigError("[percolation] box sizes must be integers >= 8");
    box_sizes.push_back(static_cast<int>(b));
  }

  Output out(c.out);
  std::ostream& os = out.stream();
  os << config_comment(c);
  std::vector<std::pair<double, double>> pairs;
  for (double s : ps)
    for (double b : pb) pairs.push_back({s, b});
  std::vector<PercolationPoint> rows;
  for (int L : box_sizes) {
    auto runs = mixed_percolation_runs(pairs, L, trials, c.seed, c.threads);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      std::vector<double> xs(runs[i].begin(), runs[i].end());
      rows.push_back({pairs[i].first, pairs[i].second, L, trials, mean_se(xs), c.seed});
    }
  }
  write_percolation_csv(os, rows);

  bool all_hold = true;
  const int check_box = box_sizes.back();
  for (std::size_t i = 0; i < hd.size(); ++i) {
    auto h = hammersley_check(hd[i], hp[i], hq[i], check_box, trials, c.seed);
    all_hold = all_hold && h.holds;
    fmt::print(os, "# hammersley delta={} p={} p_prime={} box={} left={:.6g} right={:.6g} diff={:.6g} se={:.6g} holds={}\n",
               hd[i], hp[i], hq[i], check_box, h.left.mean, h.right.mean, h.diff.mean, h.diff.se, int(h.holds));
  }
  for (double p : compare) {
    auto h = mixed_vs_site_check(p, check_box, trials, c.seed);
    all_hold = all_hold && h.holds;
    fmt::print(os, "# mixed_vs_site p={} box={} site={:.6g} mixed={:.6g} diff={:.6g} se={:.6g} holds={}\n", p, check_box,
               h.left.mean, h.right.mean, h.diff.mean, h.diff.se, int(h.holds));
  }

  if (cells) {
    double ell = f.number("grid", "ell", c.model.R / (2.0 * std::sqrt(3.0)));
    int n = static_cast<int>(positive(f, "grid", "n", 2));
    double rho0 = f.number("grid", "rho0", 0.1);
    double pc = f.number("grid", "p_c_site", kSitePercolationThreshold);
    DerivedConstants dc;
    try {
      dc = derived_constants(c.model, ell, pc);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("[grid] {}", e.what()));
    }
    CellGrid grid = build_grid(ell, n);
    Configuration config;
    if (auto input = f.get("grid", "input")) {
      config = load_configuration(*input);
    } else {
      if (!(rho0 >= 0.0 && rho0 < 0.5)) throw ConfigError("[grid] rho0 must lie in [0, 0.5)");
      PseudoPeriodicSpec spec;
      spec.ell = ell / 8.0;
      spec.rho0 = rho0;
      spec.offset = grid.lattice.offset + grid.lattice.apply({1.0 / 16.0, 1.0 / 16.0});
      Rng rng(c.seed);
      config = pseudo_periodic(spec, grid.window(), rng);
    }
    Triangulation tri(config.points);
    CellFlags flags = classify_cells(config, tri, grid, c.model, dc.m_z);
    int good = 0, links = 0;
    for (auto g : flags.good) good += g;
    for (int d = 0; d < 2; ++d)
      for (auto l : flags.link[d]) links += l;
    CellChain chain = good_cell_chain_exists(flags, grid);
    fmt::print(os, "# cells ell={} n={} points={} good={} of {} links={} chain={}\n", ell, n, config.points.size(), good,
               flags.good.size(), links, int(chain.connected));
    if (chain.connected) {
      Witness w = delaunay_path_witness(config, tri, grid, chain.path, c.model);
      fmt::print(os, "# witness vertices={} max_edge={:.6g} short_edges={} monochrome={} inside_corridor={}\n",
                 w.vertices.size(), w.max_edge, int(w.short_edges), int(w.monochrome), int(w.inside_corridor));
      all_hold = all_hold && w.monochrome && w.inside_corridor;
    }
  }
  fmt::print(out.notes(), "percolation: {} rows, checks {}\n", rows.size(), all_hold ? "hold" : "FAILED");
  return all_hold ? kOk : kFalsified;
}

int cmd_verify_geometry(const ExperimentConfig& c) {
  const auto& f = c.file;
  const std::string S = "verify-geometry";
  GeometrySuiteOptions o;
  o.instances = positive(f, S, "instances", o.instances, 0);
  o.arc_instances = positive(f, S, "arc_instances", o.arc_instances, 0);
  o.seed = c.seed;
  Output out(c.out);
  if (!c.out.empty()) o.jsonl = &out.stream();
  auto tallies = run_geometry_suite(o);

  bool ok = true;
  std::ostream& report = c.out.empty() ? std::cout : out.notes();
  fmt::print(report, "{} verify-geometry seed={} instances={} arc_instances={}\n", kVersion, c.seed, o.instances,
             o.arc_instances);
  for (const auto& t : tallies) {
    ok = ok && t.violations == 0;
    fmt::print(report, "{:<26} checked={:<8} violations={:<4} not_applicable={:<8} worst={:.6g}", t.name, t.checked,
               t.violations, t.not_applicable, t.worst);
    if (!t.failing_seeds.empty()) fmt::print(report, " failing_seeds={}", fmt::join(t.failing_seeds, ","));
    report << '\n';
  }
  bool fired = false;
  try {
    SpokedChain control = protruding_control_chain();
    for (const auto& k : find_kinks(control)) fired = fired || k.kind == KinkKind::protruding;
  } catch (const FalsificationError&) {
    fired = true;
  }
  fmt::print(report, "negative control (protruding kink): {}\n", fired ? "detected" : "NOT detected");
  return ok && fired ? kOk : kFalsified;
}

int cmd_constants(const ExperimentConfig& c) {
  const auto& f = c.file;
  double ell = f.number("grid", "ell", c.model.R / (2.0 * std::sqrt(3.0)));
  double pc = f.number("grid", "p_c_site", kSitePercolationThreshold);
  DerivedConstants d;
  try {
    d = derived_constants(c.model, ell, pc);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  AlphaBound a = alpha(c.model);
  json j;
  j["version"] = kVersion;
  j["config"] = json::parse(config_json(c))["config"];
  j["model"] = {{"q", c.model.q}, {"z", c.model.z}, {"beta", c.model.beta}, {"R", c.model.R}, {"gamma", c.model.gamma}};
  j["ell"] = ell;
  j["alpha"] = {{"r", a.r}, {"alpha", a.alpha}, {"alpha_star", a.alpha_star}, {"hypothesis_met", a.hypothesis_met}};
  j["derived"] = {{"p_c_site", d.p_c_site},     {"eps", d.eps},
                  {"alpha", d.alpha},           {"alpha_star", d.alpha_star},
                  {"alpha_from_bound", d.alpha_from_bound}, {"center_area", d.center_area},
                  {"m_z", d.m_z},               {"z0", d.z0},
                  {"z0_star", d.z0_star},       {"beta0", d.beta0},
                  {"p_tilde", d.p_tilde},       {"p_tilde_with_q", p_tilde(c.model, PTildeForm::with_q)},
                  {"p_tilde_site", p_tilde_site(ell, c.model)}};
  j["regime"] = {{"z_at_least_z0", c.model.z >= d.z0}, {"beta_at_least_beta0", c.model.beta >= d.beta0}};
  Output out(c.out);
  out.stream() << j.dump(2) << '\n';
  return kOk;
}

}  // namespace dwr::cli
