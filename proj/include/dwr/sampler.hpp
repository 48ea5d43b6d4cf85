#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "dwr/configuration.hpp"
#include "dwr/delaunay.hpp"
#include "dwr/model.hpp"
#include "dwr/random_cluster.hpp"
#include "dwr/rng.hpp"
#include "dwr/stats.hpp"

namespace dwr {

struct SamplerOptions {
  double p_birth = 0.4;
  double p_death = 0.4;
  double p_flip = 0.2;
  // Steps between full energy recomputations (0 disables).
  int resync_every = 10000;

  void validate() const;
};

enum class Move { birth = 0, death = 1, flip = 2 };

struct MoveCounters {
  std::array<std::uint64_t, 3> proposed{};
  std::array<std::uint64_t, 3> accepted{};
};

// Birth-death Metropolis-Hastings chain for the marked Gibbs measure with
// total activity z and uniform marks. Points outside the window are the
// fixed boundary.
class GibbsSampler {
 public:
  GibbsSampler(const Configuration& initial, const ModelParams& params, Rng rng, SamplerOptions options = {});

  void step();
  void sweep();
  std::size_t steps_per_sweep() const;

  // min(1, z |window| / (N + 1) e^{-dH}); 0 on an occupied position.
  double birth_acceptance(Point x, int mark) const;
  // min(1, N / (z |window|) e^{-dH}).
  double death_acceptance(VertexId h);
  // Heat-bath law over marks 1..q for interior vertex h.
  std::vector<double> mark_law(VertexId h) const;

  bool try_birth(Point x, int mark, double u);
  bool try_death(VertexId h, double u);
  void set_mark(VertexId h, int mark);

  const Triangulation& triangulation() const { return tri_; }
  std::span<const int> marks() const { return marks_; }
  bool is_boundary(VertexId h) const { return boundary_[h] != 0; }
  std::span<const VertexId> interior() const { return interior_; }
  std::size_t interior_count() const { return interior_.size(); }
  Configuration configuration() const;

  double energy() const { return energy_; }
  double recompute_energy() const;
  // Replaces the cached energy by a full recomputation and returns the drift.
  double resync();
  double max_drift() const { return max_drift_; }

  const MoveCounters& counters() const { return counters_; }
  const ModelParams& params() const { return params_; }
  const Window& window() const { return window_; }
  const SamplerOptions& options() const { return options_; }
  Rng& rng() { return rng_; }

 private:
  void add_interior(VertexId h);
  void drop_interior(VertexId h);

  ModelParams params_;
  SamplerOptions options_;
  Window window_;
  Rng rng_;
  Triangulation tri_;
  std::vector<int> marks_;
  std::vector<std::uint8_t> boundary_;
  std::vector<VertexId> interior_;
  std::vector<int> slot_;  // position in interior_, -1 otherwise
  std::vector<VertexId> free_;
  double energy_ = 0.0;
  double max_drift_ = 0.0;
  std::uint64_t steps_ = 0;
  MoveCounters counters_;
};

enum class BoundaryKind { free, monochrome };

// Empty window with either no boundary or Poisson(z) points of one mark in the
// frame of width R around it.
Configuration make_boundary(const Window& window, BoundaryKind kind, const ModelParams& params, Rng& rng,
                            int mark = 1);

struct CoupledSample {
  Configuration config;
  EdgeConfig edges;  // over indices into config.points
};

// Edges drawn Bernoulli(p_open) between equal-mark Delaunay neighbours, closed otherwise.
CoupledSample rc_coupled_sample(const GibbsSampler& sampler, Rng& rng);

struct Observables {
  std::vector<int> n_per_mark;  // index s - 1
  int n = 0;
  double area = 0.0;
  int order_param = 0;   // q N_1 - N
  int connections = -1;  // points of delta joined to the boundary, -1 if not drawn

  double density(int mark) const { return n_per_mark[mark - 1] / area; }
};

Observables observe(const Configuration& config, const Window& delta, int q);

// Points of delta whose open component contains a point outside config.window.
int connection_count(const Configuration& config, const EdgeConfig& edges, const Window& delta);

struct RunOptions {
  int sweeps = 1000;
  int burn_in = 100;
  int thinning = 1;
  std::optional<Window> delta;  // defaults to the window
  bool coupled = false;         // draw the random-cluster edges at every retained sweep
};

struct SweepRecord {
  int sweep = 0;
  Observables obs;
  double energy = 0.0;
};

struct RunSummary {
  std::uint64_t seed = 0;
  std::vector<SweepRecord> records;
  Estimate n;
  std::vector<Estimate> n_per_mark;
  Estimate order_param;
  Estimate connection_term;  // (q - 1) N_{delta <-> outside}
  Estimate identity_gap;     // paired order_param - connection_term
  double tau_order = 0.0;
  MoveCounters counters;
  double max_drift = 0.0;
};

RunSummary run(GibbsSampler& sampler, const RunOptions& options,
               const std::function<void(const SweepRecord&)>& sink = {});

// {"sweep":..,"N":..,"N_per_mark":[..],"order_param":..,"energy":..,"seed":..}
void write_sweep_json(std::ostream& out, const SweepRecord& record, std::uint64_t seed);

}  // namespace dwr
