#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "dwr/delaunay.hpp"
#include "dwr/model.hpp"
#include "dwr/rng.hpp"
#include "dwr/stats.hpp"
#include "dwr/window.hpp"

namespace dwr {

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Edges over vertex ids in [0, n) with their open probabilities. Only the
// listed vertices count as components.
struct EdgeSystem {
  int n = 0;
  std::vector<VertexId> vertices;
  std::vector<Edge> edges;
  std::vector<double> p;

  std::size_t free_edges() const;
};

struct EdgeConfig {
  std::vector<Edge> base;
  std::vector<std::uint8_t> open;

  std::size_t open_count() const;
  std::vector<Edge> open_edges() const;
};

// Disjoint-set forest with a live component count.
class ComponentIndex {
 public:
  explicit ComponentIndex(int n = 0);
  ComponentIndex(int n, std::span<const VertexId> vertices);

  int find(int x) const;
  bool connected(int a, int b) const { return find(a) == find(b); }
  // Registers a new isolated vertex; returns the change in K (always +1).
  int add_vertex();
  // Returns the change in K, which is -1 or 0.
  int add_edge(int a, int b);
  int components() const { return k_; }
  int size() const { return static_cast<int>(parent_.size()); }

 private:
  mutable std::vector<int> parent_;
  std::vector<int> rank_;
  int k_ = 0;
};

int count_components(int n, std::span<const VertexId> vertices, const EdgeConfig& config);
int count_components(const EdgeSystem& system, std::span<const std::uint8_t> open);

// beta / (l^{3+gamma} + beta) for l <= R, 0 beyond; edges with both ends outside
// the window are always open.
double p_open(double length, bool outside_window, const ModelParams& params);
double p_open(const Triangulation& tri, Edge e, const Window& window, const ModelParams& params);

// All Delaunay edges of tri with their open probabilities.
EdgeSystem edge_system(const Triangulation& tri, const Window& window, const ModelParams& params);
// The same restricted to the given edge subset.
EdgeSystem edge_system(const Triangulation& tri, std::span<const Edge> edges, const Window& window,
                       const ModelParams& params);

EdgeConfig draw_edges(const EdgeSystem& system, Rng& rng);

// Sum over edge states of q^K times the product measure.
double tilted_partition_exact(const EdgeSystem& system, double q, std::size_t budget = 25);

// Expectation of f under the q-tilted product measure, by enumeration of the
// edges with 0 < p < 1.
double tilted_expectation_exact(const EdgeSystem& system, double q,
                                const std::function<double(std::span<const std::uint8_t>)>& f,
                                std::size_t budget = 25);

std::vector<double> tilted_marginals_exact(const EdgeSystem& system, double q, std::size_t budget = 25);

// Single-edge heat bath for the q-tilted measure.
class TiltedSampler {
 public:
  TiltedSampler(EdgeSystem system, double q, Rng& rng);

  void sweep();
  // Probability that edge e is open given the rest of the state.
  double conditional(std::size_t e) const;
  std::span<const std::uint8_t> state() const { return open_; }
  EdgeConfig config() const;
  const EdgeSystem& system() const { return sys_; }

 private:
  bool connected_without(std::size_t e) const;
  void set(std::size_t e, bool open);

  EdgeSystem sys_;
  double q_;
  Rng* rng_;
  std::vector<std::uint8_t> open_;
  bool small_;
  std::vector<std::uint64_t> mask_;
  std::vector<std::vector<int>> adj_;
  mutable std::vector<unsigned> stamp_;
  mutable unsigned epoch_ = 0;
  mutable std::vector<int> queue_;
};

EdgeConfig sample_tilted(const EdgeSystem& system, double q, int sweeps, Rng& rng);

// Per-edge open frequency over the given number of sweeps after burn-in.
std::vector<Estimate> tilted_marginals_mc(const EdgeSystem& system, double q, int sweeps, int burn_in, Rng& rng);

// Number of open components meeting the boundary vertices.
int ncc(std::span<const VertexId> boundary, int n, const EdgeConfig& config);
int ncc(std::span<const VertexId> boundary, const EdgeSystem& system, std::span<const std::uint8_t> open);

struct AlphaBound {
  double R = 0.0;
  int q = 0;
  double beta = 0.0;
  double r = 0.0;
  double alpha = 0.0;
  double alpha_star = 0.0;
  bool hypothesis_met = false;  // beta > q
};

AlphaBound alpha(const ModelParams& params);

double p_tilde_site(double ell, const ModelParams& params);

enum class PTildeForm { literal, with_q };
// literal: 1 / (4 R^4 / beta + 1); with_q: 1 / (4 q R^4 / beta + 1).
double p_tilde(const ModelParams& params, PTildeForm form = PTildeForm::literal);

double p_tilde_2(double length, bool outside_window, const ModelParams& params);

double p_star(double length, double angular_gap, const ModelParams& params);

bool domination_check(double length, const ModelParams& params);

// (1/((q/beta) a^4 + 1)) (1/((q/beta) b^4 + 1)) >= 1/((q/beta)(a+b)^4 + 1).
bool product_fact_check(double a, double b, double q, double beta);

// h(zeta + x0) / h(zeta) by exact enumeration on both edge sets.
double papangelou_ratio_exact(std::span<const Point> zeta, Point x0, const Window& window, const ModelParams& params,
                              std::size_t budget = 25);

// Lines "u v open length".
void write_edge_config(std::ostream& out, const EdgeConfig& config, std::span<const Point> points);

}  // namespace dwr
