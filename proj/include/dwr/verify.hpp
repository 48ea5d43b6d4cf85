#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dwr/delaunay.hpp"
#include "dwr/kinks.hpp"
#include "dwr/sampler.hpp"

namespace dwr {

// Random Delaunay neighbourhood of the origin.
struct NeighborhoodInstance {
  std::uint64_t seed = 0;
  std::string generator;
  double R = 1.0;
  std::vector<Point> points;
  Triangulation tri;
  NeighborhoodGraph graph;
  std::array<QuadrantChain, 4> chains;
};

NeighborhoodInstance fuzz_neighborhood(std::uint64_t seed);

struct CheckTally {
  std::string name;
  long checked = 0;
  long violations = 0;
  long not_applicable = 0;
  double worst = 0.0;  // check-specific extreme value
  std::vector<std::uint64_t> failing_seeds;

  bool passed() const { return violations == 0 && checked > 0; }
  void record(bool ok, std::uint64_t seed);
};

struct GeometrySuiteOptions {
  long instances = 10000;
  long arc_instances = 100000;
  std::uint64_t seed = 1;
  std::ostream* jsonl = nullptr;
};

// Runs every kink and arc check; one JSON line per neighbourhood instance.
std::vector<CheckTally> run_geometry_suite(const GeometrySuiteOptions& options);

// A deliberately non-Delaunay chain with a protruding kink.
SpokedChain protruding_control_chain();

// Sampler restricted to a few candidate sites: births pick a site uniformly,
// so the chain is a finite Markov chain whose kernel can be written out.
struct ToySpec {
  ModelParams params;
  Window window;
  std::vector<Point> sites;
  std::vector<Point> boundary;
  std::vector<int> boundary_marks;
  SamplerOptions options;
};

ToySpec default_toy(bool with_boundary);

struct ToyBalance {
  int states = 0;
  double row_sum = 0.0;      // max |sum_j P_ij - 1|
  double stationarity = 0.0; // max |pi P - pi|
  double balance = 0.0;      // max |pi_i P_ij - pi_j P_ji|
  double eigenvector = 0.0;  // max |v - pi| for the solved left eigenvector v
  std::array<double, 2> per_move{};  // stationarity of the birth-death and the flip kernels alone
  double equivariance = 0.0; // max |P(s.i, s.j) - P(i, j)| over mark permutations s (free boundary only)
};

ToyBalance toy_detailed_balance(const ToySpec& spec);

struct NccOptions {
  long sweeps = 100000;
  long burn_in = 1000;
  std::size_t exact_limit = 12;  // enumerate when at most this many free exterior edges
};

struct NccResult {
  std::uint64_t seed = 0;
  double R = 0.0;
  int q = 0;
  double beta = 0.0;
  double intensity = 0.0;
  int points = 0;
  int boundary = 0;    // vertices of the neighbourhood graph
  int free_edges = 0;  // exterior edges with 0 < p < 1
  bool exact = false;
  Estimate ncc;
  double alpha = 0.0;
  double alpha_star = 0.0;
  bool hypothesis_met = false;  // beta > q
  bool violation = false;       // mean > alpha + 3 SE
};

// Expected number of open components meeting the neighbourhood graph of x0,
// under the q-tilted measure on the exterior edges.
NccResult ncc_expectation(std::span<const Point> zeta, Point x0, const ModelParams& params, const NccOptions& options,
                          Rng& rng);

// Poisson(intensity / R^2) points in the disk of radius R about the origin, plus
// four far anchors, with x0 at the origin.
NccResult ncc_instance(std::uint64_t seed, const ModelParams& params, double intensity, const NccOptions& options);

}  // namespace dwr
