#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <iosfwd>
#include <span>
#include <vector>

#include "dwr/configuration.hpp"
#include "dwr/delaunay.hpp"
#include "dwr/kinks.hpp"
#include "dwr/model.hpp"
#include "dwr/rng.hpp"
#include "dwr/stats.hpp"

namespace dwr {

inline constexpr double kSitePercolationThreshold = 0.592746;

// Cells (k, l) for |k|, |l| <= n, each split into 8 x 8 subcells (i, j). Subcell
// (0, 0) sits at the lattice-coordinate minimum corner; i runs towards cell k + 1.
struct CellGrid {
  CellLattice lattice;
  int n = 1;

  struct Locus {
    int k = 0;
    int l = 0;
    int i = 0;
    int j = 0;
  };

  int side() const { return 2 * n + 1; }
  double cell_area() const { return lattice.cell_area(); }
  double subcell_area() const { return lattice.cell_area() / 64.0; }
  double center_area() const { return lattice.cell_area() / 4.0; }
  Window window() const { return lattice.cells(-n, -n, side(), side()); }

  Locus locate(Point p) const;
  bool in_grid(const Locus& c) const { return std::abs(c.k) <= n && std::abs(c.l) <= n; }
  // Flat cell index in [0, side^2).
  int index(int k, int l) const { return (k + n) * side() + (l + n); }
  Point subcell_center(int k, int l, int i, int j) const;

  static bool in_center(int i, int j) { return i >= 2 && i <= 5 && j >= 2 && j <= 5; }
  // Part of the link box towards cell k + 1 (dir 0) or l + 1 (dir 1) on the near side.
  static bool in_link_out(int i, int j, int dir);
  // Part of the link box coming from cell k - 1 (dir 0) or l - 1 (dir 1).
  static bool in_link_in(int i, int j, int dir);
};

CellGrid build_grid(double ell, int n, Point offset = {});

struct DerivedConstants {
  double p_c_site = kSitePercolationThreshold;
  double eps = 0.0;
  double alpha = 0.0;       // alpha(R, q, beta), or alpha_star when beta <= q
  double alpha_star = 0.0;
  bool alpha_from_bound = false;
  double center_area = 0.0;
  double m_z = 0.0;
  double z0 = 0.0;          // with alpha_star
  double z0_star = 0.0;     // with alpha_star
  double beta0 = 0.0;
  double p_tilde = 0.0;
};

// Throws std::invalid_argument unless 0 < ell <= R / (2 sqrt 3) and 0 < p_c_site < 1.
DerivedConstants derived_constants(const ModelParams& params, double ell, double p_c_site = kSitePercolationThreshold);

// Smallest beta with p_tilde(beta)^exponent >= 1 - 2 eps, by bisection.
double beta0_bisect(const ModelParams& params, double eps, double alpha_star);

// phi(l') >= log(1 + beta / (64 ell^4)).
bool in_del2_star(double length, double ell, const ModelParams& params);

struct CellFlags {
  int side = 0;
  std::vector<std::uint8_t> f_ext;
  std::vector<std::uint8_t> f_minus;
  std::vector<std::uint8_t> g;
  std::vector<std::uint8_t> good;
  // link[dir][index(k, l)] joins (k, l) to (k + 1, l) for dir 0 and to (k, l + 1) for dir 1.
  std::array<std::vector<std::uint8_t>, 2> link;
  std::vector<std::uint8_t> del1_star;  // per configuration point
};

// m is the occupancy cap for the centre block (raised to 16 when smaller).
CellFlags classify_cells(const Configuration& config, const Triangulation& tri, const CellGrid& grid,
                         const ModelParams& params, double m);

struct CellChain {
  bool connected = false;
  std::vector<int> labels;                   // cluster id per cell, -1 for bad cells
  std::vector<std::pair<int, int>> path;     // start cell to a boundary cell
};

// Mixed site-bond connectivity on the cell lattice from (k0, l0) to the outer ring.
CellChain good_cell_chain_exists(const CellFlags& flags, const CellGrid& grid, int k0 = 0, int l0 = 0);

struct Witness {
  std::vector<VertexId> vertices;
  double max_edge = 0.0;
  bool short_edges = true;      // every edge < 2 sqrt(3) ell / 8
  bool monochrome = true;       // every vertex carries mark 1
  bool inside_corridor = true;  // every vertex in a centre block or link box of the chain
};

// Del2* path through the Voronoi cells crossing the segments between
// consecutive cell centres. Throws FalsificationError if a step is not a Del2* edge.
Witness delaunay_path_witness(const Configuration& config, const Triangulation& tri, const CellGrid& grid,
                              std::span<const std::pair<int, int>> path, const ModelParams& params);

// Percolation on the box {0..L-1}^2 from the centre site to the outer ring.
// Site and bond uniforms are shared across parameter values within a trial.
struct PercolationPoint {
  double p_site = 1.0;
  double p_bond = 1.0;
  int box = 0;
  int trials = 0;
  Estimate theta;
  std::uint64_t seed = 0;
};

// One reaching indicator per parameter pair per trial, all pairs on the same uniforms.
// Trials are split across threads; each trial has its own substream, so results do not depend on threads.
std::vector<std::vector<std::uint8_t>> mixed_percolation_runs(std::span<const std::pair<double, double>> params, int box,
                                                              int trials, std::uint64_t seed, int threads = 1);

PercolationPoint site_percolation(double p, int box, int trials, std::uint64_t seed);
PercolationPoint mixed_site_bond_percolation(double p_site, double p_bond, int box, int trials, std::uint64_t seed);

struct Comparison {
  Estimate left;
  Estimate right;
  Estimate diff;  // paired right - left
  bool holds = false;
};

// theta_mixed(delta p, p') <= theta_mixed(p, delta p') + 3 SE of the paired difference.
Comparison hammersley_check(double delta, double p, double p_prime, int box, int trials, std::uint64_t seed);

// theta_site(p^2) <= theta_mixed(p, p) + 3 SE of the paired difference.
Comparison mixed_vs_site_check(double p, int box, int trials, std::uint64_t seed);

// Columns p_site,p_bond,box,trials,theta_hat,se,seed.
void write_percolation_csv(std::ostream& out, std::span<const PercolationPoint> rows);

}  // namespace dwr
