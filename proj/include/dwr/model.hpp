#pragma once

#include <functional>
#include <span>
#include <utility>

#include "dwr/configuration.hpp"
#include "dwr/delaunay.hpp"
#include "dwr/rng.hpp"

namespace dwr {

struct ModelParams {
  int q = 2;
  double z = 1.0;
  double beta = 0.0;
  double R = 1.0;
  double gamma = 1.0;

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

// log((l^{3+gamma} + beta) / l^{3+gamma}) for l <= R, else 0.
double phi(double length, const ModelParams& params);

int delta_sigma(int mark_a, int mark_b);

// Whether the edge opposite v[i] of face f belongs to a triangle whose
// circumcircle meets the window.
bool edge_in_window(const Triangulation& tri, int f, int i, const Window& window);

// Contribution of one edge to the Hamiltonian, with marks indexed by handle.
double edge_energy(const Triangulation& tri, int f, int i, std::span<const int> marks, const Window& window,
                   const ModelParams& params);

// Sum over distinct real edges of the given faces.
double faces_energy(const Triangulation& tri, std::span<const int> faces, std::span<const int> marks,
                    const Window& window, const ModelParams& params);

double hamiltonian(const Triangulation& tri, std::span<const int> marks, const Window& window,
                   const ModelParams& params);
double hamiltonian(const Configuration& config, const ModelParams& params);

// H(config + x0) - H(config) from the insertion cavity alone.
double energy_delta_insert(const Triangulation& tri, std::span<const int> marks, Point x0, int mark,
                           const Window& window, const ModelParams& params);
double energy_delta_insert(const Configuration& config, Point x0, int mark, const ModelParams& params);

// Energy of the edges incident to vertex h when it carries the given mark.
double incident_energy(const Triangulation& tri, VertexId h, int mark, std::span<const int> marks,
                       const Window& window, const ModelParams& params);

bool admissible(const Configuration& config, const ModelParams& params);

double gibbs_weight(const Configuration& config, const ModelParams& params);

// Parallelotope lattice: cell (k, l) is {offset + M x : x - (k, l) in [-1/2, 1/2)^2}
// with M = [[ell, ell/2], [0, sqrt(3) ell / 2]].
struct CellLattice {
  double ell = 1.0;
  Point offset;

  Point apply(Point x) const;
  Point canonical(Point p) const;
  Point center(int k, int l) const;
  std::pair<int, int> cell_of(Point p) const;
  double cell_area() const;
  // Union of cells k0 <= k < k0 + nk, l0 <= l < l0 + nl.
  Window cells(int k0, int l0, int nk, int nl) const;
};

struct PseudoPeriodicSpec {
  double ell = 1.0;
  double rho0 = 0.1;
  Point offset;
  std::function<int(int, int)> mark = [](int, int) { return 1; };

  CellLattice lattice() const { return {ell, offset}; }
};

// One point per cell of the window, uniform in the centred disk of radius rho0 * ell.
Configuration pseudo_periodic(const PseudoPeriodicSpec& spec, const Window& window, Rng& rng);

// 3 log(((ell (1 - 2 rho0))^4 + beta) / (ell (1 - 2 rho0))^4), in the generalised exponent.
double summability_constant(double ell, double rho0, const ModelParams& params);

// Sum over edges meeting cell (k, l) of phi (1 - delta) divided by the number of cells the edge meets.
double cell_potential(const Triangulation& tri, std::span<const int> marks, const CellLattice& lattice, int k, int l,
                      const ModelParams& params);

}  // namespace dwr
