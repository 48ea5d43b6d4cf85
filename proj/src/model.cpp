#include "dwr/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dwr {

void ModelParams::validate() const {
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  if (!(z > 0.0)) throw std::invalid_argument("z must be > 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!(R > 0.0)) throw std::invalid_argument("R must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
}

double phi(double length, const ModelParams& params) {
  if (!(length > 0.0)) throw std::domain_error("phi: length must be positive");
  if (length > params.R || params.beta == 0.0) return 0.0;
  return std::log1p(params.beta / std::pow(length, 3.0 + params.gamma));
}

int delta_sigma(int mark_a, int mark_b) {
  if (mark_a < 1 || mark_b < 1) throw std::invalid_argument("delta_sigma: unmarked endpoint");
  return mark_a == mark_b ? 1 : 0;
}

namespace {

bool face_meets(const Triangulation& tri, int f, const Window& window) {
  const Face& F = tri.face(f);
  return !F.ghost() && window.circle_meets(F.circ);
}

double pair_energy(Point a, Point b, int ma, int mb, const ModelParams& params) {
  if (ma == mb) return 0.0;
  return phi(dist(a, b), params);
}

// Without triangles an edge is tested through its diametral circle.
bool diametral_in_window(Point a, Point b, const Window& window) {
  return window.circle_meets({0.5 * (a + b), 0.5 * dist(a, b)});
}

}  // namespace

bool edge_in_window(const Triangulation& tri, int f, int i, const Window& window) {
  return face_meets(tri, f, window) || face_meets(tri, tri.face(f).n[i], window);
}

double edge_energy(const Triangulation& tri, int f, int i, std::span<const int> marks, const Window& window,
                   const ModelParams& params) {
  const Face& F = tri.face(f);
  VertexId a = F.v[(i + 1) % 3], b = F.v[(i + 2) % 3];
  if (a == kInfinite || b == kInfinite) return 0.0;
  if (marks[a] == marks[b]) return 0.0;
  if (!edge_in_window(tri, f, i, window)) return 0.0;
  return phi(dist(tri.point(a), tri.point(b)), params);
}

double faces_energy(const Triangulation& tri, std::span<const int> faces, std::span<const int> marks,
                    const Window& window, const ModelParams& params) {
  std::vector<Edge> seen;
  double total = 0.0;
  for (int f : faces) {
    const Face& F = tri.face(f);
    for (int i = 0; i < 3; ++i) {
      VertexId a = F.v[(i + 1) % 3], b = F.v[(i + 2) % 3];
      if (a == kInfinite || b == kInfinite) continue;
      Edge e = make_edge(a, b);
      if (std::find(seen.begin(), seen.end(), e) != seen.end()) continue;
      seen.push_back(e);
      total += edge_energy(tri, f, i, marks, window, params);
    }
  }
  return total;
}

double hamiltonian(const Triangulation& tri, std::span<const int> marks, const Window& window,
                   const ModelParams& params) {
  double total = 0.0;
  if (tri.degenerate()) {
    for (const Edge& e : tri.edges()) {
      Point a = tri.point(e.u), b = tri.point(e.v);
      if (marks[e.u] != marks[e.v] && diametral_in_window(a, b, window)) total += phi(dist(a, b), params);
    }
    return total;
  }
  for (std::size_t f = 0; f < tri.face_capacity(); ++f) {
    const Face& F = tri.face(static_cast<int>(f));
    if (!F.alive) continue;
    for (int i = 0; i < 3; ++i) {
      VertexId a = F.v[(i + 1) % 3], b = F.v[(i + 2) % 3];
      if (a == kInfinite || b == kInfinite || a > b) continue;
      total += edge_energy(tri, static_cast<int>(f), i, marks, window, params);
    }
  }
  return total;
}

double hamiltonian(const Configuration& config, const ModelParams& params) {
  if (!config.marked()) throw std::invalid_argument("hamiltonian: configuration is unmarked");
  Triangulation tri(config.points);
  return hamiltonian(tri, config.marks, config.window, params);
}

double energy_delta_insert(const Triangulation& tri, std::span<const int> marks, Point x0, int mark,
                           const Window& window, const ModelParams& params) {
  if (tri.degenerate()) {
    Triangulation copy = tri;
    VertexId h = copy.insert(x0);
    std::vector<int> m(marks.begin(), marks.end());
    m.resize(copy.handle_count(), 0);
    m[h] = mark;
    return hamiltonian(copy, m, window, params) - hamiltonian(tri, marks, window, params);
  }
  auto cav = tri.cavity(x0);
  double before = faces_energy(tri, cav.faces, marks, window, params);
  std::size_t n = cav.boundary.size();
  std::vector<char> meets(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& e = cav.boundary[k];
    if (e.a != kInfinite && e.b != kInfinite)
      meets[k] = window.circle_meets(circumcircle(tri.point(e.a), tri.point(e.b), x0));
  }
  auto mark_of = [&](VertexId v) { return marks[v]; };
  double after = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& e = cav.boundary[k];
    if (e.a == kInfinite || e.b == kInfinite) continue;
    const Face& outer = tri.face(e.outer);
    bool in = meets[k] || (!outer.ghost() && window.circle_meets(outer.circ));
    if (in) after += pair_energy(tri.point(e.a), tri.point(e.b), mark_of(e.a), mark_of(e.b), params);
  }
  for (std::size_t k = 0; k < n; ++k) {
    VertexId a = cav.boundary[k].a;
    if (a == kInfinite) continue;
    bool in = meets[k];
    for (std::size_t j = 0; j < n && !in; ++j)
      if (cav.boundary[j].b == a) in = meets[j];
    if (in) after += pair_energy(tri.point(a), x0, mark_of(a), mark, params);
  }
  return after - before;
}

double energy_delta_insert(const Configuration& config, Point x0, int mark, const ModelParams& params) {
  Triangulation tri(config.points);
  return energy_delta_insert(tri, config.marks, x0, mark, config.window, params);
}

double incident_energy(const Triangulation& tri, VertexId h, int mark, std::span<const int> marks,
                       const Window& window, const ModelParams& params) {
  double total = 0.0;
  if (tri.degenerate()) {
    for (VertexId a : tri.neighbors(h)) {
      Point pa = tri.point(a), ph = tri.point(h);
      if (marks[a] != mark && diametral_in_window(pa, ph, window)) total += phi(dist(pa, ph), params);
    }
    return total;
  }
  for (int f : tri.star(h)) {
    const Face& F = tri.face(f);
    int i = F.index_of(h);
    VertexId a = F.v[(i + 1) % 3];
    if (a == kInfinite || marks[a] == mark) continue;
    if (!edge_in_window(tri, f, (i + 2) % 3, window)) continue;
    total += phi(dist(tri.point(h), tri.point(a)), params);
  }
  return total;
}

bool admissible(const Configuration& config, const ModelParams& params) {
  try {
    params.validate();
  } catch (const std::invalid_argument&) {
    return false;
  }
  for (Point p : config.points)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  if (config.marked()) {
    if (config.marks.size() != config.points.size()) return false;
    for (int m : config.marks)
      if (m < 1 || m > params.q) return false;
  }
  try {
    Triangulation tri(config.points);
    for (const Edge& e : tri.edges()) {
      double l = dist(tri.point(e.u), tri.point(e.v));
      if (!(l > 0.0) || !std::isfinite(phi(l, params))) return false;
    }
  } catch (const TriangulationError&) {
    return false;
  }
  return true;
}

double gibbs_weight(const Configuration& config, const ModelParams& params) {
  return std::exp(-hamiltonian(config, params));
}

Point CellLattice::apply(Point x) const { return {ell * x.x + 0.5 * ell * x.y, std::sqrt(3.0) / 2.0 * ell * x.y}; }

Point CellLattice::canonical(Point p) const {
  Point d = p - offset;
  double y = d.y / (std::sqrt(3.0) / 2.0 * ell);
  double x = (d.x - 0.5 * ell * y) / ell;
  return {x, y};
}

Point CellLattice::center(int k, int l) const { return offset + apply({double(k), double(l)}); }

std::pair<int, int> CellLattice::cell_of(Point p) const {
  Point c = canonical(p);
  return {static_cast<int>(std::floor(c.x + 0.5)), static_cast<int>(std::floor(c.y + 0.5))};
}

double CellLattice::cell_area() const { return std::sqrt(3.0) / 2.0 * ell * ell; }

Window CellLattice::cells(int k0, int l0, int nk, int nl) const {
  Point origin = offset + apply({k0 - 0.5, l0 - 0.5});
  return Window{origin, apply({double(nk), 0.0}), apply({0.0, double(nl)})};
}

Configuration pseudo_periodic(const PseudoPeriodicSpec& spec, const Window& window, Rng& rng) {
  if (!(spec.rho0 > 0.0 && spec.rho0 < 0.5)) throw std::invalid_argument("pseudo_periodic: rho0 must lie in (0, 1/2)");
  CellLattice lat = spec.lattice();
  Point o = lat.canonical(window.origin) + Point{0.5, 0.5};
  Point u = lat.canonical(window.origin + window.u) - lat.canonical(window.origin);
  Point v = lat.canonical(window.origin + window.v) - lat.canonical(window.origin);
  auto near_int = [](double x) { return std::fabs(x - std::round(x)) < 1e-9; };
  if (!(near_int(o.x) && near_int(o.y) && near_int(u.x) && near_int(u.y) && near_int(v.x) && near_int(v.y)) ||
      std::round(u.y) != 0.0 || std::round(v.x) != 0.0 || std::round(u.x) <= 0 || std::round(v.y) <= 0)
    throw std::invalid_argument("pseudo_periodic: window is not a union of cells");
  int k0 = static_cast<int>(std::round(o.x)), l0 = static_cast<int>(std::round(o.y));
  int nk = static_cast<int>(std::round(u.x)), nl = static_cast<int>(std::round(v.y));
  Configuration c;
  c.window = window;
  for (int l = l0; l < l0 + nl; ++l) {
    for (int k = k0; k < k0 + nk; ++k) {
      double r = spec.rho0 * spec.ell * std::sqrt(rng.uniform());
      double t = rng.uniform(0.0, 2.0 * kPi);
      c.points.push_back(lat.center(k, l) + Point{r * std::cos(t), r * std::sin(t)});
      c.marks.push_back(spec.mark(k, l));
    }
  }
  return c;
}

double summability_constant(double ell, double rho0, const ModelParams& params) {
  double lm = std::pow(ell * (1.0 - 2.0 * rho0), 3.0 + params.gamma);
  return 3.0 * std::log((lm + params.beta) / lm);
}

namespace {

// Whether the segment [a, b] meets the closed square [cx-1/2, cx+1/2] x [cy-1/2, cy+1/2].
bool segment_meets_square(Point a, Point b, double cx, double cy) {
  double t0 = 0.0, t1 = 1.0;
  Point d = b - a;
  double p[4] = {-d.x, d.x, -d.y, d.y};
  double q[4] = {a.x - (cx - 0.5), (cx + 0.5) - a.x, a.y - (cy - 0.5), (cy + 0.5) - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    double t = q[i] / p[i];
    if (p[i] < 0.0)
      t0 = std::max(t0, t);
    else
      t1 = std::min(t1, t);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

double cell_potential(const Triangulation& tri, std::span<const int> marks, const CellLattice& lattice, int k, int l,
                      const ModelParams& params) {
  double total = 0.0;
  for (const Edge& e : tri.edges()) {
    Point a = lattice.canonical(tri.point(e.u));
    Point b = lattice.canonical(tri.point(e.v));
    if (!segment_meets_square(a, b, k, l)) continue;
    if (marks[e.u] == marks[e.v]) continue;
    int cells = 0;
    int kx0 = static_cast<int>(std::floor(std::min(a.x, b.x) - 0.5)), kx1 = static_cast<int>(std::ceil(std::max(a.x, b.x) + 0.5));
    int ly0 = static_cast<int>(std::floor(std::min(a.y, b.y) - 0.5)), ly1 = static_cast<int>(std::ceil(std::max(a.y, b.y) + 0.5));
    for (int kk = kx0; kk <= kx1; ++kk)
      for (int ll = ly0; ll <= ly1; ++ll) cells += segment_meets_square(a, b, kk, ll) ? 1 : 0;
    total += phi(dist(tri.point(e.u), tri.point(e.v)), params) / cells;
  }
  return total;
}

}  // namespace dwr
