#include "dwr/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "dwr/random_cluster.hpp"

namespace dwr {

CellGrid::Locus CellGrid::locate(Point p) const {
  Point c = lattice.canonical(p);
  Locus out;
  double kx = std::floor(c.x + 0.5), ly = std::floor(c.y + 0.5);
  out.k = static_cast<int>(kx);
  out.l = static_cast<int>(ly);
  out.i = std::clamp(static_cast<int>(std::floor((c.x - kx + 0.5) * 8.0)), 0, 7);
  out.j = std::clamp(static_cast<int>(std::floor((c.y - ly + 0.5) * 8.0)), 0, 7);
  return out;
}

Point CellGrid::subcell_center(int k, int l, int i, int j) const {
  return lattice.center(k, l) + lattice.apply({-0.5 + (i + 0.5) / 8.0, -0.5 + (j + 0.5) / 8.0});
}

bool CellGrid::in_link_out(int i, int j, int dir) {
  if (dir == 0) return (i == 6 || i == 7) && j >= 2 && j <= 5;
  return (j == 6 || j == 7) && i >= 2 && i <= 5;
}

bool CellGrid::in_link_in(int i, int j, int dir) {
  if (dir == 0) return (i == 0 || i == 1) && j >= 2 && j <= 5;
  return (j == 0 || j == 1) && i >= 2 && i <= 5;
}

CellGrid build_grid(double ell, int n, Point offset) {
  if (!(ell > 0.0) || n < 1) throw std::invalid_argument("build_grid: need ell > 0 and n >= 1");
  return CellGrid{CellLattice{ell, offset}, n};
}

bool in_del2_star(double length, double ell, const ModelParams& params) {
  if (params.beta == 0.0) return true;
  if (length > params.R) return false;
  return std::pow(length, 3.0 + params.gamma) <= 64.0 * std::pow(ell, 4.0);
}

double beta0_bisect(const ModelParams& params, double eps, double alpha_star) {
  const double R = params.R;
  const double exponent = std::pow(static_cast<double>(params.q), alpha_star) * R * R * params.z /
                          (16.0 * std::sqrt(3.0) * eps);
  const double target = std::log1p(-2.0 * eps);
  if (!std::isfinite(exponent)) return std::numeric_limits<double>::infinity();
  const double r4 = std::pow(R, 4.0);
  auto ok = [&](double beta) { return -exponent * std::log1p(4.0 * r4 / beta) >= target; };
  double hi = 1.0;
  while (!ok(hi)) {
    hi *= 2.0;
    if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  for (int it = 0; it < 300 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

DerivedConstants derived_constants(const ModelParams& params, double ell, double p_c_site) {
  if (!(ell > 0.0 && ell <= params.R / (2.0 * std::sqrt(3.0)) * (1.0 + 1e-12)))
    throw std::invalid_argument(fmt::format("derived_constants: ell = {} outside (0, R/(2 sqrt 3)]", ell));
  if (!(p_c_site > 0.0 && p_c_site < 1.0)) throw std::invalid_argument("derived_constants: p_c_site outside (0, 1)");
  DerivedConstants c;
  c.p_c_site = p_c_site;
  c.eps = (1.0 - std::sqrt(p_c_site)) / 4.0;
  AlphaBound ab = alpha(params);
  c.alpha_star = ab.alpha_star;
  c.alpha_from_bound = !ab.hypothesis_met;
  c.alpha = ab.hypothesis_met ? ab.alpha : ab.alpha_star;
  c.center_area = std::sqrt(3.0) / 8.0 * ell * ell;
  const double q = params.q;
  c.m_z = 2.0 / c.eps * std::pow(q, c.alpha) * c.center_area * params.z;
  c.z0 = 2.0 * 64.0 * 64.0 * std::pow(q, c.alpha_star) / (c.eps * std::sqrt(3.0) * ell * ell);
  c.z0_star = 8.0 * 64.0 * 64.0 * std::sqrt(3.0) * std::pow(q, c.alpha_star) / (c.eps * params.R * params.R);
  c.beta0 = beta0_bisect(params, c.eps, c.alpha_star);
  c.p_tilde = p_tilde(params);
  return c;
}

CellFlags classify_cells(const Configuration& config, const Triangulation& tri, const CellGrid& grid,
                         const ModelParams& params, double m) {
  const int side = grid.side();
  const int cells = side * side;
  const double ell = grid.lattice.ell;
  CellFlags f;
  f.side = side;
  f.f_ext.assign(cells, 0);
  f.f_minus.assign(cells, 0);
  f.g.assign(cells, 0);
  f.good.assign(cells, 0);
  f.link[0].assign(cells, 0);
  f.link[1].assign(cells, 0);
  f.del1_star.assign(config.points.size(), 0);

  for (const Edge& e : tri.edges()) {
    if (in_del2_star(dist(tri.point(e.u), tri.point(e.v)), ell, params)) {
      f.del1_star[e.u] = 1;
      f.del1_star[e.v] = 1;
    }
  }

  std::vector<int> counts(static_cast<std::size_t>(cells) * 64, 0);
  std::vector<int> center_count(cells, 0);
  std::vector<std::uint8_t> center_bad(cells, 0);
  // bad_out[dir][cell]: a wrong-mark Del1* point in the near half of the outgoing link box.
  std::array<std::vector<std::uint8_t>, 2> bad_out{std::vector<std::uint8_t>(cells, 0),
                                                   std::vector<std::uint8_t>(cells, 0)};
  std::array<std::vector<std::uint8_t>, 2> bad_in = bad_out;
  for (std::size_t x = 0; x < config.points.size(); ++x) {
    CellGrid::Locus c = grid.locate(config.points[x]);
    if (!grid.in_grid(c)) continue;
    int idx = grid.index(c.k, c.l);
    ++counts[static_cast<std::size_t>(idx) * 64 + c.i * 8 + c.j];
    bool wrong = f.del1_star[x] && config.marked() && config.marks[x] != 1;
    if (CellGrid::in_center(c.i, c.j)) {
      ++center_count[idx];
      if (wrong) center_bad[idx] = 1;
    }
    for (int d = 0; d < 2; ++d) {
      if (wrong && CellGrid::in_link_out(c.i, c.j, d)) bad_out[d][idx] = 1;
      if (wrong && CellGrid::in_link_in(c.i, c.j, d)) bad_in[d][idx] = 1;
    }
  }
  const double cap = std::max(m, 16.0);
  for (int k = -grid.n; k <= grid.n; ++k) {
    for (int l = -grid.n; l <= grid.n; ++l) {
      int idx = grid.index(k, l);
      bool ext = true, minus = true;
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          bool occupied = counts[static_cast<std::size_t>(idx) * 64 + i * 8 + j] > 0;
          (CellGrid::in_center(i, j) ? minus : ext) &= occupied;
        }
      f.f_ext[idx] = ext;
      f.f_minus[idx] = minus;
      f.g[idx] = center_count[idx] <= cap;
      f.good[idx] = ext && minus && f.g[idx] && !center_bad[idx];
    }
  }
  for (int k = -grid.n; k <= grid.n; ++k) {
    for (int l = -grid.n; l <= grid.n; ++l) {
      int idx = grid.index(k, l);
      if (k < grid.n) f.link[0][idx] = !bad_out[0][idx] && !bad_in[0][grid.index(k + 1, l)];
      if (l < grid.n) f.link[1][idx] = !bad_out[1][idx] && !bad_in[1][grid.index(k, l + 1)];
    }
  }
  return f;
}

CellChain good_cell_chain_exists(const CellFlags& flags, const CellGrid& grid, int k0, int l0) {
  const int side = grid.side();
  const int cells = side * side;
  const int n = grid.n;
  CellChain out;
  ComponentIndex dsu(cells);
  for (int k = -n; k <= n; ++k)
    for (int l = -n; l <= n; ++l) {
      int idx = grid.index(k, l);
      if (!flags.good[idx]) continue;
      if (k < n && flags.link[0][idx] && flags.good[grid.index(k + 1, l)]) dsu.add_edge(idx, grid.index(k + 1, l));
      if (l < n && flags.link[1][idx] && flags.good[grid.index(k, l + 1)]) dsu.add_edge(idx, grid.index(k, l + 1));
    }
  out.labels.assign(cells, -1);
  for (int idx = 0; idx < cells; ++idx)
    if (flags.good[idx]) out.labels[idx] = dsu.find(idx);

  if (std::abs(k0) > n || std::abs(l0) > n) throw std::invalid_argument("good_cell_chain_exists: start outside grid");
  const int start = grid.index(k0, l0);
  if (!flags.good[start]) return out;
  auto on_ring = [n](int k, int l) { return std::abs(k) == n || std::abs(l) == n; };
  std::vector<int> parent(cells, -2);
  std::vector<std::pair<int, int>> queue{{k0, l0}};
  parent[start] = -1;
  int found = -1;
  for (std::size_t h = 0; h < queue.size() && found < 0; ++h) {
    auto [k, l] = queue[h];
    int idx = grid.index(k, l);
    if (on_ring(k, l)) {
      found = idx;
      break;
    }
    const std::array<std::array<int, 2>, 4> steps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
    for (auto [dk, dl] : steps) {
      int kk = k + dk, ll = l + dl;
      if (std::abs(kk) > n || std::abs(ll) > n) continue;
      int nidx = grid.index(kk, ll);
      if (!flags.good[nidx] || parent[nidx] != -2) continue;
      bool linked = dk == 1   ? flags.link[0][idx]
                    : dk == -1 ? flags.link[0][nidx]
                    : dl == 1  ? flags.link[1][idx]
                               : flags.link[1][nidx];
      if (!linked) continue;
      parent[nidx] = idx;
      queue.push_back({kk, ll});
    }
  }
  if (found < 0) return out;
  out.connected = true;
  for (int idx = found; idx >= 0; idx = parent[idx]) out.path.push_back({idx / side - n, idx % side - n});
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

Witness delaunay_path_witness(const Configuration& config, const Triangulation& tri, const CellGrid& grid,
                              std::span<const std::pair<int, int>> path, const ModelParams& params) {
  Witness w;
  if (path.empty()) return w;
  const double ell = grid.lattice.ell;
  const double short_limit = 2.0 * std::sqrt(3.0) * ell / 8.0;
  auto corridor = [&](VertexId v, std::pair<int, int> a, std::pair<int, int> b) {
    CellGrid::Locus c = grid.locate(tri.point(v));
    if (!grid.in_grid(c)) return false;
    auto cell = std::make_pair(c.k, c.l);
    if ((cell == a || cell == b) && CellGrid::in_center(c.i, c.j)) return true;
    if (a == b) return false;
    auto lo = std::min(a, b), hi = std::max(a, b);
    int dir = lo.first != hi.first ? 0 : 1;
    if (cell == lo) return CellGrid::in_link_out(c.i, c.j, dir);
    if (cell == hi) return CellGrid::in_link_in(c.i, c.j, dir);
    return false;
  };
  auto add = [&](VertexId v, std::pair<int, int> a, std::pair<int, int> b) {
    if (!w.vertices.empty() && w.vertices.back() == v) return;
    if (!w.vertices.empty()) {
      VertexId u = w.vertices.back();
      auto nb = tri.neighbors(u);
      if (std::find(nb.begin(), nb.end(), v) == nb.end())
        throw FalsificationError(fmt::format("witness step {} -> {} is not a Delaunay edge", u, v));
      double len = dist(tri.point(u), tri.point(v));
      if (!in_del2_star(len, ell, params))
        throw FalsificationError(fmt::format("witness edge {} -> {} of length {} is not in Del2*", u, v, len));
      w.max_edge = std::max(w.max_edge, len);
      w.short_edges = w.short_edges && len < short_limit;
    }
    if (config.marked() && config.marks[v] != 1) w.monochrome = false;
    w.inside_corridor = w.inside_corridor && corridor(v, a, b);
    w.vertices.push_back(v);
  };
  if (path.size() == 1) {
    add(nearest_vertex(tri, grid.lattice.center(path[0].first, path[0].second)), path[0], path[0]);
    return w;
  }
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    Point a = grid.lattice.center(path[s].first, path[s].second);
    Point b = grid.lattice.center(path[s + 1].first, path[s + 1].second);
    for (VertexId v : voronoi_cells_crossing_segment(tri, a, b)) add(v, path[s], path[s + 1]);
  }
  return w;
}

namespace {

struct BoxScratch {
  std::vector<double> site_u;
  std::vector<double> bond_u;  // 2 per site: right, up
};

bool reaches_boundary(const BoxScratch& s, int L, double ps, double pb, std::vector<int>& stamp, int epoch,
                      std::vector<int>& queue) {
  const int c = (L / 2) * L + L / 2;
  if (!(s.site_u[c] < ps)) return false;
  queue.clear();
  queue.push_back(c);
  stamp[c] = epoch;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    int v = queue[h];
    int x = v / L, y = v % L;
    if (x == 0 || y == 0 || x == L - 1 || y == L - 1) return true;
    auto visit = [&](int w, double bu) {
      if (stamp[w] == epoch || !(bu < pb) || !(s.site_u[w] < ps)) return;
      stamp[w] = epoch;
      queue.push_back(w);
    };
    visit(v + L, s.bond_u[2 * v]);           // x + 1
    visit(v - L, s.bond_u[2 * (v - L)]);     // x - 1
    visit(v + 1, s.bond_u[2 * v + 1]);       // y + 1
    visit(v - 1, s.bond_u[2 * (v - 1) + 1]); // y - 1
  }
  return false;
}

}  // namespace

std::vector<std::vector<std::uint8_t>> mixed_percolation_runs(std::span<const std::pair<double, double>> params, int box,
                                                              int trials, std::uint64_t seed, int threads) {
  if (box < 8) throw std::invalid_argument("percolation: box must be at least 8");
  if (trials < 1) throw std::invalid_argument("percolation: trials must be positive");
  std::vector<std::vector<std::uint8_t>> out(params.size(), std::vector<std::uint8_t>(trials, 0));
  const Rng master(seed);
  const int L = box;
  auto work = [&](int first, int last) {
    BoxScratch s;
    s.site_u.resize(static_cast<std::size_t>(L) * L);
    s.bond_u.resize(2 * s.site_u.size());
    std::vector<int> stamp(s.site_u.size(), 0), queue;
    int epoch = 0;
    for (int t = first; t < last; ++t) {
      Rng rng = master.stream(static_cast<std::uint64_t>(t));
      for (double& u : s.site_u) u = rng.uniform();
      for (double& u : s.bond_u) u = rng.uniform();
      for (std::size_t p = 0; p < params.size(); ++p)
        out[p][t] = reaches_boundary(s, L, params[p].first, params[p].second, stamp, ++epoch, queue);
    }
  };
  threads = std::clamp(threads, 1, trials);
  if (threads == 1) {
    work(0, trials);
  } else {
    std::vector<std::thread> pool;
    for (int th = 0; th < threads; ++th)
      pool.emplace_back(work, static_cast<int>(static_cast<long>(trials) * th / threads),
                        static_cast<int>(static_cast<long>(trials) * (th + 1) / threads));
    for (auto& t : pool) t.join();
  }
  return out;
}

namespace {

Estimate indicator_estimate(const std::vector<std::uint8_t>& xs) {
  std::vector<double> d(xs.begin(), xs.end());
  return mean_se(d);
}

Comparison compare(const std::vector<std::uint8_t>& left, const std::vector<std::uint8_t>& right) {
  Comparison c;
  c.left = indicator_estimate(left);
  c.right = indicator_estimate(right);
  std::vector<double> d(left.size());
  for (std::size_t t = 0; t < d.size(); ++t) d[t] = double(right[t]) - double(left[t]);
  c.diff = mean_se(d);
  c.holds = c.left.mean <= c.right.mean + 3.0 * c.diff.se;
  return c;
}

}  // namespace

PercolationPoint mixed_site_bond_percolation(double p_site, double p_bond, int box, int trials, std::uint64_t seed) {
  std::pair<double, double> pp{p_site, p_bond};
  auto runs = mixed_percolation_runs(std::span(&pp, 1), box, trials, seed);
  return {p_site, p_bond, box, trials, indicator_estimate(runs[0]), seed};
}

PercolationPoint site_percolation(double p, int box, int trials, std::uint64_t seed) {
  return mixed_site_bond_percolation(p, 1.0, box, trials, seed);
}

Comparison hammersley_check(double delta, double p, double p_prime, int box, int trials, std::uint64_t seed) {
  std::vector<std::pair<double, double>> pp{{delta * p, p_prime}, {p, delta * p_prime}};
  auto runs = mixed_percolation_runs(pp, box, trials, seed);
  return compare(runs[0], runs[1]);
}

Comparison mixed_vs_site_check(double p, int box, int trials, std::uint64_t seed) {
  std::vector<std::pair<double, double>> pp{{p * p, 1.0}, {p, p}};
  auto runs = mixed_percolation_runs(pp, box, trials, seed);
  return compare(runs[0], runs[1]);
}

void write_percolation_csv(std::ostream& out, std::span<const PercolationPoint> rows) {
  out << "p_site,p_bond,box,trials,theta_hat,se,seed\n";
  for (const auto& r : rows)
    out << fmt::format("{},{},{},{},{},{},{}\n", r.p_site, r.p_bond, r.box, r.trials,
                       r.theta.mean, r.theta.se, r.seed);
}

}  // namespace dwr
