#include "dwr/random_cluster.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace dwr {

std::size_t EdgeSystem::free_edges() const {
  return static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [](double x) { return x > 0.0 && x < 1.0; }));
}

std::size_t EdgeConfig::open_count() const {
  return static_cast<std::size_t>(std::count(open.begin(), open.end(), 1));
}

std::vector<Edge> EdgeConfig::open_edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < base.size(); ++i)
    if (open[i]) out.push_back(base[i]);
  return out;
}

ComponentIndex::ComponentIndex(int n) : parent_(n), rank_(n, 0), k_(n) {
  for (int i = 0; i < n; ++i) parent_[i] = i;
}

ComponentIndex::ComponentIndex(int n, std::span<const VertexId> vertices) : ComponentIndex(n) {
  k_ = static_cast<int>(vertices.size());
}

int ComponentIndex::find(int x) const {
  int root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    int next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

int ComponentIndex::add_vertex() {
  parent_.push_back(static_cast<int>(parent_.size()));
  rank_.push_back(0);
  ++k_;
  return 1;
}

int ComponentIndex::add_edge(int a, int b) {
  int ra = find(a), rb = find(b);
  if (ra == rb) return 0;
  if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
  parent_[rb] = ra;
  if (rank_[ra] == rank_[rb]) ++rank_[ra];
  --k_;
  assert(k_ >= 0);
  return -1;
}

int count_components(int n, std::span<const VertexId> vertices, const EdgeConfig& config) {
  ComponentIndex ci(n, vertices);
  for (std::size_t i = 0; i < config.base.size(); ++i)
    if (config.open[i]) ci.add_edge(config.base[i].u, config.base[i].v);
  return ci.components();
}

int count_components(const EdgeSystem& system, std::span<const std::uint8_t> open) {
  ComponentIndex ci(system.n, system.vertices);
  for (std::size_t i = 0; i < system.edges.size(); ++i)
    if (open[i]) ci.add_edge(system.edges[i].u, system.edges[i].v);
  return ci.components();
}

double p_open(double length, bool outside_window, const ModelParams& params) {
  if (outside_window) return 1.0;
  if (length > params.R || params.beta == 0.0) return 0.0;
  double l = std::pow(length, 3.0 + params.gamma);
  return params.beta / (l + params.beta);
}

double p_open(const Triangulation& tri, Edge e, const Window& window, const ModelParams& params) {
  if (!tri.contains(e.u) || !tri.contains(e.v)) throw std::invalid_argument("p_open: unknown vertex");
  auto nb = tri.neighbors(e.u);
  if (std::find(nb.begin(), nb.end(), e.v) == nb.end()) throw std::invalid_argument("p_open: not a Delaunay edge");
  Point a = tri.point(e.u), b = tri.point(e.v);
  return p_open(dist(a, b), !window.contains(a) && !window.contains(b), params);
}

EdgeSystem edge_system(const Triangulation& tri, std::span<const Edge> edges, const Window& window,
                       const ModelParams& params) {
  EdgeSystem s;
  s.n = static_cast<int>(tri.handle_count());
  s.vertices = tri.vertices();
  s.edges.assign(edges.begin(), edges.end());
  for (const Edge& e : s.edges) {
    Point a = tri.point(e.u), b = tri.point(e.v);
    s.p.push_back(p_open(dist(a, b), !window.contains(a) && !window.contains(b), params));
  }
  return s;
}

EdgeSystem edge_system(const Triangulation& tri, const Window& window, const ModelParams& params) {
  auto edges = tri.edges();
  return edge_system(tri, edges, window, params);
}

EdgeConfig draw_edges(const EdgeSystem& system, Rng& rng) {
  EdgeConfig c;
  c.base = system.edges;
  c.open.resize(system.edges.size());
  for (std::size_t i = 0; i < system.edges.size(); ++i) c.open[i] = rng.bernoulli(system.p[i]) ? 1 : 0;
  return c;
}

namespace {

void check_system(const EdgeSystem& s) {
  if (s.p.size() != s.edges.size()) throw std::invalid_argument("edge system: probability count mismatch");
  std::vector<char> listed(s.n, 0);
  for (VertexId v : s.vertices) {
    if (v < 0 || v >= s.n || listed[v]) throw std::invalid_argument("edge system: bad vertex list");
    listed[v] = 1;
  }
  std::vector<Edge> sorted;
  for (const Edge& e : s.edges) {
    if (e.u == e.v || e.u < 0 || e.v < 0 || e.u >= s.n || e.v >= s.n || !listed[e.u] || !listed[e.v])
      throw std::invalid_argument("edge system: edge endpoint not listed");
    sorted.push_back(make_edge(e.u, e.v));
  }
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("edge system: repeated edge");
  for (double p : s.p)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge system: probability out of range");
}

class RollbackDsu {
 public:
  explicit RollbackDsu(int n) : parent_(n), size_(n, 1) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }
  int find(int x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) {
      history_.push_back(-1);
      return;
    }
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    history_.push_back(b);
    ++unions_;
  }
  void undo() {
    int b = history_.back();
    history_.pop_back();
    if (b < 0) return;
    size_[parent_[b]] -= size_[b];
    parent_[b] = b;
    --unions_;
  }
  int unions() const { return unions_; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  std::vector<int> history_;
  int unions_ = 0;
};

// Calls leaf(weight, open) for every state of the free edges, where weight
// includes the q^K tilt.
template <class Leaf>
void enumerate_tilted(const EdgeSystem& s, double q, std::size_t budget, Leaf&& leaf) {
  check_system(s);
  std::vector<std::size_t> free;
  std::vector<std::uint8_t> open(s.edges.size(), 0);
  RollbackDsu dsu(s.n);
  for (std::size_t i = 0; i < s.edges.size(); ++i) {
    if (s.p[i] >= 1.0) {
      open[i] = 1;
      dsu.unite(s.edges[i].u, s.edges[i].v);
    } else if (s.p[i] > 0.0) {
      free.push_back(i);
    }
  }
  if (free.size() > budget)
    throw BudgetError(fmt::format("exact enumeration over {} free edges exceeds budget {}", free.size(), budget));
  int nv = static_cast<int>(s.vertices.size());
  std::vector<double> qpow(nv + 1, 1.0);
  for (int k = 1; k <= nv; ++k) qpow[k] = qpow[k - 1] * q;

  auto rec = [&](auto&& self, std::size_t idx, double w) -> void {
    if (idx == free.size()) {
      leaf(w * qpow[nv - dsu.unions()], std::span<const std::uint8_t>(open));
      return;
    }
    std::size_t e = free[idx];
    double p = s.p[e];
    open[e] = 1;
    dsu.unite(s.edges[e].u, s.edges[e].v);
    self(self, idx + 1, w * p);
    dsu.undo();
    open[e] = 0;
    self(self, idx + 1, w * (1.0 - p));
  };
  rec(rec, 0, 1.0);
}

}  // namespace

double tilted_partition_exact(const EdgeSystem& system, double q, std::size_t budget) {
  double z = 0.0;
  enumerate_tilted(system, q, budget, [&](double w, std::span<const std::uint8_t>) { z += w; });
  return z;
}

double tilted_expectation_exact(const EdgeSystem& system, double q,
                                const std::function<double(std::span<const std::uint8_t>)>& f, std::size_t budget) {
  double z = 0.0, acc = 0.0;
  enumerate_tilted(system, q, budget, [&](double w, std::span<const std::uint8_t> open) {
    z += w;
    if (w > 0.0) acc += w * f(open);
  });
  return acc / z;
}

std::vector<double> tilted_marginals_exact(const EdgeSystem& system, double q, std::size_t budget) {
  std::vector<double> acc(system.edges.size(), 0.0);
  double z = 0.0;
  enumerate_tilted(system, q, budget, [&](double w, std::span<const std::uint8_t> open) {
    z += w;
    for (std::size_t i = 0; i < open.size(); ++i)
      if (open[i]) acc[i] += w;
  });
  for (double& a : acc) a /= z;
  return acc;
}

TiltedSampler::TiltedSampler(EdgeSystem system, double q, Rng& rng)
    : sys_(std::move(system)), q_(q), rng_(&rng), open_(sys_.edges.size(), 0), small_(sys_.n <= 64) {
  check_system(sys_);
  if (!(q > 0.0)) throw std::invalid_argument("tilted sampler: q must be positive");
  if (small_)
    mask_.assign(sys_.n, 0);
  else
    adj_.assign(sys_.n, {});
  stamp_.assign(sys_.n, 0);
  for (std::size_t i = 0; i < sys_.edges.size(); ++i)
    if (rng_->bernoulli(sys_.p[i])) set(i, true);
}

void TiltedSampler::set(std::size_t e, bool open) {
  if (static_cast<bool>(open_[e]) == open) return;
  open_[e] = open ? 1 : 0;
  int u = sys_.edges[e].u, v = sys_.edges[e].v;
  if (small_) {
    mask_[u] ^= std::uint64_t{1} << v;
    mask_[v] ^= std::uint64_t{1} << u;
  } else if (open) {
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  } else {
    auto drop = [](std::vector<int>& a, int x) {
      auto it = std::find(a.begin(), a.end(), x);
      *it = a.back();
      a.pop_back();
    };
    drop(adj_[u], v);
    drop(adj_[v], u);
  }
}

bool TiltedSampler::connected_without(std::size_t e) const {
  int u = sys_.edges[e].u, v = sys_.edges[e].v;
  if (small_) {
    const std::uint64_t bu = std::uint64_t{1} << u, bv = std::uint64_t{1} << v;
    std::uint64_t reach = bu, frontier = bu;
    while (frontier) {
      int w = std::countr_zero(frontier);
      frontier &= frontier - 1;
      std::uint64_t m = mask_[w];
      if (w == u) m &= ~bv;
      if (w == v) m &= ~bu;
      std::uint64_t fresh = m & ~reach;
      if (fresh & bv) return true;
      reach |= fresh;
      frontier |= fresh;
    }
    return false;
  }
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  queue_.clear();
  queue_.push_back(u);
  stamp_[u] = epoch_;
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    int w = queue_[head];
    for (int x : adj_[w]) {
      if ((w == u && x == v) || (w == v && x == u)) continue;
      if (stamp_[x] == epoch_) continue;
      if (x == v) return true;
      stamp_[x] = epoch_;
      queue_.push_back(x);
    }
  }
  return false;
}

double TiltedSampler::conditional(std::size_t e) const {
  double p = sys_.p[e];
  if (p <= 0.0 || p >= 1.0) return p;
  if (connected_without(e)) return p;
  return p / (p + q_ * (1.0 - p));
}

void TiltedSampler::sweep() {
  for (std::size_t e = 0; e < sys_.edges.size(); ++e) set(e, rng_->bernoulli(conditional(e)));
}

EdgeConfig TiltedSampler::config() const { return {sys_.edges, open_}; }

EdgeConfig sample_tilted(const EdgeSystem& system, double q, int sweeps, Rng& rng) {
  TiltedSampler s(system, q, rng);
  for (int i = 0; i < sweeps; ++i) s.sweep();
  return s.config();
}

std::vector<Estimate> tilted_marginals_mc(const EdgeSystem& system, double q, int sweeps, int burn_in, Rng& rng) {
  TiltedSampler s(system, q, rng);
  for (int i = 0; i < burn_in; ++i) s.sweep();
  std::size_t m = system.edges.size();
  std::vector<std::vector<double>> trace(m, std::vector<double>(sweeps));
  for (int i = 0; i < sweeps; ++i) {
    s.sweep();
    auto st = s.state();
    for (std::size_t e = 0; e < m; ++e) trace[e][i] = st[e];
  }
  std::vector<Estimate> out;
  for (auto& t : trace) out.push_back(batch_means(t, 50));
  return out;
}

int ncc(std::span<const VertexId> boundary, int n, const EdgeConfig& config) {
  ComponentIndex ci(n);
  for (std::size_t i = 0; i < config.base.size(); ++i)
    if (config.open[i]) ci.add_edge(config.base[i].u, config.base[i].v);
  std::vector<int> roots;
  for (VertexId v : boundary) roots.push_back(ci.find(v));
  std::sort(roots.begin(), roots.end());
  return static_cast<int>(std::unique(roots.begin(), roots.end()) - roots.begin());
}

int ncc(std::span<const VertexId> boundary, const EdgeSystem& system, std::span<const std::uint8_t> open) {
  return ncc(boundary, system.n, EdgeConfig{system.edges, {open.begin(), open.end()}});
}

AlphaBound alpha(const ModelParams& params) {
  AlphaBound a;
  a.R = params.R;
  a.q = params.q;
  a.beta = params.beta;
  a.r = std::min(1.0, params.R * kPi / 2.0);
  double pi2 = kPi * kPi, r2 = a.r * a.r;
  double lead = 6.0 * params.R * params.R * pi2 / r2;
  a.alpha = params.beta > 0.0 ? 1.0 + lead * (1.0 + 2.0 * params.q * pi2 * r2 / (3.0 * params.beta))
                              : std::numeric_limits<double>::infinity();
  a.alpha_star = 1.0 + lead * (1.0 + 2.0 * pi2 * r2 / 3.0);
  a.hypothesis_met = params.beta > params.q;
  return a;
}

double p_tilde_site(double ell, const ModelParams& params) {
  if (!(ell > 0.0)) throw std::domain_error("p_tilde_site: ell must be positive");
  double a = params.beta / (64.0 * std::pow(ell, 4));
  return a / (params.q + a);
}

double p_tilde(const ModelParams& params, PTildeForm form) {
  if (params.beta == 0.0) return 0.0;
  double r4 = std::pow(params.R, 4);
  double c = form == PTildeForm::literal ? 4.0 * params.q * r4 / (params.q * params.beta)
                                         : 4.0 * params.q * r4 / params.beta;
  return 1.0 / (c + 1.0);
}

double p_tilde_2(double length, bool outside_window, const ModelParams& params) {
  if (outside_window) return 1.0;
  if (length > params.R || params.beta == 0.0) return 0.0;
  return 1.0 / (params.q / params.beta * std::pow(length, 3.0 + params.gamma) + 1.0);
}

double p_star(double length, double angular_gap, const ModelParams& params) {
  if (length > std::min(2.0 / kPi, params.R) || angular_gap > kPi / 2 || params.beta == 0.0) return 0.0;
  return 1.0 / (params.q / params.beta * std::pow(kPi / 2 * length, 3.0 + params.gamma) + 1.0);
}

bool domination_check(double length, const ModelParams& params) {
  double pt = p_tilde_2(length, false, params);
  if (pt == 0.0) return true;
  double p = p_open(length, false, params);
  // Complements in closed form; 1 - p cancels badly for short edges.
  double l = std::pow(length, 3.0 + params.gamma);
  double closed = l / (l + params.beta);
  double cl = params.q / params.beta * l;
  double lhs = p / (params.q * closed);
  double rhs = pt / (cl / (cl + 1.0));
  return lhs >= rhs * (1.0 - 1e-12);
}

bool product_fact_check(double a, double b, double q, double beta) {
  if (!(a >= 0.0 && a <= b && b <= 1.0)) throw std::invalid_argument("product_fact_check: need 0 <= a <= b <= 1");
  if (!(beta > 0.0 && q > 0.0 && q / beta < 1.0)) throw std::invalid_argument("product_fact_check: need q/beta < 1");
  double c = q / beta;
  double lhs = 1.0 / (c * std::pow(a, 4) + 1.0) * (1.0 / (c * std::pow(b, 4) + 1.0));
  double rhs = 1.0 / (c * std::pow(a + b, 4) + 1.0);
  return lhs >= rhs * (1.0 - 1e-14);
}

double papangelou_ratio_exact(std::span<const Point> zeta, Point x0, const Window& window, const ModelParams& params,
                              std::size_t budget) {
  Triangulation tri(zeta);
  double before = tilted_partition_exact(edge_system(tri, window, params), params.q, budget);
  tri.insert(x0);
  double after = tilted_partition_exact(edge_system(tri, window, params), params.q, budget);
  return after / before;
}

void write_edge_config(std::ostream& out, const EdgeConfig& config, std::span<const Point> points) {
  for (std::size_t i = 0; i < config.base.size(); ++i) {
    const Edge& e = config.base[i];
    fmt::print(out, "{} {} {} {:.17g}\n", e.u, e.v, int(config.open[i]), dist(points[e.u], points[e.v]));
  }
}

}  // namespace dwr
