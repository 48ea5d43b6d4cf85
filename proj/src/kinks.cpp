#include "dwr/kinks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "dwr/random_cluster.hpp"

namespace dwr {

SpokedChain SpokedChain::slice(std::size_t first, std::size_t last) const {
  SpokedChain out;
  out.pole = pole;
  out.ids.assign(ids.begin() + first, ids.begin() + last);
  out.points.assign(points.begin() + first, points.begin() + last);
  out.angles.assign(angles.begin() + first, angles.begin() + last);
  return out;
}

SpokedChain make_chain(Point pole, std::span<const VertexId> ids, std::span<const Point> points) {
  if (ids.size() != points.size()) throw std::invalid_argument("make_chain: ids and points differ in size");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> ang(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] == pole) throw GeometryError("make_chain: vertex at the pole");
    ang[i] = angular_coordinate(pole, points[i]);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ang[a] < ang[b]; });
  SpokedChain c;
  c.pole = pole;
  for (std::size_t i : order) {
    if (!c.angles.empty() && c.angles.back() == ang[i]) throw GeometryError("make_chain: repeated angular coordinate");
    c.ids.push_back(ids[i]);
    c.points.push_back(points[i]);
    c.angles.push_back(ang[i]);
  }
  return c;
}

bool is_spoked_chain(const SpokedChain& chain) {
  for (std::size_t i = 1; i < chain.size(); ++i)
    if (!(chain.angles[i - 1] < chain.angles[i])) return false;
  if (chain.size() == 0) return true;
  std::vector<Point> pts = chain.points;
  pts.push_back(chain.pole);
  Triangulation tri(pts);
  auto nb = tri.neighbors(static_cast<VertexId>(chain.size()));
  std::sort(nb.begin(), nb.end());
  for (std::size_t i = 0; i < chain.size(); ++i)
    if (!std::binary_search(nb.begin(), nb.end(), static_cast<VertexId>(i))) return false;
  return true;
}

int quadrant_of(Point pole, Point p) {
  int q = static_cast<int>(std::floor(angular_coordinate(pole, p) / (kPi / 2)));
  return std::clamp(q, 0, 3);
}

std::array<QuadrantChain, 4> quadrant_chains(const Triangulation& tri, const NeighborhoodGraph& graph) {
  std::array<std::vector<VertexId>, 4> ids;
  std::array<std::vector<Point>, 4> pts;
  std::vector<int> quad(tri.handle_count(), -1);
  for (VertexId v : graph.vertices) {
    int q = quadrant_of(graph.pole, tri.point(v));
    quad[v] = q;
    ids[q].push_back(v);
    pts[q].push_back(tri.point(v));
  }
  std::array<QuadrantChain, 4> out;
  for (int q = 0; q < 4; ++q) {
    out[q].quadrant = q;
    out[q].chain = make_chain(graph.pole, ids[q], pts[q]);
  }
  for (const Edge& e : graph.edges)
    if (quad[e.u] >= 0 && quad[e.u] == quad[e.v]) out[quad[e.u]].edges.push_back(e);
  return out;
}

bool sharp(const SpokedChain& chain, int i, int j, int k) {
  return dot_sign(chain.points[i], chain.points[j], chain.points[k]) > 0;
}

KinkKind classify_kink(const SpokedChain& chain, int i, int k) {
  Point a = chain.points[i];
  Point b = chain.points[k];
  int pole_side = orientation(a, b, chain.pole);
  if (pole_side == 0) return KinkKind::neither;
  bool same = true;
  bool opposite = true;
  for (int m = i + 1; m < k; ++m) {
    int o = orientation(a, b, chain.points[m]);
    same = same && o == pole_side;
    opposite = opposite && o == -pole_side;
  }
  if (same) return KinkKind::intruding;
  if (opposite) return KinkKind::protruding;
  return KinkKind::neither;
}

std::vector<Kink> find_kinks(const SpokedChain& chain) {
  const int n = static_cast<int>(chain.size());
  std::vector<Kink> out;
  if (n < 3) return out;
  auto at = [n](int a, int b) { return static_cast<std::size_t>(a) * n + b; };
  // direct[i,k]: some j strictly between makes (i, j, k) sharp.
  // within[a,b]: some window inside [a, b] is direct.
  std::vector<std::uint8_t> direct(static_cast<std::size_t>(n) * n, 0), within(direct.size(), 0);
  for (int len = 2; len < n; ++len) {
    for (int i = 0; i + len < n; ++i) {
      int k = i + len;
      for (int j = i + 1; j < k && !direct[at(i, k)]; ++j) direct[at(i, k)] = sharp(chain, i, j, k);
      within[at(i, k)] = direct[at(i, k)] || within[at(i + 1, k)] || within[at(i, k - 1)];
    }
  }
  for (int len = 2; len < n; ++len) {
    for (int i = 0; i + len < n; ++i) {
      int k = i + len;
      if (!direct[at(i, k)] || within[at(i + 1, k)] || within[at(i, k - 1)]) continue;
      KinkKind kind = classify_kink(chain, i, k);
      for (int j = i + 1; j < k; ++j)
        if (sharp(chain, i, j, k)) out.push_back({i, j, k, kind});
    }
  }
  std::sort(out.begin(), out.end(), [](const Kink& a, const Kink& b) {
    return std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k);
  });
  return out;
}

std::vector<SpokedChain> decompose_kink_free(const SpokedChain& chain) {
  auto kinks = find_kinks(chain);
  int intruding = 0;
  std::vector<int> cuts;
  for (const Kink& k : kinks) {
    if (k.kind == KinkKind::protruding)
      throw FalsificationError(fmt::format("protruding kink ({}, {}, {})", k.i, k.j, k.k));
    if (k.kind == KinkKind::neither)
      throw FalsificationError(fmt::format("kink ({}, {}, {}) is neither intruding nor protruding", k.i, k.j, k.k));
    ++intruding;
    cuts.push_back(k.j);
  }
  if (intruding > 2) throw FalsificationError(fmt::format("{} intruding kinks in one chain", intruding));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<SpokedChain> out;
  std::size_t start = 0;
  for (int c : cuts) {
    out.push_back(chain.slice(start, c + 1));
    start = c + 1;
  }
  out.push_back(chain.slice(start, chain.size()));
  for (const auto& piece : out)
    if (!find_kinks(piece).empty()) throw std::logic_error("decompose_kink_free: piece still has a kink");
  return out;
}

int count_long_edges(const SpokedChain& chain, double delta) {
  if (!find_kinks(chain).empty()) throw std::invalid_argument("count_long_edges: chain has kinks");
  int count = 0;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (chain.edge_length(i) > 2.0 * delta) ++count;
  return count;
}

double kink_rotation_angle(const SpokedChain& chain, const Kink& kink) {
  return line_rotation_angle(chain.points[kink.i], chain.points[kink.i + 1], chain.points[kink.k - 1],
                             chain.points[kink.k]);
}

KinkGap intruding_gaps(const SpokedChain& chain, std::span<const Kink> kinks) {
  std::vector<Kink> in;
  for (const Kink& k : kinks)
    if (k.kind == KinkKind::intruding) in.push_back(k);
  std::sort(in.begin(), in.end(), [](const Kink& a, const Kink& b) { return a.i < b.i; });
  KinkGap g;
  g.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a + 1 < in.size(); ++a) {
    const Kink& first = in[a];
    const Kink& second = in[a + 1];
    if (second.i <= first.k) {
      ++g.overlapping;
      continue;
    }
    ++g.applicable;
    g.min_gap = std::min(g.min_gap, chain.angles[second.i + 1] - chain.angles[first.k]);
  }
  return g;
}

namespace {

struct Sector {
  Point apex;
  Point axis;  // unit
  double rho;

  Point ray(double turn) const {
    double c = std::cos(turn), s = std::sin(turn);
    return apex + rho * Point{c * axis.x - s * axis.y, s * axis.x + c * axis.y};
  }
  bool in_wedge(Point p) const {
    Point d = p - apex;
    double n = norm(d);
    return n == 0.0 || dot(d, axis) >= n * std::cos(kPi / 4) * (1.0 - 1e-12);
  }
  bool contains(Point p) const { return dist(p, apex) <= rho * (1.0 + 1e-12) && in_wedge(p); }
};

bool segments_cross(Point a, Point b, Point c, Point d) {
  Point r = b - a, s = d - c;
  double den = cross(r, s);
  if (den == 0.0) return false;
  double t = cross(c - a, s) / den;
  double u = cross(c - a, r) / den;
  return t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0;
}

bool segment_meets_arc(Point a, Point b, const Sector& s) {
  Point d = b - a, f = a - s.apex;
  double A = dot(d, d), B = 2.0 * dot(f, d), C = dot(f, f) - s.rho * s.rho;
  double disc = B * B - 4.0 * A * C;
  if (A == 0.0 || disc < 0.0) return false;
  double sq = std::sqrt(disc);
  for (double t : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)})
    if (t >= 0.0 && t <= 1.0 && s.in_wedge(a + t * d)) return true;
  return false;
}

bool arcs_meet(const Sector& s, const Sector& t) {
  double d = dist(s.apex, t.apex);
  if (d == 0.0 || d > s.rho + t.rho || d < std::abs(s.rho - t.rho)) return false;
  double a = (s.rho * s.rho - t.rho * t.rho + d * d) / (2.0 * d);
  double h = std::sqrt(std::max(0.0, s.rho * s.rho - a * a));
  Point e = (1.0 / d) * (t.apex - s.apex);
  Point m = s.apex + a * e;
  Point perp{-e.y, e.x};
  for (double sg : {-1.0, 1.0}) {
    Point p = m + (sg * h) * perp;
    if (s.in_wedge(p) && t.in_wedge(p)) return true;
  }
  return false;
}

bool sectors_meet(const Sector& s, const Sector& t) {
  if (s.contains(t.apex) || t.contains(s.apex)) return true;
  std::array<Point, 2> se{s.ray(kPi / 4), s.ray(-kPi / 4)};
  std::array<Point, 2> te{t.ray(kPi / 4), t.ray(-kPi / 4)};
  for (Point a : se)
    for (Point b : te)
      if (segments_cross(s.apex, a, t.apex, b)) return true;
  for (Point a : se)
    if (segment_meets_arc(s.apex, a, t)) return true;
  for (Point b : te)
    if (segment_meets_arc(t.apex, b, s)) return true;
  return arcs_meet(s, t);
}

// Distance from p (relative to the pole) to the quarter disk of radius R in quadrant q.
double quarter_disk_distance(Point p, int q, double R) {
  Point r = q == 0 ? p : q == 1 ? Point{p.y, -p.x} : q == 2 ? Point{-p.x, -p.y} : Point{-p.y, p.x};
  if (r.x >= 0.0 && r.y >= 0.0) return std::max(0.0, norm(r) - R);
  if (r.x < 0.0 && r.y >= 0.0) return std::hypot(r.x, std::max(0.0, r.y - R));
  if (r.y < 0.0 && r.x >= 0.0) return std::hypot(r.y, std::max(0.0, r.x - R));
  return norm(r);
}

}  // namespace

SectorCheck sector_check(const SpokedChain& chain, int quadrant, double R) {
  SectorCheck out;
  std::vector<Sector> sec;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    double len = chain.edge_length(i);
    sec.push_back({chain.points[i], (1.0 / len) * (chain.points[i + 1] - chain.points[i]), len / 2.0});
  }
  const double reach = R / std::sqrt(2.0) * (1.0 + 1e-12);
  constexpr int kArcSamples = 64;
  for (const Sector& s : sec) {
    bool ok = quarter_disk_distance(s.apex - chain.pole, quadrant, R) <= reach;
    for (int m = 0; m <= kArcSamples && ok; ++m) {
      Point p = s.ray(-kPi / 4 + (kPi / 2) * m / kArcSamples);
      ok = quarter_disk_distance(p - chain.pole, quadrant, R) <= reach;
    }
    out.contained = out.contained && ok;
  }
  for (std::size_t a = 0; a < sec.size() && out.disjoint; ++a)
    for (std::size_t b = a + 1; b < sec.size() && out.disjoint; ++b)
      if (sectors_meet(sec[a], sec[b])) out.disjoint = false;
  return out;
}

ChainBound chain_ncc_upper_bound(const SpokedChain& chain, const ModelParams& params) {
  ChainBound b;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    b.sum_bound += 1.0 - p_star(chain.edge_length(i), chain.angles[i + 1] - chain.angles[i], params);
  b.family_bound = alpha(params).alpha;
  return b;
}

double series_partial_sum(int n) {
  double s = 0.0;
  for (int i = n; i >= 2; --i) {
    double d = static_cast<double>(i - 1);
    s += static_cast<double>(i) * i / (d * d * d * d);
  }
  return s;
}

NccBound ncc_total_bound(std::span<const QuadrantChain> chains, const ModelParams& params) {
  NccBound out;
  double worst = 1.0;
  for (const QuadrantChain& qc : chains) {
    for (const Kink& k : find_kinks(qc.chain))
      if (k.kind == KinkKind::intruding) ++out.intruding;
    for (const SpokedChain& piece : decompose_kink_free(qc.chain)) {
      if (piece.size() == 0) continue;
      ++out.pieces;
      worst = std::max(worst, chain_ncc_upper_bound(piece, params).sum_bound);
    }
  }
  out.bound = 12.0 * worst;
  return out;
}

}  // namespace dwr
