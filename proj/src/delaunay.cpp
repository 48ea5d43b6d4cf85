#include "dwr/delaunay.hpp"

#include <algorithm>
#include <climits>

namespace dwr {

namespace {

Circle fast_circumcircle(Point a, Point b, Point c) {
  Point bp = b - a;
  Point cp = c - a;
  double d = 2.0 * cross(bp, cp);
  double b2 = dot(bp, bp);
  double c2 = dot(cp, cp);
  Point u{(cp.y * b2 - bp.y * c2) / d, (bp.x * c2 - cp.x * b2) / d};
  return {a + u, norm(u)};
}

bool contains_face(const std::vector<int>& v, int f) { return std::find(v.begin(), v.end(), f) != v.end(); }

void face_edges(const Face& f, std::vector<Edge>& out) {
  for (int i = 0; i < 3; ++i) {
    VertexId a = f.v[(i + 1) % 3];
    VertexId b = f.v[(i + 2) % 3];
    if (a != kInfinite && b != kInfinite) out.push_back(make_edge(a, b));
  }
}

void sort_unique(std::vector<Edge>& e) {
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
}

std::vector<Edge> set_minus(const std::vector<Edge>& a, const std::vector<Edge>& b) {
  std::vector<Edge> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

Triangulation::Triangulation(std::span<const Point> points) {
  for (std::size_t i = 0; i < points.size(); ++i) add_handle(points[i], static_cast<int>(i));
  rebuild(nullptr);
}

Triangulation::Triangulation(std::span<const Point> points, std::span<const int> ranks) {
  if (ranks.size() != points.size()) throw TriangulationError("rank count mismatch");
  for (std::size_t i = 0; i < points.size(); ++i) add_handle(points[i], ranks[i]);
  rebuild(nullptr);
}

Triangulation build(std::span<const Point> points) {
  if (points.size() < 3) throw TriangulationError("build: fewer than 3 points");
  Triangulation t(points);
  if (t.degenerate()) throw TriangulationError("build: all points collinear");
  return t;
}

VertexId Triangulation::add_handle(Point p, int rank) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw TriangulationError("non-finite coordinate");
  pts_.push_back(p);
  rank_.push_back(rank);
  alive_.push_back(1);
  vface_.push_back(-1);
  ++live_count_;
  scale_ = std::max({scale_, std::fabs(p.x), std::fabs(p.y)});
  return static_cast<VertexId>(pts_.size() - 1);
}

std::vector<VertexId> Triangulation::vertices() const {
  std::vector<VertexId> out;
  out.reserve(live_count_);
  for (std::size_t i = 0; i < alive_.size(); ++i)
    if (alive_[i]) out.push_back(static_cast<VertexId>(i));
  return out;
}

void Triangulation::check_duplicate(Point p, std::span<const VertexId> candidates) const {
  double tol = kTolerances.duplicate_rel * std::max(scale_, 1.0);
  for (VertexId c : candidates) {
    if (c == kInfinite || !alive_[c]) continue;
    if (dist2(p, pts_[c]) <= tol * tol) throw TriangulationError("duplicate point");
  }
}

int Triangulation::new_face(VertexId a, VertexId b, VertexId c) {
  int id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
  } else {
    id = static_cast<int>(faces_.size());
    faces_.emplace_back();
  }
  Face& f = faces_[id];
  f.v = {a, b, c};
  f.n = {-1, -1, -1};
  f.alive = true;
  if (a != kInfinite && b != kInfinite && c != kInfinite) f.circ = fast_circumcircle(pts_[a], pts_[b], pts_[c]);
  return id;
}

void Triangulation::kill_face(int f) {
  faces_[f].alive = false;
  free_.push_back(f);
}

void Triangulation::set_neighbor(int f, int old_n, int new_n) {
  Face& F = faces_[f];
  for (int i = 0; i < 3; ++i) {
    if (F.n[i] == old_n) {
      F.n[i] = new_n;
      return;
    }
  }
  throw TriangulationError("adjacency corrupted");
}

int Triangulation::sos_in_circle(VertexId a, VertexId b, VertexId c, VertexId, Point dp, int drank) const {
  Point pa = pts_[a], pb = pts_[b], pc = pts_[c];
  int s = in_circle_raw(pa, pb, pc, dp);
  if (s != 0) return s;
  int ra = rank_[a], rb = rank_[b], rc = rank_[c];
  int top = std::max({ra, rb, rc, drank});
  if (top == drank) return -1;
  if (top == ra) return orientation(pb, pc, dp);
  if (top == rb) return -orientation(pa, pc, dp);
  return orientation(pa, pb, dp);
}

bool Triangulation::conflicts(int f, Point p, int rank) const {
  const Face& F = faces_[f];
  int k = F.index_of(kInfinite);
  if (k >= 0) {
    Point a = pts_[F.v[(k + 1) % 3]];
    Point b = pts_[F.v[(k + 2) % 3]];
    int o = orientation(a, b, p);
    if (o > 0) return true;
    return o == 0 && dot_sign(a, p, b) < 0;
  }
  return sos_in_circle(F.v[0], F.v[1], F.v[2], kInfinite, p, rank) > 0;
}

int Triangulation::locate(Point p, int rank) const {
  int f = hint_;
  if (f < 0 || f >= static_cast<int>(faces_.size()) || !faces_[f].alive || faces_[f].ghost()) {
    f = -1;
    for (std::size_t i = 0; i < faces_.size(); ++i) {
      if (faces_[i].alive && !faces_[i].ghost()) {
        f = static_cast<int>(i);
        break;
      }
    }
    if (f < 0) throw TriangulationError("locate: no faces");
  }
  std::size_t limit = 4 * faces_.size() + 16;
  for (std::size_t steps = 0; steps < limit; ++steps) {
    const Face& F = faces_[f];
    unsigned r = walk_counter_++ % 3;
    int next = -1;
    for (int k = 0; k < 3; ++k) {
      int i = static_cast<int>((r + k) % 3);
      Point a = pts_[F.v[(i + 1) % 3]];
      Point b = pts_[F.v[(i + 2) % 3]];
      if (orientation(a, b, p) < 0) {
        next = F.n[i];
        break;
      }
    }
    if (next < 0) return f;
    if (faces_[next].ghost()) return next;
    f = next;
  }
  for (std::size_t i = 0; i < faces_.size(); ++i)
    if (faces_[i].alive && conflicts(static_cast<int>(i), p, rank)) return static_cast<int>(i);
  throw TriangulationError("locate failed");
}

Triangulation::Cavity Triangulation::cavity(Point p) const {
  if (degenerate_) throw TriangulationError("cavity: degenerate triangulation");
  return cavity_ranked(p, INT_MAX);
}

Triangulation::Cavity Triangulation::cavity_ranked(Point p, int rank) const {
  Cavity cav;
  int seed = locate(p, rank);
  check_duplicate(p, faces_[seed].v);
  if (!conflicts(seed, p, rank)) throw TriangulationError("cavity: located face not in conflict");
  cav.faces.push_back(seed);
  std::vector<int> rejected;
  for (std::size_t q = 0; q < cav.faces.size(); ++q) {
    const Face& F = faces_[cav.faces[q]];
    for (int i = 0; i < 3; ++i) {
      int g = F.n[i];
      if (contains_face(cav.faces, g) || contains_face(rejected, g)) continue;
      if (conflicts(g, p, rank))
        cav.faces.push_back(g);
      else
        rejected.push_back(g);
    }
  }
  for (int f : cav.faces) {
    const Face& F = faces_[f];
    for (int i = 0; i < 3; ++i) {
      if (!contains_face(cav.faces, F.n[i])) cav.boundary.push_back({F.v[(i + 1) % 3], F.v[(i + 2) % 3], F.n[i], f});
    }
  }
  return cav;
}

VertexId Triangulation::insert(Point p, ChangeListener* listener) {
  VertexId h = add_handle(p, static_cast<int>(pts_.size()));
  try {
    insert_handle(h, listener);
  } catch (...) {
    pts_.pop_back();
    rank_.pop_back();
    alive_.pop_back();
    vface_.pop_back();
    --live_count_;
    throw;
  }
  return h;
}

void Triangulation::restore(VertexId h, Point p, ChangeListener* listener) {
  if (h < 0 || h >= static_cast<int>(pts_.size()) || alive_[h]) throw TriangulationError("restore: handle in use");
  pts_[h] = p;
  alive_[h] = 1;
  ++live_count_;
  try {
    insert_handle(h, listener);
  } catch (...) {
    alive_[h] = 0;
    --live_count_;
    throw;
  }
}

void Triangulation::insert_handle(VertexId h, ChangeListener* listener) {
  Point p = pts_[h];
  if (degenerate_) {
    std::vector<VertexId> others;
    for (VertexId v : vertices())
      if (v != h) others.push_back(v);
    check_duplicate(p, others);
    if (live_count_ >= 3 && !all_collinear()) {
      rebuild(listener);
    } else if (listener) {
      listener->after_change(*this, {}, true);
    }
    return;
  }
  Cavity cav = cavity_ranked(p, rank_[h]);
  std::vector<VertexId> ring;
  for (const auto& e : cav.boundary) ring.push_back(e.a);
  check_duplicate(p, ring);
  if (listener) listener->before_change(*this, cav.faces);

  std::vector<int> created;
  created.reserve(cav.boundary.size());
  std::vector<std::pair<VertexId, int>> by_start, by_end;
  for (const auto& e : cav.boundary) {
    int f = new_face(e.a, e.b, h);
    faces_[f].n[2] = e.outer;
    set_neighbor(e.outer, e.inner, f);
    created.push_back(f);
    by_start.emplace_back(e.a, f);
    by_end.emplace_back(e.b, f);
  }
  std::sort(by_start.begin(), by_start.end());
  std::sort(by_end.begin(), by_end.end());
  auto lookup = [](const std::vector<std::pair<VertexId, int>>& m, VertexId key) {
    auto it = std::lower_bound(m.begin(), m.end(), std::make_pair(key, INT_MIN));
    if (it == m.end() || it->first != key) throw TriangulationError("cavity boundary not a cycle");
    return it->second;
  };
  for (int f : created) {
    Face& F = faces_[f];
    F.n[0] = lookup(by_start, F.v[1]);
    F.n[1] = lookup(by_end, F.v[0]);
  }
  for (int f : cav.faces) kill_face(f);
  for (int f : created) {
    for (VertexId v : faces_[f].v)
      if (v != kInfinite) vface_[v] = f;
  }
  hint_ = created.front();
  for (int f : created) {
    if (!faces_[f].ghost()) {
      hint_ = f;
      break;
    }
  }
  if (listener) listener->after_change(*this, created, false);
}

bool Triangulation::all_collinear() const {
  auto vs = vertices();
  if (vs.size() < 3) return true;
  Point a = pts_[vs[0]];
  std::size_t j = 1;
  while (j < vs.size() && pts_[vs[j]] == a) ++j;
  if (j == vs.size()) return true;
  Point b = pts_[vs[j]];
  for (std::size_t k = j + 1; k < vs.size(); ++k)
    if (orientation(a, b, pts_[vs[k]]) != 0) return false;
  return true;
}

void Triangulation::rebuild(ChangeListener* listener) {
  faces_.clear();
  free_.clear();
  std::fill(vface_.begin(), vface_.end(), -1);
  hint_ = -1;
  degenerate_ = true;
  auto vs = vertices();
  std::size_t i1 = 1;
  while (i1 < vs.size() && pts_[vs[i1]] == pts_[vs[0]]) ++i1;
  if (vs.size() >= 2 && i1 > 1) throw TriangulationError("duplicate point");
  std::size_t i2 = i1 + 1;
  while (i2 < vs.size() && orientation(pts_[vs[0]], pts_[vs[i1]], pts_[vs[i2]]) == 0) ++i2;
  if (vs.size() < 3 || i2 >= vs.size()) {
    auto sorted = vs;
    std::sort(sorted.begin(), sorted.end(), [&](VertexId a, VertexId b) {
      return pts_[a].x < pts_[b].x || (pts_[a].x == pts_[b].x && pts_[a].y < pts_[b].y);
    });
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
      if (pts_[sorted[k]] == pts_[sorted[k + 1]]) throw TriangulationError("duplicate point");
    }
    if (listener) listener->after_change(*this, {}, true);
    return;
  }
  VertexId a = vs[0], b = vs[i1], c = vs[i2];
  if (orientation(pts_[a], pts_[b], pts_[c]) < 0) std::swap(b, c);
  degenerate_ = false;
  int t = new_face(a, b, c);
  int g0 = new_face(c, b, kInfinite);
  int g1 = new_face(a, c, kInfinite);
  int g2 = new_face(b, a, kInfinite);
  faces_[t].n = {g0, g1, g2};
  faces_[g0].n = {g2, g1, t};
  faces_[g1].n = {g0, g2, t};
  faces_[g2].n = {g1, g0, t};
  vface_[a] = vface_[b] = vface_[c] = t;
  hint_ = t;
  for (VertexId v : vs) {
    if (v == a || v == b || v == c) continue;
    insert_handle(v, nullptr);
  }
  if (listener) listener->after_change(*this, live_faces(), true);
}

std::vector<int> Triangulation::live_faces() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < faces_.size(); ++i)
    if (faces_[i].alive) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Triangulation::star(VertexId h) const {
  if (!contains(h)) throw TriangulationError("star: unknown vertex");
  std::vector<int> out;
  if (degenerate_) return out;
  int f0 = vface_[h];
  int f = f0;
  do {
    out.push_back(f);
    const Face& F = faces_[f];
    int i = F.index_of(h);
    f = F.n[(i + 1) % 3];
    if (out.size() > faces_.size()) throw TriangulationError("star: corrupted");
  } while (f != f0);
  return out;
}

void Triangulation::remove(VertexId h, ChangeListener* listener) {
  if (!contains(h)) throw TriangulationError("remove: unknown vertex");
  auto full_rebuild = [&]() {
    alive_[h] = 0;
    vface_[h] = -1;
    --live_count_;
    rebuild(listener);
  };
  if (degenerate_) {
    alive_[h] = 0;
    --live_count_;
    if (listener) listener->after_change(*this, {}, true);
    return;
  }
  if (live_count_ - 1 < 3) return full_rebuild();

  std::vector<int> st = star(h);
  struct LinkEdge {
    VertexId a, b;
    int outer;
    int inner;
  };
  std::vector<LinkEdge> link;
  std::vector<VertexId> ring;
  for (int f : st) {
    const Face& F = faces_[f];
    int i = F.index_of(h);
    VertexId a = F.v[(i + 1) % 3];
    VertexId b = F.v[(i + 2) % 3];
    link.push_back({a, b, F.n[i], f});
    if (a != kInfinite) ring.push_back(a);
  }
  if (ring.size() < 3) return full_rebuild();

  std::vector<Point> lp;
  std::vector<int> lr;
  for (VertexId v : ring) {
    lp.push_back(pts_[v]);
    lr.push_back(rank_[v]);
  }
  Triangulation loc(lp, lr);
  if (loc.degenerate()) return full_rebuild();

  auto to_local = [&](VertexId g) -> VertexId {
    if (g == kInfinite) return kInfinite;
    return static_cast<VertexId>(std::find(ring.begin(), ring.end(), g) - ring.begin());
  };
  auto to_global = [&](VertexId l) -> VertexId { return l == kInfinite ? kInfinite : ring[l]; };
  auto is_link_edge = [&](VertexId la, VertexId lb) {
    for (const auto& e : link) {
      VertexId x = to_local(e.a), y = to_local(e.b);
      if ((x == la && y == lb) || (x == lb && y == la)) return true;
    }
    return false;
  };

  std::vector<int> hole;
  for (const auto& e : link) {
    VertexId la = to_local(e.a), lb = to_local(e.b);
    VertexId pivot = la == kInfinite ? lb : la;
    int found = -1;
    for (int lf : loc.star(pivot)) {
      const Face& F = loc.faces_[lf];
      int i = F.index_of(la);
      if (F.v[(i + 1) % 3] == lb) {
        found = lf;
        break;
      }
    }
    if (found < 0) return full_rebuild();
    if (!contains_face(hole, found)) hole.push_back(found);
  }
  for (std::size_t q = 0; q < hole.size(); ++q) {
    const Face& F = loc.faces_[hole[q]];
    for (int i = 0; i < 3; ++i) {
      if (is_link_edge(F.v[(i + 1) % 3], F.v[(i + 2) % 3])) continue;
      if (!contains_face(hole, F.n[i])) hole.push_back(F.n[i]);
    }
  }
  if (hole.size() + 2 != link.size()) return full_rebuild();

  if (listener) listener->before_change(*this, st);
  std::vector<int> created(hole.size());
  for (std::size_t k = 0; k < hole.size(); ++k) {
    const Face& F = loc.faces_[hole[k]];
    created[k] = new_face(to_global(F.v[0]), to_global(F.v[1]), to_global(F.v[2]));
  }
  for (std::size_t k = 0; k < hole.size(); ++k) {
    const Face& L = loc.faces_[hole[k]];
    Face& G = faces_[created[k]];
    for (int i = 0; i < 3; ++i) {
      auto pos = std::find(hole.begin(), hole.end(), L.n[i]);
      if (pos != hole.end()) {
        G.n[i] = created[pos - hole.begin()];
        continue;
      }
      VertexId x = G.v[(i + 1) % 3], y = G.v[(i + 2) % 3];
      auto le = std::find_if(link.begin(), link.end(), [&](const LinkEdge& e) { return e.a == x && e.b == y; });
      if (le == link.end()) throw TriangulationError("remove: link edge mismatch");
      G.n[i] = le->outer;
      set_neighbor(le->outer, le->inner, created[k]);
    }
  }
  for (int f : st) kill_face(f);
  alive_[h] = 0;
  vface_[h] = -1;
  --live_count_;
  for (int f : created) {
    for (VertexId v : faces_[f].v)
      if (v != kInfinite) vface_[v] = f;
  }
  hint_ = -1;
  for (int f : created) {
    if (!faces_[f].ghost()) {
      hint_ = f;
      break;
    }
  }
  if (listener) listener->after_change(*this, created, false);
}

std::vector<Edge> Triangulation::edges() const {
  std::vector<Edge> out;
  if (degenerate_) {
    auto vs = vertices();
    std::sort(vs.begin(), vs.end(), [&](VertexId a, VertexId b) {
      return pts_[a].x < pts_[b].x || (pts_[a].x == pts_[b].x && pts_[a].y < pts_[b].y);
    });
    for (std::size_t k = 0; k + 1 < vs.size(); ++k) out.push_back(make_edge(vs[k], vs[k + 1]));
    std::sort(out.begin(), out.end());
    return out;
  }
  for (const Face& F : faces_) {
    if (!F.alive) continue;
    for (int i = 0; i < 3; ++i) {
      VertexId a = F.v[(i + 1) % 3], b = F.v[(i + 2) % 3];
      if (a != kInfinite && b != kInfinite && a < b) out.push_back({a, b});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::array<VertexId, 3>> Triangulation::triangles() const {
  std::vector<std::array<VertexId, 3>> out;
  for (const Face& F : faces_) {
    if (!F.alive || F.ghost()) continue;
    auto t = F.v;
    std::rotate(t.begin(), std::min_element(t.begin(), t.end()), t.end());
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VertexId> Triangulation::neighbors(VertexId h) const {
  if (!contains(h)) throw TriangulationError("neighbors: unknown vertex");
  std::vector<VertexId> out;
  if (degenerate_) {
    for (const Edge& e : edges()) {
      if (e.u == h) out.push_back(e.v);
      if (e.v == h) out.push_back(e.u);
    }
    return out;
  }
  for (int f : star(h)) {
    const Face& F = faces_[f];
    VertexId a = F.v[(F.index_of(h) + 1) % 3];
    if (a != kInfinite) out.push_back(a);
  }
  return out;
}

bool Triangulation::is_delaunay() const {
  auto vs = vertices();
  for (const Face& F : faces_) {
    if (!F.alive || F.ghost()) continue;
    if (orientation(pts_[F.v[0]], pts_[F.v[1]], pts_[F.v[2]]) <= 0) return false;
    for (VertexId q : vs) {
      if (F.index_of(q) >= 0) continue;
      if (in_circle_raw(pts_[F.v[0]], pts_[F.v[1]], pts_[F.v[2]], pts_[q]) > 0) return false;
    }
  }
  return true;
}

namespace {

class EdgeCapture : public ChangeListener {
 public:
  void before_change(const Triangulation& tri, std::span<const int> faces) override {
    for (int f : faces) face_edges(tri.face(f), before);
  }
  void after_change(const Triangulation& tri, std::span<const int> faces, bool is_full) override {
    full = is_full;
    for (int f : faces) face_edges(tri.face(f), after);
  }
  std::vector<Edge> before, after;
  bool full = false;
};

}  // namespace

Insertion insert_with_diff(Triangulation& tri, Point x0) {
  std::vector<Edge> old_edges = tri.edges();
  EdgeCapture cap;
  Insertion out;
  out.handle = tri.insert(x0, &cap);
  DiffSets& d = out.diff;
  if (cap.full) {
    std::vector<Edge> new_edges = tri.edges();
    d.created = set_minus(new_edges, old_edges);
    d.destroyed = set_minus(old_edges, new_edges);
  } else {
    sort_unique(cap.before);
    sort_unique(cap.after);
    d.created = set_minus(cap.after, cap.before);
    d.destroyed = set_minus(cap.before, cap.after);
  }
  d.exterior = set_minus(old_edges, d.destroyed);
  return out;
}

NeighborhoodGraph neighborhood_graph(const Triangulation& tri, Point x0) {
  if (tri.size() < 2) throw TriangulationError("neighborhood_graph: fewer than 3 points in total");
  Triangulation copy = tri;
  NeighborhoodGraph g;
  g.pole = x0;
  Insertion ins = insert_with_diff(copy, x0);
  g.pole_handle = ins.handle;
  for (const Edge& e : ins.diff.created) g.vertices.push_back(e.u == ins.handle ? e.v : e.u);
  std::sort(g.vertices.begin(), g.vertices.end());
  for (const Edge& e : ins.diff.exterior) {
    if (std::binary_search(g.vertices.begin(), g.vertices.end(), e.u) &&
        std::binary_search(g.vertices.begin(), g.vertices.end(), e.v))
      g.edges.push_back(e);
  }
  g.diff = std::move(ins.diff);
  return g;
}

NeighborhoodGraph contracted_graph(const Triangulation& tri, Point x0, double R) {
  NeighborhoodGraph g = neighborhood_graph(tri, x0);
  std::vector<VertexId> vb;
  for (VertexId v : g.vertices)
    if (dist(tri.point(v), x0) < R) vb.push_back(v);
  std::vector<VertexId> inside;
  std::vector<Point> pts;
  for (VertexId v : tri.vertices()) {
    if (dist(tri.point(v), x0) < R) {
      inside.push_back(v);
      pts.push_back(tri.point(v));
    }
  }
  g.vertices = vb;
  g.edges.clear();
  Triangulation ball(pts);
  for (const Edge& e : ball.edges()) {
    Edge ge = make_edge(inside[e.u], inside[e.v]);
    if (std::binary_search(vb.begin(), vb.end(), ge.u) && std::binary_search(vb.begin(), vb.end(), ge.v))
      g.edges.push_back(ge);
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

VertexId nearest_vertex(const Triangulation& tri, Point p) {
  VertexId best = kInfinite;
  double bd = 0.0;
  for (VertexId v : tri.vertices()) {
    double d = dist2(tri.point(v), p);
    if (best == kInfinite || d < bd) {
      best = v;
      bd = d;
    }
  }
  return best;
}

std::vector<VertexId> voronoi_cells_crossing_segment(const Triangulation& tri, Point a, Point b) {
  std::vector<VertexId> out;
  VertexId cur = nearest_vertex(tri, a);
  if (cur == kInfinite) return out;
  out.push_back(cur);
  Point d = b - a;
  double t = 0.0;
  VertexId prev = kInfinite;
  while (out.size() <= tri.size()) {
    Point c = tri.point(cur);
    double best_t = 2.0;
    VertexId best = kInfinite;
    for (VertexId u : tri.neighbors(cur)) {
      if (u == prev) continue;
      Point up = tri.point(u);
      double f0 = dist2(up, a) - dist2(c, a);
      double f1 = -2.0 * dot(d, up - c);
      if (f1 >= 0.0) continue;
      double tu = std::max(-f0 / f1, t);
      if (tu < best_t) {
        best_t = tu;
        best = u;
      }
    }
    if (best == kInfinite || best_t > 1.0) break;
    prev = cur;
    cur = best;
    t = best_t;
    out.push_back(cur);
  }
  return out;
}

}  // namespace dwr
