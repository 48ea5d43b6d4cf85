#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dwr/geometry.hpp"

namespace dwr {

using VertexId = int;
inline constexpr VertexId kInfinite = -1;

struct Edge {
  VertexId u = 0;
  VertexId v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(VertexId a, VertexId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

class TriangulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Triangle (or ghost triangle, with one vertex kInfinite) in counterclockwise order.
// n[i] is the face across the edge opposite v[i].
struct Face {
  std::array<VertexId, 3> v{};
  std::array<int, 3> n{};
  Circle circ;
  bool alive = false;

  bool ghost() const { return v[0] == kInfinite || v[1] == kInfinite || v[2] == kInfinite; }
  int index_of(VertexId x) const { return v[0] == x ? 0 : v[1] == x ? 1 : v[2] == x ? 2 : -1; }
};

class Triangulation;

// Observer of local face replacements. A full rebuild skips before_change and
// reports full = true to after_change.
class ChangeListener {
 public:
  virtual ~ChangeListener() = default;
  virtual void before_change(const Triangulation& tri, std::span<const int> faces) = 0;
  virtual void after_change(const Triangulation& tri, std::span<const int> faces, bool full) = 0;
};

// Delaunay triangulation with stable integer vertex handles. Hull edges are
// closed off by ghost triangles sharing one infinite vertex; cocircular ties
// are broken by symbolic perturbation in handle order. Fewer than three
// points, or collinear sets, are kept in a degenerate mode whose edges join
// consecutive points along the line.
class Triangulation {
 public:
  struct CavityEdge {
    VertexId a;
    VertexId b;
    int outer;
    int inner;
  };
  struct Cavity {
    std::vector<int> faces;
    std::vector<CavityEdge> boundary;
  };

  Triangulation() = default;
  explicit Triangulation(std::span<const Point> points);
  Triangulation(std::span<const Point> points, std::span<const int> ranks);

  VertexId insert(Point p, ChangeListener* listener = nullptr);
  // Re-inserts a previously removed handle.
  void restore(VertexId h, Point p, ChangeListener* listener = nullptr);
  void remove(VertexId h, ChangeListener* listener = nullptr);

  bool contains(VertexId h) const { return h >= 0 && h < static_cast<int>(alive_.size()) && alive_[h]; }
  Point point(VertexId h) const { return pts_[h]; }
  std::size_t size() const { return live_count_; }
  std::size_t handle_count() const { return pts_.size(); }
  bool degenerate() const { return degenerate_; }
  std::vector<VertexId> vertices() const;

  std::vector<Edge> edges() const;
  std::vector<std::array<VertexId, 3>> triangles() const;
  std::vector<VertexId> neighbors(VertexId h) const;

  std::size_t face_capacity() const { return faces_.size(); }
  const Face& face(int f) const { return faces_[f]; }
  std::vector<int> live_faces() const;
  // Faces incident to h in counterclockwise order.
  std::vector<int> star(VertexId h) const;

  // Faces that would be destroyed by inserting p, and the boundary of their union.
  Cavity cavity(Point p) const;

  // Brute-force check that no vertex lies strictly inside any circumcircle.
  bool is_delaunay() const;

 private:
  int sos_in_circle(VertexId a, VertexId b, VertexId c, VertexId d, Point dp, int drank) const;
  bool conflicts(int f, Point p, int rank) const;
  int locate(Point p, int rank) const;
  Cavity cavity_ranked(Point p, int rank) const;
  void insert_handle(VertexId h, ChangeListener* listener);
  void rebuild(ChangeListener* listener);
  bool all_collinear() const;
  int new_face(VertexId a, VertexId b, VertexId c);
  void kill_face(int f);
  void check_duplicate(Point p, std::span<const VertexId> candidates) const;
  void set_neighbor(int f, int old_n, int new_n);
  VertexId add_handle(Point p, int rank);

  std::vector<Point> pts_;
  std::vector<int> rank_;
  std::vector<char> alive_;
  std::vector<int> vface_;
  std::vector<Face> faces_;
  std::vector<int> free_;
  std::size_t live_count_ = 0;
  bool degenerate_ = true;
  mutable int hint_ = -1;
  mutable unsigned walk_counter_ = 0;
  double scale_ = 0.0;
};

// Builds the triangulation of a point set; throws on fewer than 3 points or collinear input.
Triangulation build(std::span<const Point> points);

struct DiffSets {
  std::vector<Edge> exterior;
  std::vector<Edge> created;
  std::vector<Edge> destroyed;
};

struct Insertion {
  VertexId handle = 0;
  DiffSets diff;
};

// Inserts x0 into tri and reports the exterior, created and destroyed edges.
Insertion insert_with_diff(Triangulation& tri, Point x0);

struct NeighborhoodGraph {
  Point pole;
  VertexId pole_handle = 0;
  std::vector<VertexId> vertices;
  std::vector<Edge> edges;
  DiffSets diff;
};

// Boundary graph of the neighbourhood of x0. Handles refer to tri; x0 gets
// the next free handle.
NeighborhoodGraph neighborhood_graph(const Triangulation& tri, Point x0);

// Neighbourhood graph restricted to the open ball of radius R about x0; edges
// are those of the triangulation of the points inside the ball.
NeighborhoodGraph contracted_graph(const Triangulation& tri, Point x0, double R);

// Vertices whose Voronoi cells meet the segment [a, b], in order along the segment.
std::vector<VertexId> voronoi_cells_crossing_segment(const Triangulation& tri, Point a, Point b);

VertexId nearest_vertex(const Triangulation& tri, Point p);

}  // namespace dwr
