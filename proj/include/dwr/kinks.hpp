#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "dwr/delaunay.hpp"
#include "dwr/model.hpp"

namespace dwr {

// Raised when genuine Delaunay input breaks a structural claim about kinks.
class FalsificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vertices sorted by angular coordinate about the pole; consecutive vertices
// are joined by the chain edges.
struct SpokedChain {
  Point pole;
  std::vector<VertexId> ids;
  std::vector<Point> points;
  std::vector<double> angles;

  std::size_t size() const { return points.size(); }
  double edge_length(std::size_t i) const { return dist(points[i], points[i + 1]); }
  SpokedChain slice(std::size_t first, std::size_t last) const;  // [first, last)
};

// Sorts by angle; throws GeometryError on a repeated angle or a point at the pole.
SpokedChain make_chain(Point pole, std::span<const VertexId> ids, std::span<const Point> points);

// Every vertex shares an edge with the pole in the triangulation of the chain plus the pole.
bool is_spoked_chain(const SpokedChain& chain);

// Quadrant i in 0..3 holds angles in [i pi/2, (i+1) pi/2).
int quadrant_of(Point pole, Point p);

struct QuadrantChain {
  int quadrant = 0;
  SpokedChain chain;
  std::vector<Edge> edges;  // graph edges with both ends in the quadrant
};

std::array<QuadrantChain, 4> quadrant_chains(const Triangulation& tri, const NeighborhoodGraph& graph);

enum class KinkKind { intruding, protruding, neither };

struct Kink {
  int i = 0;
  int j = 0;
  int k = 0;
  KinkKind kind = KinkKind::neither;
};

// Interior angle at x_j below pi/2, decided exactly.
bool sharp(const SpokedChain& chain, int i, int j, int k);

KinkKind classify_kink(const SpokedChain& chain, int i, int k);

std::vector<Kink> find_kinks(const SpokedChain& chain);

// Cuts edge (x_j, x_{j+1}) for every intruding kink. Throws FalsificationError
// on more than two intruding kinks, any protruding kink or an unclassifiable one.
std::vector<SpokedChain> decompose_kink_free(const SpokedChain& chain);

// Chain edges longer than 2 delta; throws std::invalid_argument on kinked input.
int count_long_edges(const SpokedChain& chain, double delta);

inline double long_edge_bound(double R, double delta) { return 6.0 * (R / delta) * (R / delta); }

// Counterclockwise rotation from line x_i x_{i+1} to line x_{k-1} x_k.
double kink_rotation_angle(const SpokedChain& chain, const Kink& kink);

// Angle from the end of one intruding kink to the vertex after the start of the next.
struct KinkGap {
  int applicable = 0;
  int overlapping = 0;
  double min_gap = 0.0;
};
KinkGap intruding_gaps(const SpokedChain& chain, std::span<const Kink> kinks);

// Quarter-disk sectors of radius |x_i - x_{i+1}| / 2 at x_i about the edge direction.
struct SectorCheck {
  bool disjoint = true;
  bool contained = true;
};
SectorCheck sector_check(const SpokedChain& chain, int quadrant, double R);

struct ChainBound {
  double sum_bound = 1.0;
  double family_bound = 1.0;
};
ChainBound chain_ncc_upper_bound(const SpokedChain& chain, const ModelParams& params);

// sum_{i=2}^{n} i^2 / (i-1)^4
double series_partial_sum(int n);

struct NccBound {
  double bound = 12.0;
  int pieces = 0;
  int intruding = 0;
};
NccBound ncc_total_bound(std::span<const QuadrantChain> chains, const ModelParams& params);

}  // namespace dwr
