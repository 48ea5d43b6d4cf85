#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace dwr {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double dist(Point a, Point b) { return norm(a - b); }
inline double dist2(Point a, Point b) {
  Point d = a - b;
  return dot(d, d);
}

struct Circle {
  Point center;
  double radius = 0.0;
};

struct PolarFrame {
  Point pole;
  Point axis{1.0, 0.0};
};

// Arc of the circumcircle of (a, x, y) between x and y, on the side away from a.
struct Arc {
  Circle circle;
  Point from;
  Point to;
  Point opposite;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double circumcircle_rel = 1e-12;
  double arc_slack = 1e-9;
  double angle_band = 1e-10;
  double duplicate_rel = 1e-12;
  double perturbation_rel = 1e-9;
};

inline constexpr Tolerances kTolerances{};

inline constexpr double kPi = std::numbers::pi;

// Exact sign of det[b-a, c-a]; +1 for a counterclockwise turn.
int orientation(Point a, Point b, Point c);

// Exact sign of the in-circle determinant; +1 iff d is strictly inside the
// circle through a, b, c when (a, b, c) is counterclockwise. Throws on collinear a, b, c.
int in_circle(Point a, Point b, Point c, Point d);

// Unchecked variant used by the triangulation.
int in_circle_raw(Point a, Point b, Point c, Point d);

// Exact sign of (a - b) . (c - b).
int dot_sign(Point a, Point b, Point c);

Circle circumcircle(Point a, Point b, Point c);

double angular_coordinate(const PolarFrame& frame, Point x);
double angular_coordinate(Point pole, Point x);

double interior_angle(Point x, Point y, Point z);

// Canonical representative of an angle in [0, 2pi).
double canonical_angle(double a);

// Length of the circumcircle arc of (a, x, y) between x and y that avoids a.
double arc_length(Point a, Point x, Point y);

Arc make_arc(Point a, Point x, Point y);

struct ArcSubadditivity {
  bool holds = false;
  double l_bz = 0.0;
  double l_zc = 0.0;
  double l_bc = 0.0;
  double slack() const { return l_bc - l_bz - l_zc; }
};

// True iff z lies in the convex hull of the arc of (a, b, c) opposite a.
bool in_arc_hull(Point a, Point b, Point c, Point z);

ArcSubadditivity arc_subadditivity_check(Point a, Point b, Point c, Point z,
                                         double slack = kTolerances.arc_slack);

// Nondecreasing angular coordinates (about the pole) of the circumcenters of
// consecutive fan triangles (pole, x_k, x_{k+1}).
bool circumcenter_angle_monotone_check(Point pole, std::span<const Point> chain,
                                       double tol = kTolerances.angle_band);

std::vector<double> circumcenter_angles(Point pole, std::span<const Point> chain);

// ccw rotation angle in [0, pi) taking the line through (a, b) onto the line through (c, d).
double line_rotation_angle(Point a, Point b, Point c, Point d);

}  // namespace dwr
