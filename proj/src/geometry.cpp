#include "dwr/geometry.hpp"

#include <algorithm>

namespace dwr {

Circle circumcircle(Point a, Point b, Point c) {
  if (orientation(a, b, c) == 0) throw GeometryError("circumcircle: collinear points");
  Point bp = b - a;
  Point cp = c - a;
  double d = 2.0 * cross(bp, cp);
  double b2 = dot(bp, bp);
  double c2 = dot(cp, cp);
  Point u{(cp.y * b2 - bp.y * c2) / d, (bp.x * c2 - cp.x * b2) / d};
  return {a + u, norm(u)};
}

double canonical_angle(double a) {
  double r = std::fmod(a, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  if (r >= 2.0 * kPi) r = 0.0;
  return r;
}

double angular_coordinate(const PolarFrame& frame, Point x) {
  Point d = x - frame.pole;
  if (d.x == 0.0 && d.y == 0.0) throw GeometryError("angular_coordinate: point at pole");
  double base = std::atan2(frame.axis.y, frame.axis.x);
  return canonical_angle(std::atan2(d.y, d.x) - base);
}

double angular_coordinate(Point pole, Point x) { return angular_coordinate(PolarFrame{pole, {1.0, 0.0}}, x); }

double interior_angle(Point x, Point y, Point z) {
  Point u = x - y;
  Point v = z - y;
  if ((u.x == 0.0 && u.y == 0.0) || (v.x == 0.0 && v.y == 0.0))
    throw GeometryError("interior_angle: coincident points");
  return std::atan2(std::fabs(cross(u, v)), dot(u, v));
}

double arc_length(Point a, Point x, Point y) {
  if (orientation(a, x, y) == 0) throw GeometryError("arc_length: collinear triple");
  double theta = interior_angle(x, a, y);
  return dist(x, y) * theta / std::sin(theta);
}

Arc make_arc(Point a, Point x, Point y) { return {circumcircle(a, x, y), x, y, a}; }

bool in_arc_hull(Point a, Point b, Point c, Point z) {
  if (orientation(a, b, c) == 0) return false;
  int side_a = orientation(b, c, a);
  int side_z = orientation(b, c, z);
  if (side_z == side_a) return false;
  if (side_z == 0) {
    return dot_sign(b, z, c) < 0;
  }
  Circle circ = circumcircle(a, b, c);
  return dist(circ.center, z) <= circ.radius * (1.0 + kTolerances.arc_slack);
}

ArcSubadditivity arc_subadditivity_check(Point a, Point b, Point c, Point z, double slack) {
  double bh = angular_coordinate(a, b);
  double ch = angular_coordinate(a, c);
  if (!(0.0 < bh && bh < ch && ch < kPi))
    throw GeometryError("arc_subadditivity_check: need 0 < angle(b) < angle(c) < pi");
  if (!in_arc_hull(a, b, c, z)) throw GeometryError("arc_subadditivity_check: z outside arc hull");
  if (z == b || z == c) throw GeometryError("arc_subadditivity_check: z at an arc endpoint");
  ArcSubadditivity r;
  r.l_bc = arc_length(a, b, c);
  r.l_bz = arc_length(a, b, z);
  r.l_zc = arc_length(a, z, c);
  r.holds = r.l_bz + r.l_zc <= r.l_bc + slack;
  return r;
}

std::vector<double> circumcenter_angles(Point pole, std::span<const Point> chain) {
  if (chain.size() < 3) throw GeometryError("circumcenter angles: chain shorter than 3");
  std::vector<double> out;
  out.reserve(chain.size() - 1);
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    Circle c = circumcircle(pole, chain[k], chain[k + 1]);
    out.push_back(angular_coordinate(pole, c.center));
  }
  return out;
}

bool circumcenter_angle_monotone_check(Point pole, std::span<const Point> chain, double tol) {
  auto ang = circumcenter_angles(pole, chain);
  for (std::size_t k = 0; k + 1 < ang.size(); ++k) {
    double d = ang[k + 1] - ang[k];
    if (d > kPi) d -= 2.0 * kPi;
    if (d <= -kPi) d += 2.0 * kPi;
    if (d < -tol) return false;
  }
  return true;
}

double line_rotation_angle(Point a, Point b, Point c, Point d) {
  double t1 = std::atan2(b.y - a.y, b.x - a.x);
  double t2 = std::atan2(d.y - c.y, d.x - c.x);
  double r = std::fmod(t2 - t1, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

}  // namespace dwr
