#include <algorithm>

#include "dwr/window.hpp"

namespace dwr {

Window Window::box(double x0, double y0, double x1, double y1) {
  if (!(x1 > x0 && y1 > y0)) throw GeometryError("window: empty box");
  return Window{{x0, y0}, {x1 - x0, 0.0}, {0.0, y1 - y0}};
}

Point Window::local(Point p) const {
  Point d = p - origin;
  double det = cross(u, v);
  return {cross(d, v) / det, cross(u, d) / det};
}

bool Window::contains(Point p) const {
  Point st = local(p);
  return st.x >= 0.0 && st.x < 1.0 && st.y >= 0.0 && st.y < 1.0;
}

double Window::area() const { return std::fabs(cross(u, v)); }

std::array<Point, 4> Window::corners() const { return {origin, origin + u, origin + u + v, origin + v}; }

double Window::diameter() const { return std::max(norm(u + v), norm(u - v)); }

namespace {
double segment_distance(Point p, Point a, Point b) {
  Point ab = b - a;
  double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
  return dist(p, a + t * ab);
}
}  // namespace

double Window::distance_to(Point p) const {
  Point st = local(p);
  if (st.x >= 0.0 && st.x <= 1.0 && st.y >= 0.0 && st.y <= 1.0) return 0.0;
  auto c = corners();
  double d = segment_distance(p, c[0], c[1]);
  for (int i = 1; i < 4; ++i) d = std::min(d, segment_distance(p, c[i], c[(i + 1) % 4]));
  return d;
}

bool Window::disk_meets(const Circle& c) const { return distance_to(c.center) <= c.radius; }

bool Window::circle_meets(const Circle& c) const {
  if (distance_to(c.center) > c.radius) return false;
  double far = 0.0;
  for (Point k : corners()) far = std::max(far, dist(k, c.center));
  return far >= c.radius;
}

Point Window::sample(Rng& rng) const {
  double s = rng.uniform();
  double t = rng.uniform();
  return origin + s * u + t * v;
}

}  // namespace dwr
