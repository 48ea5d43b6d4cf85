#pragma once

#include "dwr/geometry.hpp"
#include "dwr/rng.hpp"

namespace dwr {

// Half-open parallelogram {origin + s*u + t*v : s, t in [0, 1)}.
struct Window {
  Point origin;
  Point u{1.0, 0.0};
  Point v{0.0, 1.0};

  static Window box(double x0, double y0, double x1, double y1);

  bool contains(Point p) const;
  double area() const;
  std::array<Point, 4> corners() const;
  double diameter() const;
  // Whether the circle curve meets the closed window.
  bool circle_meets(const Circle& c) const;
  // Whether the closed disk meets the closed window.
  bool disk_meets(const Circle& c) const;
  double distance_to(Point p) const;
  Point sample(Rng& rng) const;
  // Canonical coordinates (s, t) of p.
  Point local(Point p) const;
  bool is_box() const { return u.y == 0.0 && v.x == 0.0 && u.x > 0.0 && v.y > 0.0; }
};

}  // namespace dwr
