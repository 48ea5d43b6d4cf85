#include "doctest.h"

#include <cmath>

#include "dwr/geometry.hpp"
#include "dwr/rng.hpp"
#include "dwr/window.hpp"

using namespace dwr;

TEST_CASE("orientation signs") {
  CHECK(orientation({0, 0}, {1, 0}, {0, 1}) == 1);
  CHECK(orientation({0, 0}, {1, 1}, {2, 2}) == 0);
  CHECK(orientation({0, 0}, {0, 1}, {1, 0}) == -1);
}

TEST_CASE("orientation is exact on nearly collinear input") {
  // b - a and c - a differ in the last bit only.
  Point a{0.5, 0.5};
  Point b{12.0, 12.0};
  Point c{24.0, 24.0 + std::ldexp(1.0, -48)};
  CHECK(orientation(a, b, c) == 1);
  CHECK(orientation(a, c, b) == -1);
  CHECK(orientation({0.1, 0.1}, {0.2, 0.2}, {0.30000000000000004, 0.30000000000000004}) == 0);
}

TEST_CASE("in_circle on the unit square") {
  CHECK(in_circle({0, 0}, {1, 0}, {1, 1}, {0.5, 0.5}) == 1);
  CHECK(in_circle({0, 0}, {1, 0}, {1, 1}, {0, 1}) == 0);
  CHECK(in_circle({0, 0}, {1, 0}, {1, 1}, {5, 5}) == -1);
  CHECK_THROWS_AS(in_circle({0, 0}, {1, 1}, {2, 2}, {0, 1}), GeometryError);
}

TEST_CASE("in_circle flips with triangle orientation") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    Point a{rng.uniform(), rng.uniform()}, b{rng.uniform(), rng.uniform()}, c{rng.uniform(), rng.uniform()};
    Point d{rng.uniform(), rng.uniform()};
    if (orientation(a, b, c) == 0) continue;
    CHECK(in_circle(a, b, c, d) == -in_circle(a, c, b, d));
  }
}

TEST_CASE("circumcircle") {
  Circle c = circumcircle({0, 0}, {1, 0}, {0, 1});
  CHECK(c.center.x == doctest::Approx(0.5));
  CHECK(c.center.y == doctest::Approx(0.5));
  CHECK(c.radius == doctest::Approx(std::sqrt(2.0) / 2));
  Circle e = circumcircle({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2});
  CHECK(e.radius == doctest::Approx(1.0 / std::sqrt(3.0)));
  Point p[3] = {{0, 0}, {2, 0}, {1, 10}};
  Circle f = circumcircle(p[0], p[1], p[2]);
  for (Point q : p) CHECK(std::fabs(dist(f.center, q) - f.radius) < 1e-12 * f.radius);
  CHECK_THROWS_AS(circumcircle({0, 0}, {1, 1}, {3, 3}), GeometryError);
}

TEST_CASE("circumcircle residuals on random triangles") {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    Point a{rng.uniform(-5, 5), rng.uniform(-5, 5)}, b{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    Point c{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    if (interior_angle(b, a, c) < 1e-3 || interior_angle(a, b, c) < 1e-3 || interior_angle(a, c, b) < 1e-3) continue;
    Circle k = circumcircle(a, b, c);
    for (Point q : {a, b, c}) CHECK(std::fabs(dist(k.center, q) - k.radius) < 1e-12 * k.radius);
  }
}

TEST_CASE("angular coordinate and interior angle") {
  CHECK(angular_coordinate(Point{0, 0}, {1, 0}) == 0.0);
  CHECK(angular_coordinate(Point{0, 0}, {0, 1}) == doctest::Approx(kPi / 2));
  CHECK(angular_coordinate(Point{0, 0}, {-1, -1}) == doctest::Approx(5 * kPi / 4));
  CHECK_THROWS_AS(angular_coordinate(Point{0, 0}, {0, 0}), GeometryError);
  CHECK(angular_coordinate(PolarFrame{{0, 0}, {0, 1}}, {1, 0}) == doctest::Approx(3 * kPi / 2));

  CHECK(interior_angle({1, 0}, {0, 0}, {0, 1}) == doctest::Approx(kPi / 2));
  CHECK(interior_angle({1, 0}, {0, 0}, {-1, 0}) == doctest::Approx(kPi));
  CHECK(interior_angle({1, 0}, {0, 0}, {1, 1}) == doctest::Approx(kPi / 4));
  CHECK_THROWS_AS(interior_angle({1, 0}, {1, 0}, {0, 1}), GeometryError);
}

TEST_CASE("arc length") {
  CHECK(arc_length({0, 0}, {1, 0}, {0, 1}) == doctest::Approx(std::sqrt(2.0) * kPi / 2));
  double th = 1e-6;
  Point x{1, 0}, y{std::cos(th), std::sin(th)};
  CHECK(std::fabs(arc_length({0, 0}, x, y) / dist(x, y) - 1.0) < 1e-6);
  CHECK_THROWS_AS(arc_length({0, 0}, {1, 1}, {2, 2}), GeometryError);

  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    Point a{rng.uniform(), rng.uniform()}, p{rng.uniform(), rng.uniform()}, q{rng.uniform(), rng.uniform()};
    double theta = interior_angle(p, a, q);
    if (theta < 1e-3 || theta > kPi - 1e-3) continue;
    Circle c = circumcircle(a, p, q);
    double l = arc_length(a, p, q);
    CHECK(std::fabs(l - 2 * c.radius * theta) < 1e-10 * std::max(1.0, l));
    CHECK(l == doctest::Approx(arc_length(a, q, p)).epsilon(1e-14));
    if (theta <= kPi / 2) CHECK(l <= kPi / 2 * dist(p, q) * (1 + 1e-12));
  }
}

TEST_CASE("arc subadditivity") {
  Point a{0, 0};
  Point b{1, 0.2};
  Point c{0.3, 1.1};
  Circle circ = circumcircle(a, b, c);
  // z on the arc opposite a.
  double ab = std::atan2(b.y - circ.center.y, b.x - circ.center.x);
  double ac = std::atan2(c.y - circ.center.y, c.x - circ.center.x);
  if (ac < ab) ac += 2 * kPi;
  double mid = 0.5 * (ab + ac);
  Point z{circ.center.x + circ.radius * std::cos(mid), circ.center.y + circ.radius * std::sin(mid)};
  if (orientation(b, c, z) == orientation(b, c, a)) {
    mid += kPi;
    z = {circ.center.x + circ.radius * std::cos(mid), circ.center.y + circ.radius * std::sin(mid)};
  }
  auto on_arc = arc_subadditivity_check(a, b, c, z);
  CHECK(on_arc.holds);
  CHECK(std::fabs(on_arc.slack()) < 1e-9);

  auto on_chord = arc_subadditivity_check(a, b, c, 0.5 * (b + c));
  CHECK(on_chord.holds);
  CHECK(on_chord.slack() > 0);

  CHECK_THROWS_AS(arc_subadditivity_check(a, b, c, {0.1, 0.1}), GeometryError);
  CHECK_THROWS_AS(arc_subadditivity_check(a, c, b, 0.5 * (b + c)), GeometryError);
}

TEST_CASE("arc subadditivity fuzz") {
  Rng rng(17);
  int checked = 0;
  double worst = 1.0;
  while (checked < 20000) {
    double tb = rng.uniform(0, kPi), tc = rng.uniform(0, kPi);
    if (tb > tc) std::swap(tb, tc);
    if (tc - tb < 1e-6) continue;
    double rb = rng.uniform(0.1, 2), rc = rng.uniform(0.1, 2);
    Point b{rb * std::cos(tb), rb * std::sin(tb)};
    Point c{rc * std::cos(tc), rc * std::sin(tc)};
    Circle k = circumcircle({0, 0}, b, c);
    Point z{k.center.x + rng.uniform(-k.radius, k.radius), k.center.y + rng.uniform(-k.radius, k.radius)};
    if (!in_arc_hull({0, 0}, b, c, z) || z == b || z == c) continue;
    auto r = arc_subadditivity_check({0, 0}, b, c, z);
    CHECK(r.holds);
    worst = std::min(worst, r.slack());
    ++checked;
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("circumcenter angle monotonicity") {
  // Points on a circle through the pole share one circumcircle.
  Point center{1, 1};
  double r = std::sqrt(2.0);
  std::vector<Point> chain;
  for (double t : {-0.6, -0.2, 0.3}) chain.push_back({center.x + r * std::cos(t), center.y + r * std::sin(t)});
  auto ang = circumcenter_angles({0, 0}, chain);
  CHECK(ang[0] == doctest::Approx(ang[1]));
  CHECK(circumcenter_angle_monotone_check({0, 0}, chain));
  std::vector<Point> two{{1, 0}, {0, 1}};
  CHECK_THROWS_AS(circumcenter_angle_monotone_check({0, 0}, two), GeometryError);
}

TEST_CASE("circumcenter monotonicity can fail off Delaunay input") {
  Rng rng(5);
  bool found = false;
  for (int i = 0; i < 100000 && !found; ++i) {
    std::vector<Point> chain;
    double t = 0.0;
    for (int k = 0; k < 3; ++k) {
      t += rng.uniform(0.1, 0.7);
      double rad = rng.uniform(0.2, 2.0);
      chain.push_back({rad * std::cos(t), rad * std::sin(t)});
    }
    if (in_circle({0, 0}, chain[0], chain[1], chain[2]) <= 0) continue;
    if (!circumcenter_angle_monotone_check({0, 0}, chain)) found = true;
  }
  CHECK(found);
}

TEST_CASE("line rotation angle") {
  CHECK(line_rotation_angle({0, 0}, {1, 0}, {0, 0}, {0, 1}) == doctest::Approx(kPi / 2));
  CHECK(line_rotation_angle({0, 0}, {1, 0}, {0, 0}, {1, 1}) == doctest::Approx(kPi / 4));
  CHECK(line_rotation_angle({0, 0}, {1, 1}, {0, 0}, {1, 0}) == doctest::Approx(3 * kPi / 4));
  CHECK(line_rotation_angle({1, 1}, {0, 0}, {0, 0}, {2, 2}) == doctest::Approx(0.0));
}

TEST_CASE("window") {
  Window w = Window::box(0, 0, 2, 1);
  CHECK(w.area() == doctest::Approx(2.0));
  CHECK(w.contains({0, 0}));
  CHECK_FALSE(w.contains({2, 0.5}));
  CHECK(w.distance_to({3, 0.5}) == doctest::Approx(1.0));
  CHECK(w.circle_meets({{1, 0.5}, 0.2}));
  CHECK_FALSE(w.circle_meets({{1, 0.5}, 100}));
  CHECK(w.disk_meets({{1, 0.5}, 100}));
  CHECK_FALSE(w.disk_meets({{5, 5}, 1}));
  Window p{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
  CHECK(p.area() == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK(p.contains({0.6, 0.1}));
  CHECK_FALSE(p.contains({0.05, 0.8}));
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(p.contains(p.sample(rng)));
}
