#include "doctest.h"

#include <cmath>
#include <sstream>

#include "dwr/model.hpp"
#include "dwr/stats.hpp"

using namespace dwr;

namespace {

Configuration random_config(Rng& rng, int n, int q, double side = 3.0) {
  Configuration c;
  c.window = Window::box(0, 0, side, side);
  for (int i = 0; i < n; ++i) {
    c.points.push_back({rng.uniform(-0.5, side + 0.5), rng.uniform(-0.5, side + 0.5)});
    c.marks.push_back(1 + static_cast<int>(rng.below(q)));
  }
  return c;
}

}  // namespace

TEST_CASE("potential") {
  ModelParams p{2, 1.0, 1.0, 1.0, 1.0};
  CHECK(phi(1.5, p) == 0.0);
  CHECK(phi(1.0, p) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS(phi(0.0, p));
  ModelParams zero = p;
  zero.beta = 0.0;
  CHECK(phi(0.3, zero) == 0.0);
  double prev = phi(0.01, p);
  for (double l = 0.02; l <= 1.0; l += 0.01) {
    double cur = phi(l, p);
    CHECK(cur <= prev);
    prev = cur;
  }
  ModelParams big = p;
  big.beta = 2.0;
  CHECK(phi(0.5, big) >= phi(0.5, p));
  ModelParams gen = p;
  gen.gamma = 2.0;
  CHECK(phi(0.5, gen) == doctest::Approx(std::log((std::pow(0.5, 5) + 1.0) / std::pow(0.5, 5))));
}

TEST_CASE("potential scaling relation") {
  Rng rng(2);
  for (int i = 0; i < 10000; ++i) {
    double l = rng.uniform(0.01, 1.0), L = rng.uniform(0.1, 1.0), beta = rng.uniform(0.0, 100.0);
    ModelParams a{2, 1.0, beta, 1.0, 1.0};
    ModelParams b{2, 1.0, beta / std::pow(L, 4), 1.0, 1.0};
    double lhs = phi(L * l, a), rhs = phi(l, b);
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1e-300, std::fabs(rhs)));
  }
}

TEST_CASE("delta sigma") {
  CHECK(delta_sigma(1, 1) == 1);
  CHECK(delta_sigma(1, 2) == 0);
  CHECK_THROWS(delta_sigma(0, 1));
  Rng rng(8);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(delta_sigma(1 + rng.below(2), 1 + rng.below(2)));
  auto e = mean_se(xs);
  CHECK(std::fabs(e.mean - 0.5) < 3 * e.se);
}

TEST_CASE("hamiltonian basics") {
  Rng rng(5);
  ModelParams p{3, 1.0, 2.0, 1.0, 1.0};
  auto c = random_config(rng, 40, 3);
  Configuration mono = c;
  std::fill(mono.marks.begin(), mono.marks.end(), 1);
  CHECK(hamiltonian(mono, p) == 0.0);
  ModelParams zero = p;
  zero.beta = 0.0;
  CHECK(hamiltonian(c, zero) == 0.0);
  CHECK(hamiltonian(c, p) >= 0.0);

  Configuration two;
  two.window = Window::box(0, 0, 1, 1);
  two.points = {{0.2, 0.5}, {0.7, 0.5}};
  two.marks = {1, 2};
  CHECK(hamiltonian(two, p) == doctest::Approx(phi(0.5, p)));

  // Mark permutation invariance.
  Configuration perm = c;
  for (int& m : perm.marks) m = m % 3 + 1;
  CHECK(hamiltonian(perm, p) == doctest::Approx(hamiltonian(c, p)).epsilon(1e-12));
}

TEST_CASE("hamiltonian uses only edges of triangles whose circumcircle meets the window") {
  // Brute-force recomputation from the triangle list.
  Rng rng(6);
  ModelParams p{2, 1.0, 5.0, 1.5, 1.0};
  for (int rep = 0; rep < 20; ++rep) {
    auto c = random_config(rng, 50, 2, 2.0);
    Triangulation tri(c.points);
    std::vector<Edge> in;
    for (auto t : tri.triangles()) {
      Circle k = circumcircle(c.points[t[0]], c.points[t[1]], c.points[t[2]]);
      if (!c.window.circle_meets(k)) continue;
      for (int i = 0; i < 3; ++i) in.push_back(make_edge(t[i], t[(i + 1) % 3]));
    }
    std::sort(in.begin(), in.end());
    in.erase(std::unique(in.begin(), in.end()), in.end());
    double h = 0.0;
    for (const Edge& e : in)
      h += phi(dist(c.points[e.u], c.points[e.v]), p) * (1 - delta_sigma(c.marks[e.u], c.marks[e.v]));
    CHECK(hamiltonian(c, p) == doctest::Approx(h).epsilon(1e-12));
  }
}

TEST_CASE("energy delta of insertion matches full recomputation") {
  Rng rng(10);
  ModelParams p{3, 1.0, 3.0, 1.0, 1.0};
  for (int rep = 0; rep < 300; ++rep) {
    auto c = random_config(rng, 3 + static_cast<int>(rng.below(40)), 3);
    Point x0{rng.uniform(-0.5, 3.5), rng.uniform(-0.5, 3.5)};
    int m = 1 + static_cast<int>(rng.below(3));
    double d = energy_delta_insert(c, x0, m, p);
    Configuration after = c;
    after.points.push_back(x0);
    after.marks.push_back(m);
    double full = hamiltonian(after, p) - hamiltonian(c, p);
    CHECK(d == doctest::Approx(full).epsilon(1e-9).scale(1.0));

    // Removal of the same point reverses the change.
    Triangulation tri(after.points);
    double h0 = hamiltonian(tri, after.marks, after.window, p);
    tri.remove(static_cast<VertexId>(after.points.size() - 1));
    double h1 = hamiltonian(tri, after.marks, after.window, p);
    CHECK(d + (h1 - h0) == doctest::Approx(0.0).scale(1.0));
  }
  Configuration mono;
  mono.window = Window::box(0, 0, 1, 1);
  mono.points = {{0.1, 0.1}, {0.9, 0.2}, {0.5, 0.8}, {0.4, 0.4}};
  mono.marks = {2, 2, 2, 2};
  CHECK(energy_delta_insert(mono, {0.6, 0.5}, 2, p) == 0.0);

  // Created edges longer than R contribute nothing.
  Configuration far;
  far.window = Window::box(0, 0, 10, 10);
  far.points = {{0, 0}, {10, 0}, {5, 9}};
  far.marks = {1, 1, 1};
  CHECK(energy_delta_insert(far, {5, 3}, 2, p) == 0.0);
}

TEST_CASE("gibbs weight ratio under a mark flip") {
  Rng rng(12);
  ModelParams p{3, 1.0, 2.0, 1.0, 1.0};
  for (int rep = 0; rep < 50; ++rep) {
    auto c = random_config(rng, 30, 3);
    std::size_t i = rng.below(c.points.size());
    int newm = c.marks[i] % 3 + 1;
    Triangulation tri(c.points);
    double before = incident_energy(tri, static_cast<VertexId>(i), c.marks[i], c.marks, c.window, p);
    double after = incident_energy(tri, static_cast<VertexId>(i), newm, c.marks, c.window, p);
    Configuration flipped = c;
    flipped.marks[i] = newm;
    CHECK(gibbs_weight(flipped, p) / gibbs_weight(c, p) == doctest::Approx(std::exp(-(after - before))));
  }
  Configuration mono = random_config(rng, 20, 1);
  CHECK(gibbs_weight(mono, p) == 1.0);
}

TEST_CASE("admissibility") {
  Rng rng(13);
  ModelParams p{2, 1.0, 1.0, 1.0, 1.0};
  CHECK(admissible(random_config(rng, 30, 2), p));
  Configuration dup;
  dup.window = Window::box(0, 0, 1, 1);
  dup.points = {{0.1, 0.1}, {0.5, 0.5}, {0.1, 0.1}, {0.9, 0.2}};
  dup.marks = {1, 1, 1, 1};
  CHECK_FALSE(admissible(dup, p));
  CellLattice lat{1.0, {0, 0}};
  auto pp = pseudo_periodic(PseudoPeriodicSpec{1.0, 0.1}, lat.cells(0, 0, 5, 5), rng);
  CHECK(admissible(pp, p));
}

TEST_CASE("cell lattice") {
  CellLattice lat{2.0, {0.3, -0.1}};
  CHECK(lat.cell_area() == doctest::Approx(std::sqrt(3.0) / 2 * 4));
  Point c = lat.center(3, -2);
  CHECK(lat.cell_of(c) == std::make_pair(3, -2));
  Window w = lat.cells(-1, -1, 3, 3);
  CHECK(w.area() == doctest::Approx(9 * lat.cell_area()));
  CHECK(w.contains(lat.center(1, 1)));
  CHECK_FALSE(w.contains(lat.center(2, 1)));
}

TEST_CASE("pseudo-periodic configurations") {
  Rng rng(14);
  double ell = 1.0;
  CellLattice lat{ell, {0, 0}};
  Window w = lat.cells(0, 0, 6, 6);
  CHECK_THROWS(pseudo_periodic(PseudoPeriodicSpec{ell, 0.1}, Window::box(0, 0, 3, 3), rng));
  CHECK_THROWS(pseudo_periodic(PseudoPeriodicSpec{ell, 0.6}, w, rng));

  auto tiny = pseudo_periodic(PseudoPeriodicSpec{ell, 1e-9}, w, rng);
  CHECK(tiny.points.size() == 36);
  Triangulation tt(tiny.points);
  // Interior points of a triangular lattice have six spokes of equal length.
  auto interior = [&](std::size_t i) {
    auto [k, l] = lat.cell_of(tiny.points[i]);
    return k > 0 && k < 5 && l > 0 && l < 5;
  };
  for (std::size_t i = 0; i < tiny.points.size(); ++i) {
    if (!interior(i)) continue;
    auto nb = tt.neighbors(static_cast<VertexId>(i));
    CHECK(nb.size() == 6);
    for (VertexId v : nb) CHECK(dist(tiny.points[i], tiny.points[v]) == doctest::Approx(ell).epsilon(1e-6));
  }

  ModelParams p{3, 1.0, 1.0, 3.0, 1.0};
  for (double rho0 : {0.05, 0.15, 0.25}) {
    for (int draw = 0; draw < 1000; ++draw) {
      PseudoPeriodicSpec spec{ell, rho0};
      spec.mark = [&](int k, int l) { return 1 + (k + 2 * l) % 2; };
      auto c = pseudo_periodic(spec, w, rng);
      Triangulation t(c.points);
      for (const Edge& e : t.edges()) {
        auto [k1, l1] = lat.cell_of(c.points[e.u]);
        auto [k2, l2] = lat.cell_of(c.points[e.v]);
        bool inner = k1 > 0 && k1 < 5 && l1 > 0 && l1 < 5 && k2 > 0 && k2 < 5 && l2 > 0 && l2 < 5;
        if (!inner) continue;
        double len = dist(c.points[e.u], c.points[e.v]);
        REQUIRE(len >= ell * (1 - 2 * rho0) - 1e-12);
        REQUIRE(len <= ell * (1 + 2 * rho0) + 1e-12);
      }
      double cr = summability_constant(ell, rho0, p);
      for (int k = 2; k <= 3; ++k)
        for (int l = 2; l <= 3; ++l) REQUIRE(cell_potential(t, c.marks, lat, k, l, p) <= cr);
    }
  }
}

TEST_CASE("configuration text round trip") {
  Rng rng(15);
  auto c = random_config(rng, 25, 3);
  std::ostringstream out;
  write_configuration(out, c);
  std::istringstream in(out.str());
  auto back = read_configuration(in);
  CHECK(back.points.size() == c.points.size());
  std::ostringstream again;
  write_configuration(again, back);
  CHECK(again.str() == out.str());
  std::istringstream bad("0 0 1\n");
  CHECK_THROWS_AS(read_configuration(bad), FormatError);
}
