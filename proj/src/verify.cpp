#include "dwr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "dwr/random_cluster.hpp"
#include "dwr/rng.hpp"

namespace dwr {

void CheckTally::record(bool ok, std::uint64_t seed) {
  ++checked;
  if (!ok) {
    ++violations;
    if (failing_seeds.size() < 20) failing_seeds.push_back(seed);
  }
}

namespace {

constexpr const char* kGenerators[] = {"poisson", "ring", "cluster", "jitter", "dented"};

void add_poisson(std::vector<Point>& pts, Rng& rng, double half, double intensity) {
  int n = rng.poisson(intensity * 4.0 * half * half);
  for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(-half, half), rng.uniform(-half, half)});
}

}  // namespace

NeighborhoodInstance fuzz_neighborhood(std::uint64_t seed) {
  Rng rng(seed);
  NeighborhoodInstance inst;
  inst.seed = seed;
  inst.R = rng.bernoulli(0.5) ? 0.5 : 1.0;
  const double R = inst.R;
  int g = static_cast<int>(rng.below(5));
  inst.generator = kGenerators[g];
  auto& pts = inst.points;
  if (g == 0) {
    static constexpr double kIntensity[] = {0.5, 2.0, 8.0, 32.0, 128.0};
    add_poisson(pts, rng, 2.0 * R, kIntensity[rng.below(5)] / (R * R));
  } else if (g == 1) {
    int m = 6 + static_cast<int>(rng.below(35));
    double rho = rng.uniform(0.3, 0.9) * R;
    double jitter = rng.uniform(0.0, 0.4);
    for (int i = 0; i < m; ++i) {
      double t = rng.uniform(0.0, 2.0 * kPi);
      double r = rho * (1.0 + jitter * rng.uniform(-1.0, 1.0));
      pts.push_back({r * std::cos(t), r * std::sin(t)});
    }
    add_poisson(pts, rng, 2.0 * R, 2.0 / (R * R));
  } else if (g == 2) {
    int clusters = 1 + static_cast<int>(rng.below(4));
    for (int c = 0; c < clusters; ++c) {
      Point centre{rng.uniform(-R, R), rng.uniform(-R, R)};
      double spread = rng.uniform(0.02, 0.3) * R;
      int m = 3 + static_cast<int>(rng.below(20));
      std::normal_distribution<double> nd(0.0, spread);
      for (int i = 0; i < m; ++i) pts.push_back({centre.x + nd(rng), centre.y + nd(rng)});
    }
    add_poisson(pts, rng, 2.0 * R, 1.0 / (R * R));
  } else if (g == 4) {
    int m = 8 + static_cast<int>(rng.below(40));
    double rho = rng.uniform(0.5, 0.95) * R;
    double depth = rng.uniform(0.2, 0.9);
    double p_dent = rng.uniform(0.05, 0.5);
    for (int i = 0; i < m; ++i) {
      double t = rng.uniform(0.0, 2.0 * kPi);
      double r = rho * (rng.bernoulli(p_dent) ? depth : 1.0) * (1.0 + 0.02 * rng.uniform(-1.0, 1.0));
      pts.push_back({r * std::cos(t), r * std::sin(t)});
    }
  } else {
    double h = rng.uniform(0.1, 0.5) * R;
    double eps = h * std::pow(10.0, -rng.uniform(1.0, 6.0));
    Point shift{rng.uniform(-h, h), rng.uniform(-h, h)};
    int span = static_cast<int>(std::ceil(2.0 * R / h));
    for (int i = -span; i <= span; ++i)
      for (int j = -span; j <= span; ++j)
        pts.push_back({shift.x + i * h + eps * rng.uniform(-1.0, 1.0), shift.y + j * h + eps * rng.uniform(-1.0, 1.0)});
  }
  const Point origin{0.0, 0.0};
  std::erase_if(pts, [&](Point p) { return dist(p, origin) < 1e-9 * R; });
  for (Point c : {Point{3, 3}, Point{-3, 3}, Point{-3, -3}, Point{3, -3}}) pts.push_back(R * c);
  inst.tri = Triangulation(pts);
  inst.graph = contracted_graph(inst.tri, origin, R);
  inst.chains = quadrant_chains(inst.tri, inst.graph);
  return inst;
}

SpokedChain protruding_control_chain() {
  std::vector<VertexId> ids{0, 1, 2};
  std::vector<Point> pts{{1.0, 0.05}, {3.0, 1.5}, {0.9, 0.8}};
  return make_chain({0.0, 0.0}, ids, pts);
}

namespace {

enum Check {
  kPartition,
  kClassification,
  kIntrudingCount,
  kIntrudingGap,
  kProtruding,
  kRotation,
  kDecomposition,
  kLongEdges,
  kSectors,
  kCircumcenter,
  kArc,
  kCheckCount
};

constexpr const char* kNames[] = {"chain_partition",         "kink_classification", "intruding_kink_count",
                                  "intruding_kink_gap",      "protruding_kinks",    "intruding_kink_rotation",
                                  "kink_decomposition",      "long_edge_count",     "sector_packing",
                                  "circumcenter_monotone",   "arc_subadditivity"};

// Pieces after cutting at every kink, which are kink-free whatever the kinds.
std::vector<SpokedChain> cut_all(const SpokedChain& chain, std::span<const Kink> kinks) {
  std::vector<int> cuts;
  for (const Kink& k : kinks) cuts.push_back(k.j);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<SpokedChain> out;
  std::size_t start = 0;
  for (int c : cuts) {
    out.push_back(chain.slice(start, c + 1));
    start = c + 1;
  }
  out.push_back(chain.slice(start, chain.size()));
  return out;
}

Point arc_point(Point a, Point b, Point c, double t) {
  Circle circ = circumcircle(a, b, c);
  double tb = std::atan2(b.y - circ.center.y, b.x - circ.center.x);
  double tc = std::atan2(c.y - circ.center.y, c.x - circ.center.x);
  double ta = std::atan2(a.y - circ.center.y, a.x - circ.center.x);
  double sweep = canonical_angle(tc - tb);
  // Go the other way round when the counterclockwise sweep from b passes a.
  if (canonical_angle(ta - tb) < sweep) sweep -= 2.0 * kPi;
  double th = tb + t * sweep;
  return circ.center + circ.radius * Point{std::cos(th), std::sin(th)};
}

}  // namespace

std::vector<CheckTally> run_geometry_suite(const GeometrySuiteOptions& options) {
  std::vector<CheckTally> t(kCheckCount);
  for (int c = 0; c < kCheckCount; ++c) t[c].name = kNames[c];
  t[kIntrudingGap].worst = std::numeric_limits<double>::infinity();
  t[kArc].worst = std::numeric_limits<double>::infinity();
  Rng master(options.seed);

  for (long n = 0; n < options.instances; ++n) {
    const std::uint64_t seed = master.stream(static_cast<std::uint64_t>(n)).seed();
    NeighborhoodInstance inst = fuzz_neighborhood(seed);
    const double R = inst.R;
    ModelParams params{2, 1.0, 20.0, R, 1.0};
    bool violation = false;
    auto rec = [&](int check, bool ok) {
      t[check].record(ok, seed);
      violation = violation || !ok;
    };

    std::size_t covered = 0;
    bool all_spoked = true;
    for (const auto& qc : inst.chains) {
      covered += qc.chain.size();
      all_spoked = all_spoked && is_spoked_chain(qc.chain);
    }
    rec(kPartition, covered == inst.graph.vertices.size() && all_spoked);

    nlohmann::json qjson = nlohmann::json::array();
    int protruding_total = 0, unclassified_total = 0, intruding_max = 0;
    double bound_worst = 1.0;
    for (const auto& qc : inst.chains) {
      const SpokedChain& chain = qc.chain;
      auto kinks = find_kinks(chain);
      int intr = 0, prot = 0, neither = 0;
      for (const Kink& k : kinks) {
        rec(kClassification, k.kind != KinkKind::neither);
        if (k.kind == KinkKind::intruding) {
          ++intr;
          double rot = kink_rotation_angle(chain, k);
          t[kRotation].worst = std::max(t[kRotation].worst, rot);
          rec(kRotation, rot < kPi / 2);
        } else if (k.kind == KinkKind::protruding) {
          ++prot;
        } else {
          ++neither;
        }
      }
      if (chain.size() >= 3) {
        rec(kIntrudingCount, intr <= 2);
        rec(kProtruding, prot == 0);
      }
      KinkGap gap = intruding_gaps(chain, kinks);
      t[kIntrudingGap].not_applicable += gap.overlapping;
      if (gap.applicable > 0) {
        t[kIntrudingGap].worst = std::min(t[kIntrudingGap].worst, gap.min_gap);
        rec(kIntrudingGap, gap.min_gap > kPi / 4);
      }
      if (prot == 0 && neither == 0 && intr <= 2) {
        bool ok = true;
        std::size_t pieces = 0;
        try {
          for (const auto& piece : decompose_kink_free(chain)) {
            ++pieces;
            bound_worst = std::max(bound_worst, chain_ncc_upper_bound(piece, params).sum_bound);
          }
        } catch (const std::exception&) {
          ok = false;
        }
        rec(kDecomposition, ok && pieces <= 3);
      } else {
        ++t[kDecomposition].not_applicable;
      }
      for (const auto& piece : cut_all(chain, kinks)) {
        if (piece.size() < 2) continue;
        for (double frac : {0.125, 0.25, 0.5}) {
          double delta = frac * R;
          int count = count_long_edges(piece, delta);
          double ratio = count / long_edge_bound(R, delta);
          t[kLongEdges].worst = std::max(t[kLongEdges].worst, ratio);
          rec(kLongEdges, ratio <= 1.0);
        }
        SectorCheck sc = sector_check(piece, qc.quadrant, R);
        rec(kSectors, sc.disjoint && sc.contained);
      }
      if (chain.size() >= 3) rec(kCircumcenter, circumcenter_angle_monotone_check(chain.pole, chain.points));
      protruding_total += prot;
      unclassified_total += neither;
      intruding_max = std::max(intruding_max, intr);
      qjson.push_back({{"quadrant", qc.quadrant},
                       {"size", chain.size()},
                       {"intruding", intr},
                       {"protruding", prot},
                       {"unclassified", neither}});
    }
    if (options.jsonl) {
      nlohmann::json line{{"seed", seed},
                          {"generator", inst.generator},
                          {"R", R},
                          {"points", inst.points.size()},
                          {"neighbors", inst.graph.vertices.size()},
                          {"quadrants", qjson},
                          {"max_intruding", intruding_max},
                          {"protruding", protruding_total},
                          {"unclassified", unclassified_total},
                          {"chain_bound", bound_worst},
                          {"total_bound", 12.0 * bound_worst},
                          {"alpha", alpha(params).alpha},
                          {"violation", violation}};
      *options.jsonl << line.dump() << '\n';
    }
  }

  Rng arc_rng = master.stream(~std::uint64_t{0});
  const Point a{0.0, 0.0};
  for (long n = 0; t[kArc].checked < options.arc_instances && n < 4 * options.arc_instances; ++n) {
    double tb = arc_rng.uniform(0.0, kPi);
    double tc = arc_rng.uniform(0.0, kPi);
    if (tb > tc) std::swap(tb, tc);
    if (!(0.0 < tb && tb < tc && tc < kPi) || tc - tb < 1e-6) {
      ++t[kArc].not_applicable;
      continue;
    }
    double rb = std::exp(arc_rng.uniform(-3.0, 3.0));
    double rc = std::exp(arc_rng.uniform(-3.0, 3.0));
    Point b{rb * std::cos(tb), rb * std::sin(tb)};
    Point c{rc * std::cos(tc), rc * std::sin(tc)};
    // z on the arc, on the chord, or between the two.
    Point on_arc = arc_point(a, b, c, arc_rng.uniform(0.01, 0.99));
    Point on_chord = b + arc_rng.uniform(0.01, 0.99) * (c - b);
    double mode = arc_rng.uniform();
    double s = mode < 0.1 ? 1.0 : mode < 0.2 ? 0.0 : arc_rng.uniform();
    Point z = on_chord + s * (on_arc - on_chord);
    if (!in_arc_hull(a, b, c, z) || z == b || z == c) {
      ++t[kArc].not_applicable;
      continue;
    }
    ArcSubadditivity r = arc_subadditivity_check(a, b, c, z);
    t[kArc].worst = std::min(t[kArc].worst, r.slack());
    t[kArc].record(r.slack() >= -kTolerances.arc_slack, n);
  }
  return t;
}

ToySpec default_toy(bool with_boundary) {
  ToySpec t;
  t.params = ModelParams{2, 1.5, 3.0, 1.0, 1.0};
  t.window = Window::box(0.0, 0.0, 1.0, 1.0);
  t.sites = {{0.3, 0.4}, {0.7, 0.55}, {0.45, 0.8}};
  if (with_boundary) {
    t.boundary = {{-0.3, -0.3}, {1.3, -0.3}, {1.3, 1.3}, {-0.3, 1.3}};
    t.boundary_marks = {1, 2, 1, 1};
  }
  return t;
}

namespace {

// Left eigenvector of P for eigenvalue 1, normalised to sum 1.
std::vector<double> stationary_vector(const std::vector<std::vector<double>>& P) {
  const std::size_t n = P.size();
  std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? 1.0 : 0.0);
  for (std::size_t j = 0; j < n; ++j) A[n - 1][j] = 1.0;
  A[n - 1][n] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c] == 0.0) continue;
      double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= n; ++k) A[r][k] -= f * A[c][k];
    }
  }
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = A[i][n] / A[i][i];
  return v;
}

}  // namespace

ToyBalance toy_detailed_balance(const ToySpec& spec) {
  const int q = spec.params.q;
  const int M = static_cast<int>(spec.sites.size());
  int S = 1;
  for (int k = 0; k < M; ++k) S *= q + 1;
  auto digit = [&](int state, int k) {
    for (int i = 0; i < k; ++i) state /= q + 1;
    return state % (q + 1);
  };
  auto with_digit = [&](int state, int k, int d) {
    int p = 1;
    for (int i = 0; i < k; ++i) p *= q + 1;
    return state + (d - digit(state, k)) * p;
  };
  auto config_of = [&](int state) {
    Configuration c;
    c.window = spec.window;
    c.points = spec.boundary;
    c.marks = spec.boundary_marks;
    for (int k = 0; k < M; ++k)
      if (int d = digit(state, k); d > 0) {
        c.points.push_back(spec.sites[k]);
        c.marks.push_back(d);
      }
    return c;
  };

  const double total = spec.options.p_birth + spec.options.p_death + spec.options.p_flip;
  using Matrix = std::vector<std::vector<double>>;
  Matrix bd(S, std::vector<double>(S, 0.0)), fl = bd;
  std::vector<double> pi(S);
  const double act = spec.params.z * spec.window.area() / (static_cast<double>(M) * q);
  for (int i = 0; i < S; ++i) {
    Configuration c = config_of(i);
    int n = 0;
    for (int k = 0; k < M; ++k) n += digit(i, k) > 0;
    pi[i] = std::pow(act, n) * (c.points.empty() ? 1.0 : std::exp(-hamiltonian(c, spec.params)));

    GibbsSampler smp(c, spec.params, Rng(0), spec.options);
    auto site_of = [&](VertexId h) {
      for (int k = 0; k < M; ++k)
        if (smp.triangulation().point(h) == spec.sites[k]) return k;
      throw std::logic_error("toy: vertex is not a site");
    };
    const double wb = spec.options.p_birth / total / M / q;
    for (int k = 0; k < M; ++k)
      for (int s = 1; s <= q; ++s) {
        if (digit(i, k) > 0) {
          bd[i][i] += wb;
          continue;
        }
        double a = smp.birth_acceptance(spec.sites[k], s);
        bd[i][with_digit(i, k, s)] += wb * a;
        bd[i][i] += wb * (1.0 - a);
      }
    std::vector<VertexId> interior(smp.interior().begin(), smp.interior().end());
    if (interior.empty()) {
      bd[i][i] += spec.options.p_death / total;
      fl[i][i] += spec.options.p_flip / total;
      continue;
    }
    const double wd = spec.options.p_death / total / interior.size();
    const double wf = spec.options.p_flip / total / interior.size();
    for (VertexId h : interior) {
      int k = site_of(h);
      double a = smp.death_acceptance(h);
      bd[i][with_digit(i, k, 0)] += wd * a;
      bd[i][i] += wd * (1.0 - a);
      auto law = smp.mark_law(h);
      for (int s = 1; s <= q; ++s) fl[i][with_digit(i, k, s)] += wf * law[s - 1];
    }
  }
  double z = 0.0;
  for (double x : pi) z += x;
  for (double& x : pi) x /= z;

  ToyBalance r;
  r.states = S;
  Matrix P(S, std::vector<double>(S));
  for (int i = 0; i < S; ++i)
    for (int j = 0; j < S; ++j) P[i][j] = bd[i][j] + fl[i][j];
  for (int i = 0; i < S; ++i) {
    double row = 0.0;
    for (int j = 0; j < S; ++j) row += P[i][j];
    r.row_sum = std::max(r.row_sum, std::abs(row - 1.0));
  }
  const double share[2] = {(spec.options.p_birth + spec.options.p_death) / total, spec.options.p_flip / total};
  const Matrix* parts[2] = {&bd, &fl};
  for (int j = 0; j < S; ++j) {
    double full = 0.0, part[2] = {0.0, 0.0};
    for (int i = 0; i < S; ++i) {
      full += pi[i] * P[i][j];
      for (int m = 0; m < 2; ++m) part[m] += pi[i] * (*parts[m])[i][j];
    }
    r.stationarity = std::max(r.stationarity, std::abs(full - pi[j]));
    for (int m = 0; m < 2; ++m) r.per_move[m] = std::max(r.per_move[m], std::abs(part[m] - share[m] * pi[j]));
    for (int i = 0; i < S; ++i) r.balance = std::max(r.balance, std::abs(pi[i] * P[i][j] - pi[j] * P[j][i]));
  }
  auto v = stationary_vector(P);
  for (int i = 0; i < S; ++i) r.eigenvector = std::max(r.eigenvector, std::abs(v[i] - pi[i]));

  if (spec.boundary.empty()) {
    std::vector<int> perm(q);
    for (int s = 0; s < q; ++s) perm[s] = s + 1;
    auto apply = [&](int state) {
      int out = state;
      for (int k = 0; k < M; ++k)
        if (int d = digit(state, k); d > 0) out = with_digit(out, k, perm[d - 1]);
      return out;
    };
    while (std::next_permutation(perm.begin(), perm.end()))
      for (int i = 0; i < S; ++i)
        for (int j = 0; j < S; ++j) r.equivariance = std::max(r.equivariance, std::abs(P[apply(i)][apply(j)] - P[i][j]));
  }
  return r;
}

NccResult ncc_expectation(std::span<const Point> zeta, Point x0, const ModelParams& params, const NccOptions& options,
                          Rng& rng) {
  params.validate();
  Triangulation tri(zeta);
  NeighborhoodGraph nb = neighborhood_graph(tri, x0);
  double extent = 1.0;
  for (Point p : zeta) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  Window everywhere = Window::box(-4.0 * extent, -4.0 * extent, 4.0 * extent, 4.0 * extent);
  EdgeSystem all = edge_system(tri, nb.diff.exterior, everywhere, params);

  EdgeSystem sys;
  sys.n = all.n;
  std::vector<char> listed(all.n, 0);
  auto list = [&](VertexId v) {
    if (!listed[v]) listed[v] = 1, sys.vertices.push_back(v);
  };
  for (VertexId v : nb.vertices) list(v);
  for (std::size_t i = 0; i < all.edges.size(); ++i) {
    if (all.p[i] <= 0.0) continue;
    sys.edges.push_back(all.edges[i]);
    sys.p.push_back(all.p[i]);
    list(all.edges[i].u);
    list(all.edges[i].v);
  }

  NccResult r;
  r.R = params.R;
  r.q = params.q;
  r.beta = params.beta;
  r.points = static_cast<int>(zeta.size());
  r.boundary = static_cast<int>(nb.vertices.size());
  r.free_edges = static_cast<int>(sys.free_edges());
  AlphaBound a = alpha(params);
  r.alpha = a.alpha;
  r.alpha_star = a.alpha_star;
  r.hypothesis_met = a.hypothesis_met;

  const std::vector<VertexId>& boundary = nb.vertices;
  if (sys.free_edges() <= options.exact_limit) {
    r.exact = true;
    r.ncc.mean = tilted_expectation_exact(sys, params.q, [&](std::span<const std::uint8_t> open) {
      return static_cast<double>(ncc(boundary, sys, open));
    });
    r.ncc.n = 1;
  } else {
    TiltedSampler s(sys, params.q, rng);
    for (long i = 0; i < options.burn_in; ++i) s.sweep();
    std::vector<double> xs;
    xs.reserve(options.sweeps);
    for (long i = 0; i < options.sweeps; ++i) {
      s.sweep();
      xs.push_back(ncc(boundary, sys, s.state()));
    }
    r.ncc = batch_means(xs);
  }
  r.violation = r.ncc.mean > r.alpha + 3.0 * r.ncc.se;
  return r;
}

NccResult ncc_instance(std::uint64_t seed, const ModelParams& params, double intensity, const NccOptions& options) {
  Rng rng(seed);
  const double R = params.R;
  std::vector<Point> zeta;
  int n = rng.poisson(intensity * kPi);
  while (static_cast<int>(zeta.size()) < n) {
    Point p{rng.uniform(-R, R), rng.uniform(-R, R)};
    if (norm(p) < R && norm(p) > 1e-9 * R) zeta.push_back(p);
  }
  for (double sx : {-3.0, 3.0})
    for (double sy : {-3.0, 3.0}) zeta.push_back({sx * R, sy * R});
  NccResult r = ncc_expectation(zeta, {0.0, 0.0}, params, options, rng);
  r.seed = seed;
  r.intensity = intensity;
  return r;
}

}  // namespace dwr
