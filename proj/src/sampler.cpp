#include "dwr/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace dwr {

void SamplerOptions::validate() const {
  if (!(p_birth >= 0.0 && p_death >= 0.0 && p_flip >= 0.0))
    throw std::invalid_argument("sampler: move probabilities must be non-negative");
  if ((p_birth > 0.0) != (p_death > 0.0))
    throw std::invalid_argument("sampler: birth and death must both be enabled or both disabled");
  if (!(p_birth + p_death + p_flip > 0.0)) throw std::invalid_argument("sampler: no move enabled");
  if (resync_every < 0) throw std::invalid_argument("sampler: resync_every must be non-negative");
}

GibbsSampler::GibbsSampler(const Configuration& initial, const ModelParams& params, Rng rng, SamplerOptions options)
    : params_(params), options_(options), window_(initial.window), rng_(rng) {
  params_.validate();
  options_.validate();
  std::vector<int> marks = initial.marks;
  if (marks.empty()) marks.assign(initial.points.size(), 1);
  if (marks.size() != initial.points.size()) throw std::invalid_argument("sampler: mark count mismatch");
  for (int m : marks)
    if (m < 1 || m > params_.q) throw std::invalid_argument(fmt::format("sampler: mark {} outside 1..{}", m, params_.q));
  tri_ = Triangulation(initial.points);
  marks_ = marks;
  boundary_.resize(initial.points.size());
  slot_.assign(initial.points.size(), -1);
  for (std::size_t i = 0; i < initial.points.size(); ++i) {
    boundary_[i] = !window_.contains(initial.points[i]);
    if (!boundary_[i]) add_interior(static_cast<VertexId>(i));
  }
  energy_ = recompute_energy();
  if (!std::isfinite(energy_)) throw std::invalid_argument("sampler: initial configuration has infinite energy");
}

void GibbsSampler::add_interior(VertexId h) {
  slot_[h] = static_cast<int>(interior_.size());
  interior_.push_back(h);
}

void GibbsSampler::drop_interior(VertexId h) {
  int s = slot_[h];
  VertexId last = interior_.back();
  interior_[s] = last;
  slot_[last] = s;
  interior_.pop_back();
  slot_[h] = -1;
}

std::size_t GibbsSampler::steps_per_sweep() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(params_.z * window_.area())));
}

double GibbsSampler::birth_acceptance(Point x, int mark) const {
  if (!window_.contains(x)) return 0.0;
  double dh = energy_delta_insert(tri_, marks_, x, mark, window_, params_);
  if (!std::isfinite(dh)) return 0.0;
  double n = static_cast<double>(interior_.size());
  double log_r = std::log(options_.p_death / options_.p_birth) + std::log(params_.z * window_.area() / (n + 1.0)) - dh;
  return log_r >= 0.0 ? 1.0 : std::exp(log_r);
}

bool GibbsSampler::try_birth(Point x, int mark, double u) {
  ++counters_.proposed[0];
  if (!window_.contains(x)) return false;
  double dh = energy_delta_insert(tri_, marks_, x, mark, window_, params_);
  if (!std::isfinite(dh)) return false;
  double n = static_cast<double>(interior_.size());
  double log_r = std::log(options_.p_death / options_.p_birth) + std::log(params_.z * window_.area() / (n + 1.0)) - dh;
  if (!(log_r >= 0.0 || u < std::exp(log_r))) return false;
  VertexId h;
  try {
    if (!free_.empty()) {
      h = free_.back();
      tri_.restore(h, x);
      free_.pop_back();
    } else {
      h = tri_.insert(x);
    }
  } catch (const TriangulationError&) {
    return false;
  }
  if (static_cast<std::size_t>(h) >= marks_.size()) {
    marks_.resize(h + 1, 0);
    boundary_.resize(h + 1, 0);
    slot_.resize(h + 1, -1);
  }
  marks_[h] = mark;
  boundary_[h] = 0;
  add_interior(h);
  energy_ += dh;
  ++counters_.accepted[0];
  return true;
}

double GibbsSampler::death_acceptance(VertexId h) {
  if (!tri_.contains(h) || boundary_[h]) throw std::invalid_argument("death_acceptance: not an interior vertex");
  Point p = tri_.point(h);
  double n = static_cast<double>(interior_.size());
  tri_.remove(h);
  double dh = -energy_delta_insert(tri_, marks_, p, marks_[h], window_, params_);
  tri_.restore(h, p);
  double log_r = std::log(options_.p_birth / options_.p_death) + std::log(n / (params_.z * window_.area())) - dh;
  return log_r >= 0.0 ? 1.0 : std::exp(log_r);
}

bool GibbsSampler::try_death(VertexId h, double u) {
  ++counters_.proposed[1];
  if (!tri_.contains(h) || boundary_[h]) throw std::invalid_argument("try_death: not an interior vertex");
  Point p = tri_.point(h);
  double n = static_cast<double>(interior_.size());
  tri_.remove(h);
  double dh = -energy_delta_insert(tri_, marks_, p, marks_[h], window_, params_);
  double log_r = std::log(options_.p_birth / options_.p_death) + std::log(n / (params_.z * window_.area())) - dh;
  if (log_r >= 0.0 || u < std::exp(log_r)) {
    drop_interior(h);
    free_.push_back(h);
    energy_ += dh;
    ++counters_.accepted[1];
    return true;
  }
  tri_.restore(h, p);
  return false;
}

std::vector<double> GibbsSampler::mark_law(VertexId h) const {
  std::vector<double> e(params_.q);
  for (int s = 1; s <= params_.q; ++s) e[s - 1] = incident_energy(tri_, h, s, marks_, window_, params_);
  double lo = *std::min_element(e.begin(), e.end());
  std::vector<double> w(params_.q);
  double total = 0.0;
  for (int s = 0; s < params_.q; ++s) total += w[s] = std::exp(-(e[s] - lo));
  for (double& x : w) x /= total;
  return w;
}

void GibbsSampler::set_mark(VertexId h, int mark) {
  if (!tri_.contains(h) || boundary_[h]) throw std::invalid_argument("set_mark: not an interior vertex");
  if (mark < 1 || mark > params_.q) throw std::invalid_argument("set_mark: mark out of range");
  if (mark == marks_[h]) return;
  double before = incident_energy(tri_, h, marks_[h], marks_, window_, params_);
  double after = incident_energy(tri_, h, mark, marks_, window_, params_);
  marks_[h] = mark;
  energy_ += after - before;
}

void GibbsSampler::step() {
  const double total = options_.p_birth + options_.p_death + options_.p_flip;
  double u = rng_.uniform() * total;
  if (u < options_.p_birth) {
    Point x = window_.sample(rng_);
    int mark = 1 + static_cast<int>(rng_.below(params_.q));
    try_birth(x, mark, rng_.uniform());
  } else if (u < options_.p_birth + options_.p_death) {
    if (interior_.empty()) {
      ++counters_.proposed[1];
    } else {
      VertexId h = interior_[rng_.below(interior_.size())];
      try_death(h, rng_.uniform());
    }
  } else {
    ++counters_.proposed[2];
    if (!interior_.empty()) {
      VertexId h = interior_[rng_.below(interior_.size())];
      auto law = mark_law(h);
      double v = rng_.uniform();
      int s = 0;
      while (s + 1 < params_.q && v >= law[s]) v -= law[s++];
      if (s + 1 != marks_[h]) ++counters_.accepted[2];
      set_mark(h, s + 1);
    }
  }
  ++steps_;
  if (options_.resync_every > 0 && steps_ % static_cast<std::uint64_t>(options_.resync_every) == 0) resync();
}

void GibbsSampler::sweep() {
  for (std::size_t i = steps_per_sweep(); i > 0; --i) step();
}

double GibbsSampler::recompute_energy() const { return hamiltonian(tri_, marks_, window_, params_); }

double GibbsSampler::resync() {
  double full = recompute_energy();
  double drift = std::abs(full - energy_);
  max_drift_ = std::max(max_drift_, drift);
  energy_ = full;
  return drift;
}

Configuration GibbsSampler::configuration() const {
  Configuration c;
  c.window = window_;
  for (VertexId h : tri_.vertices()) {
    c.points.push_back(tri_.point(h));
    c.marks.push_back(marks_[h]);
  }
  return c;
}

Configuration make_boundary(const Window& window, BoundaryKind kind, const ModelParams& params, Rng& rng, int mark) {
  Configuration c;
  c.window = window;
  if (kind == BoundaryKind::free) return c;
  if (mark < 1 || mark > params.q) throw std::invalid_argument("make_boundary: mark out of range");
  auto corners = window.corners();
  double x0 = corners[0].x, x1 = x0, y0 = corners[0].y, y1 = y0;
  for (Point p : corners) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  Window frame = Window::box(x0 - params.R, y0 - params.R, x1 + params.R, y1 + params.R);
  int n = rng.poisson(params.z * frame.area());
  for (int i = 0; i < n; ++i) {
    Point p = frame.sample(rng);
    if (window.contains(p) || window.distance_to(p) > params.R) continue;
    c.points.push_back(p);
    c.marks.push_back(mark);
  }
  return c;
}

CoupledSample rc_coupled_sample(const GibbsSampler& sampler, Rng& rng) {
  const Triangulation& tri = sampler.triangulation();
  auto marks = sampler.marks();
  EdgeSystem sys = edge_system(tri, sampler.window(), sampler.params());
  CoupledSample out;
  out.config.window = sampler.window();
  std::vector<int> index(tri.handle_count(), -1);
  for (VertexId h : sys.vertices) {
    index[h] = static_cast<int>(out.config.points.size());
    out.config.points.push_back(tri.point(h));
    out.config.marks.push_back(marks[h]);
  }
  out.edges.base.reserve(sys.edges.size());
  out.edges.open.reserve(sys.edges.size());
  for (std::size_t i = 0; i < sys.edges.size(); ++i) {
    const Edge& e = sys.edges[i];
    out.edges.base.push_back(make_edge(index[e.u], index[e.v]));
    bool open = marks[e.u] == marks[e.v] && rng.bernoulli(sys.p[i]);
    out.edges.open.push_back(open ? 1 : 0);
  }
  return out;
}

Observables observe(const Configuration& config, const Window& delta, int q) {
  Observables o;
  o.n_per_mark.assign(q, 0);
  o.area = delta.area();
  for (std::size_t i = 0; i < config.points.size(); ++i) {
    Point p = config.points[i];
    if (!config.window.contains(p) || !delta.contains(p)) continue;
    int m = config.marked() ? config.marks[i] : 1;
    ++o.n_per_mark[m - 1];
    ++o.n;
  }
  o.order_param = q * o.n_per_mark[0] - o.n;
  return o;
}

int connection_count(const Configuration& config, const EdgeConfig& edges, const Window& delta) {
  const int n = static_cast<int>(config.points.size());
  ComponentIndex dsu(n);
  for (std::size_t i = 0; i < edges.base.size(); ++i)
    if (edges.open[i]) dsu.add_edge(edges.base[i].u, edges.base[i].v);
  std::vector<char> outer(n, 0);
  for (int i = 0; i < n; ++i)
    if (!config.window.contains(config.points[i])) outer[dsu.find(i)] = 1;
  int count = 0;
  for (int i = 0; i < n; ++i) {
    Point p = config.points[i];
    if (config.window.contains(p) && delta.contains(p) && outer[dsu.find(i)]) ++count;
  }
  return count;
}

RunSummary run(GibbsSampler& sampler, const RunOptions& options, const std::function<void(const SweepRecord&)>& sink) {
  if (options.sweeps < 1 || options.burn_in < 0 || options.thinning < 1)
    throw std::invalid_argument("run: sweeps >= 1, burn_in >= 0 and thinning >= 1 required");
  const int q = sampler.params().q;
  const Window delta = options.delta.value_or(sampler.window());
  RunSummary s;
  s.seed = sampler.rng().seed();
  for (int i = 0; i < options.burn_in; ++i) sampler.sweep();
  std::vector<double> n, order, conn, gap;
  std::vector<std::vector<double>> per_mark(q);
  for (int sw = 0; sw < options.sweeps; ++sw) {
    sampler.sweep();
    if (sw % options.thinning != 0) continue;
    SweepRecord r;
    r.sweep = options.burn_in + sw + 1;
    Configuration c = sampler.configuration();
    r.obs = observe(c, delta, q);
    if (options.coupled) {
      CoupledSample cs = rc_coupled_sample(sampler, sampler.rng());
      r.obs.connections = connection_count(cs.config, cs.edges, delta);
    }
    r.energy = sampler.energy();
    n.push_back(r.obs.n);
    order.push_back(r.obs.order_param);
    for (int m = 0; m < q; ++m) per_mark[m].push_back(r.obs.n_per_mark[m]);
    if (options.coupled) {
      conn.push_back((q - 1.0) * r.obs.connections);
      gap.push_back(order.back() - conn.back());
    }
    if (sink) sink(r);
    s.records.push_back(std::move(r));
  }
  s.n = batch_means(n);
  for (int m = 0; m < q; ++m) s.n_per_mark.push_back(batch_means(per_mark[m]));
  s.order_param = batch_means(order);
  s.tau_order = tau_int(order);
  if (options.coupled) {
    s.connection_term = batch_means(conn);
    s.identity_gap = batch_means(gap);
  }
  sampler.resync();
  s.counters = sampler.counters();
  s.max_drift = sampler.max_drift();
  return s;
}

void write_sweep_json(std::ostream& out, const SweepRecord& r, std::uint64_t seed) {
  out << fmt::format("{{\"sweep\":{},\"N\":{},\"N_per_mark\":[{}],\"order_param\":{},\"energy\":{:.17g},\"seed\":{}}}\n",
                     r.sweep, r.obs.n, fmt::join(r.obs.n_per_mark, ","), r.obs.order_param, r.energy, seed);
}

}  // namespace dwr
