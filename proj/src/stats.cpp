#include "dwr/stats.hpp"

#include <cmath>

namespace dwr {

Estimate mean_se(std::span<const double> xs) {
  Estimate e;
  e.n = xs.size();
  if (xs.empty()) return e;
  double s = 0.0;
  for (double x : xs) s += x;
  e.mean = s / xs.size();
  if (xs.size() < 2) return e;
  double ss = 0.0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  e.se = std::sqrt(ss / (xs.size() - 1) / xs.size());
  return e;
}

Estimate batch_means(std::span<const double> xs, std::size_t batches) {
  if (xs.size() < 2 * batches) return mean_se(xs);
  std::size_t len = xs.size() / batches;
  std::vector<double> bm(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < len; ++i) bm[b] += xs[b * len + i];
    bm[b] /= len;
  }
  Estimate e = mean_se(bm);
  e.n = xs.size();
  e.mean = mean_se(xs).mean;
  return e;
}

double tau_int(std::span<const double> xs, std::size_t batches) {
  Estimate naive = mean_se(xs);
  Estimate bm = batch_means(xs, batches);
  if (naive.se == 0.0) return 1.0;
  double r = bm.se / naive.se;
  return r * r;
}

}  // namespace dwr
