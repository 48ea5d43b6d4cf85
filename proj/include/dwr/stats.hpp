#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dwr {

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

// Mean with the naive i.i.d. standard error.
Estimate mean_se(std::span<const double> xs);

// Mean with a batch-means standard error (for correlated chains).
Estimate batch_means(std::span<const double> xs, std::size_t batches = 32);

// Integrated autocorrelation time estimated from batch means.
double tau_int(std::span<const double> xs, std::size_t batches = 32);

}  // namespace dwr
