#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vr/alpha.hpp"
#include "vr/gaussian.hpp"
#include "vr/weights.hpp"

namespace vr {

class BLRModel;

/// K-sample Monte Carlo VR bound
///   1/(1 - alpha) * [logsumexp((1 - alpha) log_w) - log K]
/// evaluated in log domain. alpha = 1 gives mean(log_w), alpha = -inf gives
/// max(log_w) and alpha = +inf gives min(log_w). A single weight is returned
/// unchanged for every alpha.
BoundValue mc_vr_estimate(const WeightSet& w, Alpha alpha);

/// Exact VR bound log p(D) - D_alpha[q || p(theta | D)] for Bayesian linear
/// regression, where the posterior is available in closed form.
BoundValue exact_vr_bound_blr(const BLRModel& model, const GaussianDist& q, Alpha alpha);

struct BiasRow {
  Alpha alpha;
  std::size_t k = 1;
  double mean = 0.0;
  double stderr_ = 0.0;
  /// Exact L_alpha(q; p) = -D_alpha[q || p].
  double exact = 0.0;
};

struct BiasTable {
  std::vector<BiasRow> rows;

  const BiasRow& at(Alpha alpha, std::size_t k) const;
  /// CSV with header alpha,K,mean,stderr,exact.
  void write_csv(std::ostream& os) const;
};

struct BiasSimConfig {
  std::vector<Alpha> alphas;
  std::vector<std::size_t> ks;
  std::size_t repeats = 200;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// Repeated K-sample estimates of L_alpha(q; p) with theta_k ~ q and
/// log_w = log p - log q, where p is a normalized Gaussian (so log p(D) = 0).
/// Each (alpha, K) cell draws from its own RNG stream, so the table does not
/// depend on the thread count.
BiasTable bias_simulation(const GaussianDist& p, const GaussianDist& q, const BiasSimConfig& config);

}  // namespace vr
