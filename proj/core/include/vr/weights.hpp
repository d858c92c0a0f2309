#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vr/alpha.hpp"

namespace vr {

/// K log importance weights log p(theta_k, D) - log q(theta_k).
///
/// Entries are finite or -inf (zero-density samples); at least one entry is
/// finite. Construction throws std::invalid_argument otherwise.
class WeightSet {
 public:
  explicit WeightSet(std::vector<double> log_w);
  WeightSet(std::span<const double> log_w) : WeightSet(std::vector<double>(log_w.begin(), log_w.end())) {}  // NOLINT

  std::size_t size() const { return log_w_.size(); }
  std::span<const double> log_w() const { return log_w_; }
  double operator[](std::size_t k) const { return log_w_[k]; }

  /// Lowest index attaining the maximum / minimum log weight.
  std::size_t argmax() const;
  std::size_t argmin() const;

 private:
  std::vector<double> log_w_;
};

struct BoundValue {
  double value = 0.0;
  Alpha alpha;
  /// Number of Monte Carlo samples, or empty for an exact bound.
  std::optional<std::size_t> k_samples;
  /// Set when the +inf branch selected a zero-density sample (value is -inf).
  bool degenerate = false;
};

/// Normalized importance weights w_hat_{alpha,k} proportional to
/// exp((1 - alpha) log_w_k).
///
/// alpha = 1 gives uniform weights, -inf a one-hot vector at argmax(log_w),
/// +inf a one-hot vector at argmin(log_w). Ties go to the lowest index.
std::vector<double> normalize_weights(const WeightSet& w, Alpha alpha);

}  // namespace vr
