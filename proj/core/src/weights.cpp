#include "vr/weights.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vr/numeric.hpp"

namespace vr {

WeightSet::WeightSet(std::vector<double> log_w) : log_w_(std::move(log_w)) {
  if (log_w_.empty()) throw std::invalid_argument("WeightSet: empty weight set");
  bool any_finite = false;
  for (double v : log_w_) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("WeightSet: log weights must not be NaN or +inf");
    any_finite = any_finite || std::isfinite(v);
  }
  if (!any_finite) throw std::invalid_argument("WeightSet: all log weights are -inf");
}

std::size_t WeightSet::argmax() const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < log_w_.size(); ++k)
    if (log_w_[k] > log_w_[best]) best = k;
  return best;
}

std::size_t WeightSet::argmin() const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < log_w_.size(); ++k)
    if (log_w_[k] < log_w_[best]) best = k;
  return best;
}

std::vector<double> normalize_weights(const WeightSet& w, Alpha alpha) {
  const std::size_t k = w.size();
  std::vector<double> probs(k, 0.0);
  switch (alpha.kind()) {
    case Alpha::Kind::One:
      std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(k));
      return probs;
    case Alpha::Kind::NegInf:
      probs[w.argmax()] = 1.0;
      return probs;
    case Alpha::Kind::PosInf:
      probs[w.argmin()] = 1.0;
      return probs;
    case Alpha::Kind::Finite:
      break;
  }
  const double c = 1.0 - alpha.value();
  if (c < 0.0 && w[w.argmin()] == -std::numeric_limits<double>::infinity()) {
    probs[w.argmin()] = 1.0;
    return probs;
  }
  const double lse = logsumexp_scaled(w.log_w(), c);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double lw = w[i];
    probs[i] = lw == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(c * lw - lse);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

}  // namespace vr
