#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace vr {

/// log(sum(exp(x))) with -inf entries contributing zero mass.
inline double logsumexp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - m);
  return m + std::log(acc);
}

/// log(sum(exp(c * x))) computed without materializing the scaled vector.
inline double logsumexp_scaled(std::span<const double> x, double c) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x)
    if (v != -std::numeric_limits<double>::infinity()) m = std::max(m, c * v);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double acc = 0.0;
  for (double v : x)
    if (v != -std::numeric_limits<double>::infinity()) acc += std::exp(c * v - m);
  return m + std::log(acc);
}

}  // namespace vr
