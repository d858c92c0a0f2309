#pragma once

#include "vr/alpha.hpp"
#include "vr/gaussian.hpp"

namespace vr {

/// Renyi alpha-divergence D_alpha[p || q] between two Gaussians.
///
/// Finite alpha uses the log-determinant closed form through the mixture
/// covariance alpha*Sigma_q + (1 - alpha)*Sigma_p. When that matrix is not
/// positive definite the integral diverges: the result is +inf for alpha > 1
/// and -inf for alpha < 0. alpha = 0 returns 0 (Gaussians have full support),
/// alpha = 1 is the KL divergence, alpha = +inf is log max p/q and
/// alpha = -inf is -D_inf[q || p].
///
/// Throws std::invalid_argument on dimension mismatch.
double renyi_gaussian(const GaussianDist& p, const GaussianDist& q, Alpha alpha);

double kl_gaussian(const GaussianDist& p, const GaussianDist& q);

/// log max_theta p(theta)/q(theta); +inf when the ratio is unbounded.
double log_max_ratio(const GaussianDist& p, const GaussianDist& q);

/// Square box [lower, upper]^d sampled with a uniform step.
struct GridSpec {
  double lower = -8.0;
  double upper = 8.0;
  double step = 0.01;

  static constexpr double kMaxStep = 0.05;

  /// Smallest box containing mean +/- n_sigma standard deviations of both
  /// distributions in every coordinate.
  static GridSpec covering(const GaussianDist& p, const GaussianDist& q, double n_sigma,
                           double step);
};

/// Trapezoidal quadrature of the Renyi integral on a fixed grid (d <= 2).
///
/// Rejects grids coarser than GridSpec::kMaxStep and grids that do not span
/// at least 8 standard deviations (mean +/- 4 sd) of both distributions in
/// every coordinate. alpha = 1 integrates p log(p/q); alpha = 0 returns
/// -log of the q-mass captured by the grid.
double quadrature_oracle(const GaussianDist& p, const GaussianDist& q, double alpha,
                         const GridSpec& grid);

}  // namespace vr
