#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "vr/divergence.hpp"
#include "vr/gaussian.hpp"

namespace vrtest {

struct GaussianPair {
  vr::GaussianDist p;
  vr::GaussianDist q;
};

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index d, double lo, double hi) {
  std::uniform_real_distribution<double> var(lo, hi);
  std::uniform_real_distribution<double> angle(0.0, 3.14159265358979323846);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  if (d == 1) {
    cov(0, 0) = var(rng);
    return cov;
  }
  const double t = angle(rng);
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  const Eigen::Vector2d ev(var(rng), var(rng));
  return r * ev.asDiagonal() * r.transpose();
}

/// Smallest eigenvalue of alpha * P_p + (1 - alpha) * P_q, the precision of
/// the Renyi integrand p^alpha q^(1 - alpha).
inline double integrand_precision_floor(const vr::GaussianDist& p, const vr::GaussianDist& q, double alpha) {
  const Eigen::MatrixXd m = alpha * p.precision() + (1.0 - alpha) * q.precision();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

/// Seeded 1-D and 2-D pairs (alternating) with variances in [0.5, 2] whose
/// Renyi integrals stay finite for every alpha in [alpha_lo, alpha_hi].
inline std::vector<GaussianPair> random_pairs(std::uint64_t seed, int count, double alpha_lo = -2.0,
                                              double alpha_hi = 5.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shift(-1.0, 1.0);
  std::vector<GaussianPair> out;
  while (static_cast<int>(out.size()) < count) {
    const Eigen::Index d = out.size() % 2 == 0 ? 1 : 2;
    Eigen::VectorXd mp(d), mq(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      mp(i) = shift(rng);
      mq(i) = shift(rng);
    }
    GaussianPair pair{vr::GaussianDist(mp, random_spd(rng, d, 0.5, 2.0)),
                      vr::GaussianDist(mq, random_spd(rng, d, 0.5, 2.0))};
    if (integrand_precision_floor(pair.p, pair.q, alpha_lo) < 0.25) continue;
    if (integrand_precision_floor(pair.p, pair.q, alpha_hi) < 0.25) continue;
    out.push_back(std::move(pair));
  }
  return out;
}

/// Square grid holding +/- n_sigma sd of p, q and the alpha integrand.
inline vr::GridSpec oracle_grid(const vr::GaussianDist& p, const vr::GaussianDist& q, double alpha, double n_sigma,
                                double step) {
  vr::GridSpec g = vr::GridSpec::covering(p, q, n_sigma, step);
  if (alpha != 0.0 && alpha != 1.0) {
    const Eigen::MatrixXd prec = alpha * p.precision() + (1.0 - alpha) * q.precision();
    const Eigen::MatrixXd cov = prec.inverse();
    const Eigen::VectorXd center = cov * (alpha * p.precision() * p.mean() + (1.0 - alpha) * q.precision() * q.mean());
    const Eigen::VectorXd sd = cov.diagonal().array().sqrt();
    g.lower = std::min(g.lower, (center - n_sigma * sd).minCoeff());
    g.upper = std::max(g.upper, (center + n_sigma * sd).maxCoeff());
  }
  return g;
}

}  // namespace vrtest
