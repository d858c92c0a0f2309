#pragma once

#include <cstdint>
#include <stdexcept>

#include "vr/alpha.hpp"
#include "vr/gaussian.hpp"
#include "vr/joint_model.hpp"

namespace vr {

struct BLRPosterior {
  GaussianDist posterior;
  double log_evidence = 0.0;  ///< log p(D | sigma)
};

/// Bayesian linear regression y = X theta + N(0, sigma^2) with theta ~ N(0, I).
///
/// As a JointModel it is global with latent theta (d) and one hyper-parameter
/// block "log_noise" (1 x 1) holding log sigma.
class BLRModel final : public JointModel {
 public:
  /// design is N x d, targets has N entries, sigma > 0.
  BLRModel(Matrix design, Vector targets, double sigma);

  const Matrix& design() const { return x_; }
  const Vector& targets() const { return y_; }
  double sigma() const { return sigma_; }
  Eigen::Index num_points() const { return x_.rows(); }
  BLRModel with_sigma(double sigma) const { return BLRModel(x_, y_, sigma); }

  /// All data as one batch (inputs d x N, targets 1 x N).
  Batch full_batch() const;

  Eigen::Index latent_dim() const override { return x_.cols(); }
  bool is_local() const override { return false; }
  void init_params(ParamSet& params, Rng& rng) const override;
  ad::Var log_prior(ad::Tape& tape, const Leaves& leaves, ad::Var latent) const override;
  ad::Var log_likelihood(ad::Tape& tape, const Leaves& leaves, ad::Var latent, const Batch& batch,
                         Eigen::Index samples_per_point) const override;

 private:
  Matrix x_;
  Vector y_;
  double sigma_;
};

/// Closed-form posterior N(Lambda^-1 X^T y / sigma^2, Lambda^-1) with
/// Lambda = X^T X / sigma^2 + I, and the exact log evidence.
/// Throws std::invalid_argument when Lambda is not positive definite.
BLRPosterior blr_exact_posterior(const BLRModel& model);

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double grad_norm)
      : std::runtime_error(what), grad_norm_(grad_norm) {}
  double grad_norm() const { return grad_norm_; }

 private:
  double grad_norm_;
};

struct MeanFieldFitOptions {
  int max_iters = 50000;
  double grad_tol = 1e-7;
  double fd_step = 1e-5;
};

/// Diagonal Gaussian maximizing the exact VR bound of a BLR model.
///
/// alpha = 0 makes the exact bound constant in q, so that case maximizes the
/// alpha -> 0 limit objective -KL[posterior || q] instead, whose maximizer is
/// the product of exact posterior marginals. Supports alpha >= 0 including
/// +inf; throws ConvergenceError after max_iters.
GaussianDist blr_mean_field_fit(const BLRModel& model, Alpha alpha,
                                const MeanFieldFitOptions& options = {});

/// Seeded 2-D instance with strongly correlated design columns, so that the
/// posterior is a correlated Gaussian.
BLRModel make_correlated_blr(std::uint64_t seed, Eigen::Index n = 20, double sigma = 1.0);

}  // namespace vr
