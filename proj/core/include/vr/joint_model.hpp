#pragma once

#include <memory>

#include <Eigen/Dense>

#include "vr/params.hpp"
#include "vr/rng.hpp"
#include "vr/tape.hpp"

namespace vr {

/// Observations as columns: inputs is features x M, targets is 1 x M for
/// regression models and empty otherwise.
struct Batch {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
  /// Multiplier on the summed batch log-likelihood (N / M for the energy
  /// approximation, 1 for full-data or per-datapoint objectives).
  double likelihood_scale = 1.0;

  Eigen::Index size() const { return inputs.cols(); }
};

/// Joint density log p(latent, data) of one of the experiment models.
///
/// Global models (BLR, BNN) have a single latent vector theta shared by the
/// whole batch; every column of `latent` is one sample of theta and is scored
/// against every datapoint. Local models (VAE) have one latent per datapoint;
/// column c of `latent` belongs to datapoint c / samples_per_point.
class JointModel {
 public:
  virtual ~JointModel() = default;

  virtual Eigen::Index latent_dim() const = 0;
  virtual bool is_local() const = 0;

  /// Adds the model's own parameters (hyper-parameters, decoder weights).
  virtual void init_params(ParamSet& params, Rng& rng) const = 0;

  /// log p0(latent) per column; 1 x C.
  virtual ad::Var log_prior(ad::Tape& tape, const Leaves& leaves, ad::Var latent) const = 0;

  /// Unscaled log-likelihood per column; 1 x C. Global models sum over the
  /// batch.
  virtual ad::Var log_likelihood(ad::Tape& tape, const Leaves& leaves, ad::Var latent,
                                 const Batch& batch, Eigen::Index samples_per_point) const = 0;

  /// log p0 + likelihood_scale * log-likelihood; 1 x C.
  ad::Var log_joint(ad::Tape& tape, const Leaves& leaves, ad::Var latent, const Batch& batch,
                    Eigen::Index samples_per_point) const;
};

struct Reparameterized {
  ad::Var latent;  ///< latent_dim x C samples g_phi(eps)
  ad::Var log_q;   ///< 1 x C
};

/// Reparameterizable Gaussian approximation q_phi.
class VariationalFamily {
 public:
  virtual ~VariationalFamily() = default;

  virtual Eigen::Index latent_dim() const = 0;
  virtual void init_params(ParamSet& params, Rng& rng) const = 0;

  /// Number of weight groups for a batch: 1 for a global q, M for an
  /// amortized q.
  virtual Eigen::Index groups(const Batch& batch) const = 0;

  /// Maps eps (latent_dim x groups*K, group-major) to samples and their log
  /// density under q.
  virtual Reparameterized reparameterize(ad::Tape& tape, const Leaves& leaves, const Batch& batch,
                                         const Eigen::MatrixXd& eps, Eigen::Index k) const = 0;
};

/// Mean-field Gaussian q(theta) = N(mu, diag(exp(2 rho))) over a global
/// latent, with blocks "q_mean" and "q_logscale".
class MeanFieldGaussian final : public VariationalFamily {
 public:
  explicit MeanFieldGaussian(Eigen::Index dim, double init_logscale = -3.0, double init_mean_sd = 0.1)
      : dim_(dim), init_logscale_(init_logscale), init_mean_sd_(init_mean_sd) {}

  Eigen::Index latent_dim() const override { return dim_; }
  void init_params(ParamSet& params, Rng& rng) const override;
  Eigen::Index groups(const Batch&) const override { return 1; }
  Reparameterized reparameterize(ad::Tape& tape, const Leaves& leaves, const Batch& batch,
                                 const Eigen::MatrixXd& eps, Eigen::Index k) const override;

 private:
  Eigen::Index dim_;
  double init_logscale_;
  double init_mean_sd_;
};

/// Value-level reparameterization theta = mu + exp(rho) * eps.
struct ReparamMap {
  Eigen::VectorXd mu;
  Eigen::VectorXd rho;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& eps) const {
    return (rho.array().exp().matrix().asDiagonal() * eps).colwise() + mu;
  }
  /// log q(theta) for each column.
  Eigen::VectorXd log_q(const Eigen::MatrixXd& theta) const;
};

}  // namespace vr
