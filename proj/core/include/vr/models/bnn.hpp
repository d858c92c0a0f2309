#pragma once

#include "vr/joint_model.hpp"

namespace vr {

/// Single-hidden-layer ReLU regression network with weights theta ~ N(0, I)
/// and Gaussian likelihood y ~ N(f(x; theta), sigma^2).
///
/// theta packs W1 (H x D), b1 (H), W2 (1 x H), b2 (1) column-major in that
/// order. The learnable noise lives in block "log_noise" (log sigma).
class BNNModel final : public JointModel {
 public:
  BNNModel(Eigen::Index input_dim, Eigen::Index hidden = 50, double init_noise = 1.0);

  Eigen::Index input_dim() const { return d_; }
  Eigen::Index hidden() const { return h_; }

  Eigen::Index latent_dim() const override { return h_ * d_ + 2 * h_ + 1; }
  bool is_local() const override { return false; }
  void init_params(ParamSet& params, Rng& rng) const override;
  ad::Var log_prior(ad::Tape& tape, const Leaves& leaves, ad::Var latent) const override;
  ad::Var log_likelihood(ad::Tape& tape, const Leaves& leaves, ad::Var latent, const Batch& batch,
                         Eigen::Index samples_per_point) const override;

  /// Network output (1 x M) for one weight vector.
  Eigen::RowVectorXd predict(const Eigen::VectorXd& theta, const Eigen::MatrixXd& inputs) const;

 private:
  Eigen::Index d_;
  Eigen::Index h_;
  double init_noise_;
};

}  // namespace vr
