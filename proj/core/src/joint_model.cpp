#include "vr/joint_model.hpp"

#include <cmath>

namespace vr {

ad::Var JointModel::log_joint(ad::Tape& tape, const Leaves& leaves, ad::Var latent,
                              const Batch& batch, Eigen::Index samples_per_point) const {
  const ad::Var prior = log_prior(tape, leaves, latent);
  ad::Var lik = log_likelihood(tape, leaves, latent, batch, samples_per_point);
  if (batch.likelihood_scale != 1.0) lik = tape.scale(lik, batch.likelihood_scale);
  return tape.add(prior, lik);
}

void MeanFieldGaussian::init_params(ParamSet& params, Rng& rng) const {
  std::normal_distribution<double> normal(0.0, init_mean_sd_);
  Eigen::MatrixXd mean(dim_, 1);
  for (Eigen::Index i = 0; i < dim_; ++i) mean(i, 0) = normal(rng);
  params.add("q_mean", mean);
  params.add("q_logscale", Eigen::MatrixXd::Constant(dim_, 1, init_logscale_));
}

Reparameterized MeanFieldGaussian::reparameterize(ad::Tape& tape, const Leaves& leaves,
                                                  const Batch&, const Eigen::MatrixXd& eps,
                                                  Eigen::Index) const {
  const ad::Var mu = leaves["q_mean"];
  const ad::Var rho = leaves["q_logscale"];
  const ad::Var noise = tape.constant(eps);
  const ad::Var theta = tape.add(mu, tape.mul(tape.exp(rho), noise));
  return {theta, tape.gaussian_logpdf(theta, mu, rho)};
}

Eigen::VectorXd ReparamMap::log_q(const Eigen::MatrixXd& theta) const {
  constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;
  Eigen::VectorXd out(theta.cols());
  const Eigen::ArrayXd inv_sd = (-rho.array()).exp();
  for (Eigen::Index j = 0; j < theta.cols(); ++j) {
    const Eigen::ArrayXd z = (theta.col(j) - mu).array() * inv_sd;
    out(j) = (-0.5 * z.square() - rho.array() - kHalfLog2Pi).sum();
  }
  return out;
}

}  // namespace vr
