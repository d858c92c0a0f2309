#pragma once

#include "vr/joint_model.hpp"

namespace vr {

enum class Likelihood { Bernoulli, Gaussian };

struct VAEArch {
  Eigen::Index data_dim = 64;
  Eigen::Index hidden = 64;
  Eigen::Index latent = 4;
  Likelihood likelihood = Likelihood::Bernoulli;
};

/// One-stochastic-layer generative model p(h) p(x | h) with p(h) = N(0, I)
/// and a tanh MLP decoder. Decoder blocks: dec_w1, dec_b1, dec_w2, dec_b2,
/// plus dec_logscale for the Gaussian likelihood.
class VAEModel final : public JointModel {
 public:
  explicit VAEModel(VAEArch arch) : arch_(arch) {}

  const VAEArch& arch() const { return arch_; }

  Eigen::Index latent_dim() const override { return arch_.latent; }
  bool is_local() const override { return true; }
  void init_params(ParamSet& params, Rng& rng) const override;
  ad::Var log_prior(ad::Tape& tape, const Leaves& leaves, ad::Var latent) const override;
  ad::Var log_likelihood(ad::Tape& tape, const Leaves& leaves, ad::Var latent, const Batch& batch,
                         Eigen::Index samples_per_point) const override;

  /// Decoder output before the likelihood (logits or means); data_dim x C.
  ad::Var decode(ad::Tape& tape, const Leaves& leaves, ad::Var latent) const;

 private:
  VAEArch arch_;
};

/// Amortized q(h | x) = N(mu(x), diag(exp(2 rho(x)))) from a tanh MLP.
/// Blocks: enc_w1, enc_b1, enc_wmu, enc_bmu, enc_wrho, enc_brho.
class GaussianEncoder final : public VariationalFamily {
 public:
  explicit GaussianEncoder(VAEArch arch) : arch_(arch) {}

  Eigen::Index latent_dim() const override { return arch_.latent; }
  void init_params(ParamSet& params, Rng& rng) const override;
  Eigen::Index groups(const Batch& batch) const override { return batch.size(); }
  Reparameterized reparameterize(ad::Tape& tape, const Leaves& leaves, const Batch& batch,
                                 const Eigen::MatrixXd& eps, Eigen::Index k) const override;

 private:
  VAEArch arch_;
};

}  // namespace vr
