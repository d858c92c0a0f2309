#include "vr/models/vae.hpp"

#include <cmath>
#include <stdexcept>

namespace vr {

namespace {

Eigen::MatrixXd glorot(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(cols)));
  Eigen::MatrixXd w(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) w(i, j) = normal(rng);
  return w;
}

}  // namespace

void VAEModel::init_params(ParamSet& params, Rng& rng) const {
  params.add("dec_w1", glorot(rng, arch_.hidden, arch_.latent));
  params.add("dec_b1", Eigen::MatrixXd::Zero(arch_.hidden, 1));
  params.add("dec_w2", glorot(rng, arch_.data_dim, arch_.hidden));
  params.add("dec_b2", Eigen::MatrixXd::Zero(arch_.data_dim, 1));
  if (arch_.likelihood == Likelihood::Gaussian)
    params.add("dec_logscale", Eigen::MatrixXd::Zero(arch_.data_dim, 1));
}

ad::Var VAEModel::log_prior(ad::Tape& tape, const Leaves&, ad::Var latent) const {
  return tape.std_normal_logpdf(latent);
}

ad::Var VAEModel::decode(ad::Tape& tape, const Leaves& leaves, ad::Var latent) const {
  const ad::Var hidden =
      tape.tanh(tape.add(tape.matmul(leaves["dec_w1"], latent), leaves["dec_b1"]));
  return tape.add(tape.matmul(leaves["dec_w2"], hidden), leaves["dec_b2"]);
}

ad::Var VAEModel::log_likelihood(ad::Tape& tape, const Leaves& leaves, ad::Var latent,
                                 const Batch& batch, Eigen::Index samples_per_point) const {
  if (batch.inputs.rows() != arch_.data_dim)
    throw std::invalid_argument("VAEModel: data dimension mismatch");
  const Eigen::Index cols = tape.value(latent).cols();
  if (cols != batch.size() * samples_per_point)
    throw std::invalid_argument("VAEModel: latent columns must equal batch size * samples");
  Eigen::MatrixXd x(arch_.data_dim, cols);
  for (Eigen::Index m = 0; m < batch.size(); ++m)
    x.middleCols(m * samples_per_point, samples_per_point) =
        batch.inputs.col(m).replicate(1, samples_per_point);

  const ad::Var out = decode(tape, leaves, latent);
  if (arch_.likelihood == Likelihood::Bernoulli) return tape.bernoulli_logpmf(out, x);
  return tape.gaussian_logpdf(tape.constant(x), out, leaves["dec_logscale"]);
}

void GaussianEncoder::init_params(ParamSet& params, Rng& rng) const {
  params.add("enc_w1", glorot(rng, arch_.hidden, arch_.data_dim));
  params.add("enc_b1", Eigen::MatrixXd::Zero(arch_.hidden, 1));
  params.add("enc_wmu", glorot(rng, arch_.latent, arch_.hidden));
  params.add("enc_bmu", Eigen::MatrixXd::Zero(arch_.latent, 1));
  params.add("enc_wrho", glorot(rng, arch_.latent, arch_.hidden) * 0.1);
  params.add("enc_brho", Eigen::MatrixXd::Zero(arch_.latent, 1));
}

Reparameterized GaussianEncoder::reparameterize(ad::Tape& tape, const Leaves& leaves,
                                                const Batch& batch, const Eigen::MatrixXd& eps,
                                                Eigen::Index k) const {
  if (eps.rows() != arch_.latent || eps.cols() != batch.size() * k)
    throw std::invalid_argument("GaussianEncoder: noise must be latent x (M * K)");
  const ad::Var x = tape.constant(batch.inputs);
  const ad::Var hidden = tape.tanh(tape.add(tape.matmul(leaves["enc_w1"], x), leaves["enc_b1"]));
  const ad::Var mu = tape.add(tape.matmul(leaves["enc_wmu"], hidden), leaves["enc_bmu"]);
  const ad::Var rho = tape.add(tape.matmul(leaves["enc_wrho"], hidden), leaves["enc_brho"]);
  const ad::Var mu_r = tape.repeat_cols(mu, k);
  const ad::Var rho_r = tape.repeat_cols(rho, k);
  const ad::Var h = tape.add(mu_r, tape.mul(tape.exp(rho_r), tape.constant(eps)));
  return {h, tape.gaussian_logpdf(h, mu_r, rho_r)};
}

}  // namespace vr
