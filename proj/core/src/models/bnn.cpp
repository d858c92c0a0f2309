#include "vr/models/bnn.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace vr {

BNNModel::BNNModel(Eigen::Index input_dim, Eigen::Index hidden, double init_noise)
    : d_(input_dim), h_(hidden), init_noise_(init_noise) {
  if (d_ < 1 || h_ < 1) throw std::invalid_argument("BNNModel: dimensions must be positive");
  if (!(init_noise_ > 0.0)) throw std::invalid_argument("BNNModel: noise must be positive");
}

void BNNModel::init_params(ParamSet& params, Rng&) const {
  params.add("log_noise", Eigen::MatrixXd::Constant(1, 1, std::log(init_noise_)));
}

ad::Var BNNModel::log_prior(ad::Tape& tape, const Leaves&, ad::Var latent) const {
  return tape.std_normal_logpdf(latent);
}

ad::Var BNNModel::log_likelihood(ad::Tape& tape, const Leaves& leaves, ad::Var latent,
                                 const Batch& batch, Eigen::Index) const {
  if (batch.inputs.rows() != d_) throw std::invalid_argument("BNNModel: input dimension mismatch");
  if (batch.targets.cols() != batch.inputs.cols())
    throw std::invalid_argument("BNNModel: batch needs one target per input");
  const ad::Var x = tape.constant(batch.inputs);
  const ad::Var y = tape.constant(batch.targets);
  const ad::Var log_noise = leaves["log_noise"];
  const Eigen::Index samples = tape.value(latent).cols();

  std::vector<ad::Var> per_sample;
  per_sample.reserve(static_cast<std::size_t>(samples));
  for (Eigen::Index k = 0; k < samples; ++k) {
    const ad::Var w1 = tape.block(latent, k, 0, h_, d_);
    const ad::Var b1 = tape.block(latent, k, h_ * d_, h_, 1);
    const ad::Var w2 = tape.block(latent, k, h_ * d_ + h_, 1, h_);
    const ad::Var b2 = tape.block(latent, k, h_ * d_ + 2 * h_, 1, 1);
    const ad::Var hidden = tape.relu(tape.add(tape.matmul(w1, x), b1));
    const ad::Var out = tape.add(tape.matmul(w2, hidden), b2);
    per_sample.push_back(tape.sum(tape.gaussian_logpdf(y, out, log_noise)));
  }
  return tape.concat_cols(per_sample);
}

Eigen::RowVectorXd BNNModel::predict(const Eigen::VectorXd& theta,
                                     const Eigen::MatrixXd& inputs) const {
  if (theta.size() != latent_dim()) throw std::invalid_argument("BNNModel: theta size mismatch");
  const Eigen::Map<const Eigen::MatrixXd> w1(theta.data(), h_, d_);
  const Eigen::Map<const Eigen::VectorXd> b1(theta.data() + h_ * d_, h_);
  const Eigen::Map<const Eigen::RowVectorXd> w2(theta.data() + h_ * d_ + h_, h_);
  const double b2 = theta(h_ * d_ + 2 * h_);
  const Eigen::MatrixXd hidden = ((w1 * inputs).colwise() + b1).cwiseMax(0.0);
  return (w2 * hidden).array() + b2;
}

}  // namespace vr
