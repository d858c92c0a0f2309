#include "vr/models/blr.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "vr/divergence.hpp"

namespace vr {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

BLRModel::BLRModel(Matrix design, Vector targets, double sigma)
    : x_(std::move(design)), y_(std::move(targets)), sigma_(sigma) {
  if (x_.rows() != y_.size()) throw std::invalid_argument("BLRModel: design/target size mismatch");
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_))
    throw std::invalid_argument("BLRModel: sigma must be positive");
  if (!x_.allFinite() || !y_.allFinite()) throw std::invalid_argument("BLRModel: non-finite data");
}

Batch BLRModel::full_batch() const {
  Batch b;
  b.inputs = x_.transpose();
  b.targets = y_.transpose();
  return b;
}

void BLRModel::init_params(ParamSet& params, Rng&) const {
  params.add("log_noise", Matrix::Constant(1, 1, std::log(sigma_)));
}

ad::Var BLRModel::log_prior(ad::Tape& tape, const Leaves&, ad::Var latent) const {
  return tape.std_normal_logpdf(latent);
}

ad::Var BLRModel::log_likelihood(ad::Tape& tape, const Leaves& leaves, ad::Var latent,
                                 const Batch& batch, Eigen::Index) const {
  // predictions are M x C: one column per theta sample.
  const ad::Var xt = tape.constant(batch.inputs.transpose());
  const ad::Var pred = tape.matmul(xt, latent);
  const ad::Var y = tape.constant(batch.targets.transpose());
  return tape.gaussian_logpdf(y, pred, leaves["log_noise"]);
}

BLRPosterior blr_exact_posterior(const BLRModel& model) {
  const Matrix& x = model.design();
  const Vector& y = model.targets();
  const double s2 = model.sigma() * model.sigma();
  const Eigen::Index d = x.cols();
  const Eigen::Index n = x.rows();

  Matrix lambda = x.transpose() * x / s2 + Matrix::Identity(d, d);
  Eigen::LLT<Matrix> llt(lambda);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("blr_exact_posterior: posterior precision is not positive definite");
  const Vector b = x.transpose() * y / s2;
  const Vector mean = llt.solve(b);
  const Matrix cov = llt.solve(Matrix::Identity(d, d));
  const Matrix l = llt.matrixL();
  const double log_det_lambda = 2.0 * l.diagonal().array().log().sum();

  const double log_evidence = -0.5 * static_cast<double>(n) * (kLog2Pi + std::log(s2)) -
                              0.5 * y.squaredNorm() / s2 + 0.5 * b.dot(mean) -
                              0.5 * log_det_lambda;
  return {GaussianDist(mean, Matrix(0.5 * (cov + cov.transpose()))), log_evidence};
}

GaussianDist blr_mean_field_fit(const BLRModel& model, Alpha alpha,
                                const MeanFieldFitOptions& options) {
  if (alpha.kind() == Alpha::Kind::NegInf || alpha.value() < 0.0)
    throw std::invalid_argument("blr_mean_field_fit: alpha must be >= 0");
  const BLRPosterior post = blr_exact_posterior(model);
  const Eigen::Index d = model.latent_dim();
  const bool limit_zero = alpha.kind() == Alpha::Kind::Finite && alpha.value() == 0.0;

  // For alpha > 0 the mean enters the divergence only through a
  // non-negative quadratic form in (mu_q - mu_post), so the optimal mean is
  // the posterior mean and the ascent runs over the log-scales alone.
  const Vector& mean = post.posterior.mean();
  auto make_q = [&](const Vector& rho) { return GaussianDist(mean, Vector((2.0 * rho.array()).exp())); };
  auto objective = [&](const Vector& rho) {
    if (!rho.allFinite() || rho.maxCoeff() > 300.0) return -std::numeric_limits<double>::infinity();
    const GaussianDist q = make_q(rho);
    if (limit_zero) return post.log_evidence - kl_gaussian(post.posterior, q);
    return post.log_evidence - renyi_gaussian(q, post.posterior, alpha);
  };

  // Start narrow so that alpha > 1 and alpha = +inf begin at a finite value.
  const Matrix lambda = post.posterior.precision();
  const double lmax = Eigen::SelfAdjointEigenSolver<Matrix>(lambda).eigenvalues().maxCoeff();
  Vector phi = Vector::Constant(d, -0.5 * std::log(lmax) - 0.5);

  auto gradient = [&](const Vector& at, double f0) {
    Vector g(at.size());
    for (Eigen::Index i = 0; i < at.size(); ++i) {
      Vector hi = at, lo = at;
      hi(i) += options.fd_step;
      lo(i) -= options.fd_step;
      const double fh = objective(hi);
      const double fl = objective(lo);
      if (std::isfinite(fh) && std::isfinite(fl))
        g(i) = (fh - fl) / (2.0 * options.fd_step);
      else if (std::isfinite(fl))
        g(i) = (f0 - fl) / options.fd_step;
      else if (std::isfinite(fh))
        g(i) = (fh - f0) / options.fd_step;
      else
        g(i) = 0.0;
    }
    return g;
  };

  double f = objective(phi);
  if (!std::isfinite(f)) throw ConvergenceError("blr_mean_field_fit: infeasible start", 0.0);
  double step = 1.0;
  double gnorm = std::numeric_limits<double>::infinity();
  double f_window = f;
  for (int it = 0; it < options.max_iters; ++it) {
    const Vector g = gradient(phi, f);
    gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm < options.grad_tol) return make_q(phi);
    // Armijo backtracking; the step grows again after each accepted move.
    step = std::min(1.0, step * 2.0);
    bool accepted = false;
    while (step > 1e-16) {
      const Vector cand = phi + step * g;
      if (cand == phi) break;
      const double fc = objective(cand);
      if (std::isfinite(fc) && fc > f && fc >= f + 1e-4 * step * g.squaredNorm()) {
        phi = cand;
        f = fc;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    // At alpha = +inf the maximizer sits on the boundary of the region where
    // the ratio stays bounded, so the gradient never vanishes there; accept
    // a stalled ascent instead.
    const bool boundary_ok = alpha.kind() == Alpha::Kind::PosInf;
    if (!accepted) {
      if (gnorm < 1e3 * options.grad_tol || boundary_ok) return make_q(phi);
      throw ConvergenceError("blr_mean_field_fit: line search failed", gnorm);
    }
    if (boundary_ok && it % 200 == 199) {
      if (f - f_window < 1e-10 * (1.0 + std::abs(f))) return make_q(phi);
      f_window = f;
    }
  }
  throw ConvergenceError("blr_mean_field_fit: no convergence after " +
                             std::to_string(options.max_iters) + " iterations",
                         gnorm);
}

BLRModel make_correlated_blr(std::uint64_t seed, Eigen::Index n, double sigma) {
  Rng rng = make_stream(seed, 0xb17);
  std::normal_distribution<double> normal;
  Matrix x(n, 2);
  Vector y(n);
  const Vector theta_true = (Vector(2) << 1.0, -0.5).finished();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = normal(rng);
    x(i, 0) = a;
    x(i, 1) = 0.9 * a + std::sqrt(1.0 - 0.81) * normal(rng);
  }
  for (Eigen::Index i = 0; i < n; ++i) y(i) = x.row(i).dot(theta_true) + sigma * normal(rng);
  return BLRModel(std::move(x), std::move(y), sigma);
}

}  // namespace vr
