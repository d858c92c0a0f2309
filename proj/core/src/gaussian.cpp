#include "vr/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace vr {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

GaussianDist::GaussianDist(Vector mean, const Vector& variances)
    : mean_(std::move(mean)), diagonal_(true) {
  if (variances.size() != mean_.size())
    throw std::invalid_argument("GaussianDist: mean and variance sizes differ");
  for (Eigen::Index i = 0; i < variances.size(); ++i)
    if (!(variances(i) > 0.0) || !std::isfinite(variances(i)))
      throw std::invalid_argument("GaussianDist: variances must be positive and finite");
  cov_ = variances.asDiagonal();
  factorize();
}

GaussianDist::GaussianDist(Vector mean, Matrix covariance)
    : mean_(std::move(mean)), cov_(std::move(covariance)), diagonal_(false) {
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size())
    throw std::invalid_argument("GaussianDist: covariance shape does not match mean");
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("GaussianDist: covariance is not symmetric");
  cov_ = 0.5 * (cov_ + cov_.transpose());
  factorize();
}

GaussianDist GaussianDist::standard(Eigen::Index dim) {
  return GaussianDist(Vector::Zero(dim), Vector(Vector::Ones(dim)));
}

void GaussianDist::factorize() {
  if (!mean_.allFinite()) throw std::invalid_argument("GaussianDist: mean must be finite");
  Eigen::LLT<Matrix> llt(cov_);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("GaussianDist: covariance is not positive definite");
  chol_ = llt.matrixL();
  log_det_ = 2.0 * chol_.diagonal().array().log().sum();
  if (!std::isfinite(log_det_))
    throw std::invalid_argument("GaussianDist: covariance is not positive definite");
}

Matrix GaussianDist::precision() const {
  Matrix eye = Matrix::Identity(dim(), dim());
  Matrix linv = chol_.triangularView<Eigen::Lower>().solve(eye);
  return linv.transpose() * linv;
}

double GaussianDist::log_pdf(const Vector& x) const {
  Vector z = chol_.triangularView<Eigen::Lower>().solve(x - mean_);
  return -0.5 * (static_cast<double>(dim()) * kLog2Pi + log_det_ + z.squaredNorm());
}

Vector GaussianDist::log_pdf_cols(const Matrix& xs) const {
  Matrix centered = xs.colwise() - mean_;
  Matrix z = chol_.triangularView<Eigen::Lower>().solve(centered);
  Vector out = z.colwise().squaredNorm().transpose();
  return (-0.5 * (out.array() + static_cast<double>(dim()) * kLog2Pi + log_det_)).matrix();
}

Matrix GaussianDist::transform(const Matrix& eps) const {
  if (eps.rows() != dim()) throw std::invalid_argument("GaussianDist: noise dimension mismatch");
  return (chol_.triangularView<Eigen::Lower>() * eps).colwise() + mean_;
}

}  // namespace vr
