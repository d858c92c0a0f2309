#pragma once

#include <Eigen/Dense>
#include <random>

namespace vr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Multivariate Gaussian with either diagonal or full covariance.
///
/// The Cholesky factor is computed once at construction; construction fails
/// with std::invalid_argument if the covariance is not symmetric positive
/// definite.
class GaussianDist {
 public:
  GaussianDist(Vector mean, const Vector& variances);
  GaussianDist(Vector mean, Matrix covariance);

  static GaussianDist standard(Eigen::Index dim);

  Eigen::Index dim() const { return mean_.size(); }
  bool is_diagonal() const { return diagonal_; }
  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return cov_; }
  const Matrix& cholesky() const { return chol_; }
  Vector variances() const { return cov_.diagonal(); }
  Matrix precision() const;
  double log_det() const { return log_det_; }

  double log_pdf(const Vector& x) const;
  /// Column-wise log density of a d x n matrix of points.
  Vector log_pdf_cols(const Matrix& xs) const;

  /// Maps standard-normal noise (d x n) to samples mean + L * eps.
  Matrix transform(const Matrix& eps) const;

  template <class Rng>
  Matrix sample(Rng& rng, Eigen::Index n) const {
    std::normal_distribution<double> normal;
    Matrix eps(dim(), n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < dim(); ++i) eps(i, j) = normal(rng);
    return transform(eps);
  }

 private:
  void factorize();

  Vector mean_;
  Matrix cov_;
  Matrix chol_;
  double log_det_ = 0.0;
  bool diagonal_ = false;
};

}  // namespace vr
