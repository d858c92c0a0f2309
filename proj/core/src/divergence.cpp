#include "vr/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace vr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_same_dim(const GaussianDist& p, const GaussianDist& q) {
  if (p.dim() != q.dim())
    throw std::invalid_argument("renyi: distributions have different dimensions");
}

// Finite alpha outside {0, 1}.
double renyi_closed_form(const GaussianDist& p, const GaussianDist& q, double alpha) {
  Matrix mix = alpha * q.covariance() + (1.0 - alpha) * p.covariance();
  mix = 0.5 * (mix + mix.transpose());
  Eigen::LLT<Matrix> llt(mix);
  const bool spd = llt.info() == Eigen::Success &&
                   (llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all();
  if (!spd) return alpha > 1.0 ? kInf : -kInf;
  const Matrix l = llt.matrixL();
  const double log_det_mix = 2.0 * l.diagonal().array().log().sum();
  const Vector diff = q.mean() - p.mean();
  const Vector z = l.triangularView<Eigen::Lower>().solve(diff);
  const double quad = 0.5 * alpha * z.squaredNorm();
  const double dets = log_det_mix - (1.0 - alpha) * p.log_det() - alpha * q.log_det();
  return quad - dets / (2.0 * (alpha - 1.0));
}

}  // namespace

double kl_gaussian(const GaussianDist& p, const GaussianDist& q) {
  check_same_dim(p, q);
  const auto lq = q.cholesky().triangularView<Eigen::Lower>();
  const Matrix m = lq.solve(p.cholesky());
  const Vector z = lq.solve(q.mean() - p.mean());
  const double d = static_cast<double>(p.dim());
  return 0.5 * (m.squaredNorm() + z.squaredNorm() - d + q.log_det() - p.log_det());
}

double log_max_ratio(const GaussianDist& p, const GaussianDist& q) {
  check_same_dim(p, q);
  const Matrix pp = p.precision();
  const Matrix pq = q.precision();
  Matrix a = pp - pq;
  a = 0.5 * (a + a.transpose());
  const Vector b = pp * p.mean() - pq * q.mean();
  const double c = -0.5 * p.mean().dot(pp * p.mean()) + 0.5 * q.mean().dot(pq * q.mean()) +
                   0.5 * (q.log_det() - p.log_det());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  const Vector lambda = eig.eigenvalues();
  const Vector bt = eig.eigenvectors().transpose() * b;
  const double scale = std::max({1.0, pp.cwiseAbs().maxCoeff(), pq.cwiseAbs().maxCoeff()});
  const double tol = 1e-10 * scale;
  const double btol = 1e-10 * std::max(1.0, b.cwiseAbs().maxCoeff());

  double best = c;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > tol) {
      best += 0.5 * bt(i) * bt(i) / lambda(i);
    } else if (lambda(i) < -tol) {
      return kInf;
    } else if (std::abs(bt(i)) > btol) {
      return kInf;
    }
  }
  return best;
}

double renyi_gaussian(const GaussianDist& p, const GaussianDist& q, Alpha alpha) {
  check_same_dim(p, q);
  switch (alpha.kind()) {
    case Alpha::Kind::One:
      return kl_gaussian(p, q);
    case Alpha::Kind::PosInf:
      return log_max_ratio(p, q);
    case Alpha::Kind::NegInf:
      return -log_max_ratio(q, p);
    case Alpha::Kind::Finite:
      break;
  }
  if (alpha.value() == 0.0) return 0.0;
  return renyi_closed_form(p, q, alpha.value());
}

GridSpec GridSpec::covering(const GaussianDist& p, const GaussianDist& q, double n_sigma,
                            double step) {
  check_same_dim(p, q);
  double lo = kInf;
  double hi = -kInf;
  for (const GaussianDist* g : {&p, &q}) {
    const Vector sd = g->variances().array().sqrt();
    lo = std::min(lo, (g->mean() - n_sigma * sd).minCoeff());
    hi = std::max(hi, (g->mean() + n_sigma * sd).maxCoeff());
  }
  return GridSpec{lo, hi, step};
}

double quadrature_oracle(const GaussianDist& p, const GaussianDist& q, double alpha,
                         const GridSpec& grid) {
  check_same_dim(p, q);
  const Eigen::Index d = p.dim();
  if (d < 1 || d > 2) throw std::invalid_argument("quadrature_oracle: dimension must be 1 or 2");
  if (!std::isfinite(alpha)) throw std::invalid_argument("quadrature_oracle: alpha must be finite");
  if (!(grid.step > 0.0) || grid.step > GridSpec::kMaxStep)
    throw std::invalid_argument("quadrature_oracle: grid step must be in (0, 0.05]");
  if (!(grid.upper > grid.lower)) throw std::invalid_argument("quadrature_oracle: empty grid");
  for (const GaussianDist* g : {&p, &q}) {
    const Vector sd = g->variances().array().sqrt();
    if ((g->mean() - 4.0 * sd).minCoeff() < grid.lower ||
        (g->mean() + 4.0 * sd).maxCoeff() > grid.upper)
      throw std::invalid_argument(
          "quadrature_oracle: grid must span 8 standard deviations of both distributions");
  }

  const auto n = static_cast<Eigen::Index>(std::llround((grid.upper - grid.lower) / grid.step));
  const double h = (grid.upper - grid.lower) / static_cast<double>(n);
  Vector axis(n + 1);
  Vector log_w1(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    axis(i) = grid.lower + h * static_cast<double>(i);
    log_w1(i) = std::log((i == 0 || i == n) ? 0.5 * h : h);
  }

  // Points in column-major grid order with matching log trapezoid weights.
  const Eigen::Index count = d == 1 ? n + 1 : (n + 1) * (n + 1);
  Matrix pts(d, count);
  Vector log_w(count);
  if (d == 1) {
    pts.row(0) = axis.transpose();
    log_w = log_w1;
  } else {
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j <= n; ++j)
      for (Eigen::Index i = 0; i <= n; ++i, ++c) {
        pts(0, c) = axis(i);
        pts(1, c) = axis(j);
        log_w(c) = log_w1(i) + log_w1(j);
      }
  }
  const Vector lp = p.log_pdf_cols(pts);
  const Vector lq = q.log_pdf_cols(pts);

  if (std::abs(alpha - 1.0) <= Alpha::kOneTolerance) {
    double acc = 0.0;
    for (Eigen::Index c = 0; c < count; ++c) acc += std::exp(log_w(c) + lp(c)) * (lp(c) - lq(c));
    return acc;
  }

  Vector terms = alpha == 0.0 ? Vector(log_w + lq)
                              : Vector(log_w + alpha * lp + (1.0 - alpha) * lq);
  const double m = terms.maxCoeff();
  const double log_integral = m + std::log((terms.array() - m).exp().sum());
  if (alpha == 0.0) return -log_integral;
  return log_integral / (alpha - 1.0);
}

}  // namespace vr
