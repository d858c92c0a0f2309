#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "gaussian_pairs.hpp"
#include "vr/alpha.hpp"
#include "vr/divergence.hpp"

namespace {

using vr::Alpha;
using vr::GaussianDist;
using vr::GridSpec;
using vr::Matrix;
using vr::Vector;

constexpr double kInf = std::numeric_limits<double>::infinity();

GaussianDist iso(std::initializer_list<double> mean) {
  Vector m(static_cast<Eigen::Index>(mean.size()));
  Eigen::Index i = 0;
  for (double v : mean) m(i++) = v;
  return GaussianDist(m, Vector(Vector::Ones(m.size())));
}

TEST(Alpha, ClassifiesEveryValue) {
  EXPECT_EQ(Alpha(1.0).kind(), Alpha::Kind::One);
  EXPECT_EQ(Alpha(1.0 + 5e-10).kind(), Alpha::Kind::One);
  EXPECT_EQ(Alpha(1.0 + 1e-6).kind(), Alpha::Kind::Finite);
  EXPECT_EQ(Alpha(0.0).kind(), Alpha::Kind::Finite);
  EXPECT_EQ(Alpha::pos_inf().kind(), Alpha::Kind::PosInf);
  EXPECT_EQ(Alpha::neg_inf().kind(), Alpha::Kind::NegInf);
  EXPECT_THROW(Alpha(std::nan("")), std::invalid_argument);
}

TEST(Alpha, ParsesAndPrintsRoundTrip) {
  EXPECT_EQ(Alpha::parse("inf"), Alpha::pos_inf());
  EXPECT_EQ(Alpha::parse("+Inf"), Alpha::pos_inf());
  EXPECT_EQ(Alpha::parse("-inf"), Alpha::neg_inf());
  EXPECT_EQ(Alpha::parse("0.3").value(), 0.3);
  EXPECT_THROW(Alpha::parse("abc"), std::invalid_argument);
  EXPECT_THROW(Alpha::parse("nan"), std::invalid_argument);
  EXPECT_EQ(Alpha(0.3).to_string(), "0.3");
  EXPECT_EQ(Alpha(-50.0).to_string(), "-50");
  EXPECT_EQ(Alpha::neg_inf().to_string(), "-inf");
  for (double a : {-2.0, 0.1, 0.9, 1.0 / 3.0}) EXPECT_EQ(Alpha::parse(Alpha(a).to_string()).value(), a);
}

TEST(Gaussian, RejectsInvalidCovariances) {
  EXPECT_THROW(GaussianDist(Vector::Zero(2), Vector(Vector::Constant(2, -1.0))), std::invalid_argument);
  Matrix asym(2, 2);
  asym << 1, 0.5, 0.2, 1;
  EXPECT_THROW(GaussianDist(Vector::Zero(2), asym), std::invalid_argument);
  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  EXPECT_THROW(GaussianDist(Vector::Zero(2), indefinite), std::invalid_argument);
}

TEST(Gaussian, LogPdfMatchesScalarFormula) {
  const GaussianDist g(Vector::Constant(1, 0.5), Vector(Vector::Constant(1, 4.0)));
  Vector x(1);
  x << 1.7;
  const double expected = -0.5 * std::log(2.0 * M_PI * 4.0) - 0.5 * (1.2 * 1.2) / 4.0;
  EXPECT_NEAR(g.log_pdf(x), expected, 1e-14);
}

TEST(RenyiGaussian, IdenticalDistributionsGiveZero) {
  Matrix cov(2, 2);
  cov << 2.0, 0.3, 0.3, 0.5;
  const GaussianDist p(Vector::Constant(2, 0.4), cov);
  EXPECT_NEAR(vr::renyi_gaussian(p, p, 0.7), 0.0, 1e-14);
  EXPECT_NEAR(vr::renyi_gaussian(p, p, 1.0), 0.0, 1e-14);
}

// Shifted unit Gaussians: D_alpha = alpha * |dmu|^2 / 2 and quadrature agrees.
TEST(RenyiGaussian, MatchesQuadratureOnTheShiftedPair) {
  const GaussianDist p = iso({0.0, 0.0});
  const GaussianDist q = iso({1.0, 1.0});
  const GridSpec grid{-8.0, 8.0, 0.01};
  const double q05 = vr::quadrature_oracle(p, q, 0.5, grid);
  const double q1 = vr::quadrature_oracle(p, q, 1.0, grid);
  const double q2 = vr::quadrature_oracle(p, q, 2.0, grid);
  EXPECT_NEAR(q05, 0.5, 1e-6);
  EXPECT_NEAR(q1, 1.0, 1e-6);
  EXPECT_NEAR(q2, 2.0, 1e-6);
  EXPECT_NEAR(vr::renyi_gaussian(p, q, 0.5), q05, 1e-6);
  EXPECT_NEAR(vr::renyi_gaussian(p, q, 1.0), q1, 1e-6);
  EXPECT_NEAR(vr::renyi_gaussian(p, q, 2.0), q2, 1e-6);
}

TEST(RenyiGaussian, OneDimensionalHalfAlpha) {
  const GaussianDist p = iso({0.0});
  const GaussianDist q = iso({1.0});
  const double oracle = vr::quadrature_oracle(p, q, 0.5, GridSpec{-8.0, 8.0, 0.01});
  EXPECT_NEAR(oracle, 0.25, 1e-6);
  EXPECT_NEAR(vr::renyi_gaussian(p, q, 0.5), oracle, 1e-6);
}

TEST(RenyiGaussian, InfiniteAlphaBranches) {
  const GaussianDist p = iso({0.0});
  const GaussianDist q = iso({1.0});
  EXPECT_EQ(vr::renyi_gaussian(p, q, Alpha::pos_inf()), kInf);
  EXPECT_EQ(vr::renyi_gaussian(p, q, Alpha::neg_inf()), -kInf);

  // Narrow p inside wide q: log max p/q is attained at the common mean.
  const GaussianDist narrow(Vector::Zero(1), Vector(Vector::Constant(1, 0.25)));
  const GaussianDist wide(Vector::Zero(1), Vector(Vector::Constant(1, 4.0)));
  EXPECT_NEAR(vr::renyi_gaussian(narrow, wide, Alpha::pos_inf()), std::log(4.0), 1e-12);
  EXPECT_NEAR(vr::renyi_gaussian(wide, narrow, Alpha::neg_inf()), -std::log(4.0), 1e-12);
  // Large finite alpha approaches the +inf value from below.
  EXPECT_LT(vr::renyi_gaussian(narrow, wide, 50.0), std::log(4.0));
  EXPECT_GT(vr::renyi_gaussian(narrow, wide, 50.0), std::log(4.0) - 0.05);
}

TEST(RenyiGaussian, ZeroAlphaIsZeroForFullSupport) {
  Matrix cov(2, 2);
  cov << 1.0, 0.8, 0.8, 1.0;
  EXPECT_EQ(vr::renyi_gaussian(iso({0.0, 0.0}), GaussianDist(Vector::Constant(2, 3.0), cov), 0.0), 0.0);
}

TEST(RenyiGaussian, NearOneRoutesToKl) {
  const GaussianDist p(Vector::Constant(1, 0.3), Vector(Vector::Constant(1, 0.7)));
  const GaussianDist q(Vector::Constant(1, -0.2), Vector(Vector::Constant(1, 1.9)));
  const double kl = vr::kl_gaussian(p, q);
  EXPECT_EQ(vr::renyi_gaussian(p, q, 1.0 + 1e-10), kl);
  // Either side of the tolerance band the closed form is continuous.
  EXPECT_NEAR(vr::renyi_gaussian(p, q, 1.0 + 1e-6), kl, 1e-6);
  EXPECT_NEAR(vr::renyi_gaussian(p, q, 1.0 - 1e-6), kl, 1e-6);
}

TEST(RenyiGaussian, DivergentMixtureKeepsTheSign) {
  // q much wider than p: alpha * Sigma_q + (1 - alpha) * Sigma_p fails for
  // alpha < 0, p much wider than q fails for alpha > 1.
  const GaussianDist tight(Vector::Zero(1), Vector(Vector::Constant(1, 0.1)));
  const GaussianDist wide(Vector::Zero(1), Vector(Vector::Constant(1, 10.0)));
  EXPECT_EQ(vr::renyi_gaussian(tight, wide, -2.0), -kInf);
  EXPECT_EQ(vr::renyi_gaussian(wide, tight, 5.0), kInf);
}

TEST(RenyiGaussian, RejectsDimensionMismatch) {
  EXPECT_THROW(vr::renyi_gaussian(iso({0.0}), iso({0.0, 0.0}), 0.5), std::invalid_argument);
}

TEST(Quadrature, IdenticalDistributionsGiveZero) {
  const GaussianDist p = iso({0.2, -0.1});
  EXPECT_NEAR(vr::quadrature_oracle(p, p, 2.0, GridSpec{-8.0, 8.0, 0.05}), 0.0, 1e-8);
}

TEST(Quadrature, RejectsBadGrids) {
  const GaussianDist p = iso({0.0});
  const GaussianDist q = iso({1.0});
  EXPECT_THROW(vr::quadrature_oracle(p, q, 0.5, GridSpec{-8.0, 8.0, 0.1}), std::invalid_argument);
  EXPECT_THROW(vr::quadrature_oracle(p, q, 0.5, GridSpec{-2.0, 2.0, 0.01}), std::invalid_argument);
  EXPECT_THROW(vr::quadrature_oracle(iso({0, 0, 0}), iso({0, 0, 1}), 0.5, GridSpec{}), std::invalid_argument);
  EXPECT_THROW(vr::quadrature_oracle(p, q, kInf, GridSpec{}), std::invalid_argument);
}

TEST(RenyiGaussian, CorrelatedPairMatchesQuadrature) {
  Matrix cp(2, 2), cq(2, 2);
  cp << 1.0, 0.6, 0.6, 1.5;
  cq << 0.8, -0.3, -0.3, 0.9;
  const GaussianDist p((Vector(2) << 0.3, -0.4).finished(), cp);
  const GaussianDist q((Vector(2) << -0.5, 0.2).finished(), cq);
  for (double a : {-0.5, 0.3, 0.9, 1.0, 1.2}) {
    const GridSpec grid = vrtest::oracle_grid(p, q, a, 10.0, 0.04);
    EXPECT_NEAR(vr::renyi_gaussian(p, q, a), vr::quadrature_oracle(p, q, a, grid), 1e-6) << "alpha=" << a;
  }
  // 2 * cq - cp is indefinite, so the integral diverges.
  EXPECT_EQ(vr::renyi_gaussian(p, q, 2.0), kInf);
}

class RandomPairs : public ::testing::Test {
 protected:
  static inline const std::vector<vrtest::GaussianPair> pairs = vrtest::random_pairs(2024, 12);
  static inline const std::vector<double> grid = {-5.0, -2.0, -1.0, -0.5, 0.0, 0.3, 0.5, 0.9, 1.0, 2.0, 3.0, 5.0};
};

TEST_F(RandomPairs, SkewSymmetry) {
  for (const auto& pr : pairs)
    for (double a : {-2.0, -0.5, 0.3, 0.5, 0.9, 2.0, 5.0}) {
      const double lhs = vr::renyi_gaussian(pr.p, pr.q, a);
      const double rhs = a / (1.0 - a) * vr::renyi_gaussian(pr.q, pr.p, 1.0 - a);
      if (std::isfinite(lhs) || std::isfinite(rhs)) EXPECT_NEAR(lhs, rhs, 1e-6 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_F(RandomPairs, NonDecreasingInAlphaWithCorrectSign) {
  for (const auto& pr : pairs) {
    double prev = -kInf;
    for (double a : grid) {
      const double v = vr::renyi_gaussian(pr.p, pr.q, a);
      if (!std::isfinite(v)) continue;
      EXPECT_GE(v, prev - 1e-12) << "alpha=" << a;
      if (a > 0.0) EXPECT_GE(v, -1e-12);
      if (a < 0.0) EXPECT_LE(v, 1e-12);
      prev = v;
    }
    EXPECT_GE(vr::renyi_gaussian(pr.p, pr.q, Alpha::pos_inf()), prev - 1e-12);
    EXPECT_LE(vr::renyi_gaussian(pr.p, pr.q, Alpha::neg_inf()), vr::renyi_gaussian(pr.p, pr.q, -5.0) + 1e-12);
  }
}

TEST_F(RandomPairs, MatchQuadratureOnSubsample) {
  for (std::size_t i = 0; i < 4; ++i)
    for (double a : {-2.0, 0.5, 5.0}) {
      const auto& pr = pairs[i];
      const GridSpec g = vrtest::oracle_grid(pr.p, pr.q, a, 10.0, 0.05);
      EXPECT_NEAR(vr::renyi_gaussian(pr.p, pr.q, a), vr::quadrature_oracle(pr.p, pr.q, a, g), 1e-6);
    }
}

}  // namespace
