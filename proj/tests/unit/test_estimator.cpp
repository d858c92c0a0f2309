#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "vr/divergence.hpp"
#include "vr/estimator.hpp"
#include "vr/models/blr.hpp"
#include "vr/numeric.hpp"

namespace {

using vr::Alpha;
using vr::GaussianDist;
using vr::Matrix;
using vr::Vector;
using vr::WeightSet;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Alpha> all_branches() {
  return {Alpha::neg_inf(), Alpha(-2.0), Alpha(0.0), Alpha(0.5), Alpha(1.0), Alpha(2.0), Alpha::pos_inf()};
}

double est(std::vector<double> log_w, Alpha alpha) {
  return vr::mc_vr_estimate(WeightSet(std::move(log_w)), alpha).value;
}

TEST(WeightSet, RejectsInvalidEntries) {
  EXPECT_THROW(WeightSet(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(WeightSet(std::vector<double>{0.0, std::nan("")}), std::invalid_argument);
  EXPECT_THROW(WeightSet(std::vector<double>{0.0, kInf}), std::invalid_argument);
  EXPECT_THROW(WeightSet(std::vector<double>{-kInf, -kInf}), std::invalid_argument);
  EXPECT_NO_THROW(WeightSet(std::vector<double>{-kInf, 1.0}));
}

TEST(WeightSet, ArgExtremaPreferLowestIndex) {
  WeightSet w(std::vector<double>{1.0, 3.0, 3.0, -1.0, -1.0});
  EXPECT_EQ(w.argmax(), 1u);
  EXPECT_EQ(w.argmin(), 3u);
}

TEST(Logsumexp, HandlesNegativeInfinityAndLargeValues) {
  const std::vector<double> x{1000.0, 1000.0, -kInf};
  EXPECT_NEAR(vr::logsumexp(x), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> none{-kInf, -kInf};
  EXPECT_EQ(vr::logsumexp(none), -kInf);
  EXPECT_NEAR(vr::logsumexp_scaled(x, -1.0), -1000.0 + std::log(2.0), 1e-12);
}

TEST(McEstimate, TwoWeightExamples) {
  const std::vector<double> w{std::log(1.0), std::log(3.0)};
  EXPECT_NEAR(est(w, 0.0), std::log(2.0), 1e-15);
  EXPECT_EQ(est(w, Alpha::neg_inf()), std::log(3.0));
  EXPECT_EQ(est(w, Alpha::pos_inf()), 0.0);
  EXPECT_NEAR(est(w, 1.0), std::log(3.0) / 2.0, 1e-15);
  // alpha = 2: -log((1 + 1/3) / 2)
  EXPECT_NEAR(est(w, 2.0), -std::log(2.0 / 3.0), 1e-15);
}

TEST(McEstimate, SingleWeightIsAlphaInvariant) {
  for (double c : {-3.7, 0.0, 12.5})
    for (const Alpha& a : all_branches()) EXPECT_EQ(est({c}, a), c) << a.to_string();
  const auto single = vr::mc_vr_estimate(WeightSet(std::vector<double>{2.0}), 0.3);
  ASSERT_TRUE(single.k_samples.has_value());
  EXPECT_EQ(*single.k_samples, 1u);
}

TEST(McEstimate, EqualWeightsGiveTheCommonValue) {
  for (const Alpha& a : all_branches()) EXPECT_NEAR(est({0.0, 0.0, 0.0}, a), 0.0, 1e-15);
}

TEST(McEstimate, ShiftEquivariantOnEveryBranch) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> w(7), shifted(7);
    const double c = 10.0 * n(rng);
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = n(rng);
      shifted[i] = w[i] + c;
    }
    for (const Alpha& a : all_branches())
      EXPECT_NEAR(est(shifted, a), est(w, a) + c, 1e-12 * (1.0 + std::abs(c))) << a.to_string();
  }
}

TEST(McEstimate, NonIncreasingInAlpha) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> w(5);
    for (double& v : w) v = n(rng);
    double prev = kInf;
    for (const Alpha& a : all_branches()) {
      const double v = est(w, a);
      EXPECT_LE(v, prev + 1e-12) << a.to_string();
      prev = v;
    }
  }
}

TEST(McEstimate, ZeroDensitySamples) {
  const std::vector<double> w{-kInf, std::log(2.0)};
  EXPECT_NEAR(est(w, 0.0), std::log(2.0) - std::log(2.0), 1e-15);
  EXPECT_EQ(est(w, Alpha::neg_inf()), std::log(2.0));
  EXPECT_EQ(est(w, 1.0), -kInf);
  const auto min_branch = vr::mc_vr_estimate(WeightSet(w), Alpha::pos_inf());
  EXPECT_EQ(min_branch.value, -kInf);
  EXPECT_TRUE(min_branch.degenerate);
  const auto chi = vr::mc_vr_estimate(WeightSet(w), 2.0);
  EXPECT_EQ(chi.value, -kInf);
  EXPECT_TRUE(chi.degenerate);
}

TEST(McEstimate, ExtremeWeightsStayFinite) {
  const std::vector<double> w{-800.0, 800.0};
  EXPECT_NEAR(est(w, 0.0), 800.0 - std::log(2.0), 1e-9);
  EXPECT_NEAR(est(w, 2.0), -800.0 + std::log(2.0), 1e-9);
}

// Design with orthogonal columns so the posterior is diagonal.
vr::BLRModel small_blr() {
  Matrix x(4, 2);
  x << 1, 1, 1, -1, -1, 1, -1, -1;
  Vector y(4);
  y << 0.5, 1.2, -0.3, -1.0;
  return vr::BLRModel(x, y, 0.8);
}

TEST(ExactBound, PosteriorAndAlphaZeroGiveEvidence) {
  const vr::BLRModel m = small_blr();
  const vr::BLRPosterior post = vr::blr_exact_posterior(m);
  for (double a : {-2.0, 0.0, 0.5, 1.0, 3.0})
    EXPECT_NEAR(vr::exact_vr_bound_blr(m, post.posterior, a).value, post.log_evidence, 1e-10);
  const GaussianDist q(Vector::Constant(2, 0.7), Vector(Vector::Constant(2, 0.4)));
  EXPECT_NEAR(vr::exact_vr_bound_blr(m, q, 0.0).value, post.log_evidence, 1e-10);
  const auto b = vr::exact_vr_bound_blr(m, q, 0.5);
  EXPECT_FALSE(b.k_samples.has_value());
}

TEST(ExactBound, NonIncreasingInAlphaForAFixedQ) {
  const vr::BLRModel m = small_blr();
  const GaussianDist q(Vector::Constant(2, 0.7), Vector(Vector::Constant(2, 0.4)));
  const double l1 = vr::exact_vr_bound_blr(m, q, 1.0).value;
  const double lh = vr::exact_vr_bound_blr(m, q, 0.5).value;
  const double l0 = vr::exact_vr_bound_blr(m, q, 0.0).value;
  EXPECT_LT(l1, lh);
  EXPECT_LT(lh, l0);
}

TEST(ExactBound, ElboMatchesMonteCarlo) {
  const vr::BLRModel m = small_blr();
  const GaussianDist q(Vector::Constant(2, 0.3), Vector(Vector::Constant(2, 0.2)));
  const double exact = vr::exact_vr_bound_blr(m, q, 1.0).value;
  std::mt19937_64 rng(21);
  const int n = 20000;
  const Matrix theta = q.sample(rng, n);
  const GaussianDist prior = GaussianDist::standard(2);
  double mean = 0.0, sq = 0.0;
  for (int j = 0; j < n; ++j) {
    const Vector t = theta.col(j);
    const Vector r = m.targets() - m.design() * t;
    const double s2 = m.sigma() * m.sigma();
    const double loglik = -0.5 * r.squaredNorm() / s2 - 0.5 * r.size() * std::log(2.0 * M_PI * s2);
    const double lw = prior.log_pdf(t) + loglik - q.log_pdf(t);
    mean += lw;
    sq += lw * lw;
  }
  mean /= n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_NEAR(mean, exact, 3.0 * se);
}

TEST(BiasSimulation, TableLayoutAndKOneInvariance) {
  const GaussianDist p(Vector::Zero(2), Vector(Vector::Ones(2)));
  const GaussianDist q(Vector::Ones(2), Vector(Vector::Ones(2)));
  vr::BiasSimConfig cfg;
  cfg.alphas = {Alpha(-1.0), Alpha(0.0), Alpha(1.0), Alpha(2.0)};
  cfg.ks = {1, 5};
  cfg.repeats = 300;
  cfg.seed = 4;
  const vr::BiasTable t = vr::bias_simulation(p, q, cfg);
  ASSERT_EQ(t.rows.size(), 8u);
  // Exact column is -D_alpha[q || p] = -alpha for unit-variance shift [1, 1].
  for (double a : {-1.0, 0.0, 1.0, 2.0}) EXPECT_NEAR(t.at(a, 1).exact, -a, 1e-6);
  const auto& ref = t.at(1.0, 1);
  EXPECT_NEAR(ref.mean, -1.0, 3.0 * ref.stderr_);
  for (double a : {-1.0, 0.0, 2.0}) {
    const auto& r = t.at(a, 1);
    EXPECT_NEAR(r.mean, ref.mean, 3.0 * std::hypot(r.stderr_, ref.stderr_));
  }
  EXPECT_THROW(t.at(0.5, 1), std::out_of_range);

  std::ostringstream os;
  t.write_csv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "alpha,K,mean,stderr,exact");
}

TEST(BiasSimulation, IndependentOfThreadCount) {
  const GaussianDist p(Vector::Zero(1), Vector(Vector::Ones(1)));
  const GaussianDist q(Vector::Ones(1), Vector(Vector::Constant(1, 1.5)));
  vr::BiasSimConfig cfg;
  cfg.alphas = {Alpha(0.0), Alpha(0.5)};
  cfg.ks = {1, 5, 10};
  cfg.repeats = 50;
  cfg.seed = 9;
  const auto a = vr::bias_simulation(p, q, cfg);
  cfg.threads = 3;
  const auto b = vr::bias_simulation(p, q, cfg);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].mean, b.rows[i].mean);
    EXPECT_EQ(a.rows[i].stderr_, b.rows[i].stderr_);
  }
}

TEST(BiasSimulation, ValidatesInputs) {
  const GaussianDist p(Vector::Zero(1), Vector(Vector::Ones(1)));
  const GaussianDist q2(Vector::Zero(2), Vector(Vector::Ones(2)));
  vr::BiasSimConfig cfg;
  cfg.alphas = {Alpha(0.0)};
  cfg.ks = {1};
  EXPECT_THROW(vr::bias_simulation(p, q2, cfg), std::invalid_argument);
  cfg.ks = {0};
  EXPECT_THROW(vr::bias_simulation(p, p, cfg), std::invalid_argument);
  cfg.ks = {1};
  cfg.repeats = 1;
  EXPECT_THROW(vr::bias_simulation(p, p, cfg), std::invalid_argument);
  cfg.repeats = 10;
  cfg.alphas.clear();
  EXPECT_THROW(vr::bias_simulation(p, p, cfg), std::invalid_argument);
}

}  // namespace
