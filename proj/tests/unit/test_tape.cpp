#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "vr/gradient.hpp"
#include "vr/tape.hpp"

namespace {

using vr::ad::Matrix;
using vr::ad::Tape;
using vr::ad::Var;

using Builder = std::function<Var(Tape&, const std::vector<Var>&)>;

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

// Checks every input adjoint against central differences of <seed, out>
// for a random seed matrix.
double op_gradient_error(const std::vector<Matrix>& inputs, const Builder& build, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  Matrix seed_m;
  auto evaluate = [&](const std::vector<Matrix>& in, Tape& tape, std::vector<Var>& leaves) {
    leaves.clear();
    for (const Matrix& m : in) leaves.push_back(tape.variable(m));
    return build(tape, leaves);
  };

  Tape tape;
  std::vector<Var> leaves;
  const Var out = evaluate(inputs, tape, leaves);
  seed_m = random_matrix(rng, tape.value(out).rows(), tape.value(out).cols());
  tape.backward(out, seed_m);

  Eigen::Index total = 0;
  for (const Matrix& m : inputs) total += m.size();
  Eigen::VectorXd flat(total), grad(total);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Matrix& g = tape.grad(leaves[i]);
    for (Eigen::Index j = 0; j < inputs[i].size(); ++j, ++at) {
      flat(at) = inputs[i].data()[j];
      grad(at) = g.size() == 0 ? 0.0 : g.data()[j];
    }
  }
  auto f = [&](const Eigen::VectorXd& v) {
    std::vector<Matrix> in = inputs;
    Eigen::Index pos = 0;
    for (Matrix& m : in)
      for (Eigen::Index j = 0; j < m.size(); ++j) m.data()[j] = v(pos++);
    Tape t;
    std::vector<Var> l;
    return (t.value(evaluate(in, t, l)).array() * seed_m.array()).sum();
  };
  return vr::finite_diff_check(f, flat, grad, 1e-6);
}

class TapeOps : public ::testing::Test {
 protected:
  std::mt19937_64 rng{99};
  Matrix m(Eigen::Index r, Eigen::Index c, double scale = 1.0) { return random_matrix(rng, r, c, scale); }
};

TEST_F(TapeOps, MatMul) {
  EXPECT_LT(op_gradient_error({m(3, 4), m(4, 2)}, [](Tape& t, const auto& v) { return t.matmul(v[0], v[1]); }), 1e-6);
}

TEST_F(TapeOps, BroadcastingArithmetic) {
  EXPECT_LT(op_gradient_error({m(3, 4), m(3, 1)}, [](Tape& t, const auto& v) { return t.add(v[0], v[1]); }), 1e-6);
  EXPECT_LT(op_gradient_error({m(3, 1), m(3, 4)}, [](Tape& t, const auto& v) { return t.sub(v[0], v[1]); }), 1e-6);
  EXPECT_LT(op_gradient_error({m(3, 4), m(1, 1)}, [](Tape& t, const auto& v) { return t.mul(v[0], v[1]); }), 1e-6);
  EXPECT_LT(op_gradient_error({m(3, 4), m(3, 4)}, [](Tape& t, const auto& v) { return t.mul(v[0], v[1]); }), 1e-6);
  EXPECT_LT(op_gradient_error({m(2, 3)}, [](Tape& t, const auto& v) { return t.scale(v[0], -2.5); }), 1e-6);
}

TEST_F(TapeOps, ElementwiseNonlinearities) {
  EXPECT_LT(op_gradient_error({m(3, 3)}, [](Tape& t, const auto& v) { return t.exp(v[0]); }), 1e-6);
  EXPECT_LT(op_gradient_error({m(3, 3)}, [](Tape& t, const auto& v) { return t.tanh(v[0]); }), 1e-6);
  EXPECT_LT(op_gradient_error({m(4, 4)}, [](Tape& t, const auto& v) { return t.relu(v[0]); }), 1e-6);
}

TEST_F(TapeOps, Reshaping) {
  EXPECT_LT(op_gradient_error({m(2, 3)}, [](Tape& t, const auto& v) { return t.repeat_cols(v[0], 3); }), 1e-6);
  EXPECT_LT(op_gradient_error({m(12, 2)}, [](Tape& t, const auto& v) { return t.block(v[0], 1, 2, 3, 2); }), 1e-6);
  EXPECT_LT(op_gradient_error({m(2, 1), m(2, 3)},
                              [](Tape& t, const auto& v) {
                                const Var parts[] = {v[1], v[0], v[1]};
                                return t.concat_cols(parts);
                              }),
            1e-6);
  EXPECT_LT(op_gradient_error({m(3, 4)}, [](Tape& t, const auto& v) { return t.sum_rows(v[0]); }), 1e-6);
  EXPECT_LT(op_gradient_error({m(3, 4)}, [](Tape& t, const auto& v) { return t.sum(v[0]); }), 1e-6);
}

TEST_F(TapeOps, Densities) {
  EXPECT_LT(op_gradient_error({m(3, 4), m(3, 1), m(3, 1, 0.3)},
                              [](Tape& t, const auto& v) { return t.gaussian_logpdf(v[0], v[1], v[2]); }),
            1e-6);
  EXPECT_LT(op_gradient_error({m(3, 4), m(3, 4), m(1, 1, 0.3)},
                              [](Tape& t, const auto& v) { return t.gaussian_logpdf(v[0], v[1], v[2]); }),
            1e-6);
  EXPECT_LT(op_gradient_error({m(3, 4)}, [](Tape& t, const auto& v) { return t.std_normal_logpdf(v[0]); }), 1e-6);
  Matrix x(3, 4);
  x << 1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 0;
  EXPECT_LT(op_gradient_error({m(3, 4, 2.0)}, [x](Tape& t, const auto& v) { return t.bernoulli_logpmf(v[0], x); }),
            1e-6);
}

TEST_F(TapeOps, GroupedLogSumExp) {
  EXPECT_LT(op_gradient_error({m(1, 6, 3.0)}, [](Tape& t, const auto& v) { return t.logsumexp_groups(v[0], 3); }),
            1e-6);
}

TEST_F(TapeOps, ComposedGraphReusesNodes) {
  EXPECT_LT(op_gradient_error({m(3, 2), m(2, 4)},
                              [](Tape& t, const auto& v) {
                                const Var h = t.tanh(t.matmul(v[0], v[1]));
                                return t.sum_rows(t.mul(h, t.exp(h)));
                              }),
            1e-6);
}

TEST(Tape, DensityValues) {
  Tape t;
  Matrix x(2, 1), mu(2, 1), ls(2, 1);
  x << 0.5, -1.0;
  mu << 0.0, 1.0;
  ls << std::log(2.0), 0.0;
  const Var g = t.gaussian_logpdf(t.constant(x), t.constant(mu), t.constant(ls));
  const double expected = -0.5 * 0.0625 - std::log(2.0) - 0.5 * 4.0 - std::log(2.0 * M_PI);
  EXPECT_NEAR(t.scalar(g), expected, 1e-14);

  Matrix zeros = Matrix::Zero(5, 2);
  Matrix bits(5, 2);
  bits << 1, 0, 0, 1, 1, 1, 0, 0, 1, 0;
  const Var b = t.bernoulli_logpmf(t.constant(zeros), bits);
  EXPECT_NEAR(t.value(b)(0, 0), -5.0 * std::log(2.0), 1e-14);
  EXPECT_NEAR(t.value(b)(0, 1), -5.0 * std::log(2.0), 1e-14);
}

TEST(Tape, BernoulliClampKeepsValuesFinite) {
  Tape t;
  Matrix logits(1, 2);
  logits << 500.0, -500.0;
  Matrix bits(1, 2);
  bits << 0.0, 1.0;
  const Var logit_var = t.variable(logits);
  const Var b = t.bernoulli_logpmf(logit_var, bits);
  EXPECT_NEAR(t.value(b)(0, 0), std::log(Tape::kProbClamp), 1e-9);
  EXPECT_NEAR(t.value(b)(0, 1), std::log(Tape::kProbClamp), 1e-9);
  t.backward(t.sum(b));
  EXPECT_EQ(t.grad(logit_var)(0, 0), 0.0);
  EXPECT_EQ(t.grad(logit_var)(0, 1), 0.0);
}

TEST(Tape, ConstantsReceiveNoGradient) {
  Tape t;
  const Var c = t.constant(Matrix::Ones(2, 2));
  const Var v = t.variable(Matrix::Ones(2, 2));
  t.backward(t.sum(t.mul(c, v)));
  EXPECT_EQ(t.grad(c).size(), 0);
  EXPECT_EQ(t.grad(v), Matrix::Ones(2, 2));
}

TEST(Tape, RepeatedBackwardDiscardsOldAdjoints) {
  Tape t;
  const Var v = t.variable(Matrix::Constant(1, 1, 3.0));
  const Var out = t.scale(v, 2.0);
  t.backward(out);
  t.backward(out);
  EXPECT_EQ(t.grad(v)(0, 0), 2.0);
}

TEST(Tape, RejectsShapeErrors) {
  Tape t;
  const Var a = t.variable(Matrix::Ones(2, 3));
  const Var b = t.variable(Matrix::Ones(2, 2));
  EXPECT_THROW(t.matmul(a, b), std::invalid_argument);
  EXPECT_THROW(t.add(a, b), std::invalid_argument);
  EXPECT_THROW(t.block(a, 0, 5, 2, 1), std::invalid_argument);
  EXPECT_THROW(t.logsumexp_groups(a, 2), std::invalid_argument);
  EXPECT_THROW(t.backward(a, Matrix::Ones(3, 3)), std::invalid_argument);
}

}  // namespace
