#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace vr::ad {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Handle to a node recorded on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Minimal reverse-mode tape over dense matrices.
///
/// The op set is fixed to what the regression, BNN and VAE models need:
/// affine maps, elementwise nonlinearities, Gaussian and Bernoulli log
/// densities, column reshaping and grouped log-sum-exp. Binary elementwise
/// ops broadcast an operand that is rows x 1 (across columns) or 1 x 1.
///
/// A tape is single-use and not thread-safe; use one tape per worker.
class Tape {
 public:
  /// Leaf excluded from differentiation.
  Var constant(Matrix value);
  /// Leaf whose adjoint is recorded by backward().
  Var variable(Matrix value);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const { return nodes_[v.id].value(0, 0); }
  /// Adjoint accumulated by the last backward() call; empty for nodes that
  /// do not depend on any variable or received no gradient.
  const Matrix& grad(Var v) const { return nodes_[v.id].adj; }
  std::size_t size() const { return nodes_.size(); }

  /// Propagates `seed` (same shape as out's value) back through the tape.
  /// Adjoints from any previous call are discarded.
  void backward(Var out, const Matrix& seed);
  void backward(Var out);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double c);
  Var exp(Var a);
  Var tanh(Var a);
  Var relu(Var a);

  /// Repeats each column `times` times consecutively: column j of the result
  /// is column j / times of the input.
  Var repeat_cols(Var a, Index times);
  /// Reads rows*cols entries starting at `offset` of column `col` and
  /// reshapes them column-major.
  Var block(Var a, Index col, Index offset, Index rows, Index cols);
  /// Horizontal concatenation of inputs with equal row counts.
  Var concat_cols(std::span<const Var> parts);
  /// 1 x cols column sums.
  Var sum_rows(Var a);
  Var sum(Var a);

  /// Column sums of log N(x; mean, exp(log_scale)^2), elementwise; 1 x cols.
  Var gaussian_logpdf(Var x, Var mean, Var log_scale);
  /// Column sums of log N(x; 0, 1); 1 x cols.
  Var std_normal_logpdf(Var x);
  /// Column sums of the Bernoulli log-pmf of binary `x` under
  /// p = clamp(sigmoid(logits), 1e-7, 1 - 1e-7); 1 x cols.
  Var bernoulli_logpmf(Var logits, const Matrix& x);
  /// For a 1 x (G * group) row returns the 1 x G row of log-sum-exp over
  /// consecutive groups.
  Var logsumexp_groups(Var row, Index group);

  static constexpr double kProbClamp = 1e-7;

 private:
  enum class Op {
    Leaf,
    MatMul,
    Add,
    Sub,
    Mul,
    Scale,
    Exp,
    Tanh,
    Relu,
    RepeatCols,
    Block,
    Concat,
    SumRows,
    Sum,
    GaussLogPdf,
    StdNormLogPdf,
    BernoulliLogPmf,
    LogSumExpGroups,
  };

  struct Node {
    Op op = Op::Leaf;
    std::vector<std::size_t> in;
    Matrix value;
    Matrix adj;
    Matrix aux;
    double c = 0.0;
    Index i0 = 0;
    Index i1 = 0;
    bool track = false;
  };

  Var push(Node node);
  const Matrix& val(std::size_t id) const { return nodes_[id].value; }
  bool tracked(std::size_t id) const { return nodes_[id].track; }
  void accumulate(std::size_t id, const Matrix& contribution);

  std::vector<Node> nodes_;
};

}  // namespace vr::ad
