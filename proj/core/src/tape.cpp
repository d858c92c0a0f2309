#include "vr/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vr::ad {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

struct Shape {
  Index rows;
  Index cols;
};

Shape broadcast_shape(std::initializer_list<const Matrix*> ms) {
  Shape s{1, 1};
  for (const Matrix* m : ms) {
    s.rows = std::max(s.rows, m->rows());
    s.cols = std::max(s.cols, m->cols());
  }
  for (const Matrix* m : ms) {
    const bool same = m->rows() == s.rows && m->cols() == s.cols;
    const bool column = m->rows() == s.rows && m->cols() == 1;
    const bool scalar = m->rows() == 1 && m->cols() == 1;
    if (!(same || column || scalar))
      throw std::invalid_argument("tape: incompatible operand shapes " + std::to_string(m->rows()) +
                                  "x" + std::to_string(m->cols()) + " vs " +
                                  std::to_string(s.rows) + "x" + std::to_string(s.cols));
  }
  return s;
}

Matrix expand(const Matrix& m, Shape s) {
  if (m.rows() == s.rows && m.cols() == s.cols) return m;
  if (m.rows() == 1 && m.cols() == 1) return Matrix::Constant(s.rows, s.cols, m(0, 0));
  return m.replicate(1, s.cols);
}

Matrix reduce(const Matrix& g, const Matrix& like) {
  if (g.rows() == like.rows() && g.cols() == like.cols()) return g;
  if (like.rows() == 1 && like.cols() == 1) return Matrix::Constant(1, 1, g.sum());
  return g.rowwise().sum();
}

double sigmoid(double l) {
  if (l >= 0.0) return 1.0 / (1.0 + std::exp(-l));
  const double e = std::exp(l);
  return e / (1.0 + e);
}

}  // namespace

Var Tape::push(Node node) {
  if (node.op != Op::Leaf)
    node.track = std::any_of(node.in.begin(), node.in.end(), [&](std::size_t i) { return nodes_[i].track; });
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Var Tape::constant(Matrix value) {
  Node n;
  n.op = Op::Leaf;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::variable(Matrix value) {
  Node n;
  n.op = Op::Leaf;
  n.track = true;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
  if (val(a.id).cols() != val(b.id).rows()) throw std::invalid_argument("tape: matmul shape mismatch");
  Node n;
  n.op = Op::MatMul;
  n.in = {a.id, b.id};
  n.value = val(a.id) * val(b.id);
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  const Shape s = broadcast_shape({&val(a.id), &val(b.id)});
  Node n;
  n.op = Op::Add;
  n.in = {a.id, b.id};
  n.value = expand(val(a.id), s) + expand(val(b.id), s);
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  const Shape s = broadcast_shape({&val(a.id), &val(b.id)});
  Node n;
  n.op = Op::Sub;
  n.in = {a.id, b.id};
  n.value = expand(val(a.id), s) - expand(val(b.id), s);
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  const Shape s = broadcast_shape({&val(a.id), &val(b.id)});
  Node n;
  n.op = Op::Mul;
  n.in = {a.id, b.id};
  n.value = expand(val(a.id), s).cwiseProduct(expand(val(b.id), s));
  return push(std::move(n));
}

Var Tape::scale(Var a, double c) {
  Node n;
  n.op = Op::Scale;
  n.in = {a.id};
  n.c = c;
  n.value = c * val(a.id);
  return push(std::move(n));
}

Var Tape::exp(Var a) {
  Node n;
  n.op = Op::Exp;
  n.in = {a.id};
  n.value = val(a.id).array().exp().matrix();
  return push(std::move(n));
}

Var Tape::tanh(Var a) {
  Node n;
  n.op = Op::Tanh;
  n.in = {a.id};
  n.value = val(a.id).array().tanh().matrix();
  return push(std::move(n));
}

Var Tape::relu(Var a) {
  Node n;
  n.op = Op::Relu;
  n.in = {a.id};
  n.value = val(a.id).cwiseMax(0.0);
  return push(std::move(n));
}

Var Tape::repeat_cols(Var a, Index times) {
  if (times < 1) throw std::invalid_argument("tape: repeat_cols needs times >= 1");
  const Matrix& in = val(a.id);
  Node n;
  n.op = Op::RepeatCols;
  n.in = {a.id};
  n.i0 = times;
  n.value.resize(in.rows(), in.cols() * times);
  for (Index j = 0; j < in.cols(); ++j)
    n.value.middleCols(j * times, times) = in.col(j).replicate(1, times);
  return push(std::move(n));
}

Var Tape::block(Var a, Index col, Index offset, Index rows, Index cols) {
  const Matrix& in = val(a.id);
  if (col < 0 || col >= in.cols() || offset < 0 || offset + rows * cols > in.rows())
    throw std::invalid_argument("tape: block out of range");
  Node n;
  n.op = Op::Block;
  n.in = {a.id};
  n.i0 = col;
  n.i1 = offset;
  n.value = Eigen::Map<const Matrix>(in.col(col).data() + offset, rows, cols);
  return push(std::move(n));
}

Var Tape::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("tape: concat of nothing");
  const Index rows = val(parts.front().id).rows();
  Index cols = 0;
  for (Var p : parts) {
    if (val(p.id).rows() != rows) throw std::invalid_argument("tape: concat row mismatch");
    cols += val(p.id).cols();
  }
  Node n;
  n.op = Op::Concat;
  n.value.resize(rows, cols);
  Index c = 0;
  for (Var p : parts) {
    n.in.push_back(p.id);
    n.value.middleCols(c, val(p.id).cols()) = val(p.id);
    c += val(p.id).cols();
  }
  return push(std::move(n));
}

Var Tape::sum_rows(Var a) {
  Node n;
  n.op = Op::SumRows;
  n.in = {a.id};
  n.value = val(a.id).colwise().sum();
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  Node n;
  n.op = Op::Sum;
  n.in = {a.id};
  n.value = Matrix::Constant(1, 1, val(a.id).sum());
  return push(std::move(n));
}

Var Tape::gaussian_logpdf(Var x, Var mean, Var log_scale) {
  const Shape s = broadcast_shape({&val(x.id), &val(mean.id), &val(log_scale.id)});
  const Matrix ls = expand(val(log_scale.id), s);
  const Matrix z =
      ((expand(val(x.id), s) - expand(val(mean.id), s)).array() * (-ls.array()).exp()).matrix();
  Node n;
  n.op = Op::GaussLogPdf;
  n.in = {x.id, mean.id, log_scale.id};
  n.value = (-0.5 * z.array().square() - ls.array() - kHalfLog2Pi).matrix().colwise().sum();
  return push(std::move(n));
}

Var Tape::std_normal_logpdf(Var x) {
  Node n;
  n.op = Op::StdNormLogPdf;
  n.in = {x.id};
  n.value = (-0.5 * val(x.id).array().square() - kHalfLog2Pi).matrix().colwise().sum();
  return push(std::move(n));
}

Var Tape::bernoulli_logpmf(Var logits, const Matrix& x) {
  const Matrix& l = val(logits.id);
  if (x.rows() != l.rows() || x.cols() != l.cols())
    throw std::invalid_argument("tape: bernoulli_logpmf shape mismatch");
  Node n;
  n.op = Op::BernoulliLogPmf;
  n.in = {logits.id};
  n.aux = x;
  n.value.setZero(1, l.cols());
  for (Index j = 0; j < l.cols(); ++j) {
    double acc = 0.0;
    for (Index i = 0; i < l.rows(); ++i) {
      const double p = std::clamp(sigmoid(l(i, j)), kProbClamp, 1.0 - kProbClamp);
      acc += x(i, j) * std::log(p) + (1.0 - x(i, j)) * std::log1p(-p);
    }
    n.value(0, j) = acc;
  }
  return push(std::move(n));
}

Var Tape::logsumexp_groups(Var row, Index group) {
  const Matrix& r = val(row.id);
  if (r.rows() != 1 || group < 1 || r.cols() % group != 0)
    throw std::invalid_argument("tape: logsumexp_groups needs a 1 x (G*group) row");
  const Index groups = r.cols() / group;
  Node n;
  n.op = Op::LogSumExpGroups;
  n.in = {row.id};
  n.i0 = group;
  n.value.resize(1, groups);
  for (Index g = 0; g < groups; ++g) {
    const auto seg = r.middleCols(g * group, group);
    const double m = seg.maxCoeff();
    if (m == -std::numeric_limits<double>::infinity()) {
      n.value(0, g) = m;
      continue;
    }
    n.value(0, g) = m + std::log((seg.array() - m).exp().sum());
  }
  return push(std::move(n));
}

void Tape::accumulate(std::size_t id, const Matrix& contribution) {
  if (!nodes_[id].track) return;
  Matrix& adj = nodes_[id].adj;
  if (adj.size() == 0)
    adj = contribution;
  else
    adj += contribution;
}

void Tape::backward(Var out) {
  backward(out, Matrix::Ones(val(out.id).rows(), val(out.id).cols()));
}

void Tape::backward(Var out, const Matrix& seed) {
  if (seed.rows() != val(out.id).rows() || seed.cols() != val(out.id).cols())
    throw std::invalid_argument("tape: seed shape does not match output");
  for (auto& n : nodes_) n.adj.resize(0, 0);
  nodes_[out.id].adj = seed;

  for (std::size_t id = out.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.adj.size() == 0 || !n.track) continue;
    const Matrix& g = n.adj;
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::MatMul:
        if (tracked(n.in[0])) accumulate(n.in[0], g * val(n.in[1]).transpose());
        if (tracked(n.in[1])) accumulate(n.in[1], val(n.in[0]).transpose() * g);
        break;
      case Op::Add:
        accumulate(n.in[0], reduce(g, val(n.in[0])));
        accumulate(n.in[1], reduce(g, val(n.in[1])));
        break;
      case Op::Sub:
        accumulate(n.in[0], reduce(g, val(n.in[0])));
        accumulate(n.in[1], -reduce(g, val(n.in[1])));
        break;
      case Op::Mul: {
        const Shape s{g.rows(), g.cols()};
        accumulate(n.in[0], reduce(g.cwiseProduct(expand(val(n.in[1]), s)), val(n.in[0])));
        accumulate(n.in[1], reduce(g.cwiseProduct(expand(val(n.in[0]), s)), val(n.in[1])));
        break;
      }
      case Op::Scale:
        accumulate(n.in[0], n.c * g);
        break;
      case Op::Exp:
        accumulate(n.in[0], g.cwiseProduct(n.value));
        break;
      case Op::Tanh:
        accumulate(n.in[0], (g.array() * (1.0 - n.value.array().square())).matrix());
        break;
      case Op::Relu:
        accumulate(n.in[0], (g.array() * (val(n.in[0]).array() > 0.0).cast<double>()).matrix());
        break;
      case Op::RepeatCols: {
        const Matrix& in = val(n.in[0]);
        Matrix d(in.rows(), in.cols());
        for (Index j = 0; j < in.cols(); ++j) d.col(j) = g.middleCols(j * n.i0, n.i0).rowwise().sum();
        accumulate(n.in[0], d);
        break;
      }
      case Op::Block: {
        const Matrix& in = val(n.in[0]);
        Matrix d = Matrix::Zero(in.rows(), in.cols());
        d.col(n.i0).segment(n.i1, g.size()) = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
        accumulate(n.in[0], d);
        break;
      }
      case Op::Concat: {
        Index c = 0;
        for (std::size_t in : n.in) {
          const Index w = val(in).cols();
          accumulate(in, g.middleCols(c, w));
          c += w;
        }
        break;
      }
      case Op::SumRows:
        accumulate(n.in[0], g.replicate(val(n.in[0]).rows(), 1));
        break;
      case Op::Sum:
        accumulate(n.in[0], Matrix::Constant(val(n.in[0]).rows(), val(n.in[0]).cols(), g(0, 0)));
        break;
      case Op::GaussLogPdf: {
        const Matrix& x = val(n.in[0]);
        const Matrix& mu = val(n.in[1]);
        const Matrix& lsc = val(n.in[2]);
        const Shape s = broadcast_shape({&x, &mu, &lsc});
        const Eigen::ArrayXXd inv_sd = (-expand(lsc, s).array()).exp();
        const Eigen::ArrayXXd z = (expand(x, s) - expand(mu, s)).array() * inv_sd;
        const Eigen::ArrayXXd gr = g.replicate(s.rows, 1).array();
        const Matrix dx = (-gr * z * inv_sd).matrix();
        accumulate(n.in[0], reduce(dx, x));
        accumulate(n.in[1], reduce(-dx, mu));
        accumulate(n.in[2], reduce((gr * (z.square() - 1.0)).matrix(), lsc));
        break;
      }
      case Op::StdNormLogPdf: {
        const Matrix& x = val(n.in[0]);
        accumulate(n.in[0], (-x.array() * g.replicate(x.rows(), 1).array()).matrix());
        break;
      }
      case Op::BernoulliLogPmf: {
        const Matrix& l = val(n.in[0]);
        Matrix d(l.rows(), l.cols());
        for (Index j = 0; j < l.cols(); ++j)
          for (Index i = 0; i < l.rows(); ++i) {
            const double p = sigmoid(l(i, j));
            const bool clamped = p < kProbClamp || p > 1.0 - kProbClamp;
            d(i, j) = clamped ? 0.0 : g(0, j) * (n.aux(i, j) - p);
          }
        accumulate(n.in[0], d);
        break;
      }
      case Op::LogSumExpGroups: {
        const Matrix& r = val(n.in[0]);
        Matrix d = Matrix::Zero(1, r.cols());
        for (Index grp = 0; grp < n.value.cols(); ++grp) {
          const double lse = n.value(0, grp);
          if (lse == -std::numeric_limits<double>::infinity()) continue;
          for (Index k = 0; k < n.i0; ++k) {
            const Index c = grp * n.i0 + k;
            d(0, c) = g(0, grp) * std::exp(r(0, c) - lse);
          }
        }
        accumulate(n.in[0], d);
        break;
      }
    }
  }
}

}  // namespace vr::ad
