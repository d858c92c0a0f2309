#include "vr/gradient.hpp"

#include <cmath>
#include <random>
#include <string>

#include "vr/estimator.hpp"

namespace vr {

NoiseDraw NoiseDraw::draw(std::uint64_t seed, std::uint64_t index, Eigen::Index rows,
                          Eigen::Index cols) {
  Rng rng = make_stream(seed, index);
  return NoiseDraw{standard_normal(rng, rows, cols), seed, index};
}

NoiseDraw draw_noise(const VariationalFamily& family, const Batch& batch, Eigen::Index k,
                     std::uint64_t seed, std::uint64_t index) {
  return NoiseDraw::draw(seed, index, family.latent_dim(), family.groups(batch) * k);
}

LogWeightGraph build_log_weights(ad::Tape& tape, const Leaves& leaves, const JointModel& model,
                                 const VariationalFamily& family, const Batch& batch,
                                 const Eigen::MatrixXd& eps, Eigen::Index k) {
  if (model.latent_dim() != family.latent_dim())
    throw std::invalid_argument("build_log_weights: model and family latent dims differ");
  const Eigen::Index groups = family.groups(batch);
  if (eps.cols() != groups * k) throw std::invalid_argument("build_log_weights: noise has wrong width");
  const Reparameterized r = family.reparameterize(tape, leaves, batch, eps, k);
  const ad::Var joint = model.log_joint(tape, leaves, r.latent, batch, model.is_local() ? k : 1);
  return {tape.sub(joint, r.log_q), groups, k};
}

namespace {

struct Forward {
  ad::Tape tape;
  std::unique_ptr<Leaves> leaves;
  LogWeightGraph graph;
  Eigen::MatrixXd log_w;  // groups x K
};

void forward(Forward& fw, const Problem& problem, const ParamSet& params,
             const Eigen::MatrixXd& eps) {
  fw.leaves = std::make_unique<Leaves>(fw.tape, params);
  fw.graph = build_log_weights(fw.tape, *fw.leaves, problem.model, problem.family, problem.batch,
                               eps, problem.k);
  const Eigen::MatrixXd& row = fw.tape.value(fw.graph.log_w);
  fw.log_w = Eigen::Map<const Eigen::MatrixXd>(row.data(), fw.graph.k, fw.graph.groups).transpose();
  for (Eigen::Index c = 0; c < row.cols(); ++c) {
    const double v = row(0, c);
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw GradientError("non-finite log weight at sample " + std::to_string(c),
                          static_cast<std::size_t>(c));
  }
}

WeightSet group_weights(const Eigen::MatrixXd& log_w, Eigen::Index g) {
  std::vector<double> w(static_cast<std::size_t>(log_w.cols()));
  for (Eigen::Index k = 0; k < log_w.cols(); ++k) w[static_cast<std::size_t>(k)] = log_w(g, k);
  return WeightSet(std::move(w));
}

// Finds the first sample whose own gradient is non-finite.
[[noreturn]] void report_bad_gradient(Forward& fw) {
  const Eigen::Index cols = fw.graph.groups * fw.graph.k;
  for (Eigen::Index c = 0; c < cols; ++c) {
    Eigen::MatrixXd seed = Eigen::MatrixXd::Zero(1, cols);
    seed(0, c) = 1.0;
    fw.tape.backward(fw.graph.log_w, seed);
    if (!fw.leaves->gradient(fw.tape).allFinite())
      throw GradientError("non-finite gradient from sample " + std::to_string(c),
                          static_cast<std::size_t>(c));
  }
  throw GradientError("non-finite gradient", 0);
}

GradientResult backprop(Forward& fw, const Eigen::MatrixXd& probs) {
  const Eigen::Index groups = fw.graph.groups;
  const Eigen::Index k = fw.graph.k;
  Eigen::MatrixXd seed(1, groups * k);
  for (Eigen::Index g = 0; g < groups; ++g)
    for (Eigen::Index i = 0; i < k; ++i) seed(0, g * k + i) = probs(g, i) / static_cast<double>(groups);
  fw.tape.backward(fw.graph.log_w, seed);
  GradientResult out;
  out.grad = fw.leaves->gradient(fw.tape);
  out.log_w = fw.log_w;
  if (!out.grad.allFinite()) report_bad_gradient(fw);
  return out;
}

double mean_objective(const Eigen::MatrixXd& log_w, Alpha alpha) {
  double acc = 0.0;
  for (Eigen::Index g = 0; g < log_w.rows(); ++g) acc += mc_vr_estimate(group_weights(log_w, g), alpha).value;
  return acc / static_cast<double>(log_w.rows());
}

}  // namespace

Eigen::MatrixXd log_weights(const Problem& problem, const ParamSet& params,
                            const Eigen::MatrixXd& eps) {
  Forward fw;
  forward(fw, problem, params, eps);
  return fw.log_w;
}

double vr_objective(const Problem& problem, const ParamSet& params, const Eigen::MatrixXd& eps,
                    Alpha alpha) {
  return mean_objective(log_weights(problem, params, eps), alpha);
}

GradientResult vr_grad(const Problem& problem, const ParamSet& params, const Eigen::MatrixXd& eps,
                       Alpha alpha) {
  Forward fw;
  forward(fw, problem, params, eps);
  Eigen::MatrixXd probs(fw.log_w.rows(), fw.log_w.cols());
  for (Eigen::Index g = 0; g < fw.log_w.rows(); ++g) {
    const std::vector<double> p = normalize_weights(group_weights(fw.log_w, g), alpha);
    for (Eigen::Index i = 0; i < fw.log_w.cols(); ++i) probs(g, i) = p[static_cast<std::size_t>(i)];
  }
  GradientResult out = backprop(fw, probs);
  out.objective = mean_objective(fw.log_w, alpha);
  return out;
}

GradientResult vr_grad_single(const Problem& problem, const ParamSet& params,
                              const Eigen::MatrixXd& eps, Alpha alpha, Rng& select_rng) {
  Forward fw;
  forward(fw, problem, params, eps);
  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(fw.log_w.rows(), fw.log_w.cols());
  std::vector<std::size_t> selected;
  for (Eigen::Index g = 0; g < fw.log_w.rows(); ++g) {
    const std::size_t j = select_backprop_sample(group_weights(fw.log_w, g), alpha, select_rng);
    probs(g, static_cast<Eigen::Index>(j)) = 1.0;
    selected.push_back(j);
  }
  GradientResult out = backprop(fw, probs);
  out.objective = mean_objective(fw.log_w, alpha);
  out.selected = std::move(selected);
  return out;
}

Eigen::MatrixXd per_sample_gradients(const Problem& problem, const ParamSet& params,
                                     const Eigen::MatrixXd& eps) {
  Forward fw;
  forward(fw, problem, params, eps);
  const Eigen::Index cols = fw.graph.groups * fw.graph.k;
  Eigen::MatrixXd out(params.size(), cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    Eigen::MatrixXd seed = Eigen::MatrixXd::Zero(1, cols);
    seed(0, c) = 1.0;
    fw.tape.backward(fw.graph.log_w, seed);
    out.col(c) = fw.leaves->gradient(fw.tape);
  }
  return out;
}

std::size_t select_backprop_sample(const WeightSet& w, Alpha alpha, Rng& rng) {
  switch (alpha.kind()) {
    case Alpha::Kind::NegInf: return w.argmax();
    case Alpha::Kind::PosInf: return w.argmin();
    default: break;
  }
  const std::vector<double> probs = normalize_weights(w, alpha);
  std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
  return pick(rng);
}

double finite_diff_check(const std::function<double(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& at, const Eigen::VectorXd& grad, double step,
                         double floor) {
  if (step < 1e-7 || step > 1e-3) throw std::invalid_argument("finite_diff_check: step must be in [1e-7, 1e-3]");
  if (grad.size() != at.size()) throw std::invalid_argument("finite_diff_check: size mismatch");
  double worst = 0.0;
  Eigen::VectorXd x = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    x(i) = at(i) + step;
    const double hi = f(x);
    x(i) = at(i) - step;
    const double lo = f(x);
    x(i) = at(i);
    if (!std::isfinite(hi) || !std::isfinite(lo))
      throw std::domain_error("finite_diff_check: non-finite evaluation at coordinate " + std::to_string(i));
    const double fd = (hi - lo) / (2.0 * step);
    const double denom = std::max({std::abs(fd), std::abs(grad(i)), floor});
    worst = std::max(worst, std::abs(fd - grad(i)) / denom);
  }
  return worst;
}

}  // namespace vr
