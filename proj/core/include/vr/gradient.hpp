#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "vr/alpha.hpp"
#include "vr/joint_model.hpp"
#include "vr/params.hpp"
#include "vr/rng.hpp"
#include "vr/weights.hpp"

namespace vr {

/// Standard-normal noise with its seed lineage.
struct NoiseDraw {
  Eigen::MatrixXd eps;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;

  static NoiseDraw draw(std::uint64_t seed, std::uint64_t index, Eigen::Index rows,
                        Eigen::Index cols);
};

/// Noise shaped for `family` on `batch` with k samples per group.
NoiseDraw draw_noise(const VariationalFamily& family, const Batch& batch, Eigen::Index k,
                     std::uint64_t seed, std::uint64_t index);

/// Log weights log p(g(eps), x) - log q(g(eps)) recorded on a tape as a
/// 1 x (groups * k) row, group-major.
struct LogWeightGraph {
  ad::Var log_w;
  Eigen::Index groups = 1;
  Eigen::Index k = 1;
};

LogWeightGraph build_log_weights(ad::Tape& tape, const Leaves& leaves, const JointModel& model,
                                 const VariationalFamily& family, const Batch& batch,
                                 const Eigen::MatrixXd& eps, Eigen::Index k);

/// Everything needed to evaluate one stochastic objective.
struct Problem {
  const JointModel& model;
  const VariationalFamily& family;
  const Batch& batch;
  Eigen::Index k = 1;
};

/// Thrown when a log weight or gradient component is not finite.
class GradientError : public std::runtime_error {
 public:
  GradientError(const std::string& what, std::size_t sample)
      : std::runtime_error(what), sample_(sample) {}
  /// Flat column index (group * K + k) of the offending sample.
  std::size_t sample() const { return sample_; }

 private:
  std::size_t sample_;
};

struct GradientResult {
  /// Mean over groups of the Monte Carlo VR bound.
  double objective = 0.0;
  /// Gradient of `objective` w.r.t. every parameter block (flat layout).
  Eigen::VectorXd grad;
  /// groups x K log weights.
  Eigen::MatrixXd log_w;
  /// Per-group backpropagated sample in single-sample mode.
  std::vector<std::size_t> selected;
};

/// Log weights as a groups x K matrix (forward pass only).
Eigen::MatrixXd log_weights(const Problem& problem, const ParamSet& params,
                            const Eigen::MatrixXd& eps);

/// Mean over groups of mc_vr_estimate; the scalar whose gradient vr_grad
/// returns.
double vr_objective(const Problem& problem, const ParamSet& params, const Eigen::MatrixXd& eps,
                    Alpha alpha);

/// Reparameterization gradient sum_k w_hat_{alpha,k} grad log w_k, averaged
/// over groups. Throws GradientError naming the first non-finite sample.
GradientResult vr_grad(const Problem& problem, const ParamSet& params, const Eigen::MatrixXd& eps,
                       Alpha alpha);

/// Single backward pass per group: sample j per select_backprop_sample and
/// return grad log w_j, averaged over groups.
GradientResult vr_grad_single(const Problem& problem, const ParamSet& params,
                              const Eigen::MatrixXd& eps, Alpha alpha, Rng& select_rng);

/// grad log w for every sample column; P x (groups * K).
Eigen::MatrixXd per_sample_gradients(const Problem& problem, const ParamSet& params,
                                     const Eigen::MatrixXd& eps);

/// Index of the sample to backpropagate: drawn from normalize_weights for
/// finite alpha, argmax for -inf and argmin for +inf.
std::size_t select_backprop_sample(const WeightSet& w, Alpha alpha, Rng& rng);

/// Max over coordinates of |fd_i - grad_i| / max(|fd_i|, |grad_i|, floor)
/// using central differences. Throws std::domain_error on a non-finite
/// evaluation and std::invalid_argument for a step outside [1e-7, 1e-3].
double finite_diff_check(const std::function<double(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& at, const Eigen::VectorXd& grad, double step,
                         double floor = 1e-8);

}  // namespace vr
