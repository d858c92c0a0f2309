#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vr/alpha.hpp"
#include "vr/dataset.hpp"
#include "vr/gradient.hpp"
#include "vr/joint_model.hpp"
#include "vr/params.hpp"
#include "vr/weights.hpp"

namespace vr {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam on a flat parameter vector; minimizes whatever `grad` is the gradient of.
class Adam {
 public:
  Adam(AdamConfig config, Eigen::Index size);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  long iterations() const { return t_; }

 private:
  AdamConfig config_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  long t_ = 0;
};

struct TrainConfig {
  Alpha alpha = 1.0;
  Eigen::Index k = 5;           ///< MC samples per step (per datapoint for local models)
  Eigen::Index batch_size = 32;
  Eigen::Index steps = 1000;
  AdamConfig adam;
  std::uint64_t seed = 0;
  Eigen::Index eval_k = 5000;
  bool single_backprop = false;
  bool learn_hyper = true;      ///< train the model's "log_noise" block
  std::size_t threads = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct StepRecord {
  Eigen::Index step = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  /// Mean over weight groups of log R, R = w_max / (1 - w_max).
  double log_ratio = 0.0;
  double wall_time = 0.0;
};

struct RunRecord {
  std::vector<StepRecord> steps;
  std::uint64_t seed = 0;

  /// Header: step,objective,grad_norm,log_R,wall_time_s
  void write_csv(std::ostream& os) const;
  /// Same without the wall-time column, so reruns compare byte for byte.
  void write_trace_csv(std::ostream& os) const;
};

struct TrainResult {
  ParamSet params;
  RunRecord record;
};

/// Non-finite objective or gradient during training.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, Eigen::Index step, ParamSet last_finite)
      : std::runtime_error(what), step_(step), last_finite_(std::move(last_finite)) {}
  Eigen::Index step() const { return step_; }
  const ParamSet& last_finite() const { return last_finite_; }

 private:
  Eigen::Index step_;
  ParamSet last_finite_;
};

/// Family parameters followed by model parameters, seeded from config.seed.
ParamSet init_params(const JointModel& model, const VariationalFamily& family, std::uint64_t seed);

/// Mini-batch energy approximation: Monte Carlo VR bound of log weights
/// log p0(theta_k) + (N / M) sum_{x in S} log p(x | theta_k) - log q(theta_k).
/// Global models only; eps is latent x K.
BoundValue energy_approx_objective(const JointModel& model, const VariationalFamily& family,
                                   const ParamSet& params, const Batch& subset, Eigen::Index total,
                                   Alpha alpha, const Eigen::MatrixXd& eps);

/// Adam ascent on the VR objective. Global models use the energy
/// approximation over mini-batches; local models average the per-datapoint
/// bound over the mini-batch. Deterministic given config.seed. Throws
/// TrainingDiverged on a non-finite objective.
TrainResult train(const JointModel& model, const VariationalFamily& family, const TrainConfig& config,
                  const Dataset& data, const ParamSet* init = nullptr);

struct EvalRow {
  Alpha alpha;
  Eigen::Index k = 1;
  double mean = 0.0;      ///< mean over datapoints of L_hat_{alpha,K}
  double stderr_ = 0.0;
  double gap_mean = 0.0;  ///< mean of L_hat_{alpha,K} - L_hat_{0,K_ref}
  double gap_stderr = 0.0;
};

struct EvalTable {
  Eigen::Index k_ref = 0;
  double ref_mean = 0.0;  ///< mean over datapoints of L_hat_{0,K_ref}
  double ref_stderr = 0.0;
  std::vector<EvalRow> rows;

  const EvalRow& at(Alpha alpha, Eigen::Index k) const;
  /// Header: alpha,K,mean,stderr,gap_mean,gap_stderr,K_ref,ref_mean,ref_stderr
  void write_csv(std::ostream& os) const;
};

struct EvalConfig {
  std::vector<Alpha> alphas;
  std::vector<Eigen::Index> ks;
  Eigen::Index repeats = 10;
  Eigen::Index k_ref = 5000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// Per-datapoint bound estimates for a local (amortized) model. Each
/// (datapoint, repeat) draws K_ref samples once; L_hat_{alpha,K} uses the
/// first K of them, so the gap at (0, K_ref) is exactly zero. Standard
/// errors are across datapoints of the per-datapoint repeat means.
EvalTable evaluate(const JointModel& model, const VariationalFamily& family, const ParamSet& params,
                   const Dataset& data, const EvalConfig& config);

struct WeightDiagnostics {
  double w_max = 0.0;
  double log_ratio = 0.0;  ///< log R computed without overflow
  double ratio = 0.0;      ///< R, may be +inf
  std::vector<double> sorted;  ///< alpha = 0 normalized weights, descending
};

WeightDiagnostics weight_diagnostics(const WeightSet& w);

/// Normalized alpha = 0 weights (descending) for every datapoint of a local
/// model: rows are datapoints, columns sorted weights.
Eigen::MatrixXd sorted_weight_profile(const JointModel& model, const VariationalFamily& family,
                                      const ParamSet& params, const Dataset& data, Eigen::Index k,
                                      std::uint64_t seed);

struct PredictiveMetrics {
  double log_likelihood = 0.0;  ///< mean test log predictive density
  double rmse = 0.0;
};

class BNNModel;

/// Monte Carlo predictive metrics for a trained BNN with a mean-field q.
/// `test` is standardized; predictions, targets and the noise scale are
/// mapped back to the original target scale through `target_mean` /
/// `target_sd` before scoring.
PredictiveMetrics bnn_predictive(const BNNModel& model, const ParamSet& params, const Dataset& test,
                                 Eigen::Index samples, std::uint64_t seed, double target_mean = 0.0,
                                 double target_sd = 1.0);

}  // namespace vr
