#include "vr/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "vr/estimator.hpp"
#include "vr/models/bnn.hpp"
#include "vr/numeric.hpp"
#include "vr/parallel.hpp"

namespace vr {

namespace {

// Stream domains keep noise, shuffling and sample selection independent.
constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kShuffleDomain = 1ull << 40;
constexpr std::uint64_t kNoiseDomain = 2ull << 40;
constexpr std::uint64_t kSelectDomain = 3ull << 40;

double log_ratio_of(std::span<const double> log_w) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < log_w.size(); ++i)
    if (log_w[i] > log_w[best]) best = i;
  std::vector<double> others;
  others.reserve(log_w.size());
  for (std::size_t i = 0; i < log_w.size(); ++i)
    if (i != best) others.push_back(log_w[i]);
  return log_w[best] - logsumexp(others);
}

WeightSet row_weights(const Eigen::MatrixXd& log_w, Eigen::Index g) {
  std::vector<double> w(static_cast<std::size_t>(log_w.cols()));
  for (Eigen::Index k = 0; k < log_w.cols(); ++k) w[static_cast<std::size_t>(k)] = log_w(g, k);
  return WeightSet(std::move(w));
}

double mean_log_ratio(const Eigen::MatrixXd& log_w) {
  double acc = 0.0;
  for (Eigen::Index g = 0; g < log_w.rows(); ++g) acc += log_ratio_of(row_weights(log_w, g).log_w());
  return acc / static_cast<double>(log_w.rows());
}

// Columns [first, first + count) of a group-major noise matrix, as groups.
Eigen::MatrixXd group_cols(const Eigen::MatrixXd& eps, Eigen::Index first, Eigen::Index count,
                           Eigen::Index k) {
  return eps.middleCols(first * k, count * k);
}

Batch batch_cols(const Batch& b, Eigen::Index first, Eigen::Index count) {
  Batch out;
  out.inputs = b.inputs.middleCols(first, count);
  if (b.targets.size() > 0) out.targets = b.targets.middleCols(first, count);
  out.likelihood_scale = b.likelihood_scale;
  return out;
}

}  // namespace

Adam::Adam(AdamConfig config, Eigen::Index size)
    : config_(config), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (grad.size() != params.size() || grad.size() != m_.size())
    throw std::invalid_argument("Adam: size mismatch");
  ++t_;
  m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * grad;
  v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  params.array() -= config_.lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + config_.eps);
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  if (k < 1) fail("K", "must be at least 1");
  if (batch_size < 1) fail("batch_size", "must be at least 1");
  if (steps < 0) fail("steps", "must be non-negative");
  if (!(adam.lr > 0.0) || !std::isfinite(adam.lr)) fail("lr", "must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) fail("beta1", "must be in [0, 1)");
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) fail("beta2", "must be in [0, 1)");
  if (!(adam.eps > 0.0)) fail("adam_eps", "must be positive");
  if (eval_k < k) fail("eval_K", "must be at least K");
  if (threads < 1) fail("threads", "must be at least 1");
}

void RunRecord::write_csv(std::ostream& os) const {
  os << "step,objective,grad_norm,log_R,wall_time_s\n";
  const auto old = os.precision(17);
  for (const auto& s : steps)
    os << s.step << ',' << s.objective << ',' << s.grad_norm << ',' << s.log_ratio << ','
       << s.wall_time << '\n';
  os.precision(old);
}

void RunRecord::write_trace_csv(std::ostream& os) const {
  os << "step,objective,grad_norm,log_R\n";
  const auto old = os.precision(17);
  for (const auto& s : steps) os << s.step << ',' << s.objective << ',' << s.grad_norm << ',' << s.log_ratio << '\n';
  os.precision(old);
}

ParamSet init_params(const JointModel& model, const VariationalFamily& family, std::uint64_t seed) {
  ParamSet params;
  Rng rng = make_stream(seed, kInitStream);
  family.init_params(params, rng);
  model.init_params(params, rng);
  return params;
}

BoundValue energy_approx_objective(const JointModel& model, const VariationalFamily& family,
                                   const ParamSet& params, const Batch& subset, Eigen::Index total,
                                   Alpha alpha, const Eigen::MatrixXd& eps) {
  if (model.is_local()) throw std::invalid_argument("energy approximation needs a global latent");
  if (subset.size() == 0) throw std::invalid_argument("energy approximation: empty batch");
  if (total < subset.size()) throw std::invalid_argument("energy approximation: batch larger than data");
  Batch scaled = subset;
  scaled.likelihood_scale = static_cast<double>(total) / static_cast<double>(subset.size());
  const Problem problem{model, family, scaled, eps.cols()};
  const Eigen::MatrixXd log_w = log_weights(problem, params, eps);
  return mc_vr_estimate(row_weights(log_w, 0), alpha);
}

TrainResult train(const JointModel& model, const VariationalFamily& family, const TrainConfig& config,
                  const Dataset& data, const ParamSet* init) {
  config.validate();
  if (data.size() == 0) throw std::invalid_argument("train: empty dataset");
  ParamSet params = init_params(model, family, config.seed);
  if (init) {
    if (!init->same_layout(params)) throw std::invalid_argument("train: initial parameters have the wrong layout");
    params = *init;
  }
  const bool local = model.is_local();
  const Eigen::Index n = data.size();
  const Eigen::Index m = std::min(config.batch_size, n);
  const double scale = local ? 1.0 : static_cast<double>(n) / static_cast<double>(m);

  Eigen::Index hyper_begin = -1, hyper_size = 0;
  if (!config.learn_hyper && params.contains("log_noise")) {
    const auto& b = params.blocks()[params.index("log_noise")];
    hyper_begin = b.offset;
    hyper_size = b.size();
  }

  Adam adam(config.adam, params.size());
  TrainResult result;
  result.record.seed = config.seed;
  result.record.steps.reserve(static_cast<std::size_t>(config.steps));

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Eigen::Index cursor = n;  // forces a shuffle before the first step
  std::uint64_t epoch = 0;
  Rng select_rng = make_stream(config.seed, kSelectDomain);

  const std::size_t chunks = local ? std::min<std::size_t>(config.threads, static_cast<std::size_t>(m)) : 1;
  std::vector<Rng> chunk_rngs;
  for (std::size_t c = 1; c < chunks; ++c) chunk_rngs.push_back(make_stream(config.seed, kSelectDomain + c));

  const auto start = std::chrono::steady_clock::now();
  for (Eigen::Index step = 0; step < config.steps; ++step) {
    if (cursor + m > n) {
      Rng shuffle = make_stream(config.seed, kShuffleDomain + epoch++);
      std::shuffle(perm.begin(), perm.end(), shuffle);
      cursor = 0;
    }
    const std::span<const Eigen::Index> rows(perm.data() + cursor, static_cast<std::size_t>(m));
    cursor += m;
    const Batch batch = make_batch(data, rows, scale);
    const Eigen::MatrixXd eps =
        draw_noise(family, batch, config.k, config.seed, kNoiseDomain + static_cast<std::uint64_t>(step)).eps;

    GradientResult g;
    try {
      if (chunks <= 1) {
        const Problem problem{model, family, batch, config.k};
        g = config.single_backprop ? vr_grad_single(problem, params, eps, config.alpha, select_rng)
                                   : vr_grad(problem, params, eps, config.alpha);
      } else {
        // Equal contiguous slices of the batch, one tape per worker, reduced
        // in slice order.
        std::vector<GradientResult> parts(chunks);
        std::vector<Eigen::Index> first(chunks + 1);
        for (std::size_t c = 0; c <= chunks; ++c)
          first[c] = static_cast<Eigen::Index>(c) * m / static_cast<Eigen::Index>(chunks);
        parallel_for(chunks, chunks, [&](std::size_t c) {
          const Eigen::Index count = first[c + 1] - first[c];
          const Batch part = batch_cols(batch, first[c], count);
          const Problem problem{model, family, part, config.k};
          const Eigen::MatrixXd part_eps = group_cols(eps, first[c], count, config.k);
          Rng& rng = c == 0 ? select_rng : chunk_rngs[c - 1];
          parts[c] = config.single_backprop ? vr_grad_single(problem, params, part_eps, config.alpha, rng)
                                            : vr_grad(problem, params, part_eps, config.alpha);
        });
        g.grad = Eigen::VectorXd::Zero(params.size());
        g.log_w.resize(m, config.k);
        for (std::size_t c = 0; c < chunks; ++c) {
          const double w = static_cast<double>(first[c + 1] - first[c]) / static_cast<double>(m);
          g.grad += w * parts[c].grad;
          g.objective += w * parts[c].objective;
          g.log_w.middleRows(first[c], first[c + 1] - first[c]) = parts[c].log_w;
        }
      }
    } catch (const GradientError& e) {
      throw TrainingDiverged(std::string("step ") + std::to_string(step) + ": " + e.what(), step, params);
    }
    if (!std::isfinite(g.objective) || !g.grad.allFinite())
      throw TrainingDiverged("step " + std::to_string(step) + ": non-finite objective", step, params);

    if (hyper_size > 0) g.grad.segment(hyper_begin, hyper_size).setZero();
    const Eigen::VectorXd before = params.values();
    adam.step(params.values(), -g.grad);
    if (!params.values().allFinite()) {
      params.values() = before;
      throw TrainingDiverged("step " + std::to_string(step) + ": non-finite parameters", step, params);
    }

    StepRecord rec;
    rec.step = step;
    rec.objective = g.objective;
    rec.grad_norm = g.grad.norm();
    rec.log_ratio = mean_log_ratio(g.log_w);
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.record.steps.push_back(rec);
  }
  result.params = std::move(params);
  return result;
}

const EvalRow& EvalTable::at(Alpha alpha, Eigen::Index k) const {
  for (const auto& r : rows)
    if (r.alpha == alpha && r.k == k) return r;
  throw std::out_of_range("EvalTable: no row for alpha=" + alpha.to_string() + ", K=" + std::to_string(k));
}

void EvalTable::write_csv(std::ostream& os) const {
  os << "alpha,K,mean,stderr,gap_mean,gap_stderr,K_ref,ref_mean,ref_stderr\n";
  const auto old = os.precision(17);
  for (const auto& r : rows)
    os << r.alpha.to_string() << ',' << r.k << ',' << r.mean << ',' << r.stderr_ << ',' << r.gap_mean
       << ',' << r.gap_stderr << ',' << k_ref << ',' << ref_mean << ',' << ref_stderr << '\n';
  os.precision(old);
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const Eigen::VectorXd& v) {
  MeanSe out;
  out.mean = v.mean();
  if (v.size() > 1)
    out.se = std::sqrt((v.array() - out.mean).square().sum() / static_cast<double>(v.size() - 1) /
                       static_cast<double>(v.size()));
  return out;
}

}  // namespace

EvalTable evaluate(const JointModel& model, const VariationalFamily& family, const ParamSet& params,
                   const Dataset& data, const EvalConfig& config) {
  if (!model.is_local()) throw std::invalid_argument("evaluate: per-datapoint bounds need a local model");
  if (config.repeats < 1) throw std::invalid_argument("evaluate: repeats must be at least 1");
  if (config.k_ref < 1) throw std::invalid_argument("evaluate: K_ref must be at least 1");
  if (data.size() == 0) throw std::invalid_argument("evaluate: empty dataset");
  for (Eigen::Index k : config.ks)
    if (k < 1 || k > config.k_ref) throw std::invalid_argument("evaluate: every K must be in [1, K_ref]");

  const Eigen::Index n = data.size();
  const std::size_t cells = config.alphas.size() * config.ks.size();
  // Per-datapoint repeat means: bound per cell, gap per cell, reference.
  Eigen::MatrixXd bound(n, static_cast<Eigen::Index>(cells));
  Eigen::MatrixXd gap(n, static_cast<Eigen::Index>(cells));
  Eigen::VectorXd ref(n);

  parallel_for(static_cast<std::size_t>(n), config.threads, [&](std::size_t i) {
    const Eigen::Index row = static_cast<Eigen::Index>(i);
    const Eigen::Index rows_arr[1] = {row};
    const Batch batch = make_batch(data, rows_arr);
    const Problem problem{model, family, batch, config.k_ref};
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells));
    Eigen::VectorXd gp = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells));
    double r_acc = 0.0;
    for (Eigen::Index r = 0; r < config.repeats; ++r) {
      Rng rng = make_stream(config.seed, static_cast<std::uint64_t>(row * config.repeats + r));
      const Eigen::MatrixXd eps = standard_normal(rng, family.latent_dim(), config.k_ref);
      const Eigen::MatrixXd log_w = log_weights(problem, params, eps);
      const std::span<const double> all(log_w.data(), static_cast<std::size_t>(log_w.size()));
      const double ref_val = mc_vr_estimate(WeightSet(all), 0.0).value;
      r_acc += ref_val;
      std::size_t c = 0;
      for (const Alpha& a : config.alphas)
        for (Eigen::Index k : config.ks) {
          const double v = mc_vr_estimate(WeightSet(all.first(static_cast<std::size_t>(k))), a).value;
          b(static_cast<Eigen::Index>(c)) += v;
          gp(static_cast<Eigen::Index>(c)) += v - ref_val;
          ++c;
        }
    }
    const double reps = static_cast<double>(config.repeats);
    bound.row(row) = b.transpose() / reps;
    gap.row(row) = gp.transpose() / reps;
    ref(row) = r_acc / reps;
  });

  EvalTable table;
  table.k_ref = config.k_ref;
  const MeanSe rs = mean_se(ref);
  table.ref_mean = rs.mean;
  table.ref_stderr = rs.se;
  std::size_t c = 0;
  for (const Alpha& a : config.alphas)
    for (Eigen::Index k : config.ks) {
      const MeanSe bs = mean_se(bound.col(static_cast<Eigen::Index>(c)));
      const MeanSe gs = mean_se(gap.col(static_cast<Eigen::Index>(c)));
      table.rows.push_back({a, k, bs.mean, bs.se, gs.mean, gs.se});
      ++c;
    }
  return table;
}

WeightDiagnostics weight_diagnostics(const WeightSet& w) {
  WeightDiagnostics out;
  out.sorted = normalize_weights(w, 0.0);
  std::sort(out.sorted.begin(), out.sorted.end(), std::greater<>());
  out.w_max = out.sorted.front();
  out.log_ratio = log_ratio_of(w.log_w());
  out.ratio = std::exp(out.log_ratio);
  return out;
}

Eigen::MatrixXd sorted_weight_profile(const JointModel& model, const VariationalFamily& family,
                                      const ParamSet& params, const Dataset& data, Eigen::Index k,
                                      std::uint64_t seed) {
  if (!model.is_local()) throw std::invalid_argument("sorted_weight_profile: needs a local model");
  if (k < 1) throw std::invalid_argument("sorted_weight_profile: K must be at least 1");
  Eigen::MatrixXd out(data.size(), k);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Eigen::Index rows_arr[1] = {i};
    const Batch batch = make_batch(data, rows_arr);
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(i));
    const Eigen::MatrixXd eps = standard_normal(rng, family.latent_dim(), k);
    const Eigen::MatrixXd log_w = log_weights(Problem{model, family, batch, k}, params, eps);
    const WeightDiagnostics d = weight_diagnostics(row_weights(log_w, 0));
    for (Eigen::Index j = 0; j < k; ++j) out(i, j) = d.sorted[static_cast<std::size_t>(j)];
  }
  return out;
}

PredictiveMetrics bnn_predictive(const BNNModel& model, const ParamSet& params, const Dataset& test,
                                 Eigen::Index samples, std::uint64_t seed, double target_mean,
                                 double target_sd) {
  if (!test.targets) throw std::invalid_argument("bnn_predictive: test data has no targets");
  if (samples < 1) throw std::invalid_argument("bnn_predictive: samples must be at least 1");
  if (!(target_sd > 0.0)) throw std::invalid_argument("bnn_predictive: target_sd must be positive");
  const ReparamMap q{params.block("q_mean"), params.block("q_logscale")};
  const double sigma = std::exp(params.block("log_noise")(0, 0)) * target_sd;
  Rng rng = make_stream(seed, 0);
  const Eigen::MatrixXd theta = q.apply(standard_normal(rng, model.latent_dim(), samples));
  const Eigen::MatrixXd x = test.features.transpose();
  const Eigen::ArrayXd y = test.targets->array() * target_sd + target_mean;

  const Eigen::Index n = test.size();
  Eigen::MatrixXd pred(samples, n);
  for (Eigen::Index s = 0; s < samples; ++s)
    pred.row(s) = model.predict(theta.col(s), x).array() * target_sd + target_mean;

  constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;
  double ll = 0.0;
  double sq = 0.0;
  std::vector<double> terms(static_cast<std::size_t>(samples));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index s = 0; s < samples; ++s) {
      const double z = (y(i) - pred(s, i)) / sigma;
      terms[static_cast<std::size_t>(s)] = -0.5 * z * z - std::log(sigma) - kHalfLog2Pi;
    }
    ll += logsumexp(terms) - std::log(static_cast<double>(samples));
    const double err = pred.col(i).mean() - y(i);
    sq += err * err;
  }
  return {ll / static_cast<double>(n), std::sqrt(sq / static_cast<double>(n))};
}

}  // namespace vr
