#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include "vr/dataset.hpp"
#include "vr/divergence.hpp"
#include "vr/estimator.hpp"
#include "vr/io.hpp"
#include "vr/models/blr.hpp"
#include "vr/models/bnn.hpp"
#include "vr/models/vae.hpp"
#include "vr/trainer.hpp"

#ifndef VR_VERSION
#define VR_VERSION "unknown"
#endif

namespace vrcli {

namespace fs = std::filesystem;
using vr::Alpha;

RunOutput::RunOutput(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void RunOutput::csv(const std::string& name, const std::function<void(std::ostream&)>& write) {
  const fs::path path = dir_ / name;
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  os.precision(17);
  write(os);
  os.flush();
  if (!os) throw IoError("failed writing '" + path.string() + "'");
  outputs_.push_back(name);
}

void RunOutput::params(const std::string& name, const vr::ParamSet& params) {
  try {
    vr::save_params(params, (dir_ / name).string());
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  outputs_.push_back(name);
}

void RunOutput::dataset(const std::string& role, json description) { datasets_[role] = std::move(description); }

namespace {

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write '" + path.string() + "'");
  os << j.dump(2) << '\n';
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

json build_info() {
  return {{"vr", VR_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__}};
}

}  // namespace

void RunOutput::finish(const json& resolved) {
  write_json(dir_ / "resolved_config.json", resolved);
  json manifest = {{"kind", resolved.at("kind")},
                   {"seed", resolved.at("seed")},
                   {"threads", resolved.at("threads")},
                   {"versions", build_info()},
                   {"datasets", datasets_},
                   {"outputs", outputs_},
                   {"config", "resolved_config.json"}};
  write_json(dir_ / "manifest.json", manifest);
}

namespace {

// ---- shared helpers -------------------------------------------------------

vr::GaussianDist gaussian_from(const json& cfg, const std::string& key) {
  const std::vector<double> mean = get_doubles(cfg, key + ".mean");
  const json& cov = at(cfg, key + ".cov");
  if (mean.empty()) throw ConfigError(key + ".mean", "must not be empty");
  const auto d = static_cast<Eigen::Index>(mean.size());
  const vr::Vector mu = Eigen::Map<const vr::Vector>(mean.data(), d);
  try {
    if (cov.is_array() && !cov.empty() && cov[0].is_array()) {
      if (static_cast<Eigen::Index>(cov.size()) != d) throw ConfigError(key + ".cov", "must be d x d");
      vr::Matrix m(d, d);
      for (Eigen::Index i = 0; i < d; ++i) {
        const json& row = cov[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d)
          throw ConfigError(key + ".cov", "must be d x d");
        for (Eigen::Index j = 0; j < d; ++j) {
          if (!row[static_cast<std::size_t>(j)].is_number()) throw ConfigError(key + ".cov", "expected numbers");
          m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
        }
      }
      return vr::GaussianDist(mu, m);
    }
    const std::vector<double> var = get_doubles(cfg, key + ".cov");
    if (static_cast<Eigen::Index>(var.size()) != d)
      throw ConfigError(key + ".cov", "variances must match the mean's length");
    return vr::GaussianDist(mu, vr::Vector(Eigen::Map<const vr::Vector>(var.data(), d)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ".cov", e.what());
  }
}

vr::Dataset load_dataset(const std::string& path, const std::vector<std::string>& features,
                         const std::optional<std::string>& target, const std::string& key) {
  try {
    return vr::load_csv(path, features, target);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

json file_description(const std::string& path) {
  std::string content;
  try {
    content = vr::read_file(path);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  return {{"source", "file"}, {"path", path}, {"git_blob_sha1", vr::git_blob_hash(content)}};
}

json generated_description(const std::string& generator, long n, std::uint64_t seed) {
  return {{"source", "generated"}, {"generator", generator}, {"n", n}, {"seed", seed}};
}

vr::TrainConfig train_config(const json& cfg) {
  vr::TrainConfig tc;
  tc.alpha = get_alpha(cfg, "train.alpha");
  tc.k = get_int(cfg, "train.K", 1);
  tc.batch_size = get_int(cfg, "train.batch_size", 1);
  tc.steps = get_int(cfg, "train.steps", 0);
  tc.adam.lr = get_double(cfg, "train.lr");
  tc.adam.beta1 = get_double(cfg, "train.beta1");
  tc.adam.beta2 = get_double(cfg, "train.beta2");
  tc.adam.eps = get_double(cfg, "train.adam_eps");
  tc.eval_k = get_int(cfg, "train.eval_K", 1);
  tc.single_backprop = get_bool(cfg, "train.single_backprop");
  tc.learn_hyper = get_bool(cfg, "train.learn_hyper");
  tc.seed = get_seed(cfg, "seed");
  tc.threads = static_cast<std::size_t>(get_int(cfg, "threads", 1));
  try {
    tc.validate();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw ConfigError("train." + what.substr(0, what.find(':')), what.substr(what.find(':') + 2));
  }
  return tc;
}

void write_trace(RunOutput& out, const vr::RunRecord& record) {
  out.csv("trace.csv", [&](std::ostream& os) { record.write_trace_csv(os); });
  out.csv("timing.csv", [&](std::ostream& os) {
    os << "step,wall_time_s\n";
    for (const auto& s : record.steps) os << s.step << ',' << s.wall_time << '\n';
  });
}

vr::TrainResult train_or_save(RunOutput& out, const vr::JointModel& model, const vr::VariationalFamily& family,
                              const vr::TrainConfig& tc, const vr::Dataset& data) {
  try {
    return vr::train(model, family, tc, data);
  } catch (const vr::TrainingDiverged& e) {
    out.params("params_last_finite.bin", e.last_finite());
    throw;
  }
}

// ---- divergence -----------------------------------------------------------

void run_divergence(const json& cfg, RunOutput& out) {
  const vr::GaussianDist p = gaussian_from(cfg, "p");
  const vr::GaussianDist q = gaussian_from(cfg, "q");
  if (p.dim() != q.dim()) throw ConfigError("q.mean", "p and q must have the same dimension");
  const auto alphas = get_alphas(cfg, "alphas");
  const bool quad = get_bool(cfg, "quadrature.enabled") && p.dim() <= 2;
  const double n_sigma = get_double(cfg, "quadrature.n_sigma");
  const double step = get_double(cfg, "quadrature.step");
  if (quad && (n_sigma < 4.0 || !(step > 0.0) || step > vr::GridSpec::kMaxStep))
    throw ConfigError("quadrature", "need n_sigma >= 4 and 0 < step <= 0.05");
  out.csv("divergence.csv", [&](std::ostream& os) {
    os << "alpha,value,quadrature\n";
    for (const Alpha& a : alphas) {
      const double v = vr::renyi_gaussian(p, q, a);
      os << a.to_string() << ',' << v << ',';
      if (quad && a.is_finite() && std::isfinite(v))
        os << vr::quadrature_oracle(p, q, a.value(), vr::GridSpec::covering(p, q, n_sigma, step));
      os << '\n';
    }
  });
}

// ---- bias-sim -------------------------------------------------------------

void run_bias_sim(const json& cfg, RunOutput& out) {
  const vr::GaussianDist p = gaussian_from(cfg, "p");
  const vr::GaussianDist q = gaussian_from(cfg, "q");
  if (p.dim() != q.dim()) throw ConfigError("q.mean", "p and q must have the same dimension");
  vr::BiasSimConfig bc;
  bc.alphas = get_alphas(cfg, "alphas");
  for (long k : get_ints(cfg, "ks", 1)) bc.ks.push_back(static_cast<std::size_t>(k));
  bc.repeats = static_cast<std::size_t>(get_int(cfg, "repeats", 2));
  bc.seed = get_seed(cfg, "seed");
  bc.threads = static_cast<std::size_t>(get_int(cfg, "threads", 1));
  const vr::BiasTable table = vr::bias_simulation(p, q, bc);
  out.csv("bias.csv", [&](std::ostream& os) { table.write_csv(os); });
}

// ---- blr-demo -------------------------------------------------------------

vr::BLRModel blr_model(const json& cfg, RunOutput& out) {
  const double sigma = get_double(cfg, "sigma");
  if (!(sigma > 0.0)) throw ConfigError("sigma", "must be positive");
  const json& path = at(cfg, "data.path");
  if (path.is_null()) {
    const long n = get_int(cfg, "data.n", 2);
    const std::uint64_t seed = get_seed(cfg, "seed");
    out.dataset("train", generated_description("correlated_blr", n, seed));
    return vr::make_correlated_blr(seed, n, sigma);
  }
  const std::string file = path.get<std::string>();
  vr::Dataset d = load_dataset(file, get_strings(cfg, "data.features"), get_string(cfg, "data.target"), "data.path");
  out.dataset("train", file_description(file));
  return vr::BLRModel(d.features, *d.targets, sigma);
}

std::vector<Alpha> nonnegative_alphas(const json& cfg, const std::string& key) {
  auto alphas = get_alphas(cfg, key);
  for (const Alpha& a : alphas)
    if (a.kind() == Alpha::Kind::NegInf || a.value() < 0.0)
      throw ConfigError(key, "mean-field fits need alpha >= 0");
  return alphas;
}

void run_blr_demo(const json& cfg, RunOutput& out) {
  const vr::BLRModel model = blr_model(cfg, out);
  const auto alphas = nonnegative_alphas(cfg, "alphas");
  const auto sigma_alphas = nonnegative_alphas(cfg, "sigma_grid.alphas");
  const vr::BLRPosterior post = vr::blr_exact_posterior(model);
  const Eigen::Index d = model.latent_dim();

  std::vector<vr::GaussianDist> fits;
  for (const Alpha& a : alphas) fits.push_back(vr::blr_mean_field_fit(model, a));

  out.csv("blr_fits.csv", [&](std::ostream& os) {
    os << "alpha";
    for (Eigen::Index i = 0; i < d; ++i) os << ",mean_" << i + 1;
    for (Eigen::Index i = 0; i < d; ++i) os << ",var_" << i + 1;
    os << ",bound,log_evidence\n";
    auto row = [&](const std::string& label, const vr::GaussianDist& g, double bound) {
      os << label;
      for (Eigen::Index i = 0; i < d; ++i) os << ',' << g.mean()(i);
      for (Eigen::Index i = 0; i < d; ++i) os << ',' << g.covariance()(i, i);
      os << ',' << bound << ',' << post.log_evidence << '\n';
    };
    row("posterior", post.posterior, post.log_evidence);
    for (std::size_t i = 0; i < alphas.size(); ++i)
      row(alphas[i].to_string(), fits[i], vr::exact_vr_bound_blr(model, fits[i], alphas[i]).value);
  });

  if (d == 2) {
    const long points = get_int(cfg, "density_grid.points", 2);
    const double n_sigma = get_double(cfg, "density_grid.n_sigma");
    if (!(n_sigma > 0.0)) throw ConfigError("density_grid.n_sigma", "must be positive");
    const vr::Vector c = post.posterior.mean();
    const double half = n_sigma * std::sqrt(post.posterior.variances().maxCoeff());
    vr::Matrix grid(2, points * points);
    for (long i = 0; i < points; ++i)
      for (long j = 0; j < points; ++j) {
        grid(0, i * points + j) = c(0) - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(points - 1);
        grid(1, i * points + j) = c(1) - half + 2.0 * half * static_cast<double>(j) / static_cast<double>(points - 1);
      }
    out.csv("blr_density.csv", [&](std::ostream& os) {
      os << "source,theta_1,theta_2,log_density\n";
      auto emit = [&](const std::string& label, const vr::GaussianDist& g) {
        const vr::Vector lp = g.log_pdf_cols(grid);
        for (Eigen::Index k = 0; k < grid.cols(); ++k)
          os << label << ',' << grid(0, k) << ',' << grid(1, k) << ',' << lp(k) << '\n';
      };
      emit("posterior", post.posterior);
      for (std::size_t i = 0; i < alphas.size(); ++i) emit("alpha=" + alphas[i].to_string(), fits[i]);
    });
  }

  const double lo = get_double(cfg, "sigma_grid.min");
  const double hi = get_double(cfg, "sigma_grid.max");
  const long n = get_int(cfg, "sigma_grid.points", 2);
  if (!(lo > 0.0 && hi > lo)) throw ConfigError("sigma_grid", "need 0 < min < max");
  std::vector<double> sigmas, evidence;
  std::vector<std::vector<double>> bounds(sigma_alphas.size());
  for (long i = 0; i < n; ++i) {
    const double s = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    const vr::BLRModel m = model.with_sigma(s);
    sigmas.push_back(s);
    evidence.push_back(vr::blr_exact_posterior(m).log_evidence);
    for (std::size_t a = 0; a < sigma_alphas.size(); ++a)
      bounds[a].push_back(vr::exact_vr_bound_blr(m, vr::blr_mean_field_fit(m, sigma_alphas[a]), sigma_alphas[a]).value);
  }
  out.csv("blr_sigma.csv", [&](std::ostream& os) {
    os << "sigma,log_evidence";
    for (const Alpha& a : sigma_alphas) os << ",L_" << a.to_string();
    os << '\n';
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
      os << sigmas[i] << ',' << evidence[i];
      for (const auto& b : bounds) os << ',' << b[i];
      os << '\n';
    }
  });
  auto argmax = [&](const std::vector<double>& v) {
    return sigmas[static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin())];
  };
  out.csv("blr_sigma_argmax.csv", [&](std::ostream& os) {
    os << "series,argmax_sigma\n";
    os << "log_evidence," << argmax(evidence) << '\n';
    for (std::size_t a = 0; a < sigma_alphas.size(); ++a)
      os << "L_" << sigma_alphas[a].to_string() << ',' << argmax(bounds[a]) << '\n';
  });
}

// ---- bnn-train ------------------------------------------------------------

void run_bnn_train(const json& cfg, RunOutput& out) {
  const std::uint64_t seed = get_seed(cfg, "seed");
  vr::Dataset data;
  const json& path = at(cfg, "data.path");
  if (path.is_null()) {
    const long n = get_int(cfg, "data.n", 4);
    data = vr::make_regression_toy(n, seed);
    out.dataset("all", generated_description("regression_toy", n, seed));
  } else {
    const std::string file = path.get<std::string>();
    data = load_dataset(file, get_strings(cfg, "data.features"), get_string(cfg, "data.target"), "data.path");
    out.dataset("all", file_description(file));
  }
  const double test_fraction = get_double(cfg, "data.test_fraction");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("data.test_fraction", "must be in (0, 1)");
  const vr::Split split = vr::train_test_split(data.size(), test_fraction, get_seed(cfg, "data.split_seed"));
  vr::Dataset train = data.subset(split.train);
  vr::Dataset test = data.subset(split.test);
  double target_mean = 0.0, target_sd = 1.0;
  if (get_bool(cfg, "data.standardize")) {
    const vr::Standardizer st = vr::Standardizer::fit(train);
    train = st.apply(train);
    test = st.apply(test);
    target_mean = st.target_mean;
    target_sd = st.target_sd;
  }

  const vr::BNNModel model(data.dim(), get_int(cfg, "model.hidden", 1), get_double(cfg, "model.init_noise"));
  const vr::MeanFieldGaussian family(model.latent_dim(), get_double(cfg, "model.init_logscale"));
  const vr::TrainConfig tc = train_config(cfg);
  const vr::TrainResult result = train_or_save(out, model, family, tc, train);
  write_trace(out, result.record);
  out.params("params.bin", result.params);
  const vr::PredictiveMetrics pm =
      vr::bnn_predictive(model, result.params, test, tc.eval_k, seed, target_mean, target_sd);
  out.csv("metrics.csv", [&](std::ostream& os) {
    os << "test_log_likelihood,test_rmse,n_train,n_test\n";
    os << pm.log_likelihood << ',' << pm.rmse << ',' << train.size() << ',' << test.size() << '\n';
  });
}

// ---- VAE ------------------------------------------------------------------

vr::VAEArch vae_arch(const json& cfg, Eigen::Index data_dim) {
  vr::VAEArch arch;
  arch.data_dim = data_dim;
  arch.hidden = get_int(cfg, "model.hidden", 1);
  arch.latent = get_int(cfg, "model.latent", 1);
  const std::string lik = get_string(cfg, "model.likelihood");
  if (lik == "bernoulli")
    arch.likelihood = vr::Likelihood::Bernoulli;
  else if (lik == "gaussian")
    arch.likelihood = vr::Likelihood::Gaussian;
  else
    throw ConfigError("model.likelihood", "expected \"bernoulli\" or \"gaussian\"");
  return arch;
}

vr::EvalConfig eval_config(const json& cfg) {
  vr::EvalConfig ec;
  ec.alphas = get_alphas(cfg, "eval.alphas");
  for (long k : get_ints(cfg, "eval.ks", 1)) ec.ks.push_back(k);
  ec.repeats = get_int(cfg, "eval.repeats", 1);
  ec.k_ref = get_int(cfg, "eval.K_ref", 1);
  for (Eigen::Index k : ec.ks)
    if (k > ec.k_ref) throw ConfigError("eval.ks", "entries must not exceed eval.K_ref");
  ec.seed = get_seed(cfg, "seed") + 1;
  ec.threads = static_cast<std::size_t>(get_int(cfg, "threads", 1));
  return ec;
}

void write_evaluation(const json& cfg, RunOutput& out, const vr::JointModel& model,
                      const vr::VariationalFamily& family, const vr::ParamSet& params, const vr::Dataset& test) {
  const vr::EvalTable table = vr::evaluate(model, family, params, test, eval_config(cfg));
  out.csv("eval.csv", [&](std::ostream& os) { table.write_csv(os); });

  const long wk = get_int(cfg, "eval.weights_K", 1);
  const Eigen::MatrixXd prof = vr::sorted_weight_profile(model, family, params, test, wk, get_seed(cfg, "seed") + 2);
  std::vector<double> wmax(static_cast<std::size_t>(prof.rows()));
  for (Eigen::Index i = 0; i < prof.rows(); ++i) wmax[static_cast<std::size_t>(i)] = prof(i, 0);
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  out.csv("weights.csv", [&](std::ostream& os) {
    os << "rank,mean_weight,median_weight\n";
    for (Eigen::Index j = 0; j < prof.cols(); ++j) {
      const Eigen::VectorXd col = prof.col(j);
      os << j + 1 << ',' << col.mean() << ',' << median(std::vector<double>(col.data(), col.data() + col.size()))
         << '\n';
    }
  });
  const double over_half =
      static_cast<double>(std::count_if(wmax.begin(), wmax.end(), [](double w) { return w > 0.5; })) /
      static_cast<double>(wmax.size());
  out.csv("metrics.csv", [&](std::ostream& os) {
    os << "test_log_likelihood,test_log_likelihood_stderr,K_ref,median_w_max,fraction_w_max_above_half,n_test\n";
    os << table.ref_mean << ',' << table.ref_stderr << ',' << table.k_ref << ',' << median(wmax) << ','
       << over_half << ',' << test.size() << '\n';
  });
}

vr::Dataset vae_data(const json& cfg, RunOutput& out, const std::string& key, const std::string& role,
                     const vr::Dataset* generated) {
  const json& path = at(cfg, key);
  if (path.is_null()) return *generated;
  const std::string file = path.get<std::string>();
  vr::Dataset d = load_dataset(file, get_strings(cfg, "data.features"), std::nullopt, key);
  out.dataset(role, file_description(file));
  return d;
}

void run_vae_train(const json& cfg, RunOutput& out) {
  vr::Dataset train, test;
  if (at(cfg, "data.train_path").is_null() || at(cfg, "data.test_path").is_null()) {
    const long n_train = get_int(cfg, "data.n_train", 1);
    const long n_test = get_int(cfg, "data.n_test", 1);
    const std::uint64_t data_seed = get_seed(cfg, "data.data_seed");
    const vr::Dataset all = vr::make_binary_digits(n_train + n_test, data_seed);
    std::vector<Eigen::Index> tr(static_cast<std::size_t>(n_train)), te(static_cast<std::size_t>(n_test));
    std::iota(tr.begin(), tr.end(), Eigen::Index{0});
    std::iota(te.begin(), te.end(), static_cast<Eigen::Index>(n_train));
    const vr::Dataset gen_train = all.subset(tr), gen_test = all.subset(te);
    train = vae_data(cfg, out, "data.train_path", "train", &gen_train);
    test = vae_data(cfg, out, "data.test_path", "test", &gen_test);
    if (at(cfg, "data.train_path").is_null())
      out.dataset("train", generated_description("binary_digits[0:n_train]", n_train + n_test, data_seed));
    if (at(cfg, "data.test_path").is_null())
      out.dataset("test", generated_description("binary_digits[n_train:]", n_train + n_test, data_seed));
  } else {
    train = vae_data(cfg, out, "data.train_path", "train", nullptr);
    test = vae_data(cfg, out, "data.test_path", "test", nullptr);
  }
  if (train.dim() != test.dim()) throw ConfigError("data.test_path", "train and test have different widths");

  const vr::VAEArch arch = vae_arch(cfg, train.dim());
  const vr::VAEModel model(arch);
  const vr::GaussianEncoder encoder(arch);
  const vr::TrainConfig tc = train_config(cfg);
  const vr::TrainResult result = train_or_save(out, model, encoder, tc, train);
  write_trace(out, result.record);
  out.params("params.bin", result.params);
  write_evaluation(cfg, out, model, encoder, result.params, test);
}

void run_eval(const json& cfg, RunOutput& out) {
  vr::Dataset data;
  const json& path = at(cfg, "data.path");
  if (path.is_null()) {
    const long n = get_int(cfg, "data.n", 1);
    const std::uint64_t seed = get_seed(cfg, "data.data_seed");
    data = vr::make_binary_digits(n, seed);
    out.dataset("test", generated_description("binary_digits", n, seed));
  } else {
    data = vae_data(cfg, out, "data.path", "test", nullptr);
  }
  const std::string params_path = get_string(cfg, "params");
  vr::ParamSet params;
  try {
    params = vr::load_params(params_path);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  out.dataset("params", file_description(params_path));
  const vr::VAEArch arch = vae_arch(cfg, data.dim());
  const vr::VAEModel model(arch);
  const vr::GaussianEncoder encoder(arch);
  if (!params.same_layout(vr::init_params(model, encoder, 0)))
    throw ConfigError("params", "parameter file does not match the model architecture");
  write_evaluation(cfg, out, model, encoder, params, data);
}

}  // namespace

void run_experiment(const json& cfg, RunOutput& out) {
  const std::string kind = get_string(cfg, "kind");
  if (kind == "divergence") run_divergence(cfg, out);
  else if (kind == "bias-sim") run_bias_sim(cfg, out);
  else if (kind == "blr-demo") run_blr_demo(cfg, out);
  else if (kind == "bnn-train") run_bnn_train(cfg, out);
  else if (kind == "vae-train") run_vae_train(cfg, out);
  else if (kind == "eval") run_eval(cfg, out);
  else throw ConfigError("kind", "unknown experiment kind '" + kind + "'");
}

void generate_dataset(const std::string& which, long n, std::uint64_t seed, const std::string& path) {
  if (n < 1) throw ConfigError("n", "must be at least 1");
  vr::Dataset d;
  if (which == "digits")
    d = vr::make_binary_digits(n, seed);
  else if (which == "regression")
    d = vr::make_regression_toy(n, seed);
  else
    throw ConfigError("dataset", "expected \"digits\" or \"regression\"");
  try {
    vr::write_csv(d, path);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  json manifest = {{"dataset", generated_description(which, n, seed)},
                   {"file", fs::path(path).filename().string()},
                   {"git_blob_sha1", vr::git_blob_hash(vr::read_file(path))},
                   {"versions", build_info()}};
  write_json(path + ".manifest.json", manifest);
}

}  // namespace vrcli
