#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"
#include "vr/gradient.hpp"
#include "vr/models/blr.hpp"
#include "vr/trainer.hpp"

namespace {

using vrcli::json;

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kDiverged = 3, kIo = 4 };

int report(ExitCode code, const std::string& type, const std::string& message, const std::string& key = "") {
  json err = {{"error", {{"type", type}, {"message", message}}}, {"exit_code", static_cast<int>(code)}};
  if (!key.empty()) err["error"]["key"] = key;
  std::cerr << err.dump() << std::endl;
  return code;
}

struct Overrides {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<long> threads;
  std::optional<std::string> output_dir;
  std::optional<std::string> alpha;
  std::optional<long> k;
  std::optional<long> steps;
};

void add_common(CLI::App* sub, Overrides& o, bool config_required) {
  auto* c = sub->add_option("-c,--config", o.config, "JSON run configuration");
  if (config_required) c->required();
  sub->add_option("--set", o.sets, "Override a config field: dotted.key=value (JSON or bare string)");
  sub->add_option("--seed", o.seed, "Random seed (overrides VR_SEED and the config)");
  sub->add_option("--threads", o.threads, "Worker threads; 1 gives bitwise-reproducible output");
  sub->add_option("-o,--output-dir", o.output_dir, "Directory for CSV outputs and the manifest");
  sub->add_option("--alpha", o.alpha, "Training alpha (number, inf or -inf)");
  sub->add_option("--K", o.k, "Training Monte Carlo samples");
  sub->add_option("--steps", o.steps, "Training steps");
}

json resolve(const std::string& kind_hint, const Overrides& o) {
  json user = json::object();
  if (!o.config.empty()) user = vrcli::parse_json_file(o.config);
  if (!user.is_object()) throw vrcli::ConfigError("", "config must be a JSON object");
  std::string kind = kind_hint;
  if (user.contains("kind")) {
    if (!user["kind"].is_string()) throw vrcli::ConfigError("kind", "expected a string");
    const std::string file_kind = user["kind"].get<std::string>();
    if (!kind.empty() && file_kind != kind)
      throw vrcli::ConfigError("kind", "config is for '" + file_kind + "', not '" + kind + "'");
    kind = file_kind;
  }
  if (kind.empty()) throw vrcli::ConfigError("kind", "missing experiment kind");
  json cfg = vrcli::merge_strict(vrcli::defaults_for(kind), user);

  if (const char* env = std::getenv("VR_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long s = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      cfg["seed"] = s;
    } catch (const std::exception&) {
      throw vrcli::ConfigError("VR_SEED", "expected a non-negative integer");
    }
  }
  for (const std::string& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw vrcli::ConfigError(s, "--set expects key=value");
    vrcli::set_path(cfg, s.substr(0, eq), vrcli::parse_flag_value(s.substr(eq + 1)));
  }
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.threads) vrcli::set_path(cfg, "threads", *o.threads);
  if (o.output_dir) vrcli::set_path(cfg, "output_dir", *o.output_dir);
  if (o.alpha) vrcli::set_path(cfg, "train.alpha", vrcli::parse_flag_value(*o.alpha));
  if (o.k) vrcli::set_path(cfg, "train.K", *o.k);
  if (o.steps) vrcli::set_path(cfg, "train.steps", *o.steps);
  vrcli::get_seed(cfg, "seed");
  vrcli::get_int(cfg, "threads", 1);
  return cfg;
}

int execute(const std::string& kind_hint, const Overrides& o) {
  try {
    const json cfg = resolve(kind_hint, o);
    vrcli::RunOutput out(vrcli::get_string(cfg, "output_dir"));
    vrcli::run_experiment(cfg, out);
    out.finish(cfg);
    std::cout << out.dir().string() << std::endl;
    return kOk;
  } catch (const vrcli::ConfigError& e) {
    return report(kConfig, "config", e.what(), e.key());
  } catch (const vrcli::IoError& e) {
    return report(kIo, "io", e.what());
  } catch (const vr::TrainingDiverged& e) {
    return report(kDiverged, "divergence", e.what());
  } catch (const vr::ConvergenceError& e) {
    return report(kDiverged, "divergence", e.what());
  } catch (const vr::GradientError& e) {
    return report(kDiverged, "divergence", e.what());
  } catch (const std::domain_error& e) {
    return report(kDiverged, "divergence", e.what());
  } catch (const std::invalid_argument& e) {
    return report(kConfig, "config", e.what());
  } catch (const std::exception& e) {
    return report(kInternal, "internal", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational Renyi bound experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(VR_VERSION));

  Overrides run_opts;
  auto* run = app.add_subcommand("run", "Run the experiment named by the config's \"kind\"");
  add_common(run, run_opts, true);

  std::vector<std::pair<CLI::App*, std::string>> experiments;
  std::vector<Overrides> opts(vrcli::experiment_kinds().size());
  const std::vector<std::string> help = {
      "Closed-form Renyi divergences between two Gaussians (with quadrature check)",
      "Monte Carlo bias of the K-sample VR bound estimate",
      "Bayesian linear regression: mean-field fits and sigma-grid bound curves",
      "Train a Bayesian neural network with the energy approximation",
      "Train a VAE with the VR objective and evaluate held-out bounds",
      "Evaluate a trained VAE parameter file"};
  for (std::size_t i = 0; i < vrcli::experiment_kinds().size(); ++i) {
    const std::string& kind = vrcli::experiment_kinds()[i];
    auto* sub = app.add_subcommand(kind, help[i]);
    add_common(sub, opts[i], false);
    experiments.emplace_back(sub, kind);
  }

  std::string defaults_kind;
  auto* defaults = app.add_subcommand("defaults", "Print the default config for an experiment kind");
  defaults->add_option("kind", defaults_kind, "Experiment kind")->required();

  std::string gen_which, gen_out;
  long gen_n = 700;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic dataset as CSV");
  gen->add_option("dataset", gen_which, "digits or regression")->required();
  gen->add_option("-n", gen_n, "Number of rows");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("-o,--out", gen_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(kConfig, "usage", e.what());
  }

  if (run->parsed()) return execute("", run_opts);
  for (std::size_t i = 0; i < experiments.size(); ++i)
    if (experiments[i].first->parsed()) return execute(experiments[i].second, opts[i]);
  if (defaults->parsed()) {
    try {
      std::cout << vrcli::defaults_for(defaults_kind).dump(2) << std::endl;
      return kOk;
    } catch (const vrcli::ConfigError& e) {
      return report(kConfig, "config", e.what(), e.key());
    }
  }
  if (gen->parsed()) {
    try {
      vrcli::generate_dataset(gen_which, gen_n, gen_seed, gen_out);
      std::cout << gen_out << std::endl;
      return kOk;
    } catch (const vrcli::ConfigError& e) {
      return report(kConfig, "config", e.what(), e.key());
    } catch (const vrcli::IoError& e) {
      return report(kIo, "io", e.what());
    } catch (const std::runtime_error& e) {
      return report(kIo, "io", e.what());
    }
  }
  return kInternal;
}
