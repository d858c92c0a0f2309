#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace vrcli {

namespace {

json train_defaults(double alpha, long k, long steps, double lr) {
  return {{"alpha", alpha},        {"K", k},           {"batch_size", 32},
          {"steps", steps},        {"lr", lr},         {"beta1", 0.9},
          {"beta2", 0.999},        {"adam_eps", 1e-8}, {"eval_K", 5000},
          {"single_backprop", false}, {"learn_hyper", true}};
}

json gaussian(std::vector<double> mean, std::vector<double> cov) {
  return {{"mean", mean}, {"cov", cov}};
}

json vae_eval_defaults() {
  return {{"alphas", {0, -1, -5, -50}}, {"ks", {5, 50}}, {"repeats", 1}, {"K_ref", 1000},
          {"weights_K", 50}};
}

json vae_model_defaults() {
  return {{"hidden", 64}, {"latent", 8}, {"likelihood", "bernoulli"}};
}

bool is_alpha_key(const std::string& key) { return key == "alpha" || key == "alphas"; }

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

bool compatible(const json& def, const json& val, bool alpha_key) {
  if (alpha_key) {
    if (def.is_array()) return val.is_array();
    return val.is_number() || val.is_string();
  }
  if (def.is_null()) return val.is_null() || val.is_string();
  if (def.is_number()) return val.is_number();
  if (def.is_boolean()) return val.is_boolean();
  if (def.is_string()) return val.is_string();
  if (def.is_array()) return val.is_array();
  if (def.is_object()) return val.is_object();
  return false;
}

const char* type_name(const json& v) {
  if (v.is_null()) return "null or string";
  if (v.is_number()) return "number";
  if (v.is_boolean()) return "boolean";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  return "object";
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"divergence", "bias-sim", "blr-demo",
                                                 "bnn-train",  "vae-train", "eval"};
  return kinds;
}

json defaults_for(const std::string& kind) {
  json cfg = {{"kind", kind}, {"seed", 0}, {"threads", 1}, {"output_dir", "out/" + kind}};
  if (kind == "divergence") {
    cfg["p"] = gaussian({0.0, 0.0}, {1.0, 1.0});
    cfg["q"] = gaussian({1.0, 1.0}, {1.0, 1.0});
    cfg["alphas"] = {-2, -0.5, 0, 0.3, 0.5, 0.9, 1, 2, 5, "inf", "-inf"};
    cfg["quadrature"] = {{"enabled", true}, {"n_sigma", 12.0}, {"step", 0.02}};
  } else if (kind == "bias-sim") {
    cfg["p"] = gaussian({0.0, 0.0}, {1.0, 1.0});
    cfg["q"] = gaussian({1.0, 1.0}, {1.0, 1.0});
    cfg["alphas"] = {-1, 0, 0.5, 1, 2};
    cfg["ks"] = {1, 5, 50};
    cfg["repeats"] = 200;
  } else if (kind == "blr-demo") {
    cfg["data"] = {{"path", nullptr}, {"features", json::array()}, {"target", "y"}, {"n", 20}};
    cfg["sigma"] = 1.0;
    cfg["alphas"] = {1, 0.5, 0, "inf"};
    cfg["density_grid"] = {{"points", 101}, {"n_sigma", 4.0}};
    cfg["sigma_grid"] = {{"min", 0.2}, {"max", 3.0}, {"points", 50}, {"alphas", {1, 0.5, 0}}};
  } else if (kind == "bnn-train") {
    cfg["data"] = {{"path", nullptr},      {"features", json::array()}, {"target", "y"},
                   {"n", 200},             {"test_fraction", 0.1},      {"split_seed", 0},
                   {"standardize", true}};
    cfg["model"] = {{"hidden", 50}, {"init_noise", 1.0}, {"init_logscale", -3.0}};
    cfg["train"] = train_defaults(1.0, 5, 2000, 1e-2);
  } else if (kind == "vae-train") {
    cfg["data"] = {{"train_path", nullptr}, {"test_path", nullptr}, {"features", json::array()},
                   {"n_train", 500},        {"n_test", 200},        {"data_seed", 1}};
    cfg["model"] = vae_model_defaults();
    cfg["train"] = train_defaults(1.0, 5, 20000, 3e-3);
    cfg["train"]["eval_K"] = 1000;
    cfg["eval"] = vae_eval_defaults();
  } else if (kind == "eval") {
    cfg["model"] = vae_model_defaults();
    cfg["params"] = "out/vae-train/params.bin";
    cfg["data"] = {{"path", nullptr}, {"features", json::array()}, {"n", 200}, {"data_seed", 2}};
    cfg["eval"] = vae_eval_defaults();
  } else {
    throw ConfigError("kind", "unknown experiment kind '" + kind + "'");
  }
  return cfg;
}

json merge_strict(const json& defaults, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError(path, "expected an object");
  json out = defaults;
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = join(path, it.key());
    if (!defaults.contains(it.key())) throw ConfigError(key, "unknown key");
    const json& def = defaults.at(it.key());
    if (!compatible(def, it.value(), is_alpha_key(it.key())))
      throw ConfigError(key, std::string("expected ") + type_name(def));
    if (def.is_object())
      out[it.key()] = merge_strict(def, it.value(), key);
    else
      out[it.key()] = it.value();
  }
  return out;
}

void set_path(json& cfg, const std::string& dotted, const json& value) {
  json* node = &cfg;
  std::string parent;
  std::stringstream ss(dotted);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError(dotted, "empty key");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i])) throw ConfigError(dotted, "unknown key");
    node = &(*node)[parts[i]];
  }
  if (!node->is_object() || !node->contains(parts.back())) throw ConfigError(dotted, "unknown key");
  json wrapper = json::object();
  wrapper[parts.back()] = value;
  json def = json::object();
  def[parts.back()] = (*node)[parts.back()];
  const std::string prefix = dotted.size() > parts.back().size()
                                 ? dotted.substr(0, dotted.size() - parts.back().size() - 1)
                                 : "";
  (*node)[parts.back()] = merge_strict(def, wrapper, prefix)[parts.back()];
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
}

json parse_flag_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

const json& at(const json& cfg, const std::string& dotted) {
  const json* node = &cfg;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) throw ConfigError(dotted, "missing key");
    node = &node->at(part);
  }
  return *node;
}

double get_double(const json& cfg, const std::string& dotted) {
  const json& v = at(cfg, dotted);
  if (!v.is_number()) throw ConfigError(dotted, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(dotted, "must be finite");
  return d;
}

long get_int(const json& cfg, const std::string& dotted, long min_value) {
  const json& v = at(cfg, dotted);
  if (!v.is_number_integer()) throw ConfigError(dotted, "expected an integer");
  const long n = v.get<long>();
  if (n < min_value) throw ConfigError(dotted, "must be at least " + std::to_string(min_value));
  return n;
}

std::uint64_t get_seed(const json& cfg, const std::string& dotted) {
  const json& v = at(cfg, dotted);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  throw ConfigError(dotted, "expected a non-negative integer");
}

bool get_bool(const json& cfg, const std::string& dotted) {
  const json& v = at(cfg, dotted);
  if (!v.is_boolean()) throw ConfigError(dotted, "expected a boolean");
  return v.get<bool>();
}

std::string get_string(const json& cfg, const std::string& dotted) {
  const json& v = at(cfg, dotted);
  if (!v.is_string()) throw ConfigError(dotted, "expected a string");
  return v.get<std::string>();
}

namespace {

vr::Alpha alpha_value(const json& v, const std::string& key) {
  try {
    if (v.is_number()) return vr::Alpha(v.get<double>());
    if (v.is_string()) return vr::Alpha::parse(v.get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
  throw ConfigError(key, "expected a number, \"inf\" or \"-inf\"");
}

}  // namespace

vr::Alpha get_alpha(const json& cfg, const std::string& dotted) { return alpha_value(at(cfg, dotted), dotted); }

std::vector<vr::Alpha> get_alphas(const json& cfg, const std::string& dotted) {
  const json& v = at(cfg, dotted);
  if (!v.is_array() || v.empty()) throw ConfigError(dotted, "expected a non-empty array");
  std::vector<vr::Alpha> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(alpha_value(v[i], dotted + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<long> get_ints(const json& cfg, const std::string& dotted, long min_value) {
  const json& v = at(cfg, dotted);
  if (!v.is_array() || v.empty()) throw ConfigError(dotted, "expected a non-empty array");
  std::vector<long> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw ConfigError(dotted, "expected integers");
    if (e.get<long>() < min_value) throw ConfigError(dotted, "entries must be at least " + std::to_string(min_value));
    out.push_back(e.get<long>());
  }
  return out;
}

std::vector<double> get_doubles(const json& cfg, const std::string& dotted) {
  const json& v = at(cfg, dotted);
  if (!v.is_array()) throw ConfigError(dotted, "expected an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number() || !std::isfinite(e.get<double>())) throw ConfigError(dotted, "expected finite numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::string> get_strings(const json& cfg, const std::string& dotted) {
  const json& v = at(cfg, dotted);
  if (!v.is_array()) throw ConfigError(dotted, "expected an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ConfigError(dotted, "expected strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

json alpha_to_json(vr::Alpha a) {
  if (a.kind() == vr::Alpha::Kind::PosInf) return "inf";
  if (a.kind() == vr::Alpha::Kind::NegInf) return "-inf";
  return a.value();
}

}  // namespace vrcli
