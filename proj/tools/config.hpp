#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vr/alpha.hpp"

namespace vrcli {

using json = nlohmann::ordered_json;

/// Invalid or unknown configuration; `key` is the dotted path at fault.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Reading or writing a file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& experiment_kinds();

/// Fully-populated default document for an experiment kind.
json defaults_for(const std::string& kind);

/// Overlays `user` on `defaults`. Every user key must exist in the
/// defaults and have a compatible type; alpha-valued keys also accept the
/// strings "inf" and "-inf", and null defaults accept a string.
json merge_strict(const json& defaults, const json& user, const std::string& path = "");

/// Replaces the value at a dotted path that already exists in `cfg`.
void set_path(json& cfg, const std::string& dotted, const json& value);

json parse_json_file(const std::string& path);
/// Value text from a --set flag: JSON if it parses, otherwise a string.
json parse_flag_value(const std::string& text);

const json& at(const json& cfg, const std::string& dotted);
double get_double(const json& cfg, const std::string& dotted);
long get_int(const json& cfg, const std::string& dotted, long min_value);
std::uint64_t get_seed(const json& cfg, const std::string& dotted);
bool get_bool(const json& cfg, const std::string& dotted);
std::string get_string(const json& cfg, const std::string& dotted);
vr::Alpha get_alpha(const json& cfg, const std::string& dotted);
std::vector<vr::Alpha> get_alphas(const json& cfg, const std::string& dotted);
std::vector<long> get_ints(const json& cfg, const std::string& dotted, long min_value);
std::vector<double> get_doubles(const json& cfg, const std::string& dotted);
std::vector<std::string> get_strings(const json& cfg, const std::string& dotted);

/// Alpha as it appears in configs: a number, or "inf" / "-inf".
json alpha_to_json(vr::Alpha a);

}  // namespace vrcli
