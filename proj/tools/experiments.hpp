#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include "config.hpp"
#include "vr/params.hpp"

namespace vrcli {

/// Output directory of one run: CSV files, parameter files and the
/// manifest / resolved config written by finish().
class RunOutput {
 public:
  explicit RunOutput(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  void csv(const std::string& name, const std::function<void(std::ostream&)>& write);
  void params(const std::string& name, const vr::ParamSet& params);
  /// Records where a dataset came from in the manifest.
  void dataset(const std::string& role, json description);
  void finish(const json& resolved);

 private:
  std::filesystem::path dir_;
  json outputs_ = json::array();
  json datasets_ = json::object();
};

/// Runs the experiment named by cfg["kind"].
void run_experiment(const json& cfg, RunOutput& out);

/// `vr gen-data`: writes a synthetic dataset CSV plus a manifest sidecar.
void generate_dataset(const std::string& which, long n, std::uint64_t seed, const std::string& path);

}  // namespace vrcli
