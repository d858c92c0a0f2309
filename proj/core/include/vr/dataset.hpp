#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vr/joint_model.hpp"

namespace vr {

/// Rows are datapoints.
struct Dataset {
  Eigen::MatrixXd features;
  std::optional<Eigen::VectorXd> targets;
  std::vector<std::string> feature_names;
  std::string target_name;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  Dataset subset(std::span<const Eigen::Index> rows) const;
};

struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
  std::uint64_t seed = 0;
};

/// Random permutation split; test gets round(n * test_fraction) points.
Split train_test_split(Eigen::Index n, double test_fraction, std::uint64_t seed);

/// z-scoring statistics computed from one subset (the training split).
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  double target_mean = 0.0;
  double target_sd = 1.0;

  static Standardizer fit(const Dataset& train);
  Dataset apply(const Dataset& data) const;
};

/// Reads a CSV with a header row. An empty `features` list selects every
/// column except the target. Throws std::runtime_error on I/O failure and
/// std::invalid_argument on unknown columns or non-numeric / NaN cells.
Dataset load_csv(const std::string& path, const std::vector<std::string>& features,
                 const std::optional<std::string>& target);

void write_csv(const Dataset& data, const std::string& path);

/// Columns of `rows` as a Batch (inputs D x M, targets 1 x M when present).
Batch make_batch(const Dataset& data, std::span<const Eigen::Index> rows,
                 double likelihood_scale = 1.0);
Batch make_batch(const Dataset& data);

/// 1-D regression toy: y = x sin(x) + 0.3 eps, x ~ U(-4, 4).
Dataset make_regression_toy(Eigen::Index n, std::uint64_t seed);

/// Binarized 8 x 8 digit glyphs (0-9) with random one-pixel shifts and 5%
/// pixel flips; 64 features named p0..p63, class in no column.
Dataset make_binary_digits(Eigen::Index n, std::uint64_t seed);

}  // namespace vr
