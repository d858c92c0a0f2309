#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vr/tape.hpp"

namespace vr {

/// Named dense parameter blocks stored contiguously in one flat vector.
///
/// Blocks are column-major views into `values()`, which is what optimizers
/// and finite-difference checks operate on.
class ParamSet {
 public:
  struct Block {
    std::string name;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    Eigen::Index offset = 0;
    Eigen::Index size() const { return rows * cols; }
  };

  /// Appends a block; throws if the name is already taken.
  std::size_t add(std::string name, const Eigen::MatrixXd& init);

  bool contains(const std::string& name) const;
  std::size_t index(const std::string& name) const;
  const std::vector<Block>& blocks() const { return blocks_; }

  Eigen::Map<Eigen::MatrixXd> block(const std::string& name);
  Eigen::Map<const Eigen::MatrixXd> block(const std::string& name) const;
  Eigen::Map<const Eigen::MatrixXd> block(std::size_t i) const;

  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }

  bool same_layout(const ParamSet& other) const;

 private:
  std::vector<Block> blocks_;
  Eigen::VectorXd values_;
};

/// Tape variables mirroring every block of a ParamSet.
class Leaves {
 public:
  Leaves(ad::Tape& tape, const ParamSet& params);

  ad::Var operator[](const std::string& name) const { return vars_[params_->index(name)]; }
  ad::Var operator[](std::size_t i) const { return vars_[i]; }

  /// Flat gradient in the ParamSet's layout after tape.backward().
  Eigen::VectorXd gradient(const ad::Tape& tape) const;

 private:
  const ParamSet* params_;
  std::vector<ad::Var> vars_;
};

}  // namespace vr
