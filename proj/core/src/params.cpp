#include "vr/params.hpp"

#include <stdexcept>

namespace vr {

std::size_t ParamSet::add(std::string name, const Eigen::MatrixXd& init) {
  if (contains(name)) throw std::invalid_argument("ParamSet: duplicate block '" + name + "'");
  Block b{std::move(name), init.rows(), init.cols(), values_.size()};
  Eigen::VectorXd grown(values_.size() + b.size());
  grown.head(values_.size()) = values_;
  grown.tail(b.size()) = Eigen::Map<const Eigen::VectorXd>(init.data(), init.size());
  values_ = std::move(grown);
  blocks_.push_back(std::move(b));
  return blocks_.size() - 1;
}

bool ParamSet::contains(const std::string& name) const {
  for (const auto& b : blocks_)
    if (b.name == name) return true;
  return false;
}

std::size_t ParamSet::index(const std::string& name) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].name == name) return i;
  throw std::out_of_range("ParamSet: no block named '" + name + "'");
}

Eigen::Map<Eigen::MatrixXd> ParamSet::block(const std::string& name) {
  const Block& b = blocks_[index(name)];
  return {values_.data() + b.offset, b.rows, b.cols};
}

Eigen::Map<const Eigen::MatrixXd> ParamSet::block(const std::string& name) const {
  return block(index(name));
}

Eigen::Map<const Eigen::MatrixXd> ParamSet::block(std::size_t i) const {
  const Block& b = blocks_.at(i);
  return {values_.data() + b.offset, b.rows, b.cols};
}

bool ParamSet::same_layout(const ParamSet& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Block& a = blocks_[i];
    const Block& b = other.blocks_[i];
    if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
  }
  return true;
}

Leaves::Leaves(ad::Tape& tape, const ParamSet& params) : params_(&params) {
  vars_.reserve(params.blocks().size());
  for (std::size_t i = 0; i < params.blocks().size(); ++i)
    vars_.push_back(tape.variable(params.block(i)));
}

Eigen::VectorXd Leaves::gradient(const ad::Tape& tape) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(params_->size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const auto& adj = tape.grad(vars_[i]);
    if (adj.size() == 0) continue;
    const auto& b = params_->blocks()[i];
    g.segment(b.offset, b.size()) = Eigen::Map<const Eigen::VectorXd>(adj.data(), adj.size());
  }
  return g;
}

}  // namespace vr
