#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vr {

/// Extended-real alpha selecting a member of the Renyi family.
///
/// Values within `kOneTolerance` of 1 classify as `Kind::One` so that callers
/// never divide by (1 - alpha) near the KL limit.
class Alpha {
 public:
  enum class Kind { NegInf, Finite, One, PosInf };

  static constexpr double kOneTolerance = 1e-9;

  constexpr Alpha() = default;
  Alpha(double value) : value_(value) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(value)) throw std::invalid_argument("alpha must not be NaN");
  }

  static Alpha neg_inf() { return Alpha(-std::numeric_limits<double>::infinity()); }
  static Alpha pos_inf() { return Alpha(std::numeric_limits<double>::infinity()); }

  double value() const { return value_; }

  Kind kind() const {
    if (value_ == -std::numeric_limits<double>::infinity()) return Kind::NegInf;
    if (value_ == std::numeric_limits<double>::infinity()) return Kind::PosInf;
    if (std::abs(value_ - 1.0) <= kOneTolerance) return Kind::One;
    return Kind::Finite;
  }

  bool is_finite() const { return std::isfinite(value_); }
  bool is_one() const { return kind() == Kind::One; }

  /// Parses "inf", "+inf", "-inf" (case-insensitive) or a decimal literal.
  static Alpha parse(const std::string& text);

  std::string to_string() const;

  friend bool operator==(const Alpha& a, const Alpha& b) { return a.value_ == b.value_; }

 private:
  double value_ = 0.0;
};

}  // namespace vr
