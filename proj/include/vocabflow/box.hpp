#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "vocabflow/error.hpp"
#include "vocabflow/linalg.hpp"

namespace vocabflow {

/// Axis-aligned compact box [lower, upper] with lower < upper componentwise.
class Box {
public:
  Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size() || lower_.size() == 0) {
      throw DimensionError("box bounds must have equal, positive dimension");
    }
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
      if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i])) {
        throw DimensionError("degenerate box on axis " + std::to_string(i + 1));
      }
    }
  }

  static Box uniform(std::size_t dim, double lo, double hi) {
    return Box(Vector::Constant(static_cast<Eigen::Index>(dim), lo),
               Vector::Constant(static_cast<Eigen::Index>(dim), hi));
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(lower_.size()); }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }
  Vector center() const { return 0.5 * (lower_ + upper_); }
  Vector half_width() const { return 0.5 * (upper_ - lower_); }

  double volume() const { return (upper_ - lower_).prod(); }

  /// Largest |x_i| over the box, per axis.
  Vector abs_bound() const { return lower_.cwiseAbs().cwiseMax(upper_.cwiseAbs()); }

  /// Largest Euclidean norm of a point in the box.
  double norm_bound() const { return abs_bound().norm(); }

  Box inflated(double margin) const {
    return Box(lower_.array() - margin, upper_.array() + margin);
  }

  bool contains(const Vector& x) const {
    return x.size() == lower_.size() && (x.array() >= lower_.array()).all() &&
           (x.array() <= upper_.array()).all();
  }

private:
  Vector lower_;
  Vector upper_;
};

/// Tightest box containing both arguments.
inline Box hull(const Box& a, const Box& b) {
  return Box(a.lower().cwiseMin(b.lower()), a.upper().cwiseMax(b.upper()));
}

}  // namespace vocabflow
