#pragma once

// Intermediate flow families: affine flows x' = Ax + b and leaky-ReLU flows
// x' = Sigma_{alpha,beta}(x), both stored in generator form.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "vocabflow/box.hpp"
#include "vocabflow/error.hpp"
#include "vocabflow/linalg.hpp"

namespace vocabflow {

/// Time-`time` flow of x' = generator * x + offset.
struct AffineFlow {
  Matrix generator;
  Vector offset;
  double time = 1.0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(offset.size()); }

  static AffineFlow identity(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    return {Matrix::Zero(n, n), Vector::Zero(n), 0.0};
  }

  /// Same generator negated: the inverse map.
  AffineFlow inverse() const { return {-generator, -offset, time}; }
};

/// Time-`time` flow of x' = Sigma_{alpha,beta}(x): coordinate i is scaled by
/// exp(time * alpha_i) where negative and by exp(time * beta_i) where nonnegative.
struct LeakyFlow {
  Vector neg_log_slope;
  Vector pos_log_slope;
  double time = 1.0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(neg_log_slope.size()); }

  /// Flow realizing the given positive slopes at time 1.
  static LeakyFlow with_slopes(const Vector& neg_slope, const Vector& pos_slope) {
    if ((neg_slope.array() <= 0.0).any() || (pos_slope.array() <= 0.0).any()) {
      throw NotAFlowError("leaky-ReLU slopes must be strictly positive");
    }
    return {neg_slope.array().log().matrix(), pos_slope.array().log().matrix(), 1.0};
  }

  Vector neg_slope() const { return (time * neg_log_slope).array().exp().matrix(); }
  Vector pos_slope() const { return (time * pos_log_slope).array().exp().matrix(); }
};

using Flow = std::variant<AffineFlow, LeakyFlow>;

inline std::size_t flow_dim(const Flow& f) {
  return std::visit([](const auto& g) { return g.dim(); }, f);
}

inline void validate_flow(const AffineFlow& f) {
  if (f.generator.rows() != f.offset.size() || f.generator.cols() != f.offset.size() || f.offset.size() == 0) {
    throw DimensionError("affine flow generator and offset dimensions disagree");
  }
  if (!(f.time >= 0.0) || !std::isfinite(f.time)) throw NotAFlowError("affine flow time must be finite and >= 0");
  if (!f.generator.allFinite() || !f.offset.allFinite()) throw NotAFlowError("affine flow has non-finite entries");
}

inline void validate_flow(const LeakyFlow& f) {
  if (f.neg_log_slope.size() != f.pos_log_slope.size() || f.neg_log_slope.size() == 0) {
    throw DimensionError("leaky flow slope vectors disagree in dimension");
  }
  if (!(f.time >= 0.0) || !std::isfinite(f.time)) throw NotAFlowError("leaky flow time must be finite and >= 0");
  if (!f.neg_log_slope.allFinite() || !f.pos_log_slope.allFinite()) {
    throw NotAFlowError("leaky flow has non-finite entries");
  }
}

inline void validate_flow(const Flow& f) {
  std::visit([](const auto& g) { validate_flow(g); }, f);
}

/// x -> linear * x + offset.
struct AffineMap {
  Matrix linear;
  Vector offset;

  Vector operator()(const Vector& x) const { return linear * x + offset; }
};

/// Matrix exponential (Pade scaling and squaring).
inline Matrix expm(const Matrix& a) { return a.exp(); }

/// Exact affine map of an affine flow, from exp(time * [[A, b], [0, 0]]).
inline AffineMap affine_map(const AffineFlow& f) {
  validate_flow(f);
  const Eigen::Index d = f.offset.size();
  if (f.time == 0.0) return {Matrix::Identity(d, d), Vector::Zero(d)};
  Matrix aug = Matrix::Zero(d + 1, d + 1);
  aug.topLeftCorner(d, d) = f.generator;
  aug.topRightCorner(d, 1) = f.offset;
  const Matrix e = expm(f.time * aug);
  return {e.topLeftCorner(d, d), e.topRightCorner(d, 1)};
}

inline Vector eval_affine_flow(const AffineFlow& f, const Vector& x) {
  if (x.size() != f.offset.size()) throw DimensionError("point dimension does not match affine flow");
  return affine_map(f)(x);
}

inline Vector eval_leaky_flow(const LeakyFlow& f, Vector x) {
  validate_flow(f);
  if (x.size() != f.neg_log_slope.size()) throw DimensionError("point dimension does not match leaky flow");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] *= std::exp(f.time * (x[i] < 0.0 ? f.neg_log_slope[i] : f.pos_log_slope[i]));
  }
  return x;
}

inline Vector eval_flow(const Flow& f, const Vector& x) {
  return std::visit(
      [&](const auto& g) -> Vector {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, AffineFlow>) return eval_affine_flow(g, x);
        else return eval_leaky_flow(g, x);
      },
      f);
}

/// Precomputed evaluator for repeated application of one flow.
class FlowEvaluator {
public:
  explicit FlowEvaluator(const Flow& f) {
    validate_flow(f);
    if (const auto* a = std::get_if<AffineFlow>(&f)) {
      affine_ = affine_map(*a);
    } else {
      const auto& l = std::get<LeakyFlow>(f);
      neg_ = l.neg_slope();
      pos_ = l.pos_slope();
    }
  }

  Vector operator()(const Vector& x) const {
    if (affine_) return (*affine_)(x);
    Vector y = x;
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] *= y[i] < 0.0 ? neg_[i] : pos_[i];
    return y;
  }

private:
  std::optional<AffineMap> affine_;
  Vector neg_;
  Vector pos_;
};

/// ln U for U = [[lambda, w], [0, I_{d-1}]], lambda > 0:
/// [[ln lambda, ln(lambda)/(lambda-1) w], [0, 0]], and U - I when lambda = 1.
inline Matrix triangular_log(double lambda, const Vector& w) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw NotAFlowError("triangular_log needs lambda > 0");
  }
  const Eigen::Index d = w.size() + 1;
  Matrix out = Matrix::Zero(d, d);
  if (lambda == 1.0) {
    out.block(0, 1, 1, d - 1) = w.transpose();
    return out;
  }
  const double l = std::log(lambda);
  out(0, 0) = l;
  out.block(0, 1, 1, d - 1) = (l / (lambda - 1.0)) * w.transpose();
  return out;
}

inline constexpr double kMaxConditionNumber = 1e12;

inline double condition_number(const Matrix& q) {
  Eigen::JacobiSVD<Matrix> svd(q);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[s.size() - 1] == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / s[s.size() - 1];
}

/// Q A Q^{-1}: the generator of the conjugated flow map Q e^A Q^{-1}.
inline Matrix conjugate_generator(const Matrix& a, const Matrix& q) {
  if (q.rows() != q.cols() || q.rows() != a.rows() || a.rows() != a.cols()) {
    throw DimensionError("conjugation needs square matrices of equal size");
  }
  if (!(condition_number(q) <= kMaxConditionNumber)) {
    throw SingularMatrixError("conjugating matrix is singular or ill-conditioned");
  }
  return q * a * q.inverse();
}

/// Permutation matrix P with (P x)_k = x_{perm[k]}.
inline Matrix permutation_matrix(const std::vector<Eigen::Index>& perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) p(k, perm[static_cast<std::size_t>(k)]) = 1.0;
  return p;
}

/// Affine map of applying f1 and then f2.
inline AffineMap compose_affine(const AffineFlow& f1, const AffineFlow& f2) {
  if (f1.dim() != f2.dim()) throw DimensionError("cannot compose affine flows of different dimension");
  const AffineMap m1 = affine_map(f1);
  const AffineMap m2 = affine_map(f2);
  return {m2.linear * m1.linear, m2.linear * m1.offset + m2.offset};
}

inline AffineMap compose_affine(const AffineMap& first, const AffineMap& second) {
  return {second.linear * first.linear, second.linear * first.offset + second.offset};
}

/// Generator form of x -> (x with coordinate `row` replaced by coeffs . x + shift).
/// Needs coeffs[row] > 0. The augmented (d+1)x(d+1) matrix is moved to the
/// triangular form [[lambda, w], [0, I]] by a coordinate relabeling, logged in
/// closed form, and conjugated back.
inline AffineFlow row_update_flow(std::size_t row, const Vector& coeffs, double shift) {
  const Eigen::Index d = coeffs.size();
  const auto r = static_cast<Eigen::Index>(row);
  if (r >= d) throw DimensionError("row index out of range");
  const double lambda = coeffs[r];
  // Relabel so that coordinate `row` comes first: perm[0] = row, then the rest, then the affine slot.
  std::vector<Eigen::Index> perm;
  perm.push_back(r);
  for (Eigen::Index k = 0; k <= d; ++k) {
    if (k != r) perm.push_back(k);
  }
  Vector rest(d);
  Eigen::Index pos = 0;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (k != r) rest[pos++] = coeffs[k];
  }
  rest[d - 1] = shift;
  const Matrix log_tri = triangular_log(lambda, rest);
  const Matrix p = permutation_matrix(perm);
  // U_aug = P^T U_tri P, so ln U_aug = P^T ln(U_tri) P.
  const Matrix log_aug = conjugate_generator(log_tri, p.transpose());
  return {log_aug.topLeftCorner(d, d), log_aug.topRightCorner(d, 1), 1.0};
}

/// Lipschitz bound: ||e^{A t}||_2 for affine flows, the largest realized slope for leaky flows.
inline double lipschitz_estimate(const Flow& f) {
  if (const auto* a = std::get_if<AffineFlow>(&f)) {
    const AffineMap m = affine_map(*a);
    Eigen::JacobiSVD<Matrix> svd(m.linear);
    return svd.singularValues()[0];
  }
  const auto& l = std::get<LeakyFlow>(f);
  return std::max(l.neg_slope().maxCoeff(), l.pos_slope().maxCoeff());
}

/// Bounding box of an affine image of a box.
inline Box image_box(const AffineMap& m, const Box& box) {
  const Vector c = m.linear * box.center() + m.offset;
  const Vector r = m.linear.cwiseAbs() * box.half_width();
  return Box(c - r, c + r);
}

/// Bounding box of f(box). Exact for leaky flows (coordinatewise monotone).
inline Box image_box(const Flow& f, const Box& box) {
  if (box.dim() != flow_dim(f)) throw DimensionError("box dimension does not match flow");
  if (const auto* a = std::get_if<AffineFlow>(&f)) return image_box(affine_map(*a), box);
  const auto& l = std::get<LeakyFlow>(f);
  return Box(eval_leaky_flow(l, box.lower()), eval_leaky_flow(l, box.upper()));
}

}  // namespace vocabflow
