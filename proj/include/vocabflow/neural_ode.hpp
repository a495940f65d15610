#pragma once

// One-hidden-layer field v(t, x) = sum_i s_i(t) sigma_a(w_i(t) . x + b_i(t)),
// with parameters piecewise constant between breakpoints.

#include <algorithm>
#include <cmath>
#include <vector>

#include "vocabflow/error.hpp"
#include "vocabflow/linalg.hpp"

namespace vocabflow {

inline double leaky_relu(double z, double a_neg) { return z < 0.0 ? a_neg * z : z; }

/// Parameters on one interval [t_k, t_{k+1}): row i of s and w belongs to neuron i.
struct NeuronLayer {
  Matrix s;  // N x d
  Matrix w;  // N x d
  Vector b;  // N
};

struct NeuralOdeField {
  std::size_t dim = 1;
  std::size_t width = 1;
  double a_neg = 0.5;
  std::vector<double> breakpoints{0.0, 1.0};
  std::vector<NeuronLayer> layers;

  double horizon() const { return breakpoints.back(); }
  std::size_t intervals() const noexcept { return layers.size(); }

  void validate() const {
    if (dim == 0 || width == 0) throw DimensionError("neural ODE needs positive dimension and width");
    if (!(a_neg > 0.0 && a_neg < 1.0)) throw NotAFlowError("leaky slope must lie in (0, 1)");
    if (breakpoints.size() < 2 || breakpoints.front() != 0.0) {
      throw NotAFlowError("breakpoints must start at 0 and hold at least one interval");
    }
    for (std::size_t k = 1; k < breakpoints.size(); ++k) {
      if (!(breakpoints[k] > breakpoints[k - 1]) || !std::isfinite(breakpoints[k])) {
        throw NotAFlowError("breakpoints must be finite and strictly increasing");
      }
    }
    if (layers.size() + 1 != breakpoints.size()) throw DimensionError("one parameter layer per interval");
    const auto n = static_cast<Eigen::Index>(width);
    const auto d = static_cast<Eigen::Index>(dim);
    for (const NeuronLayer& l : layers) {
      if (l.s.rows() != n || l.s.cols() != d || l.w.rows() != n || l.w.cols() != d || l.b.size() != n) {
        throw DimensionError("neuron layer shape does not match (width, dim)");
      }
      if (!l.s.allFinite() || !l.w.allFinite() || !l.b.allFinite()) {
        throw NotAFlowError("neural ODE parameters must be finite");
      }
    }
  }

  /// Interval index holding t; the right endpoint belongs to the last interval.
  std::size_t interval_at(double t) const {
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - breakpoints.begin() - 1));
    return std::min(k, layers.size() - 1);
  }

  /// Field value on interval k.
  void eval(std::size_t k, const Vector& x, Vector& out) const {
    const NeuronLayer& l = layers[k];
    out.setZero(x.size());
    for (Eigen::Index i = 0; i < l.b.size(); ++i) {
      const double h = leaky_relu(l.w.row(i).dot(x) + l.b[i], a_neg);
      if (h != 0.0) out += h * l.s.row(i).transpose();
    }
  }

  Vector operator()(double t, const Vector& x) const {
    Vector out;
    eval(interval_at(t), x, out);
    return out;
  }

  bool is_zero() const {
    return std::all_of(layers.begin(), layers.end(), [](const NeuronLayer& l) { return !l.s.any(); });
  }

  /// max |s_ij|, |w_ij|, |b_i| over all intervals; feasibility diagnostics only.
  double parameter_bound() const {
    double c = 0.0;
    for (const NeuronLayer& l : layers) {
      c = std::max({c, l.s.cwiseAbs().maxCoeff(), l.w.cwiseAbs().maxCoeff(), l.b.cwiseAbs().maxCoeff()});
    }
    return c;
  }

  /// Same parameters on all of [0, tau].
  static NeuralOdeField constant(double a_neg, double tau, Matrix s, Matrix w, Vector b) {
    NeuralOdeField f;
    f.dim = static_cast<std::size_t>(s.cols());
    f.width = static_cast<std::size_t>(s.rows());
    f.a_neg = a_neg;
    f.breakpoints = {0.0, tau};
    f.layers = {{std::move(s), std::move(w), std::move(b)}};
    f.validate();
    return f;
  }
};

}  // namespace vocabflow
