#pragma once

// Reference integration, target maps, validation grids, and error reports.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vocabflow/box.hpp"
#include "vocabflow/error.hpp"
#include "vocabflow/flows.hpp"
#include "vocabflow/neural_ode.hpp"
#include "vocabflow/parallel.hpp"
#include "vocabflow/vocab.hpp"

namespace vocabflow {

// ---------------------------------------------------------------------------
// RK4 oracle

inline constexpr double kRk4Tolerance = 1e-9;
inline constexpr int kRk4MaxHalvings = 24;

namespace detail {

template <class Field>
Vector rk4_fixed(Field& field, double t0, double t1, const Vector& x0, std::size_t steps) {
  const double h = (t1 - t0) / static_cast<double>(steps);
  Vector x = x0;
  Vector k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size()), tmp(x.size());
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t0 + h * static_cast<double>(s);
    field(t, x, k1);
    tmp = x + 0.5 * h * k1;
    field(t + 0.5 * h, tmp, k2);
    tmp = x + 0.5 * h * k2;
    field(t + 0.5 * h, tmp, k3);
    tmp = x + h * k3;
    field(t + h, tmp, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace detail

/// Classical RK4 on [t0, t1] for field(t, x, out), doubling the step count until
/// two successive refinements differ by less than tol.
template <class Field>
Vector rk4_integrate(Field&& field, double t0, double t1, const Vector& x, double tol = kRk4Tolerance) {
  if (!(tol > 0.0)) throw std::invalid_argument("rk4 tolerance must be positive");
  if (t1 == t0) return x;
  Vector prev = detail::rk4_fixed(field, t0, t1, x, 1);
  for (int level = 1; level <= kRk4MaxHalvings; ++level) {
    Vector next = detail::rk4_fixed(field, t0, t1, x, std::size_t{1} << level);
    if ((next - prev).norm() < tol) return next;
    prev = std::move(next);
  }
  throw StepUnderflowError("RK4 did not reach tolerance after 2^24 steps");
}

/// Time-tau flow of an autonomous field(x, out).
template <class Field>
Vector rk4_flow(Field&& field, double tau, const Vector& x, double tol = kRk4Tolerance) {
  auto f = [&](double, const Vector& y, Vector& out) { field(y, out); };
  return rk4_integrate(f, 0.0, tau, x, tol);
}

/// Flow of a piecewise-constant neural ODE over [0, horizon], one interval at a time.
inline Vector rk4_flow(const NeuralOdeField& field, const Vector& x, double tol = kRk4Tolerance) {
  if (static_cast<std::size_t>(x.size()) != field.dim) throw DimensionError("point dimension mismatch");
  Vector y = x;
  for (std::size_t k = 0; k < field.intervals(); ++k) {
    auto f = [&](double, const Vector& z, Vector& out) { field.eval(k, z, out); };
    y = rk4_integrate(f, field.breakpoints[k], field.breakpoints[k + 1], y, tol);
  }
  return y;
}

/// Field x -> A x + b.
inline auto affine_field(const Matrix& a, const Vector& b) {
  return [a, b](const Vector& x, Vector& out) { out = a * x + b; };
}

/// Field x -> Sigma_{alpha,beta}(x).
inline auto leaky_field(const Vector& alpha, const Vector& beta) {
  return [alpha, beta](const Vector& x, Vector& out) {
    out.resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = (x[i] < 0.0 ? alpha[i] : beta[i]) * x[i];
  };
}

/// Field of a word's signed generator.
inline auto word_field(const Word& w) {
  return [w](const Vector& x, Vector& out) {
    out.setZero(x.size());
    const double s = sign_value(w.sign);
    const std::size_t i = w.basis.row;
    const std::size_t j = w.basis.col;
    switch (w.basis.family) {
      case Family::Translate: out[i] = s; break;
      case Family::LinearBasis: out[i] = s * x[j]; break;
      case Family::NegPart: out[i] = x[i] < 0.0 ? s * x[i] : 0.0; break;
      case Family::PosPart: out[i] = x[i] >= 0.0 ? s * x[i] : 0.0; break;
    }
  };
}

// ---------------------------------------------------------------------------
// Targets

/// x -> W x + c, given directly as a map.
struct ExactAffine {
  Matrix linear;
  Vector offset;
};

struct NeuralOdeFlow {
  NeuralOdeField field;
  double tol = kRk4Tolerance;
};

struct TargetMap;

struct Composition {
  std::vector<TargetMap> items;
};

struct TargetMap {
  std::variant<ExactAffine, AffineFlow, LeakyFlow, NeuralOdeFlow, Composition> value;
};

inline std::size_t target_dim(const TargetMap& t) {
  return std::visit(
      [](const auto& v) -> std::size_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ExactAffine>) return static_cast<std::size_t>(v.offset.size());
        else if constexpr (std::is_same_v<T, NeuralOdeFlow>) return v.field.dim;
        else if constexpr (std::is_same_v<T, Composition>) {
          if (v.items.empty()) throw DimensionError("empty composition has no dimension");
          const std::size_t d = target_dim(v.items.front());
          for (const TargetMap& item : v.items) {
            if (target_dim(item) != d) throw DimensionError("composition items disagree in dimension");
          }
          return d;
        } else {
          return v.dim();
        }
      },
      t.value);
}

/// Callable evaluating a target; affine and leaky targets use their closed forms.
inline std::function<Vector(const Vector&)> target_evaluator(const TargetMap& t) {
  return std::visit(
      [](const auto& v) -> std::function<Vector(const Vector&)> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ExactAffine>) {
          return [v](const Vector& x) -> Vector { return v.linear * x + v.offset; };
        } else if constexpr (std::is_same_v<T, NeuralOdeFlow>) {
          return [v](const Vector& x) { return rk4_flow(v.field, x, v.tol); };
        } else if constexpr (std::is_same_v<T, Composition>) {
          std::vector<std::function<Vector(const Vector&)>> parts;
          for (const TargetMap& item : v.items) parts.push_back(target_evaluator(item));
          return [parts](const Vector& x) {
            Vector y = x;
            for (const auto& p : parts) y = p(y);
            return y;
          };
        } else {
          FlowEvaluator eval{Flow{v}};
          return [eval](const Vector& x) { return eval(x); };
        }
      },
      t.value);
}

// ---------------------------------------------------------------------------
// Validation grids

struct GridSpec {
  std::size_t lattice = 33;   // points per axis for d <= 4
  std::size_t random = 512;   // extra uniform interior points
  std::uint64_t seed = 42;
};

/// Points per axis: the requested value up to 4 axes, reduced beyond that so
/// the lattice never exceeds lattice^4 points.
inline std::size_t lattice_per_axis(const GridSpec& g, std::size_t d) {
  if (g.lattice < 2) throw std::invalid_argument("lattice needs at least 2 points per axis");
  if (d <= 4) return g.lattice;
  const double k = std::floor(std::pow(static_cast<double>(g.lattice), 4.0 / static_cast<double>(d)) + 1e-9);
  return std::max<std::size_t>(2, static_cast<std::size_t>(k));
}

struct GridPoints {
  std::vector<Vector> points;
  std::vector<double> weights;  // trapezoid weights on the lattice part, 0 on random points
  std::size_t per_axis = 0;
  std::size_t lattice_count = 0;
};

inline GridPoints validation_grid(const Box& box, const GridSpec& g) {
  const std::size_t d = box.dim();
  const std::size_t k = lattice_per_axis(g, d);
  GridPoints out;
  out.per_axis = k;
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= k;
  out.lattice_count = total;
  out.points.reserve(total + g.random);
  out.weights.reserve(total + g.random);
  const Vector step = (box.upper() - box.lower()) / static_cast<double>(k - 1);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Vector x(static_cast<Eigen::Index>(d));
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      x[ii] = idx[i] + 1 == k ? box.upper()[ii] : box.lower()[ii] + step[ii] * static_cast<double>(idx[i]);
      w *= step[ii] * (idx[i] == 0 || idx[i] + 1 == k ? 0.5 : 1.0);
    }
    out.points.push_back(std::move(x));
    out.weights.push_back(w);
    for (std::size_t i = 0; i < d; ++i) {
      if (++idx[i] < k) break;
      idx[i] = 0;
    }
  }
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t r = 0; r < g.random; ++r) {
    Vector x(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      x[ii] = box.lower()[ii] + unit(rng) * (box.upper()[ii] - box.lower()[ii]);
    }
    out.points.push_back(std::move(x));
    out.weights.push_back(0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Error reports

struct ErrorReport {
  double sup_error = 0.0;
  double lp_error = 0.0;
  double p = 2.0;
  Vector argmax;
  std::size_t lattice_per_axis = 0;
  std::size_t lattice_points = 0;
  std::size_t random_points = 0;
  std::size_t sentence_length = 0;
  std::uint64_t seed = 0;
  std::vector<double> pointwise;  // per-point error, grid order
};

/// Euclidean discrepancy between two maps over a grid. The L^p part is the
/// trapezoid rule on the lattice points.
inline ErrorReport measure_discrepancy(const std::function<Vector(const Vector&)>& approx,
                                       const std::function<Vector(const Vector&)>& target, const GridPoints& grid,
                                       double p = 2.0) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("L^p error needs p in [1, inf)");
  ErrorReport rep;
  rep.p = p;
  rep.pointwise.assign(grid.points.size(), 0.0);
  parallel_for(grid.points.size(), [&](std::size_t k) {
    const Vector a = approx(grid.points[k]);
    const Vector b = target(grid.points[k]);
    if (a.size() != b.size()) throw DimensionError("approximation and target disagree in dimension");
    rep.pointwise[k] = (a - b).norm();
  });
  double acc = 0.0;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    const double e = rep.pointwise[k];
    if (e > rep.sup_error || std::isnan(e)) {
      rep.sup_error = std::isnan(e) ? std::numeric_limits<double>::infinity() : e;
      arg = k;
    }
    acc += grid.weights[k] * std::pow(e, p);
  }
  rep.lp_error = std::pow(acc, 1.0 / p);
  if (!grid.points.empty()) rep.argmax = grid.points[arg];
  rep.lattice_per_axis = grid.per_axis;
  rep.lattice_points = grid.lattice_count;
  rep.random_points = grid.points.size() - grid.lattice_count;
  return rep;
}

/// Sup (and L^p) error of a sentence against a target on the lattice-plus-random grid.
inline ErrorReport sup_error(const TargetMap& target, const Sentence& s, const Box& omega, const GridSpec& grid,
                             double p = 2.0) {
  if (target_dim(target) != s.dim || omega.dim() != s.dim) {
    throw DimensionError("target, sentence, and domain dimensions must agree");
  }
  const SentenceEvaluator eval(s);
  auto rep = measure_discrepancy([&](const Vector& x) { return eval(x); }, target_evaluator(target),
                                 validation_grid(omega, grid), p);
  rep.sentence_length = s.size();
  rep.seed = grid.seed;
  return rep;
}

inline double lp_error(const TargetMap& target, const Sentence& s, const Box& omega, double p, const GridSpec& grid) {
  return sup_error(target, s, omega, grid, p).lp_error;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

using CsvRows = std::vector<std::pair<std::string, std::string>>;

inline void write_metric_csv(std::ostream& os, const CsvRows& rows) {
  os << "metric,value\n";
  for (const auto& [k, v] : rows) os << k << ',' << v << '\n';
}

inline CsvRows report_rows(const ErrorReport& r) {
  CsvRows rows{
      {"sup_error", format_number(r.sup_error)},
      {"lp_error", format_number(r.lp_error)},
      {"p", format_number(r.p)},
      {"lattice_per_axis", std::to_string(r.lattice_per_axis)},
      {"lattice_points", std::to_string(r.lattice_points)},
      {"random_points", std::to_string(r.random_points)},
      {"sentence_length", std::to_string(r.sentence_length)},
      {"seed", std::to_string(r.seed)},
  };
  for (Eigen::Index i = 0; i < r.argmax.size(); ++i) {
    rows.emplace_back("argmax_x" + std::to_string(i + 1), format_number(r.argmax[i]));
  }
  return rows;
}

/// Per-point dump: x1,...,xd,err.
inline void write_pointwise_csv(std::ostream& os, const GridPoints& grid, const std::vector<double>& err) {
  const std::size_t d = grid.points.empty() ? 0 : static_cast<std::size_t>(grid.points.front().size());
  for (std::size_t i = 0; i < d; ++i) os << 'x' << i + 1 << ',';
  os << "err\n";
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    for (Eigen::Index i = 0; i < grid.points[k].size(); ++i) os << format_number(grid.points[k][i]) << ',';
    os << format_number(err[k]) << '\n';
  }
}

}  // namespace vocabflow
