#pragma once

// Operator splitting: generators decomposed onto the vocabulary bases,
// Lie-Trotter composition plans, the first-order error bound, and the
// empirical step-count selector.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vocabflow/box.hpp"
#include "vocabflow/error.hpp"
#include "vocabflow/flows.hpp"
#include "vocabflow/parallel.hpp"
#include "vocabflow/vocab.hpp"

namespace vocabflow {

struct SplitTerm {
  Basis basis;
  double coefficient = 0.0;

  friend bool operator==(const SplitTerm&, const SplitTerm&) = default;
};

/// Generator as a sum of coefficient * basis field, in a fixed order.
struct GeneratorSplit {
  std::size_t dim = 1;
  std::vector<SplitTerm> terms;

  std::size_t size() const noexcept { return terms.size(); }
  bool empty() const noexcept { return terms.empty(); }
};

/// Ax + b = sum a_ij E_ij x + sum b_i e_i. Row-major E_ij first, then e_i; zeros dropped.
inline GeneratorSplit split_affine(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw DimensionError("split_affine: shape mismatch");
  GeneratorSplit out{static_cast<std::size_t>(b.size()), {}};
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) out.terms.push_back({Basis::linear(i, j), a(i, j)});
    }
  }
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (b[i] != 0.0) out.terms.push_back({Basis::translate(i), b[i]});
  }
  return out;
}

/// Sigma_{alpha,beta}(x) = sum alpha_i Sigma_{e_i,0}(x) + sum beta_i Sigma_{0,e_i}(x).
inline GeneratorSplit split_leaky(const Vector& alpha, const Vector& beta) {
  if (alpha.size() != beta.size()) throw DimensionError("split_leaky: shape mismatch");
  GeneratorSplit out{static_cast<std::size_t>(alpha.size()), {}};
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (alpha[i] != 0.0) out.terms.push_back({Basis::neg_part(i), alpha[i]});
  }
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    if (beta[i] != 0.0) out.terms.push_back({Basis::pos_part(i), beta[i]});
  }
  return out;
}

inline GeneratorSplit split_flow(const Flow& f) {
  if (const auto* a = std::get_if<AffineFlow>(&f)) return split_affine(a->generator, a->offset);
  const auto& l = std::get<LeakyFlow>(f);
  return split_leaky(l.neg_log_slope, l.pos_log_slope);
}

inline double flow_time(const Flow& f) {
  return std::visit([](const auto& g) { return g.time; }, f);
}

/// Field value sum_c coefficient_c * g_c(x).
inline Vector recombine(const GeneratorSplit& s, const Vector& x) {
  Vector v = Vector::Zero(x.size());
  const std::span<const double> view(x.data(), static_cast<std::size_t>(x.size()));
  for (const SplitTerm& t : s.terms) v[t.basis.row] += t.coefficient * basis_field_component(t.basis, view);
  return v;
}

struct PlanStep {
  Basis basis;
  double time = 0.0;
};

/// (phi_{v_1}^{t c_1/n} . ... . phi_{v_m}^{t c_m/n})^{. n}, as an ordered list.
inline std::vector<PlanStep> lie_compose(const GeneratorSplit& s, double t, std::size_t n) {
  if (n == 0) throw std::invalid_argument("lie_compose needs n >= 1");
  std::vector<PlanStep> plan;
  plan.reserve(n * s.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (const SplitTerm& term : s.terms) plan.push_back({term.basis, t * term.coefficient / static_cast<double>(n)});
  }
  return plan;
}

inline void apply_plan(std::span<const PlanStep> plan, std::span<double> x) {
  for (const PlanStep& step : plan) apply_basis_flow(step.basis, step.time, x);
}

/// lie_compose(s, t, n) applied to x without materializing the plan.
inline void apply_lie(const GeneratorSplit& s, double t, std::size_t n, std::span<double> x) {
  const double scale = t / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (const SplitTerm& term : s.terms) apply_basis_flow(term.basis, scale * term.coefficient, x);
  }
}

/// Constants of the first-order splitting bound. B and R follow from L, V, X.
struct SplitBoundConstants {
  double lipschitz = 0.0;         // L
  double field_sup = 0.0;         // V
  double initial_sup = 0.0;       // X
  double trajectory_bound = 0.0;  // B = (X + V dt / (1 + L)) e^{L (1 + L) tau}
  double residual_bound = 0.0;    // R = L (V + L B)

  static SplitBoundConstants make(double lipschitz, double field_sup, double initial_sup, double tau, double dt) {
    if (lipschitz < 0.0 || field_sup < 0.0 || initial_sup < 0.0) {
      throw std::invalid_argument("bound constants must be nonnegative");
    }
    SplitBoundConstants c{lipschitz, field_sup, initial_sup, 0.0, 0.0};
    c.trajectory_bound = (initial_sup + field_sup * dt / (1.0 + lipschitz)) * std::exp(lipschitz * (1.0 + lipschitz) * tau);
    c.residual_bound = lipschitz * (field_sup + lipschitz * c.trajectory_bound);
    return c;
  }
};

/// R dt (e^{L tau} - 1) / L, with the limit R dt tau at L = 0.
inline double splitting_error_bound(const SplitBoundConstants& c, double tau, double dt) {
  if (!(dt > 0.0) || dt > 1.0) throw std::invalid_argument("splitting_error_bound needs 0 < dt <= 1");
  if (c.lipschitz == 0.0) return c.residual_bound * dt * tau;
  return c.residual_bound * dt * std::expm1(c.lipschitz * tau) / c.lipschitz;
}

/// L = Lipschitz constant of the full field (>= every component's), V = |v(0)|, X = sup |x0|.
inline SplitBoundConstants bound_constants(const GeneratorSplit& s, double initial_sup, double tau, double dt) {
  const auto d = static_cast<Eigen::Index>(s.dim);
  Matrix a = Matrix::Zero(d, d);
  Vector b = Vector::Zero(d);
  double leaky = 0.0;
  for (const SplitTerm& t : s.terms) {
    switch (t.basis.family) {
      case Family::Translate: b[t.basis.row] += t.coefficient; break;
      case Family::LinearBasis: a(t.basis.row, t.basis.col) += t.coefficient; break;
      case Family::NegPart:
      case Family::PosPart: leaky = std::max(leaky, std::fabs(t.coefficient)); break;
    }
  }
  double lip = leaky;
  if (a.any()) {
    Eigen::JacobiSVD<Matrix> svd(a);
    lip = std::max(lip, svd.singularValues()[0]);
  }
  return SplitBoundConstants::make(lip, b.norm(), initial_sup, tau, dt);
}

// ---------------------------------------------------------------------------
// Probe sets

inline std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > c) break;
      if (c % p == 0) { prime = false; break; }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

inline double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

inline constexpr std::size_t kProbeInterior = 256;
inline constexpr std::uint64_t kProbeSeed = 0x5eedf10aULL;

/// Randomly shifted Halton points in the box plus its 2^min(d,10) corners.
/// Beyond 10 axes the corners hold the remaining coordinates at the box center.
inline std::vector<Vector> probe_set(const Box& box, std::size_t interior = kProbeInterior) {
  const std::size_t d = box.dim();
  const auto primes = first_primes(d);
  std::mt19937_64 rng(kProbeSeed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(d);
  for (double& s : shift) s = unit(rng);

  std::vector<Vector> pts;
  const std::size_t corner_axes = std::min<std::size_t>(d, 10);
  pts.reserve(interior + (std::size_t{1} << corner_axes));
  for (std::size_t k = 0; k < interior; ++k) {
    Vector x(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      double u = radical_inverse(k + 1, primes[i]) + shift[i];
      u -= std::floor(u);
      x[static_cast<Eigen::Index>(i)] = box.lower()[static_cast<Eigen::Index>(i)] +
                                         u * (box.upper() - box.lower())[static_cast<Eigen::Index>(i)];
    }
    pts.push_back(std::move(x));
  }
  const Vector mid = box.center();
  for (std::size_t mask = 0; mask < (std::size_t{1} << corner_axes); ++mask) {
    Vector x = mid;
    for (std::size_t i = 0; i < corner_axes; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      x[ii] = (mask >> i) & 1U ? box.upper()[ii] : box.lower()[ii];
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

/// Sup over probe points of |lie(n)(x) - reference(x)|.
inline double lie_error(const GeneratorSplit& s, double t, std::size_t n, const std::vector<Vector>& probe,
                        const std::vector<Vector>& reference) {
  std::vector<double> err(probe.size());
  parallel_for(probe.size(), [&](std::size_t k) {
    Vector y = probe[k];
    apply_lie(s, t, n, std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
    err[k] = (y - reference[k]).norm();
  });
  double sup = 0.0;
  for (double e : err) sup = std::max(sup, e);
  return sup;
}

inline constexpr std::size_t kMaxSplitSteps = std::size_t{1} << 24;

/// Smallest power-of-two n whose Lie-Trotter error on the probe set is at most
/// eps_stage / 2 against `reference` (a callable Vector -> Vector).
template <class Reference>
std::size_t choose_n(const GeneratorSplit& s, double t, double eps_stage, const std::vector<Vector>& probe,
                     Reference&& reference, std::size_t cap = kMaxSplitSteps) {
  if (!(eps_stage > 0.0)) throw std::invalid_argument("choose_n needs eps_stage > 0");
  if (probe.empty()) throw std::invalid_argument("choose_n needs a non-empty probe set");
  std::vector<Vector> ref(probe.size());
  parallel_for(probe.size(), [&](std::size_t k) { ref[k] = reference(probe[k]); });
  if (s.size() <= 1) return 1;
  for (std::size_t n = 1; n <= cap; n *= 2) {
    if (lie_error(s, t, n, probe, ref) <= 0.5 * eps_stage) return n;
  }
  double x_sup = 0.0;
  for (const Vector& p : probe) x_sup = std::max(x_sup, p.norm());
  const auto c = bound_constants(s, x_sup, t, std::min(1.0, t / static_cast<double>(cap)));
  const double analytic = c.lipschitz > 0.0
                              ? c.residual_bound * t * std::exp(c.lipschitz * t) / (c.lipschitz * 0.5 * eps_stage)
                              : c.residual_bound * t * t / (0.5 * eps_stage);
  throw ResourceError("splitting step count exceeded 2^24; analytic bound suggests n >= " +
                      std::to_string(std::ceil(analytic)));
}

}  // namespace vocabflow
