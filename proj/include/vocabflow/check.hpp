#pragma once

// Randomized oracle-coherence suite: closed forms against RK4, six-flow
// exactness, the Kronecker contract, and the triangular logarithm.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vocabflow/compile.hpp"
#include "vocabflow/flows.hpp"
#include "vocabflow/harness.hpp"
#include "vocabflow/kron.hpp"
#include "vocabflow/vocab.hpp"

namespace vocabflow {

struct CheckResult {
  std::string name;
  std::size_t cases = 0;
  double max_error = 0.0;
  double tolerance = 0.0;

  bool passed() const { return max_error <= tolerance; }
};

/// Which branch of the step decomposition a random step exercises.
enum class StepCase { ZeroWeight, OwnWeight, PivotPositive, PivotNegative };

inline Vector random_vector(std::mt19937_64& rng, std::size_t d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = u(rng);
  return v;
}

/// Random step satisfying max(1/a_neg, a_neg)|a w_j| < 1, shaped for the given case.
/// PivotPositive and PivotNegative need d >= 2.
inline StepT random_step(std::mt19937_64& rng, std::size_t d, StepCase kind) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> slope(0.1, 0.9);
  std::uniform_int_distribution<std::size_t> coord(0, d - 1);
  StepT t;
  t.j = coord(rng);
  t.a_neg = slope(rng);
  t.b_scalar = u(rng);
  t.w = Vector::Zero(static_cast<Eigen::Index>(d));
  const auto j = static_cast<Eigen::Index>(t.j);
  if (kind == StepCase::OwnWeight) {
    t.w[j] = 2.0 * u(rng);
  } else if (kind == StepCase::PivotPositive || kind == StepCase::PivotNegative) {
    t.w = random_vector(rng, d, -2.0, 2.0);
    std::uniform_int_distribution<std::size_t> other(0, d - 2);
    auto l = static_cast<Eigen::Index>(other(rng));
    if (l >= j) ++l;
    for (Eigen::Index k = 0; k < l; ++k) {
      if (k != j) t.w[k] = 0.0;
    }
    const double mag = 0.2 + std::fabs(t.w[l]);
    t.w[l] = kind == StepCase::PivotPositive ? mag : -mag;
  }
  const double wj = std::fabs(t.w[j]);
  const double cap = wj > 0.0 ? t.a_neg / wj : 1.0;
  t.a = 0.9 * cap * u(rng);
  if (kind == StepCase::ZeroWeight) t.a = u(rng);
  return t;
}

inline std::vector<CheckResult> run_checks(std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("check needs at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim3(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CheckResult> out;

  CheckResult words{"words_vs_rk4", samples, 0.0, 1e-6};
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t d = dim3(rng);
    const auto vocab = vocabulary(d);
    const Word w = vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)];
    const Vector x = random_vector(rng, d, -5.0, 5.0);
    const Vector ref = rk4_flow(word_field(w), tau_value(w.tau), x);
    words.max_error = std::max(words.max_error, (apply_word(w, x) - ref).norm());
  }
  out.push_back(words);

  CheckResult affine{"affine_vs_rk4", samples, 0.0, 1e-6};
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t d = dim3(rng);
    Matrix a = Matrix::NullaryExpr(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d),
                                   [&] { return 2.0 * unit(rng) - 1.0; });
    const AffineFlow f{a, random_vector(rng, d, -1.0, 1.0), 2.0 * unit(rng)};
    const Vector x = random_vector(rng, d, -2.0, 2.0);
    const Vector ref = rk4_flow(affine_field(f.generator, f.offset), f.time, x);
    affine.max_error = std::max(affine.max_error, (eval_affine_flow(f, x) - ref).norm());
  }
  out.push_back(affine);

  CheckResult leaky{"leaky_vs_rk4", samples, 0.0, 1e-6};
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t d = dim3(rng);
    const LeakyFlow f{random_vector(rng, d, -1.0, 1.0), random_vector(rng, d, -1.0, 1.0), 2.0 * unit(rng)};
    const Vector x = random_vector(rng, d, -2.0, 2.0);
    const Vector ref = rk4_flow(leaky_field(f.neg_log_slope, f.pos_log_slope), f.time, x);
    leaky.max_error = std::max(leaky.max_error, (eval_leaky_flow(f, x) - ref).norm());
  }
  out.push_back(leaky);

  CheckResult six{"six_flow_exactness", samples, 0.0, 1e-9};
  for (std::size_t s = 0; s < samples; ++s) {
    const auto kind = static_cast<StepCase>(s % 4);
    const std::size_t d = kind == StepCase::PivotPositive || kind == StepCase::PivotNegative ? 1 + dim3(rng) : dim3(rng);
    const StepT t = random_step(rng, d, kind);
    const auto flows = decompose_step(t);
    for (int p = 0; p < 4; ++p) {
      const Vector x = random_vector(rng, d, -3.0, 3.0);
      six.max_error = std::max(six.max_error, (apply_flows(flows, x) - t(x)).norm());
    }
  }
  out.push_back(six);

  CheckResult kron{"kronecker_contract", samples, 0.0, 1.0};
  const double eps_set[] = {1e-2, 1e-4, 1e-6};
  for (std::size_t s = 0; s < samples; ++s) {
    const double t = 10.0 * (1.0 - unit(rng));
    const double eps = eps_set[s % 3];
    const KroneckerPair pq = kronecker_pq(t, eps);
    const double r = static_cast<double>(detail::kron_residual(t, pq.p, pq.q));
    // ratio |residual| / eps must stay strictly below 1
    const double ratio = std::fabs(r) / eps;
    kron.max_error = std::max(kron.max_error, ratio < 1.0 ? ratio : 2.0);
  }
  out.push_back(kron);

  CheckResult tri{"triangular_log", samples, 0.0, 1e-10};
  const double lambdas[] = {0.1, 0.5, 1.0, 2.0, 10.0};
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t d = 2 + s % 7;
    const double lambda = lambdas[s % 5];
    const Vector w = random_vector(rng, d - 1, -1.0, 1.0);
    Matrix u = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    u(0, 0) = lambda;
    u.block(0, 1, 1, static_cast<Eigen::Index>(d - 1)) = w.transpose();
    tri.max_error = std::max(tri.max_error, (expm(triangular_log(lambda, w)) - u).cwiseAbs().maxCoeff());
  }
  out.push_back(tri);
  return out;
}

}  // namespace vocabflow
