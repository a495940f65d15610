#pragma once

// Lowering: neural-ODE field -> Euler split steps -> affine and leaky flows ->
// vocabulary sentences, with error budgets allocated along the pipeline.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "vocabflow/box.hpp"
#include "vocabflow/error.hpp"
#include "vocabflow/flows.hpp"
#include "vocabflow/harness.hpp"
#include "vocabflow/kron.hpp"
#include "vocabflow/neural_ode.hpp"
#include "vocabflow/parallel.hpp"
#include "vocabflow/split.hpp"
#include "vocabflow/vocab.hpp"

namespace vocabflow {

inline constexpr double kWeightThreshold = 1e-12;

// ---------------------------------------------------------------------------
// Euler split steps

/// x -> x with x_j replaced by x_j + a * sigma(w . x + b_scalar).
struct StepT {
  std::size_t j = 0;
  double a = 0.0;
  Vector w;
  double b_scalar = 0.0;
  double a_neg = 0.5;
  std::size_t k = 0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(w.size()); }

  bool feasible() const {
    return std::max(1.0 / a_neg, a_neg) * std::fabs(a * w[static_cast<Eigen::Index>(j)]) < 1.0;
  }

  Vector operator()(Vector x) const {
    x[static_cast<Eigen::Index>(j)] += a * leaky_relu(w.dot(x) + b_scalar, a_neg);
    return x;
  }

  /// 1 + |a| |w| max(1, a_neg): Lipschitz bound of the whole step.
  double lipschitz() const { return 1.0 + std::fabs(a) * w.norm() * std::max(1.0, a_neg); }

  /// Interval image of a box.
  Box image(const Box& box) const {
    const double zc = w.dot(box.center()) + b_scalar;
    const double zr = w.cwiseAbs().dot(box.half_width());
    const double s0 = a * leaky_relu(zc - zr, a_neg);
    const double s1 = a * leaky_relu(zc + zr, a_neg);
    Vector lo = box.lower();
    Vector hi = box.upper();
    const auto jj = static_cast<Eigen::Index>(j);
    lo[jj] += std::min(s0, s1);
    hi[jj] += std::max(s0, s1);
    return Box(lo, hi);
  }
};

inline Vector apply_steps(const std::vector<StepT>& steps, Vector x) {
  for (const StepT& t : steps) x = t(std::move(x));
  return x;
}

struct EulerPlan {
  std::size_t n = 1;  // requested resolution: about n steps over the horizon
  std::vector<StepT> steps;
};

inline constexpr std::size_t kMaxEulerSteps = std::size_t{1} << 20;

namespace detail {

inline std::vector<StepT> euler_steps(const NeuralOdeField& field, std::size_t n, bool& feasible) {
  std::vector<StepT> steps;
  feasible = true;
  const double tau = field.horizon();
  std::size_t step_index = 0;
  for (std::size_t iv = 0; iv < field.intervals(); ++iv) {
    const double len = field.breakpoints[iv + 1] - field.breakpoints[iv];
    const auto nk = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(static_cast<double>(n) * len / tau - 1e-9)));
    const double dt = len / static_cast<double>(nk);
    const NeuronLayer& layer = field.layers[iv];
    for (std::size_t s = 0; s < nk; ++s, ++step_index) {
      for (Eigen::Index i = 0; i < layer.b.size(); ++i) {
        for (Eigen::Index j = 0; j < layer.s.cols(); ++j) {
          if (layer.s(i, j) == 0.0) continue;
          StepT t{static_cast<std::size_t>(j), dt * layer.s(i, j), layer.w.row(i).transpose(), layer.b[i],
                  field.a_neg, step_index};
          feasible = feasible && t.feasible();
          steps.push_back(std::move(t));
        }
      }
    }
  }
  return steps;
}

}  // namespace detail

/// Forward Euler split of the field: time step k outer, neuron i, then coordinate j.
/// Each breakpoint interval gets max(1, ceil(n len / tau)) equal steps; n doubles
/// until every step is feasible.
inline EulerPlan euler_plan(const NeuralOdeField& field, std::size_t n) {
  field.validate();
  if (n == 0) throw std::invalid_argument("euler_split needs n >= 1");
  for (; n <= kMaxEulerSteps; n *= 2) {
    bool feasible = false;
    auto steps = detail::euler_steps(field, n, feasible);
    if (feasible) return {n, std::move(steps)};
  }
  throw ResourceError("no feasible Euler step size up to 2^20 steps");
}

inline std::vector<StepT> euler_split(const NeuralOdeField& field, std::size_t n) {
  return euler_plan(field, n).steps;
}

// ---------------------------------------------------------------------------
// Six-flow decomposition

enum class PivotScaling {
  Unit,  // rescale so the pivot weight is 1
  None,  // keep the pivot weight after sign normalization
};

namespace detail {

inline LeakyFlow leaky_on(std::size_t d, std::size_t axis, double neg_slope, double pos_slope) {
  Vector neg = Vector::Ones(static_cast<Eigen::Index>(d));
  Vector pos = Vector::Ones(static_cast<Eigen::Index>(d));
  neg[static_cast<Eigen::Index>(axis)] = neg_slope;
  pos[static_cast<Eigen::Index>(axis)] = pos_slope;
  return LeakyFlow::with_slopes(neg, pos);
}

inline AffineFlow shift_on(std::size_t d, std::size_t axis, double amount) {
  AffineFlow f = AffineFlow::identity(d);
  f.offset[static_cast<Eigen::Index>(axis)] = amount;
  f.time = 1.0;
  return f;
}

}  // namespace detail

/// Flows whose composition equals the step map exactly.
inline std::vector<Flow> decompose_step(const StepT& t, PivotScaling scaling = PivotScaling::Unit) {
  const std::size_t d = t.dim();
  if (t.j >= d) throw DimensionError("step coordinate out of range");
  if (!(t.a_neg > 0.0 && t.a_neg < 1.0)) throw NotAFlowError("leaky slope must lie in (0, 1)");
  if (!t.feasible()) {
    throw InfeasibleStepError("step violates max(1/a, a)|a w_j| < 1; shrink the time step");
  }
  const auto j = static_cast<Eigen::Index>(t.j);
  Vector w = t.w;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (std::fabs(w[k]) < kWeightThreshold) w[k] = 0.0;
  }
  std::vector<Flow> out;

  Eigen::Index pivot = -1;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (k != j && w[k] != 0.0) { pivot = k; break; }
  }

  if (pivot < 0 && w[j] == 0.0) {
    out.emplace_back(detail::shift_on(d, t.j, t.a * leaky_relu(t.b_scalar, t.a_neg)));
    return out;
  }

  if (pivot < 0) {
    const double wj = w[j];
    const double shift = t.b_scalar / wj;
    const double steep = 1.0 + t.a * wj;
    const double shallow = 1.0 + t.a_neg * t.a * wj;
    if (shift != 0.0) out.emplace_back(detail::shift_on(d, t.j, shift));
    out.emplace_back(wj > 0.0 ? detail::leaky_on(d, t.j, shallow, steep) : detail::leaky_on(d, t.j, steep, shallow));
    if (shift != 0.0) out.emplace_back(detail::shift_on(d, t.j, -shift));
    return out;
  }

  // sigma_a(z) = -a sigma_{1/a}(-z) makes the pivot weight positive.
  double a = t.a;
  double b = t.b_scalar;
  double alpha = t.a_neg;
  if (w[pivot] < 0.0) {
    a = -a * alpha;
    w = -w;
    b = -b;
    alpha = 1.0 / alpha;
  }
  if (scaling == PivotScaling::Unit) {
    const double c = w[pivot];
    a *= c;
    w /= c;
    b /= c;
    w[pivot] = 1.0;
  }
  const auto l = static_cast<std::size_t>(pivot);

  const AffineFlow f0 = row_update_flow(l, w, b);
  out.emplace_back(f0);
  out.emplace_back(detail::leaky_on(d, l, alpha, 1.0));
  Vector shear = Vector::Zero(static_cast<Eigen::Index>(d));
  shear[j] = 1.0;
  shear[pivot] = a;
  out.emplace_back(row_update_flow(t.j, shear, 0.0));
  out.emplace_back(detail::leaky_on(d, l, 1.0 / alpha, 1.0));
  if (w[j] != 0.0) out.emplace_back(detail::leaky_on(d, l, 1.0 + w[j] * a * alpha, 1.0 + w[j] * a));
  out.emplace_back(f0.inverse());
  return out;
}

/// Apply flows in order with their closed forms.
inline Vector apply_flows(const std::vector<Flow>& flows, Vector x) {
  for (const Flow& f : flows) x = eval_flow(f, x);
  return x;
}

// ---------------------------------------------------------------------------
// Options and reports

struct CompileOptions {
  KroneckerOptions kron;
  std::size_t max_split_steps = kMaxSplitSteps;
  std::size_t retries = 4;
  GridSpec grid;
  PivotScaling pivot = PivotScaling::Unit;
  double rk4_tol = kRk4Tolerance;
  std::size_t max_euler_doublings = 16;
};

/// Expansion of one elementary time c * tau / n.
struct ComponentExpansion {
  Basis basis;
  double time = 0.0;
  double budget = 0.0;
  KroneckerPair pair;
};

struct FlowCompilation {
  Sentence sentence;
  std::size_t n = 0;
  double budget = 0.0;
  double probe_error = 0.0;
  std::size_t attempts = 0;
  std::vector<ComponentExpansion> components;
};

struct CompilationReport {
  double eps = 0.0;
  double eps_ode = 0.0;
  double eps_flows = 0.0;
  std::size_t ode_n = 0;
  std::size_t euler_steps = 0;
  std::size_t flow_count = 0;
  std::size_t max_split_n = 0;
  std::size_t sentence_length = 0;
  double measured_error = 0.0;
  double flow_stage_error = 0.0;
  std::size_t validation_points = 0;
  GridSpec grid;
  double wall_seconds = 0.0;
  std::vector<FlowCompilation> flows;
};

inline CsvRows report_rows(const CompilationReport& r, bool timing = false, bool pairs = true) {
  CsvRows rows{
      {"eps", format_number(r.eps)},
      {"eps_ode", format_number(r.eps_ode)},
      {"eps_flows", format_number(r.eps_flows)},
      {"ode_n", std::to_string(r.ode_n)},
      {"euler_steps", std::to_string(r.euler_steps)},
      {"flow_count", std::to_string(r.flow_count)},
      {"max_split_n", std::to_string(r.max_split_n)},
      {"sentence_length", std::to_string(r.sentence_length)},
      {"sup_error", format_number(r.measured_error)},
      {"flow_stage_error", format_number(r.flow_stage_error)},
      {"validation_points", std::to_string(r.validation_points)},
      {"lattice", std::to_string(r.grid.lattice)},
      {"random_points", std::to_string(r.grid.random)},
      {"seed", std::to_string(r.grid.seed)},
  };
  if (timing) rows.emplace_back("wall_seconds", format_number(r.wall_seconds));
  if (pairs) {
    for (std::size_t f = 0; f < r.flows.size(); ++f) {
      const FlowCompilation& fc = r.flows[f];
      rows.emplace_back("flow" + std::to_string(f + 1) + "_n", std::to_string(fc.n));
      for (std::size_t c = 0; c < fc.components.size(); ++c) {
        const ComponentExpansion& e = fc.components[c];
        rows.emplace_back("flow" + std::to_string(f + 1) + "_c" + std::to_string(c + 1) + "_pq",
                          std::to_string(e.pair.p) + ":" + std::to_string(e.pair.q));
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Single flow

namespace detail {

inline Flow with_time(Flow f, double time) {
  std::visit([&](auto& g) { g.time = time; }, f);
  return f;
}

inline constexpr std::size_t kTrajectorySamples = 16;
inline constexpr double kLipschitzMargin = 1.1;

/// Per-component sensitivity G_c * Amp: |g_c| sampled along exact trajectories
/// from the probe points, times the largest amplification of the flow over [0, tau].
inline std::vector<double> component_sensitivity(const Flow& f, const GeneratorSplit& s, const std::vector<Vector>& probe) {
  const double tau = flow_time(f);
  std::vector<FlowEvaluator> evals;
  double amp = 1.0;
  for (std::size_t k = 0; k <= kTrajectorySamples; ++k) {
    const Flow fk = with_time(f, tau * static_cast<double>(k) / kTrajectorySamples);
    evals.emplace_back(fk);
    amp = std::max(amp, lipschitz_estimate(fk));
  }
  std::vector<std::vector<double>> per_point(probe.size(), std::vector<double>(s.size(), 0.0));
  parallel_for(probe.size(), [&](std::size_t p) {
    for (const FlowEvaluator& e : evals) {
      const Vector y = e(probe[p]);
      const std::span<const double> view(y.data(), static_cast<std::size_t>(y.size()));
      for (std::size_t c = 0; c < s.size(); ++c) {
        per_point[p][c] = std::max(per_point[p][c], std::fabs(basis_field_component(s.terms[c].basis, view)));
      }
    }
  });
  std::vector<double> lip(s.size(), 0.0);
  for (const auto& row : per_point) {
    for (std::size_t c = 0; c < s.size(); ++c) lip[c] = std::max(lip[c], row[c]);
  }
  for (double& v : lip) v = kLipschitzMargin * std::max(v, 1e-9) * amp;
  return lip;
}

}  // namespace detail

/// Sentence approximating f within eps_stage on the probe set of omega.
inline FlowCompilation compile_flow_detailed(const Flow& f, double eps_stage, const Box& omega,
                                             const CompileOptions& opt = {}) {
  validate_flow(f);
  if (!(eps_stage > 0.0) || !std::isfinite(eps_stage)) throw std::invalid_argument("compile_flow needs eps > 0");
  const std::size_t d = flow_dim(f);
  if (omega.dim() != d) throw DimensionError("domain dimension does not match flow");
  FlowCompilation out;
  out.sentence.dim = d;
  const double tau = flow_time(f);
  const GeneratorSplit split = split_flow(f);
  if (tau == 0.0 || split.empty()) return out;

  const auto probe = probe_set(omega);
  const FlowEvaluator exact(f);
  out.n = choose_n(split, tau, eps_stage, probe, [&](const Vector& x) { return exact(x); }, opt.max_split_steps);
  const std::vector<double> lip = detail::component_sensitivity(f, split, probe);
  std::vector<Vector> reference(probe.size());
  parallel_for(probe.size(), [&](std::size_t k) { reference[k] = exact(probe[k]); });

  const double m = static_cast<double>(split.size());
  const double n = static_cast<double>(out.n);
  double scale = 1.0;
  for (std::size_t attempt = 1; attempt <= opt.retries + 1; ++attempt, scale *= 0.5) {
    out.attempts = attempt;
    out.components.clear();
    std::vector<Word> block;
    for (std::size_t c = 0; c < split.size(); ++c) {
      const SplitTerm& term = split.terms[c];
      ComponentExpansion e{term.basis, tau * term.coefficient / n, scale * eps_stage / (2.0 * m * n * lip[c]), {}};
      const auto words = balanced_expansion(term.basis, Sign::Plus, e.time, e.budget, opt.kron);
      e.pair = kronecker_pq(std::fabs(e.time), e.budget, opt.kron);
      block.insert(block.end(), words.begin(), words.end());
      out.components.push_back(e);
    }
    out.budget = scale * eps_stage;
    out.sentence.words.clear();
    out.sentence.words.reserve(block.size() * out.n);
    for (std::size_t k = 0; k < out.n; ++k) out.sentence.words.insert(out.sentence.words.end(), block.begin(), block.end());

    const SentenceEvaluator eval(out.sentence);
    std::vector<double> err(probe.size());
    parallel_for(probe.size(), [&](std::size_t k) { err[k] = (eval(probe[k]) - reference[k]).norm(); });
    out.probe_error = 0.0;
    for (double e : err) out.probe_error = std::max(out.probe_error, e);
    if (out.probe_error <= eps_stage) return out;
  }
  throw ValidationError("flow compilation missed its budget: probe error " + format_number(out.probe_error) +
                        " > " + format_number(eps_stage));
}

inline Sentence compile_flow(const Flow& f, double eps_stage, const Box& omega, const CompileOptions& opt = {}) {
  return compile_flow_detailed(f, eps_stage, omega, opt).sentence;
}

// ---------------------------------------------------------------------------
// Flow programs

/// A run of flows whose composition has a known Lipschitz bound and interval image.
struct FlowGroup {
  std::vector<Flow> flows;
  double lipschitz = 1.0;
  std::function<Box(const Box&)> image;
};

inline FlowGroup single_flow_group(const Flow& f) {
  return {{f}, lipschitz_estimate(f), [f](const Box& b) { return image_box(f, b); }};
}

inline FlowGroup step_group(const StepT& t, PivotScaling scaling = PivotScaling::Unit) {
  return {decompose_step(t, scaling), t.lipschitz(), [t](const Box& b) { return t.image(b); }};
}

struct ProgramCompilation {
  Sentence sentence;
  std::vector<FlowCompilation> flows;
  double measured_error = 0.0;
  std::size_t validation_points = 0;
};

inline constexpr double kMinFlowBudget = 1e-12;

/// Budgets eps_i = eps / (m Lambda_i), Lambda_i the Lipschitz product of what
/// follows flow i; domains propagated by interval images plus the running error.
inline ProgramCompilation compile_program(const std::vector<FlowGroup>& groups, double eps, const Box& omega,
                                          const CompileOptions& opt = {}) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("compilation needs eps > 0");
  ProgramCompilation out;
  out.sentence.dim = omega.dim();
  std::size_t m = 0;
  for (const FlowGroup& g : groups) {
    for (const Flow& f : g.flows) {
      validate_flow(f);
      if (flow_dim(f) != omega.dim()) throw DimensionError("flow dimension does not match domain");
    }
    m += g.flows.size();
  }
  if (m == 0) return out;

  std::vector<double> later_groups(groups.size() + 1, 1.0);
  for (std::size_t g = groups.size(); g-- > 0;) later_groups[g] = later_groups[g + 1] * groups[g].lipschitz;

  Box exact_box = omega;
  double carried = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const FlowGroup& grp = groups[g];
    std::vector<double> lips(grp.flows.size());
    for (std::size_t i = 0; i < grp.flows.size(); ++i) lips[i] = lipschitz_estimate(grp.flows[i]);
    Box box = exact_box;
    double running = carried;
    double fresh = 0.0;
    std::vector<double> suffix(grp.flows.size() + 1, 1.0);
    for (std::size_t i = grp.flows.size(); i-- > 0;) suffix[i] = suffix[i + 1] * lips[i];
    for (std::size_t i = 0; i < grp.flows.size(); ++i) {
      const Flow& f = grp.flows[i];
      const double lambda = suffix[i + 1] * later_groups[g + 1];
      const double budget = eps / (static_cast<double>(m) * lambda);
      if (!std::isfinite(lambda) || !(budget >= kMinFlowBudget)) {
        throw ResourceError("flow budget infeasible: downstream Lipschitz product " + format_number(lambda));
      }
      const Box domain = running > 0.0 ? box.inflated(running) : box;
      FlowCompilation fc = compile_flow_detailed(f, budget, domain, opt);
      out.sentence.append(fc.sentence);
      out.flows.push_back(std::move(fc));
      running = lips[i] * running + budget;
      fresh = lips[i] * fresh + budget;
      box = image_box(f, box);
    }
    carried = std::min(running, grp.lipschitz * carried + fresh);
    exact_box = grp.image ? grp.image(exact_box) : box;
  }

  std::vector<FlowEvaluator> evals;
  for (const FlowGroup& g : groups) {
    for (const Flow& f : g.flows) evals.emplace_back(f);
  }
  const SentenceEvaluator approx(out.sentence);
  const GridPoints grid = validation_grid(omega, opt.grid);
  const ErrorReport rep = measure_discrepancy(
      [&](const Vector& x) { return approx(x); },
      [&](const Vector& x) {
        Vector y = x;
        for (const FlowEvaluator& e : evals) y = e(y);
        return y;
      },
      grid);
  out.measured_error = rep.sup_error;
  out.validation_points = grid.points.size();
  if (!(rep.sup_error <= eps)) {
    throw ValidationError("compiled program error " + format_number(rep.sup_error) + " exceeds " + format_number(eps));
  }
  return out;
}

namespace detail {

inline void fill_report(CompilationReport& rep, ProgramCompilation&& prog) {
  rep.flow_count = prog.flows.size();
  rep.sentence_length = prog.sentence.size();
  rep.validation_points = prog.validation_points;
  rep.flow_stage_error = prog.measured_error;
  for (const FlowCompilation& f : prog.flows) rep.max_split_n = std::max(rep.max_split_n, f.n);
  rep.flows = std::move(prog.flows);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

struct CompileResult {
  Sentence sentence;
  CompilationReport report;
};

/// Sentence approximating flows[0] then flows[1] ... within eps on omega.
inline CompileResult compile_flow_sequence(const std::vector<Flow>& flows, double eps, const Box& omega,
                                           const CompileOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<FlowGroup> groups;
  for (const Flow& f : flows) groups.push_back(single_flow_group(f));
  ProgramCompilation prog = compile_program(groups, eps, omega, opt);
  CompileResult res;
  res.sentence = prog.sentence;
  res.report.eps = eps;
  res.report.eps_flows = eps;
  res.report.grid = opt.grid;
  res.report.measured_error = prog.measured_error;
  detail::fill_report(res.report, std::move(prog));
  res.report.wall_seconds = detail::seconds_since(t0);
  return res;
}

/// Sentence approximating the time-horizon flow of a neural ODE within eps on omega.
/// Half of eps goes to the Euler split, half to the flow program.
inline CompileResult compile_neural_ode(const NeuralOdeField& field, double eps, const Box& omega,
                                        const CompileOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  field.validate();
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("compilation needs eps > 0");
  if (omega.dim() != field.dim) throw DimensionError("domain dimension does not match field");
  CompileResult res;
  res.sentence.dim = field.dim;
  res.report.eps = eps;
  res.report.eps_ode = 0.5 * eps;
  res.report.eps_flows = 0.5 * eps;
  res.report.grid = opt.grid;
  if (field.is_zero()) return res;

  const auto probe = probe_set(omega);
  std::vector<Vector> reference(probe.size());
  parallel_for(probe.size(), [&](std::size_t k) { reference[k] = rk4_flow(field, probe[k], opt.rk4_tol); });

  EulerPlan plan;
  bool found = false;
  std::size_t n = 1;
  for (std::size_t level = 0; level <= opt.max_euler_doublings && !found; ++level) {
    plan = euler_plan(field, n);
    std::vector<double> err(probe.size());
    parallel_for(probe.size(), [&](std::size_t k) { err[k] = (apply_steps(plan.steps, probe[k]) - reference[k]).norm(); });
    double sup = 0.0;
    for (double e : err) sup = std::max(sup, e);
    found = sup <= 0.5 * eps;
    n = plan.n * 2;
  }
  if (!found) throw ResourceError("Euler split did not reach eps/2 within the step cap");
  res.report.ode_n = plan.n;
  res.report.euler_steps = plan.steps.size();

  std::vector<FlowGroup> groups;
  for (const StepT& t : plan.steps) groups.push_back(step_group(t, opt.pivot));
  ProgramCompilation prog = compile_program(groups, 0.5 * eps, omega, opt);

  const SentenceEvaluator approx(prog.sentence);
  const GridPoints grid = validation_grid(omega, opt.grid);
  const ErrorReport rep = measure_discrepancy([&](const Vector& x) { return approx(x); },
                                              [&](const Vector& x) { return rk4_flow(field, x, opt.rk4_tol); }, grid);
  res.report.measured_error = rep.sup_error;
  res.sentence = prog.sentence;
  detail::fill_report(res.report, std::move(prog));
  res.report.validation_points = grid.points.size();
  res.report.wall_seconds = detail::seconds_since(t0);
  if (!(rep.sup_error <= eps)) {
    throw ValidationError("compiled neural ODE error " + format_number(rep.sup_error) + " exceeds " + format_number(eps));
  }
  return res;
}

}  // namespace vocabflow
