// Acceptance gate: one PASS/FAIL line per criterion.
// Usage: acceptance <path-to-vocabflow-cli> [work-dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <string>
#include <vector>

#include <json.hpp>

#include "vocabflow.hpp"

namespace fs = std::filesystem;
using namespace vocabflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " (" << detail << ")" << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v, int digits = 3) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Vector uniform_vector(std::mt19937_64& rng, std::size_t d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = u(rng);
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

double metric(const std::string& csv, const std::string& key) {
  std::istringstream is(csv);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind(key + ",", 0) == 0) return std::stod(line.substr(key.size() + 1));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

int shell(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Independent census of token strings.
std::set<std::string> census(std::size_t d) {
  std::set<std::string> out;
  for (const char* sign : {"+", "-"}) {
    for (const char* tau : {"1", "s"}) {
      for (std::size_t i = 1; i <= d; ++i) {
        for (const char* fam : {"T", "N", "P"}) out.insert(std::string(fam) + sign + std::to_string(i) + "@" + tau);
        for (std::size_t j = 1; j <= d; ++j) {
          out.insert(std::string("L") + sign + std::to_string(i) + "." + std::to_string(j) + "@" + tau);
        }
      }
    }
  }
  return out;
}

Vector step_oracle(const StepT& t, Vector x) {
  const double z = t.w.dot(x) + t.b_scalar;
  x[static_cast<Eigen::Index>(t.j)] += t.a * (z < 0.0 ? t.a_neg * z : z);
  return x;
}

void criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  std::size_t cases = 0;
  for (std::size_t d : {1u, 2u, 3u, 5u}) {
    const auto vocab = vocabulary(d);
    for (Family fam : {Family::Translate, Family::LinearBasis, Family::NegPart, Family::PosPart}) {
      std::vector<Word> members;
      for (const Word& w : vocab) {
        if (w.basis.family == fam) members.push_back(w);
      }
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      std::vector<Word> words(1000);
      std::vector<Vector> xs(1000);
      for (std::size_t k = 0; k < 1000; ++k) {
        words[k] = members[pick(rng)];
        xs[k] = uniform_vector(rng, d, -5.0, 5.0);
      }
      std::vector<double> err(1000);
      parallel_for(1000, [&](std::size_t k) {
        const Vector ref = rk4_flow(word_field(words[k]), tau_value(words[k].tau), xs[k]);
        err[k] = (apply_word(words[k], xs[k]) - ref).norm();
      });
      for (double e : err) worst = std::max(worst, e);
      cases += 1000;
    }
  }
  const double secs = seconds_since(t0);
  report(1, worst <= 1e-6 && secs < 30.0, "closed-form words agree with RK4",
         std::to_string(cases) + " cases, max error " + fmt(worst) + " <= 1e-6, " + fmt(secs) + " s < 30 s");
}

void criterion2() {
  bool ok = true;
  for (std::size_t d = 1; d <= 8; ++d) {
    std::set<std::string> got;
    const auto vocab = vocabulary(d);
    for (const Word& w : vocab) got.insert(format_word(w));
    ok = ok && vocab.size() == 4 * d * d + 12 * d && got.size() == vocab.size() && got == census(d);
  }
  report(2, ok, "vocabulary census", "|V| = 4d^2+12d and matches independent enumeration for d = 1..8");
}

void criterion3() {
  std::mt19937_64 rng(103);
  double worst = 0.0;
  bool unit_exact = true;
  for (double lambda : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    for (std::size_t d = 2; d <= 8; ++d) {
      for (int rep = 0; rep < 10; ++rep) {
        const Vector w = uniform_vector(rng, d - 1, -2.0, 2.0);
        const auto n = static_cast<Eigen::Index>(d);
        Matrix u = Matrix::Identity(n, n);
        u(0, 0) = lambda;
        u.block(0, 1, 1, n - 1) = w.transpose();
        const Matrix l = triangular_log(lambda, w);
        worst = std::max(worst, (expm(l) - u).cwiseAbs().maxCoeff());
        if (lambda == 1.0) unit_exact = unit_exact && l == u - Matrix::Identity(n, n);
      }
    }
  }
  report(3, worst <= 1e-10 && unit_exact, "triangular logarithm",
         "max |exp(log U) - U| " + fmt(worst) + " <= 1e-10; lambda = 1 gives U - I exactly: " +
             (unit_exact ? "yes" : "no"));
}

void criterion4() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(104);
  double worst = 0.0;
  std::size_t counts[4] = {0, 0, 0, 0};
  bool feasible = true;
  for (int k = 0; k < 1000; ++k) {
    const auto kind = static_cast<StepCase>(k % 4);
    const std::size_t d = 2 + static_cast<std::size_t>(k % 7);
    const StepT t = random_step(rng, d, kind);
    feasible = feasible && t.feasible();
    ++counts[k % 4];
    const auto flows = decompose_step(t);
    for (int p = 0; p < 100; ++p) {
      const Vector x = uniform_vector(rng, d, -3.0, 3.0);
      worst = std::max(worst, (apply_flows(flows, x) - step_oracle(t, x)).norm());
    }
  }
  const double secs = seconds_since(t0);
  report(4, worst <= 1e-9 && feasible && secs < 60.0, "six-flow decomposition is exact",
         "1000 feasible steps (" + std::to_string(counts[0]) + " w=0, " + std::to_string(counts[1]) + " own-weight, " +
             std::to_string(counts[2]) + " positive pivot, " + std::to_string(counts[3]) +
             " negative pivot) x 100 points, max error " + fmt(worst) + " <= 1e-9, " + fmt(secs) + " s < 60 s");
}

void criterion5() {
  const auto t0 = Clock::now();
  const double eps_set[] = {1e-2, 1e-4, 1e-6};
  bool ok = true;
  double worst_ratio = 0.0;
  std::vector<KroneckerPair> first;
  for (int pass = 0; pass < 2; ++pass) {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int k = 0; k < 10000; ++k) {
      const double t = 10.0 - u(rng);
      for (double eps : eps_set) {
        const KroneckerPair pq = kronecker_pq(t, eps);
        const long double r = static_cast<long double>(pq.p) - static_cast<long double>(pq.q) * std::sqrt(2.0L) - t;
        const double ratio = std::fabs(static_cast<double>(r)) / eps;
        worst_ratio = std::max(worst_ratio, ratio);
        ok = ok && ratio < 1.0 && pq.p >= 0 && pq.q >= 0;
        if (pass == 0) first.push_back(pq);
        else ok = ok && first[static_cast<std::size_t>(k) * 3 + (eps == 1e-2 ? 0 : eps == 1e-4 ? 1 : 2)] == pq;
      }
    }
  }
  const double secs = seconds_since(t0) / 2.0;
  report(5, ok && secs < 10.0, "Kronecker contract",
         "30000 (t, eps) pairs, max |p - q sqrt2 - t| / eps " + fmt(worst_ratio, 9) +
             " < 1, repeat run identical, " + fmt(secs) + " s per run < 10 s");
}

void criterion6() {
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto probe = probe_set(Box::uniform(2, -1.0, 1.0), 64);
  double x_sup = 0.0;
  for (const Vector& p : probe) x_sup = std::max(x_sup, p.norm());
  double lo = 1e300, hi = 0.0;
  bool dominated = true;
  std::size_t ratios = 0;
  for (int inst = 0; inst < 20; ++inst) {
    Matrix a(2, 2);
    do {
      a = Matrix::NullaryExpr(2, 2, [&] { return u(rng); });
    } while ((a(0, 1) * a(1, 0) == 0.0));
    const Vector b = Vector::NullaryExpr(2, [&] { return u(rng); });
    const AffineFlow f{a, b, 1.0};
    const GeneratorSplit s = split_affine(a, b);
    std::vector<double> errs;
    for (std::size_t n = 1; n <= 8192; n *= 2) {
      double e = 0.0;
      for (const Vector& x : probe) {
        Vector y = x;
        apply_lie(s, 1.0, n, std::span<double>(y.data(), 2));
        e = std::max(e, (y - eval_affine_flow(f, x)).norm());
      }
      const double dt = 1.0 / static_cast<double>(n);
      const double bound = splitting_error_bound(bound_constants(s, x_sup, 1.0, dt), 1.0, dt);
      dominated = dominated && bound >= e;
      errs.push_back(e);
    }
    for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
      if (errs[k] > 1e-2) continue;
      const double r = errs[k] / errs[k + 1];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      ++ratios;
    }
  }
  const bool ok = dominated && ratios > 0 && lo >= 1.6 && hi <= 2.4;
  report(6, ok, "first-order splitting",
         "20 non-commuting generators, " + std::to_string(ratios) + " ratios error(n)/error(2n) in [" + fmt(lo) + ", " +
             fmt(hi) + "] within [1.6, 2.4]; analytic bound dominates: " + (dominated ? "yes" : "no"));
}

nlohmann::json random_node_spec(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> us(-0.3, 0.3), uw(-1.0, 1.0), ub(-0.3, 0.3);
  nlohmann::json s = nlohmann::json::array(), w = nlohmann::json::array(), b = nlohmann::json::array();
  for (int i = 0; i < 2; ++i) {
    s.push_back({us(rng), us(rng)});
    w.push_back({uw(rng), uw(rng)});
    b.push_back(ub(rng));
  }
  return {{"kind", "neural_ode"},
          {"a_neg", 0.5},
          {"breakpoints", {0.0, 1.0}},
          {"layers", nlohmann::json::array({{{"s", s}, {"w", w}, {"b", b}}})},
          {"domain", {{"lower", {-1.0, -1.0}}, {"upper", {1.0, 1.0}}}}};
}

nlohmann::json rotation_spec() {
  return {{"kind", "affine_flow"},
          {"generator", {{0.0, -1.0}, {1.0, 0.0}}},
          {"offset", {0.0, 0.0}},
          {"time", std::numbers::pi / 4.0}};
}

void write_json(const fs::path& p, const nlohmann::json& j) { std::ofstream(p) << j.dump(2) << '\n'; }

void criterion7(const std::string& cli, const fs::path& work) {
  write_json(work / "rot45.json", rotation_spec());
  write_json(work / "node.json", random_node_spec(2024));
  bool ok = true;
  std::ostringstream detail;
  for (const char* name : {"rot45", "node"}) {
    for (double eps : {0.1, 0.05}) {
      const std::string tag = std::string(name) + "_" + fmt(eps);
      const fs::path target = work / (std::string(name) + ".json");
      const auto t0 = Clock::now();
      const int rc = shell(quote(cli) + " compile --target " + quote(target.string()) + " --eps " + fmt(eps) +
                           " --domain -1,1 --out " + quote((work / (tag + ".sent")).string()) + " --report " +
                           quote((work / (tag + ".csv")).string()));
      const double secs = seconds_since(t0);
      const int rc_eval = shell(quote(cli) + " eval --sentence " + quote((work / (tag + ".sent")).string()) +
                                " --target " + quote(target.string()) + " --domain -1,1 --grid 65 --report " +
                                quote((work / (tag + "_eval.csv")).string()));
      const double err = metric(slurp(work / (tag + "_eval.csv")), "sup_error");
      const bool pass = rc == 0 && rc_eval == 0 && err <= 1.5 * eps && secs < 300.0;
      ok = ok && pass;
      detail << (detail.tellp() > 0 ? "; " : "") << name << " eps " << fmt(eps) << ": exit " << rc << ", 65^2 sup "
             << fmt(err) << " <= " << fmt(1.5 * eps) << ", " << fmt(secs) << " s";
    }
  }
  report(7, ok, "end-to-end compile and re-eval", detail.str());
}

void criterion8() {
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Box omega = Box::uniform(2, -1.0, 1.0);
  bool ok = true;
  std::string failure;
  for (int k = 0; k < 20; ++k) {
    std::function<std::size_t(double)> length;
    if (k % 3 == 0) {
      const Flow f = AffineFlow{Matrix::NullaryExpr(2, 2, [&] { return u(rng); }),
                                Vector::NullaryExpr(2, [&] { return 0.5 * u(rng); }), 0.5};
      length = [f, &omega](double eps) { return compile_flow_sequence({f}, eps, omega).sentence.size(); };
    } else if (k % 3 == 1) {
      const Flow f = LeakyFlow{Vector::NullaryExpr(2, [&] { return u(rng); }), Vector::NullaryExpr(2, [&] { return u(rng); }),
                               1.0};
      length = [f, &omega](double eps) { return compile_flow_sequence({f}, eps, omega).sentence.size(); };
    } else {
      const auto field = NeuralOdeField::constant(0.5, 1.0, Matrix::NullaryExpr(1, 2, [&] { return 0.3 * u(rng); }),
                                                  Matrix::NullaryExpr(1, 2, [&] { return u(rng); }),
                                                  Vector::Constant(1, 0.3 * u(rng)));
      length = [field, &omega](double eps) { return compile_neural_ode(field, eps, omega).sentence.size(); };
    }
    std::size_t prev = 0;
    for (double eps : {0.2, 0.1, 0.05}) {
      const std::size_t len = length(eps);
      if (len < prev) {
        ok = false;
        failure = ", target " + std::to_string(k) + " shortened at eps " + fmt(eps);
      }
      prev = len;
    }
  }
  report(8, ok, "monotone cost", "20 random targets at eps 0.2, 0.1, 0.05, no sentence shortened" + failure);
}

void criterion9(const std::string& cli, const fs::path& work) {
  const fs::path target = work / "node.json";
  if (!fs::exists(target)) write_json(target, random_node_spec(2024));
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
      {"compile", {"compile --target " + quote(target.string()) + " --eps 0.1 --out {dir}/s.sent --report {dir}/r.csv"}},
      {"eval", {"eval --sentence {first}/s.sent --target " + quote(target.string()) + " --report {dir}/r.csv --dump {dir}/d.csv"}},
      {"words", {"words --dim 3 > {dir}/r.csv"}},
      {"check", {"check --samples 50 --seed 7 > {dir}/r.csv"}},
  };
  bool ok = true;
  std::string diffs;
  for (const auto& [name, args] : commands) {
    std::vector<fs::path> dirs;
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = work / ("det_" + name + "_" + std::to_string(run));
      fs::create_directories(dir);
      dirs.push_back(dir);
      std::string cmd = args.front();
      for (std::size_t pos; (pos = cmd.find("{dir}")) != std::string::npos;) cmd.replace(pos, 5, dir.string());
      const fs::path first_compile = work / "det_compile_0";
      for (std::size_t pos; (pos = cmd.find("{first}")) != std::string::npos;) cmd.replace(pos, 7, first_compile.string());
      if (shell(quote(cli) + " " + cmd) != 0) {
        ok = false;
        diffs += " " + name + "(exit)";
      }
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const fs::path other = dirs[1] / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
        ok = false;
        diffs += " " + name + ":" + entry.path().filename().string();
      }
    }
  }
  report(9, ok, "byte-identical reruns", "compile, eval, words, check run twice" + (diffs.empty() ? "" : "; differs:" + diffs));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <vocabflow-cli> [work-dir]\n";
    return 2;
  }
  const std::string cli = fs::absolute(argv[1]).string();
  const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "vocabflow_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::function<void()>> criteria{
      criterion1,
      criterion2,
      criterion3,
      criterion4,
      criterion5,
      criterion6,
      [&] { criterion7(cli, work); },
      criterion8,
      [&] { criterion9(cli, work); },
  };
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    try {
      criteria[k]();
    } catch (const std::exception& e) {
      report(static_cast<int>(k + 1), false, "raised an exception", e.what());
    }
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
