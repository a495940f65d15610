#pragma once

// Command-line front end: compile | eval | words | check.
//
// Exit codes: 0 success, 1 unexpected failure, 2 usage/parse/dimension error,
// 3 resource cap, 4 validation failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vocabflow/check.hpp"
#include "vocabflow/compile.hpp"
#include "vocabflow/harness.hpp"
#include "vocabflow/parallel.hpp"
#include "vocabflow/target_spec.hpp"
#include "vocabflow/vocab.hpp"

namespace vocabflow::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kResource = 3, kValidation = 4 };

struct CliConfig {
  std::string subcommand;
  std::string target_path;
  std::string sentence_path;
  std::string out_path;
  std::string report_path;
  std::string dump_path;
  std::string domain;
  std::string domain_file;
  double eps = 0.0;
  double p = 2.0;
  std::size_t lattice = 33;
  std::size_t random = 512;
  std::size_t samples = 200;
  std::size_t dim = 0;
  std::size_t threads = 0;
  std::uint64_t seed = 42;
  bool strict_kronecker = false;
  bool signed_kronecker = false;
  bool timing = false;
};

class UsageError : public Error {
public:
  using Error::Error;
};

inline Box parse_domain_flag(const std::string& text, std::size_t d) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--domain expects lo,hi");
  try {
    std::size_t used = 0;
    const std::string lo_text = text.substr(0, comma);
    const std::string hi_text = text.substr(comma + 1);
    const double lo = std::stod(lo_text, &used);
    if (used != lo_text.size()) throw UsageError("bad --domain lower bound");
    const double hi = std::stod(hi_text, &used);
    if (used != hi_text.size()) throw UsageError("bad --domain upper bound");
    if (!(lo < hi)) throw UsageError("--domain needs lo < hi");
    return Box::uniform(d, lo, hi);
  } catch (const std::logic_error&) {
    throw UsageError("--domain expects two numbers lo,hi");
  }
}

/// Domain precedence: --domain-file, then --domain, then the target's own, then [-1,1]^d.
inline Box resolve_domain(const CliConfig& cfg, const std::optional<Box>& from_spec, std::size_t d) {
  std::optional<Box> box;
  if (!cfg.domain_file.empty()) {
    try {
      box = parse_domain_json(nlohmann::json::parse(read_text_file(cfg.domain_file)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("domain file: ") + e.what());
    }
  } else if (!cfg.domain.empty()) {
    box = parse_domain_flag(cfg.domain, d);
  } else if (from_spec) {
    box = from_spec;
  } else {
    box = Box::uniform(d, -1.0, 1.0);
  }
  if (box->dim() != d) throw DimensionError("domain dimension does not match target");
  return *box;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot write '" + path + "'");
  os << text;
  if (!os) throw UsageError("failed writing '" + path + "'");
}

inline void emit_csv(const std::string& path, const CsvRows& rows, std::ostream& out) {
  std::ostringstream ss;
  write_metric_csv(ss, rows);
  if (path.empty()) out << ss.str();
  else write_file(path, ss.str());
}

inline GridSpec grid_of(const CliConfig& cfg) { return {cfg.lattice, cfg.random, cfg.seed}; }

inline int cmd_compile(const CliConfig& cfg, std::ostream& out) {
  if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) throw UsageError("--eps must be a positive number");
  if (cfg.out_path.empty()) throw UsageError("compile needs --out");
  const TargetSpec spec = load_target_spec(cfg.target_path);
  const Box omega = resolve_domain(cfg, spec.domain, spec.dim());
  CompileOptions opt;
  opt.kron.strict = cfg.strict_kronecker;
  opt.kron.signed_pairs = cfg.signed_kronecker;
  opt.grid = grid_of(cfg);
  const CompileResult res = spec.field ? compile_neural_ode(*spec.field, cfg.eps, omega, opt)
                                       : compile_flow_sequence(spec.flows, cfg.eps, omega, opt);
  write_file(cfg.out_path, format_sentence(res.sentence) + "\n");
  emit_csv(cfg.report_path, report_rows(res.report, cfg.timing), out);
  return res.report.measured_error <= cfg.eps ? kOk : kValidation;
}

inline int cmd_eval(const CliConfig& cfg, std::ostream& out) {
  const Sentence s = parse_sentence(read_text_file(cfg.sentence_path));
  const TargetSpec spec = load_target_spec(cfg.target_path);
  if (spec.dim() != s.dim) {
    throw DimensionError("sentence dimension " + std::to_string(s.dim) + " does not match target dimension " +
                         std::to_string(spec.dim()));
  }
  const Box omega = resolve_domain(cfg, spec.domain, s.dim);
  if (!(cfg.p >= 1.0)) throw UsageError("--p must be >= 1");
  const GridSpec grid = grid_of(cfg);
  const ErrorReport rep = sup_error(spec.target(), s, omega, grid, cfg.p);
  emit_csv(cfg.report_path, report_rows(rep), out);
  if (!cfg.dump_path.empty()) {
    std::ostringstream ss;
    write_pointwise_csv(ss, validation_grid(omega, grid), rep.pointwise);
    write_file(cfg.dump_path, ss.str());
  }
  return kOk;
}

inline int cmd_words(const CliConfig& cfg, std::ostream& out) {
  if (cfg.dim == 0) throw UsageError("--dim must be a positive integer");
  if (cfg.dim > 65535) throw UsageError("--dim too large");
  const auto vocab = vocabulary(cfg.dim);
  out << "#count " << vocab.size() << '\n';
  for (const Word& w : vocab) out << format_word(w) << '\n';
  return kOk;
}

inline int cmd_check(const CliConfig& cfg, std::ostream& out) {
  if (cfg.samples == 0) throw UsageError("--samples must be positive");
  const auto results = run_checks(cfg.samples, cfg.seed);
  bool all = true;
  out << "check,cases,max_error,tolerance,status\n";
  for (const CheckResult& r : results) {
    out << r.name << ',' << r.cases << ',' << format_number(r.max_error) << ',' << format_number(r.tolerance) << ','
        << (r.passed() ? "pass" : "fail") << '\n';
    all = all && r.passed();
  }
  out << "all,," << ",," << (all ? "pass" : "fail") << '\n';
  return all ? kOk : kValidation;
}

/// Runs the CLI; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"vocabflow: compile flow maps into vocabulary sentences"};
  app.require_subcommand(1);
  CliConfig cfg;
  app.add_option("--threads", cfg.threads, "worker cap (0: VOCABFLOW_THREADS or all cores)");

  auto* compile = app.add_subcommand("compile", "compile a target spec into a sentence");
  compile->add_option("--target", cfg.target_path, "target spec (JSON)")->required();
  compile->add_option("--eps", cfg.eps, "requested sup error")->required();
  compile->add_option("--out", cfg.out_path, "sentence file to write")->required();
  compile->add_option("--report", cfg.report_path, "report CSV (stdout if omitted)");

  auto* eval = app.add_subcommand("eval", "measure a sentence against a target");
  eval->add_option("--sentence", cfg.sentence_path, "sentence file")->required();
  eval->add_option("--target", cfg.target_path, "target spec (JSON)")->required();
  eval->add_option("--report", cfg.report_path, "report CSV (stdout if omitted)");
  eval->add_option("--dump", cfg.dump_path, "per-point CSV x...,err");
  eval->add_option("--p", cfg.p, "exponent of the L^p error");

  for (auto* sub : {compile, eval}) {
    sub->add_option("--domain", cfg.domain, "uniform box lo,hi");
    sub->add_option("--domain-file", cfg.domain_file, "JSON box {\"lower\": [...], \"upper\": [...]}");
    sub->add_option("--grid", cfg.lattice, "validation lattice points per axis");
    sub->add_option("--random", cfg.random, "extra random validation points");
    sub->add_option("--seed", cfg.seed, "seed for random validation points");
    sub->add_option("--threads", cfg.threads, "worker cap");
  }
  compile->add_flag("--strict-kronecker", cfg.strict_kronecker, "require p, q >= 1");
  compile->add_flag("--signed-kronecker", cfg.signed_kronecker, "allow signed p, q");
  compile->add_flag("--timing", cfg.timing, "add wall-clock seconds to the report");

  auto* words = app.add_subcommand("words", "print the vocabulary");
  words->add_option("--dim", cfg.dim, "dimension")->required();

  auto* check = app.add_subcommand("check", "run the oracle-coherence suite");
  check->add_option("--samples", cfg.samples, "cases per check");
  check->add_option("--seed", cfg.seed, "random seed");
  check->add_option("--threads", cfg.threads, "worker cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }
  if (cfg.threads > 0) set_max_threads(cfg.threads);

  try {
    if (compile->parsed()) return cmd_compile(cfg, out);
    if (eval->parsed()) return cmd_eval(cfg, out);
    if (words->parsed()) return cmd_words(cfg, out);
    return cmd_check(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << '\n';
    return kUsage;
  } catch (const NotAFlowError& e) {
    err << "invalid target: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << '\n';
    return kResource;
  } catch (const ValidationError& e) {
    err << "validation failed: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace vocabflow::cli
