// Copyright (c) gsiplab contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gsiplab/gsiplab.hpp"
#include "trace_io.hpp"

namespace gsiplab::cli {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;

/// Bad flags, unreadable or malformed input. Maps to exit code 2.
class CliUsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemSource {
  std::string builtin;
  std::string file;
};

inline GsipProblem load_problem(const ProblemSource& src) {
  if (src.builtin.empty() == src.file.empty())
    throw CliUsageError("exactly one of --problem or --file is required");
  if (!src.builtin.empty()) {
    auto p = find_builtin(src.builtin);
    if (!p) throw CliUsageError("unknown built-in problem '" + src.builtin + "' (see 'gsiplab list')");
    return *p;
  }
  std::ifstream in(src.file, std::ios::binary);
  if (!in) throw CliUsageError("cannot read '" + src.file + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return GsipProblem(parse_problem(buf.str()));
  } catch (const ParseError& e) {
    throw CliUsageError(src.file + ":" + e.what());
  }
}

inline Variant parse_variant(const std::string& s) {
  if (s == "llp-only") return Variant::LlpOnly;
  if (s == "aux") return Variant::AuxLlp;
  if (s == "sip-llp") return Variant::SipLlp;
  throw CliUsageError("unknown variant '" + s + "'");
}

inline AuxTieBreak parse_tie_break(const std::string& s) {
  if (s == "solver") return AuxTieBreak::SolverDefault;
  if (s == "min-y") return AuxTieBreak::MinY;
  if (s == "max-y") return AuxTieBreak::MaxY;
  throw CliUsageError("unknown tie-break '" + s + "'");
}

inline Point parse_point(const std::string& text, std::size_t dim) {
  Point p;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string part = text.substr(start, end - start);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size())
      throw CliUsageError("malformed point '" + text + "'");
    p.push_back(v);
    start = end + 1;
  }
  if (p.size() != dim) throw CliUsageError("point '" + text + "' has the wrong dimension");
  return p;
}

struct RunRequest {
  ProblemSource source;
  std::string variant = "sip-llp";
  double alpha = 0.95;
  double tol_feas = 1e-9;
  double tol_opt = 1e-6;
  double inner_tol_opt = 1e-12;
  std::size_t max_iter = 50;
  std::vector<std::string> initial_y;
  std::string tie_break = "solver";
  bool no_stall_stop = false;
  std::string output;
  std::string format = "csv";
};

inline AlgorithmConfig make_config(const RunRequest& req, const GsipProblem& p) {
  AlgorithmConfig cfg;
  cfg.variant = parse_variant(req.variant);
  cfg.alpha = req.alpha;
  cfg.tol_feas = req.tol_feas;
  cfg.tol_opt = req.tol_opt;
  cfg.inner_tol_opt = req.inner_tol_opt;
  cfg.max_iter = req.max_iter;
  cfg.aux_tie_break = parse_tie_break(req.tie_break);
  cfg.stop_on_stall = !req.no_stall_stop;
  for (const auto& s : req.initial_y) {
    Point y = parse_point(s, p.inner().size());
    if (!p.inner().contains(y)) throw CliUsageError("initial point '" + s + "' lies outside Y");
    cfg.initial_yset.push_back(std::move(y));
  }
  try {
    cfg.validate();
  } catch (const ParameterError& e) {
    throw CliUsageError(e.what());
  }
  return cfg;
}

inline int cmd_run(const RunRequest& req, std::ostream& out, std::ostream& err) {
  const GsipProblem p = load_problem(req.source);
  const AlgorithmConfig cfg = make_config(req, p);
  if (req.format != "csv" && req.format != "json") throw CliUsageError("format must be csv or json");

  const RunResult result = run(p, cfg);

  std::ostringstream trace;
  if (req.format == "csv") {
    io::write_csv(trace, p, result);
  } else {
    trace << io::to_json(p, result).dump(2) << '\n';
  }
  std::ostream* summary = &out;
  if (req.output.empty()) {
    out << trace.str();
    summary = &err;
  } else {
    std::ofstream file(req.output, std::ios::binary);
    if (!file) throw CliUsageError("cannot write '" + req.output + "'");
    file << trace.str();
  }
  *summary << "status: " << to_string(result.status) << '\n'
           << "final_lower_bound: " << format_real(io::tidy(result.final_lower_bound)) << '\n'
           << "iterations: " << result.trace.size() << '\n';
  return kExitOk;
}

struct VerifyRequest {
  ProblemSource source;
  std::size_t grid = 401;
  std::string variant = "all";
  std::size_t max_iter = 20;
  double alpha = 0.95;
};

/// Per-subproblem tally printed by `verify`.
struct VerifyTally {
  std::size_t checks = 0;
  std::size_t slivers = 0;
  std::size_t failures = 0;
  double max_discrepancy = 0.0;
  double max_allowance = 0.0;
};

inline int cmd_verify(const VerifyRequest& req, std::ostream& out, std::ostream& /*err*/) {
  const GsipProblem p = load_problem(req.source);
  if (req.grid < 2) throw CliUsageError("--grid needs at least 2 points");
  std::vector<Variant> variants;
  if (req.variant == "all") {
    variants = {Variant::LlpOnly, Variant::AuxLlp, Variant::SipLlp};
  } else {
    variants = {parse_variant(req.variant)};
  }

  bool all_ok = true;
  out << std::left << std::setw(10) << "variant" << std::setw(12) << "subproblem" << std::setw(8) << "checks"
      << std::setw(25) << "max_discrepancy" << std::setw(25) << "allowance" << std::setw(9) << "slivers"
      << "failures\n";
  for (Variant v : variants) {
    AlgorithmConfig cfg;
    cfg.variant = v;
    cfg.max_iter = req.max_iter;
    cfg.alpha = req.alpha;
    cfg.validate();
    const RunResult result = run(p, cfg);

    MinimizeOptions outer_opts;
    outer_opts.tol_opt = cfg.tol_opt;
    outer_opts.tol_feas = cfg.tol_feas;
    MinimizeOptions inner_opts = outer_opts;
    inner_opts.tol_opt = cfg.inner_tol_opt;

    std::map<std::string, VerifyTally> tallies;
    auto check = [&](const std::string& kind, const MinimizationInstance& inst, const MinimizeOptions& opts) {
      const MinimizeOutcome bb = minimize(inst, opts);
      const OracleComparison cmp = compare_with_grid(inst, bb, req.grid, opts.tol_opt, opts.tol_feas);
      VerifyTally& t = tallies[kind];
      ++t.checks;
      t.slivers += cmp.sliver ? 1 : 0;
      t.failures += cmp.agree ? 0 : 1;
      if (!cmp.sliver) t.max_discrepancy = std::max(t.max_discrepancy, cmp.discrepancy);
      t.max_allowance = std::max(t.max_allowance, cmp.allowance);
    };

    std::size_t yset_size = cfg.initial_yset.size();
    for (const auto& rec : result.trace) {
      const std::span<const Point> yset(result.yset.data(), yset_size);
      check("lower", build_lower_bounding(p, yset), outer_opts);
      if (rec.llp) {
        check("llp", build_llp(p, rec.x), inner_opts);
        if (rec.aux) check("aux", build_aux_llp(p, rec.x, rec.llp->value, cfg.alpha), inner_opts);
      }
      if (rec.sip_llp) check("sip-llp", build_sip_llp(p, rec.x), inner_opts);
      yset_size = rec.yset_size_after;
    }

    for (const auto& [kind, t] : tallies) {
      all_ok = all_ok && t.failures == 0;
      out << std::left << std::setw(10) << to_string(v) << std::setw(12) << kind << std::setw(8) << t.checks
          << std::setw(25) << format_real(t.max_discrepancy) << std::setw(25) << format_real(t.max_allowance)
          << std::setw(9) << t.slivers << t.failures << '\n';
    }
  }
  out << (all_ok ? "verify: OK\n" : "verify: FAILED\n");
  return all_ok ? kExitOk : kExitVerifyFailed;
}

inline int cmd_list(std::ostream& out) {
  for (const auto& p : builtin_problems()) {
    out << p.name() << "\tX=[" << format_real(p.outer()[0].lo) << ", " << format_real(p.outer()[0].hi) << "]"
        << "\tf=" << to_string(p.f()) << "\tg=" << to_string(p.g()) << "\th=" << to_string(hbar(p)) << '\n';
  }
  return kExitOk;
}

inline int cmd_fmt(const std::string& path, const std::string& output, std::ostream& out) {
  const GsipProblem p = load_problem({"", path});
  const std::string text = serialize_problem(p.document());
  if (output.empty()) {
    out << text;
  } else {
    std::ofstream file(output, std::ios::binary);
    if (!file) throw CliUsageError("cannot write '" + output + "'");
    file << text;
  }
  return kExitOk;
}

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lower-bounding laboratory for generalized semi-infinite programs", "gsiplab"};
  app.require_subcommand(1);

  RunRequest run_req;
  auto* run_cmd = app.add_subcommand("run", "Run a lower-bounding variant and write its trace");
  auto* run_problem = run_cmd->add_option("--problem", run_req.source.builtin, "Built-in problem name");
  auto* run_file = run_cmd->add_option("--file", run_req.source.file, "Path to a .gsip problem file");
  run_problem->excludes(run_file);
  run_cmd->add_option("--variant", run_req.variant, "llp-only | aux | sip-llp")
      ->check(CLI::IsMember({"llp-only", "aux", "sip-llp"}))
      ->capture_default_str();
  run_cmd->add_option("--alpha", run_req.alpha, "Auxiliary LLP factor in (0,1)")->capture_default_str();
  run_cmd->add_option("--tol-feas", run_req.tol_feas, "Feasibility tolerance")->capture_default_str();
  run_cmd->add_option("--tol-opt", run_req.tol_opt, "Optimality tolerance of the lower-bounding problem")
      ->capture_default_str();
  run_cmd->add_option("--inner-tol-opt", run_req.inner_tol_opt, "Optimality tolerance of lower-level problems")
      ->capture_default_str();
  run_cmd->add_option("--max-iter", run_req.max_iter, "Iteration cap")->capture_default_str();
  run_cmd->add_option("--init-y", run_req.initial_y, "Initial discretization point, comma-separated (repeatable)");
  run_cmd->add_option("--tie-break", run_req.tie_break, "Auxiliary LLP tie-break: solver | min-y | max-y")
      ->check(CLI::IsMember({"solver", "min-y", "max-y"}))
      ->capture_default_str();
  run_cmd->add_flag("--no-stall-stop", run_req.no_stall_stop, "Keep iterating after a stall until --max-iter");
  run_cmd->add_option("-o,--output", run_req.output, "Trace file (default: stdout)");
  run_cmd->add_option("--format", run_req.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  VerifyRequest verify_req;
  auto* verify_cmd = app.add_subcommand("verify", "Cross-check every subproblem of a run against the grid oracle");
  auto* verify_problem = verify_cmd->add_option("--problem", verify_req.source.builtin, "Built-in problem name");
  auto* verify_file = verify_cmd->add_option("--file", verify_req.source.file, "Path to a .gsip problem file");
  verify_problem->excludes(verify_file);
  verify_cmd->add_option("--grid", verify_req.grid, "Grid points per axis")->capture_default_str();
  verify_cmd->add_option("--variant", verify_req.variant, "all | llp-only | aux | sip-llp")
      ->check(CLI::IsMember({"all", "llp-only", "aux", "sip-llp"}))
      ->capture_default_str();
  verify_cmd->add_option("--max-iter", verify_req.max_iter, "Iteration cap of each run")->capture_default_str();
  verify_cmd->add_option("--alpha", verify_req.alpha, "Auxiliary LLP factor")->capture_default_str();

  auto* list_cmd = app.add_subcommand("list", "List built-in problems");

  std::string fmt_path;
  std::string fmt_output;
  auto* fmt_cmd = app.add_subcommand("fmt", "Print the canonical form of a .gsip file");
  fmt_cmd->add_option("file", fmt_path, "Input .gsip file")->required();
  fmt_cmd->add_option("-o,--output", fmt_output, "Write here instead of stdout");

  std::vector<const char*> argv{"gsiplab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_req, out, err);
    if (verify_cmd->parsed()) return cmd_verify(verify_req, out, err);
    if (list_cmd->parsed()) return cmd_list(out);
    if (fmt_cmd->parsed()) return cmd_fmt(fmt_path, fmt_output, out);
  } catch (const CliUsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}

}  // namespace gsiplab::cli
