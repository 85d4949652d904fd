#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "cutca/io.hpp"
#include "cutca/oracle.hpp"
#include "cutca/search.hpp"

using namespace cutca;

namespace {

struct Options {
  std::string file;
  std::string reduction = "cmir";
  bool no_learning = false;
  std::size_t node_limit = SolverConfig{}.node_limit;
  std::size_t conflict_limit = SolverConfig{}.conflict_limit;
  std::optional<std::size_t> max_learned_length;
  std::uint64_t seed = 0;
  std::string stats_json;
  std::string trace;
  std::string out_learned;
};

void add_solver_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("file", o.file, "problem file (.opb or native)")->required();
  cmd->add_option("--reduction", o.reduction, "reduction strategy")
      ->check(CLI::IsMember({"clause", "coeftight", "wmir", "cmir"}));
  cmd->add_flag("--no-learning", o.no_learning, "backtrack chronologically without analysis");
  cmd->add_option("--node-limit", o.node_limit)->check(CLI::PositiveNumber);
  cmd->add_option("--conflict-limit", o.conflict_limit)->check(CLI::PositiveNumber);
  cmd->add_option("--max-learned-length", o.max_learned_length)->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed);
  cmd->add_option("--stats-json", o.stats_json, "write statistics as JSON");
  cmd->add_option("--trace", o.trace, "write the analysis trace");
}

SolverConfig config_of(const Options& o) {
  SolverConfig cfg;
  cfg.strategy = parse_strategy(o.reduction);
  cfg.enable_learning = !o.no_learning;
  cfg.node_limit = o.node_limit;
  cfg.conflict_limit = o.conflict_limit;
  cfg.max_learned_length = o.max_learned_length;
  cfg.seed = o.seed;
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

void print_result(const Problem& p, const SolveResult& r) {
  std::cout << "status: " << to_string(r.status) << '\n';
  if (r.objective && p.objective()) std::cout << "objective: " << to_string(*r.objective) << '\n';
  if (r.witness) {
    std::cout << "solution:";
    for (VarIndex v = 0; v < p.num_vars(); ++v) std::cout << ' ' << p.names()[v] << '=' << to_string((*r.witness)[v]);
    std::cout << '\n';
  }
}

int exit_code(SolveStatus s) { return s == SolveStatus::LimitReached ? 2 : 0; }

int run_solve(const Options& o) {
  Problem p = load_problem(o.file);
  SolverConfig cfg = config_of(o);
  std::ofstream trace;
  if (!o.trace.empty()) {
    trace.open(o.trace);
    if (!trace) throw std::runtime_error("cannot write '" + o.trace + "'");
    cfg.trace = &trace;
  }
  SolveResult r = solve(p, cfg);
  print_result(p, r);
  if (!o.stats_json.empty()) write_file(o.stats_json, emit_stats(r.stats, r.status, r.objective) + "\n");
  return exit_code(r.status);
}

int run_check(const Options& o) {
  Problem p = load_problem(o.file);
  SolveResult r = solve(p, config_of(o));
  OracleOptimum opt = oracle_optimum(p);
  const char* oracle_status = opt.status == OracleOptimum::Status::Optimal      ? "Optimal"
                              : opt.status == OracleOptimum::Status::Infeasible ? "Infeasible"
                                                                                : "Unbounded";
  std::cout << "solver: " << to_string(r.status);
  if (r.status == SolveStatus::Optimal && p.objective()) std::cout << ' ' << to_string(*r.objective);
  std::cout << "\noracle: " << oracle_status;
  if (opt.status == OracleOptimum::Status::Optimal && p.objective()) std::cout << ' ' << to_string(opt.value);
  std::cout << '\n';
  if (r.status == SolveStatus::LimitReached) {
    std::cout << "undecided: limit reached\n";
    return 2;
  }
  bool agree = std::string(to_string(r.status)) == oracle_status &&
               (r.status != SolveStatus::Optimal || !p.objective() || *r.objective == opt.value);
  std::cout << (agree ? "agree" : "DISAGREE") << '\n';
  return agree ? 0 : 3;
}

int run_twophase(const Options& o) {
  Problem p = load_problem(o.file);
  TwoPhaseResult r = run_two_phase(p, config_of(o));
  std::cout << "phase1: " << emit_stats(r.phase1.stats, r.phase1.status, r.phase1.objective) << '\n';
  std::cout << "phase2: " << emit_stats(r.phase2.stats, r.phase2.status, r.phase2.objective) << '\n';
  if (!o.stats_json.empty()) write_file(o.stats_json, emit_stats(r.phase2.stats, r.phase2.status, r.phase2.objective) + "\n");
  if (!o.out_learned.empty()) write_file(o.out_learned, r.learned_file);
  return std::max(exit_code(r.phase1.status), exit_code(r.phase2.status));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conflict analysis with cutting-plane reductions"};
  app.require_subcommand(1);
  Options o;
  add_solver_flags(app.add_subcommand("solve", "solve a problem"), o);
  add_solver_flags(app.add_subcommand("check", "compare the solver with the brute-force oracle"), o);
  auto* two = app.add_subcommand("twophase", "conflict generation run followed by an exploitation run");
  add_solver_flags(two, o);
  two->add_option("--out-learned", o.out_learned, "write the learned-object file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    if (app.got_subcommand("solve")) return run_solve(o);
    if (app.got_subcommand("check")) return run_check(o);
    return run_twophase(o);
  } catch (const OracleRefusal& e) {
    std::cerr << "oracle: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
