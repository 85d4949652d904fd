#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cutca/conflict.hpp"
#include "cutca/model.hpp"

namespace cutca {

enum class SolveMode { Solve, GenerateConflicts, ExploitConflicts };
enum class BranchOrder { LowestIndex };

using LearnedObject = std::variant<LinearConstraint, BoundDisjunction>;

/// A learned object and, when it was derived with an objective cutoff active,
/// the incumbent value it is valid below.
struct LearnedRecord {
  LearnedObject object;
  std::optional<Rational> valid_below;
};

/// Contents of a learned-object file.
struct LearnedFile {
  std::vector<LearnedRecord> records;
  /// Best solution known when the file was written.
  std::optional<Rational> incumbent_value;
  std::optional<std::vector<Rational>> incumbent;
};

struct SolverConfig {
  ReductionStrategy strategy = ReductionStrategy::CMir;
  bool enable_learning = true;
  std::size_t node_limit = 50000;
  std::size_t conflict_limit = 5000;
  std::optional<std::size_t> max_learned_length;
  BranchOrder branch_order = BranchOrder::LowestIndex;
  /// The search is deterministic; kept so runs are labelled reproducibly.
  std::uint64_t seed = 0;
  SolveMode mode = SolveMode::Solve;
  /// ExploitConflicts: objects appended as initial rows and disjunctions.
  LearnedFile exploit;
  std::ostream* trace = nullptr;
  /// Called for every learned object before the solver uses it, with the box
  /// of the conflicting state.
  std::function<void(const LearnedRecord&, const Box&)> on_learn;
};

struct Stats {
  std::size_t nodes = 0;
  std::size_t conflicts_analyzed = 0;
  std::size_t learned_linear = 0;
  std::size_t learned_disjunctions = 0;
  std::size_t fallbacks = 0;
  std::optional<double> avg_learned_length;
  std::optional<double> learned_used_in_propagation_pct;
  std::size_t bound_changes_by_learned = 0;
  std::size_t tight_resolution_checks = 0;
  std::size_t tight_resolution_violations = 0;
  std::size_t abandoned = 0;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, LimitReached };

const char* to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  /// Optimal, or the incumbent at a limit.
  std::optional<Rational> objective;
  std::optional<std::vector<Rational>> witness;
  Stats stats;
  /// Every object learned during the run, in order.
  std::vector<LearnedRecord> learned;
};

SolveResult solve(const Problem& problem, const SolverConfig& config = {});

struct Branch {
  VarIndex var = 0;
  BoundKind kind = BoundKind::Upper;
  Rational value;
};

/// Lowest-index unfixed integral variable; binaries go down first, general
/// integers split at floor((lb + ub) / 2) with the lower half first.
std::optional<Branch> select_branching(const Box& box, const Domain& domain);

struct TwoPhaseResult {
  SolveResult phase1;
  SolveResult phase2;
  std::string learned_file;
};

/// Phase 1 records learned objects without using them (chronological search);
/// phase 2 solves again with the recorded objects as initial rows.
TwoPhaseResult run_two_phase(const Problem& problem, SolverConfig config);

/// "lin <rhs> <var>:<coef> ..." and "dis <var><op><value> ..." lines, plus an
/// optional "incumbent <value> <var>=<value> ..." line. An object learned under
/// a cutoff is preceded by "below <value>" on its own line.
std::string write_learned_file(const LearnedFile& file, const Problem& problem);
LearnedFile read_learned_file(const std::string& text, const Problem& problem);

}  // namespace cutca
