#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cutca/cuts.hpp"
#include "cutca/trail.hpp"

namespace cutca {

/// c1 + (|a1| / |a2|) * c2, where a1, a2 are the coefficients of `var`. The
/// first row keeps its scale.
LinearConstraint resolve(const LinearConstraint& c1, const LinearConstraint& c2, VarIndex var);

enum class AnalysisOutcome { Learned, LearnedDisjunction, GlobalInfeasibility, Abandoned };

const char* to_string(AnalysisOutcome o);

struct AnalysisConfig {
  ReductionStrategy strategy = ReductionStrategy::CMir;
  /// Off: resolve reasons as they are (only meaningful in tests).
  bool reduce = true;
  std::ostream* trace = nullptr;
};

struct AnalysisResult {
  AnalysisOutcome outcome = AnalysisOutcome::Abandoned;
  /// Learned row; for GlobalInfeasibility the row that is infeasible under
  /// the global bounds.
  std::optional<LinearConstraint> learned;
  std::optional<BoundDisjunction> disjunction;
  std::optional<StateId> backjump_target;
  std::size_t iterations = 0;
  bool graph_fallback = false;
  ReductionStrategy strategy = ReductionStrategy::CMir;
  std::string abandon_reason;
  /// Resolutions of tightly propagated reasons, and how many of those did not
  /// give an infeasible resolvent.
  std::size_t tight_resolution_checks = 0;
  std::size_t tight_resolution_violations = 0;
};

/// Rows and disjunctions that trail reasons refer to by id.
struct ReasonStore {
  std::span<const LinearConstraint> rows;
  std::span<const BoundDisjunction> disjunctions;
};

/// Smallest count at which `c` is infeasible, if it is infeasible at the
/// current state.
std::optional<std::size_t> first_infeasible(const LinearConstraint& c, const Trail& trail);

/// The earliest end-of-level state, before the level where `c` becomes
/// infeasible, at which `c` propagates; requires that it propagates at the
/// end of the level just before.
std::optional<StateId> is_asserting(const LinearConstraint& c, const Trail& trail);

AnalysisResult analyze(const LinearConstraint& conflict, const Trail& trail, const ReasonStore& reasons,
                       const AnalysisConfig& config = {});

struct MbpResult {
  enum class Kind { ReducedReason, EarlierConflict } kind = Kind::ReducedReason;
  LinearConstraint row;
  std::size_t continuous_resolved = 0;
  /// Working reason after each continuous elimination.
  std::vector<LinearConstraint> aggregates;
};

/// Thrown by reduce_mbp when the reason keeps non-relaxable general integer
/// variables.
class NeedsGeneralInteger : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eliminates non-relaxable continuous variables from the reason of change
/// `pos` (a binary variable) using the reasons of their bound changes, then
/// applies the binary reduction.
MbpResult reduce_mbp(const LinearConstraint& reason, const LinearConstraint& conflict, std::size_t pos,
                     const Trail& trail, const ReasonStore& reasons, ReductionStrategy strategy);

struct GeneralIntegerResult {
  enum class Kind { Resolved, SeparationCut, Failed } kind = Kind::Failed;
  /// Reason to resolve with (the original one for Resolved).
  std::optional<LinearConstraint> reason;
};

/// For the reason of change `pos` when general integers are involved: plain
/// resolution first, then one MIR cut on the shifted/complemented reason.
GeneralIntegerResult resolve_general_integer(const LinearConstraint& reason, const LinearConstraint& conflict,
                                             std::size_t pos, const Trail& trail);

/// Either a violated row or a violated disjunction.
using ConflictSource = std::variant<LinearConstraint, BoundDisjunction>;

/// 1-UIP analysis over bound changes. Learns a clause (as a row) when every
/// remaining variable is binary, else a bound disjunction.
AnalysisResult graph_fallback(const ConflictSource& conflict, const Trail& trail, const ReasonStore& reasons);

}  // namespace cutca
