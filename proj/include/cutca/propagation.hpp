#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cutca/trail.hpp"

namespace cutca {

struct Tightening {
  VarIndex var = 0;
  BoundKind kind = BoundKind::Lower;
  Rational value;      ///< rounded for integral variables
  Rational pre_round;  ///< value straight from the activity bound
};

enum class PropStatus { NoChange, Tightened, Conflict };

struct RowPropagation {
  PropStatus status = PropStatus::NoChange;
  std::vector<Tightening> changes;
};

/// All bound tightenings a single row implies under `box`, in variable order.
RowPropagation propagate_constraint(const LinearConstraint& c, const Box& box, const Domain& domain);
inline RowPropagation propagate_constraint(const LinearConstraint& c, const Trail& trail) {
  return propagate_constraint(c, trail.box(), trail.domain());
}

/// The bound `c` implies for `var` under `box`, if the residual activity is
/// finite. Does not compare against the current bound.
std::optional<Tightening> candidate_bound(const LinearConstraint& c, VarIndex var, const Box& box,
                                          const Domain& domain);

/// Whether `c` tightens some bound under `box` (ignores conflicts).
bool propagates(const LinearConstraint& c, const Box& box, const Domain& domain);

/// `box` is the state just before the change. Continuous changes are always
/// tight; integral ones are tight when the unrounded bound is integral.
bool is_tight_propagation(const LinearConstraint& c, const BoundChange& change, const Box& box, const Domain& domain);

struct DisjunctionPropagation {
  PropStatus status = PropStatus::NoChange;
  std::optional<Tightening> change;
};

DisjunctionPropagation propagate_disjunction(const BoundDisjunction& d, const Box& box, const Domain& domain);

struct PropagationCounters {
  std::vector<std::size_t> row_hits;
  std::vector<std::size_t> disjunction_hits;
};

inline constexpr std::size_t kMaxRepeatTightenings = 16;

struct FixpointResult {
  bool conflict = false;
  std::optional<std::size_t> conflict_row;
  std::optional<std::size_t> conflict_disjunction;
  StateId state;
};

/// Rounds over rows (ascending) then disjunctions until nothing changes or a
/// conflict shows up. A continuous variable, or an integer one with an
/// infinite global bound, can be tightened forever by a cycle of rows, so
/// those get at most kMaxRepeatTightenings changes per call.
FixpointResult propagate_fixpoint(Trail& trail, std::span<const LinearConstraint> rows,
                                  std::span<const BoundDisjunction> disjunctions = {},
                                  PropagationCounters* counters = nullptr);

}  // namespace cutca
