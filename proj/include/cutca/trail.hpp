#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "cutca/model.hpp"

namespace cutca {

/// (decision level, index within level). The global state before any change
/// is {0, -1}.
struct StateId {
  int level = 0;
  int index = -1;

  friend auto operator<=>(const StateId&, const StateId&) = default;
  std::string str() const { return std::to_string(level) + ":" + std::to_string(index); }
};

enum class ReasonKind { Decision, Row, Disjunction };

struct Reason {
  ReasonKind kind = ReasonKind::Decision;
  std::size_t id = 0;

  static Reason decision() { return {}; }
  static Reason row(std::size_t id) { return {ReasonKind::Row, id}; }
  static Reason disjunction(std::size_t id) { return {ReasonKind::Disjunction, id}; }
  friend bool operator==(const Reason&, const Reason&) = default;
};

struct BoundChange {
  StateId state;
  VarIndex var = 0;
  BoundKind kind = BoundKind::Lower;
  Rational new_value;
  ExtRational old_value;
  Reason reason;
  /// Derived bound before integer rounding, when known.
  std::optional<Rational> pre_round;
};

/// The changes on the current root-to-node path. A "count" c names the state
/// reached after the first c changes; count 0 is the global box.
class Trail {
 public:
  explicit Trail(Domain domain);

  const Domain& domain() const { return domain_; }
  const Box& box() const { return box_; }
  const ExtRational& lb(VarIndex v) const { return box_.lb[v]; }
  const ExtRational& ub(VarIndex v) const { return box_.ub[v]; }

  const std::vector<BoundChange>& changes() const { return changes_; }
  const BoundChange& change(std::size_t i) const { return changes_[i]; }
  std::size_t size() const { return changes_.size(); }
  int level() const { return level_; }

  /// Set when some lower bound exceeds its upper bound.
  bool bound_inconsistent() const;

  StateId push_decision(VarIndex var, BoundKind kind, const Rational& value);
  StateId push_deduction(VarIndex var, BoundKind kind, const Rational& value, Reason reason,
                         std::optional<Rational> pre_round = std::nullopt);

  StateId state_at(std::size_t count) const;
  /// Count of the latest state not after `s`.
  std::size_t count_of(const StateId& s) const;
  Box box_at(std::size_t count) const;
  /// Count after the last change of decision level `level`.
  std::size_t level_end(int level) const;
  int level_at(std::size_t count) const { return state_at(count).level; }

  /// Latest change of (var, kind) among the first `before` changes.
  std::optional<std::size_t> latest_change(VarIndex var, BoundKind kind, std::size_t before) const;

  void backtrack_to(std::size_t count);
  void backjump(const StateId& target);

  /// One line per change: "level:index var L|U value decision|row:id|dis:id [pre=q]".
  std::string serialize() const;
  static Trail replay(Domain domain, const std::string& text);

 private:
  StateId push(VarIndex var, BoundKind kind, const Rational& value, Reason reason, std::optional<Rational> pre_round);

  Domain domain_;
  Box box_;
  std::vector<BoundChange> changes_;
  int level_ = 0;
};

ExtRational max_activity(const LinearConstraint& c, const Box& box);
ExtRational min_activity(const LinearConstraint& c, const Box& box);

/// a > 0 and the local ub is global, or a < 0 and the local lb is global.
bool is_relaxable(const LinearConstraint& c, VarIndex var, const Box& local, const Domain& domain);

/// maxact < rhs
bool is_infeasible(const LinearConstraint& c, const Box& box);

}  // namespace cutca
