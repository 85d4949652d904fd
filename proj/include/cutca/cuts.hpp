#pragma once

#include <stdexcept>
#include <string>

#include "cutca/model.hpp"

namespace cutca {

enum class ReductionStrategy { Clause, CoefTight, WMir, CMir };

const char* to_string(ReductionStrategy s);
/// "clause", "coeftight", "wmir", "cmir"
ReductionStrategy parse_strategy(const std::string& s);

/// A reduction could not produce a reason whose resolvent is infeasible.
class ReductionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Drops `var`, subtracting its largest contribution over the global bounds.
LinearConstraint weaken(const LinearConstraint& c, VarIndex var, const Domain& domain);

struct Complemented {
  LinearConstraint row;
  /// Substitution for the complemented variable; the row term on `var` now
  /// refers to ub - x.
  SubstitutionRecord record;
};

Complemented complement(const LinearConstraint& c, VarIndex var, const Domain& domain);
/// Maps a complemented row back to the original variable.
LinearConstraint uncomplement(const LinearConstraint& c, const SubstitutionRecord& record);

LinearConstraint saturate(const LinearConstraint& c, const Domain& domain);
/// Integer coefficients are clipped to b - minact (global bounds); continuous
/// terms stay. A row whose minact is -inf comes back unchanged.
LinearConstraint coef_tighten(const LinearConstraint& c, const Domain& domain);
LinearConstraint cg_cut(const LinearConstraint& c, const Domain& domain);
LinearConstraint mir_cut(const LinearConstraint& c, const Domain& domain);

/// Reductions of a pure-binary reason `reason` that propagated `r` under
/// `local` (the box just before that change). Results are in the original
/// variables, scaled to integer coefficients with gcd 1.
LinearConstraint reduce_clause(const LinearConstraint& reason, VarIndex r, const Box& local, const Domain& domain);
/// Weaken and tighten until the resolvent with `conflict` is infeasible.
LinearConstraint reduce_coeftight(const LinearConstraint& reason, const LinearConstraint& conflict, VarIndex r,
                                  const Box& local, const Domain& domain);
/// Weaken and tighten until `r` is propagated tightly.
LinearConstraint reduce_coeftight(const LinearConstraint& reason, VarIndex r, const Box& local, const Domain& domain);
LinearConstraint reduce_cmir(const LinearConstraint& reason, VarIndex r, const Box& local, const Domain& domain);
LinearConstraint reduce_wmir(const LinearConstraint& reason, VarIndex r, const Box& local, const Domain& domain);

/// Dispatch on the strategy; `conflict` is only used by CoefTight.
LinearConstraint reduce(ReductionStrategy s, const LinearConstraint& reason, const LinearConstraint& conflict,
                        VarIndex r, const Box& local, const Domain& domain);

}  // namespace cutca
