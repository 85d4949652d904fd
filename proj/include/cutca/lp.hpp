#pragma once

#include <vector>

#include "cutca/model.hpp"

namespace cutca {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rational value;
  std::vector<Rational> x;
};

/// min c.x  s.t.  every row (>= form) and  bounds.lb <= x <= bounds.ub, with
/// n = bounds.size() variables. Exact two-phase simplex with Bland's rule.
LpResult solve_lp(const std::vector<LinearConstraint>& rows, const std::vector<Rational>& c, const Box& bounds);

}  // namespace cutca
