#include "cutca/oracle.hpp"

#include <functional>
#include <map>

namespace cutca {

namespace {

// a.x >= rhs, or a.x > rhs when strict
struct Ineq {
  LinearConstraint::Terms terms;
  Rational rhs;
  bool strict = false;
};

using System = std::vector<Ineq>;

bool holds_trivially(const Ineq& q) { return q.strict ? 0 > q.rhs : 0 >= q.rhs; }

Ineq primitive(Ineq q) {
  if (q.terms.empty()) return q;
  LinearConstraint c = scale_to_primitive(LinearConstraint(std::move(q.terms), q.rhs));
  return {c.terms(), c.rhs(), q.strict};
}

// keeps only the strongest row per left-hand side
class Collector {
 public:
  void add(Ineq q) {
    q = primitive(std::move(q));
    auto [it, fresh] = rows_.try_emplace(q.terms, q.rhs, q.strict);
    if (fresh) {
      if (rows_.size() > kOracleMaxFmRows) throw OracleRefusal("Fourier-Motzkin system exceeds the row limit");
      return;
    }
    auto& [rhs, strict] = it->second;
    if (q.rhs > rhs || (q.rhs == rhs && q.strict)) {
      rhs = q.rhs;
      strict = q.strict;
    }
  }
  System take() {
    System out;
    for (auto& [t, v] : rows_) out.push_back({t, v.first, v.second});
    return out;
  }

 private:
  std::map<LinearConstraint::Terms, std::pair<Rational, bool>> rows_;
};

Rational coef(const Ineq& q, VarIndex v) {
  auto it = q.terms.find(v);
  return it == q.terms.end() ? Rational(0) : it->second;
}

System eliminate(const System& sys, VarIndex var) {
  Collector out;
  std::vector<const Ineq*> pos, neg;
  for (const auto& q : sys) {
    Rational a = coef(q, var);
    if (a > 0) {
      pos.push_back(&q);
    } else if (a < 0) {
      neg.push_back(&q);
    } else {
      out.add(q);
    }
  }
  for (const Ineq* p : pos) {
    for (const Ineq* n : neg) {
      Rational k = coef(*p, var) / -coef(*n, var);
      Ineq sum = *p;
      for (const auto& [v, a] : n->terms) sum.terms[v] += k * a;
      sum.terms.erase(var);
      std::erase_if(sum.terms, [](const auto& kv) { return kv.second == 0; });
      sum.rhs += k * n->rhs;
      sum.strict = p->strict || n->strict;
      out.add(std::move(sum));
    }
  }
  return out.take();
}

// Eliminates `vars` in order and back-substitutes a solution, or nullopt.
std::optional<std::map<VarIndex, Rational>> solve_system(System sys, const std::vector<VarIndex>& vars) {
  std::vector<System> stages{sys};
  for (VarIndex v : vars) stages.push_back(eliminate(stages.back(), v));
  for (const auto& q : stages.back()) {
    if (!q.terms.empty()) throw std::logic_error("variable left after elimination");
    if (!holds_trivially(q)) return std::nullopt;
  }
  std::map<VarIndex, Rational> point;
  for (std::size_t i = vars.size(); i-- > 0;) {
    VarIndex v = vars[i];
    std::optional<Rational> lo, hi;
    bool lo_strict = false, hi_strict = false;
    for (const auto& q : stages[i]) {
      Rational a = coef(q, v);
      if (a == 0) continue;
      Rational rest = q.rhs;
      for (const auto& [w, b] : q.terms) {
        if (w != v) rest -= b * point.at(w);
      }
      Rational bound = rest / a;
      if (a > 0) {
        if (!lo || bound > *lo || (bound == *lo && q.strict)) {
          lo = bound;
          lo_strict = q.strict;
        }
      } else if (!hi || bound < *hi || (bound == *hi && q.strict)) {
        hi = bound;
        hi_strict = q.strict;
      }
    }
    Rational x;
    if (lo && hi) {
      x = (lo_strict || hi_strict) ? Rational((*lo + *hi) / 2) : *lo;
    } else if (lo) {
      x = lo_strict ? Rational(*lo + 1) : *lo;
    } else if (hi) {
      x = hi_strict ? Rational(*hi - 1) : *hi;
    }
    point[v] = x;
  }
  return point;
}

struct Split {
  std::vector<VarIndex> integral;
  std::vector<VarIndex> continuous;
};

Split split_vars(const Problem& p) {
  Split s;
  std::size_t points = 1;
  for (const auto& v : p.variables()) {
    if (v.kind == VarKind::Continuous) {
      s.continuous.push_back(v.index);
      continue;
    }
    s.integral.push_back(v.index);
    if (!v.lb.is_finite() || !v.ub.is_finite()) throw OracleRefusal("integral variable with an infinite bound");
    Rational width = v.ub.value() - v.lb.value() + 1;
    if (width > Rational(kOracleMaxPoints)) throw OracleRefusal("integral domain too large");
    points *= width.get_num().get_ui();
    if (points > kOracleMaxPoints) throw OracleRefusal("too many integral points");
  }
  if (s.integral.size() > kOracleMaxIntegral) throw OracleRefusal("too many integral variables");
  if (s.continuous.size() > kOracleMaxContinuous) throw OracleRefusal("too many continuous variables");
  return s;
}

// calls f for every integral assignment (continuous entries left at 0)
void for_each_assignment(const Problem& p, const Split& s, const std::function<void(std::vector<Rational>&)>& f) {
  std::vector<Rational> x(p.num_vars());
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == s.integral.size()) {
      f(x);
      return;
    }
    const Variable& v = p.variables()[s.integral[k]];
    for (Rational a = v.lb.value(); a <= v.ub.value(); a += 1) {
      x[v.index] = a;
      rec(k + 1);
    }
  };
  rec(0);
}

// rows with the integral part of x substituted, plus continuous bounds
System residual(const Problem& p, const Split& s, const std::vector<Rational>& x) {
  System sys;
  for (const auto& c : p.constraints()) {
    Ineq q{{}, c.rhs(), false};
    for (const auto& [v, a] : c.terms()) {
      if (p.domain().kind[v] == VarKind::Continuous) {
        q.terms[v] = a;
      } else {
        q.rhs -= a * x[v];
      }
    }
    sys.push_back(std::move(q));
  }
  for (VarIndex v : s.continuous) {
    const Variable& var = p.variables()[v];
    if (var.lb.is_finite()) sys.push_back({{{v, 1}}, var.lb.value(), false});
    if (var.ub.is_finite()) sys.push_back({{{v, -1}}, Rational(-var.ub.value()), false});
  }
  return sys;
}

// integral part of a linear form, and its continuous terms
std::pair<Rational, LinearConstraint::Terms> split_form(const LinearConstraint::Terms& form, const Problem& p,
                                                        const std::vector<Rational>& x) {
  Rational fixed;
  LinearConstraint::Terms cont;
  for (const auto& [v, a] : form) {
    if (p.domain().kind[v] == VarKind::Continuous) {
      cont[v] = a;
    } else {
      fixed += a * x[v];
    }
  }
  return {fixed, cont};
}

// adds  form < bound  (strict) to the system, for the integral part fixed by x
void add_strict_upper(System& sys, const LinearConstraint::Terms& form, const Rational& bound, const Problem& p,
                      const std::vector<Rational>& x) {
  auto [fixed, cont] = split_form(form, p, x);
  Ineq q{{}, Rational(fixed - bound), true};
  for (const auto& [v, a] : cont) q.terms[v] = -a;
  sys.push_back(std::move(q));
}

}  // namespace

std::vector<LinearConstraint> fm_eliminate(const std::vector<LinearConstraint>& rows, VarIndex var) {
  System sys;
  for (const auto& c : rows) sys.push_back({c.terms(), c.rhs(), false});
  std::vector<LinearConstraint> out;
  for (auto& q : eliminate(sys, var)) out.emplace_back(std::move(q.terms), q.rhs);
  return out;
}

bool fm_feasible(const std::vector<LinearConstraint>& rows) {
  System sys;
  std::map<VarIndex, bool> vars;
  for (const auto& c : rows) {
    sys.push_back({c.terms(), c.rhs(), false});
    for (const auto& [v, a] : c.terms()) vars[v] = true;
  }
  std::vector<VarIndex> order;
  for (const auto& [v, b] : vars) order.push_back(v);
  return solve_system(sys, order).has_value();
}

std::vector<FeasiblePoint> enumerate_feasible(const Problem& problem) {
  Split s = split_vars(problem);
  std::vector<FeasiblePoint> out;
  for_each_assignment(problem, s, [&](std::vector<Rational>& x) {
    auto sol = solve_system(residual(problem, s, x), s.continuous);
    if (!sol) return;
    FeasiblePoint fp{x};
    for (const auto& [v, val] : *sol) fp.x[v] = val;
    out.push_back(std::move(fp));
  });
  return out;
}

OracleOptimum oracle_optimum(const Problem& problem) {
  Split s = split_vars(problem);
  LinearConstraint::Terms obj = problem.objective().value_or(LinearConstraint::Terms{});
  VarIndex t = problem.num_vars();  // epigraph variable
  std::vector<VarIndex> order = s.continuous;
  OracleOptimum best;
  for_each_assignment(problem, s, [&](std::vector<Rational>& x) {
    if (best.status == OracleOptimum::Status::Unbounded) return;
    System sys = residual(problem, s, x);
    auto [fixed, cont] = split_form(obj, problem, x);
    Rational value = fixed;
    if (!cont.empty()) {
      // t >= fixed + cont.y, then eliminate y to get the least t
      Ineq epi{{{t, 1}}, fixed, false};
      for (const auto& [v, a] : cont) epi.terms[v] = -a;
      System with_t = sys;
      with_t.push_back(epi);
      System proj = with_t;
      for (VarIndex v : order) proj = eliminate(proj, v);
      std::optional<Rational> least;
      for (const auto& q : proj) {
        Rational a = coef(q, t);
        if (a == 0) {
          if (!holds_trivially(q)) return;
        } else if (a > 0) {
          Rational b = q.rhs / a;
          if (!least || b > *least) least = b;
        }
      }
      if (!least) {
        best.status = OracleOptimum::Status::Unbounded;
        return;
      }
      value = *least;
      sys = with_t;
      sys.push_back({{{t, -1}}, Rational(-value), false});
    }
    if (best.status == OracleOptimum::Status::Optimal && value >= best.value) return;
    std::vector<VarIndex> vars = order;
    if (!cont.empty()) vars.push_back(t);
    auto sol = solve_system(sys, vars);
    if (!sol) return;
    best.status = OracleOptimum::Status::Optimal;
    best.value = value;
    best.witness = x;
    for (const auto& [v, val] : *sol) {
      if (v < problem.num_vars()) best.witness[v] = val;
    }
  });
  return best;
}

bool validate_learned(const Problem& problem, const LinearConstraint& learned,
                      const std::optional<Rational>& valid_below) {
  Split s = split_vars(problem);
  const LinearConstraint::Terms obj = problem.objective().value_or(LinearConstraint::Terms{});
  bool valid = true;
  for_each_assignment(problem, s, [&](std::vector<Rational>& x) {
    if (!valid) return;
    System sys = residual(problem, s, x);
    if (valid_below) {
      // look for a feasible point with objective < valid_below violating the row
      add_strict_upper(sys, obj, *valid_below, problem, x);
      add_strict_upper(sys, learned.terms(), learned.rhs(), problem, x);
      if (solve_system(sys, s.continuous)) valid = false;
      return;
    }
    // least value of the learned left-hand side via an epigraph variable
    auto [fixed, cont] = split_form(learned.terms(), problem, x);
    if (cont.empty()) {
      if (fixed < learned.rhs() && solve_system(sys, s.continuous)) valid = false;
      return;
    }
    VarIndex t = problem.num_vars();
    Ineq up{{{t, 1}}, fixed, false};
    Ineq down{{{t, -1}}, Rational(-fixed), false};
    for (const auto& [v, a] : cont) {
      up.terms[v] = -a;
      down.terms[v] = a;
    }
    sys.push_back(up);
    sys.push_back(down);
    for (VarIndex v : s.continuous) sys = eliminate(sys, v);
    std::optional<Rational> least;
    bool bounded = false;
    for (const auto& q : sys) {
      Rational a = coef(q, t);
      if (a == 0) {
        if (!holds_trivially(q)) return;  // no continuous completion
      } else if (a > 0) {
        Rational b = q.rhs / a;
        if (!least || b > *least) least = b;
        bounded = true;
      }
    }
    if (!bounded || *least < learned.rhs()) valid = false;
  });
  return valid;
}

bool validate_learned(const Problem& problem, const BoundDisjunction& learned,
                      const std::optional<Rational>& valid_below) {
  Split s = split_vars(problem);
  const LinearConstraint::Terms obj = problem.objective().value_or(LinearConstraint::Terms{});
  bool valid = true;
  for_each_assignment(problem, s, [&](std::vector<Rational>& x) {
    if (!valid) return;
    System sys = residual(problem, s, x);
    for (const auto& atom : learned.atoms()) {
      if (problem.domain().kind[atom.var] != VarKind::Continuous) {
        if (atom.holds(x[atom.var])) return;
        continue;
      }
      // the atom fails: x < value for a lower atom, x > value for an upper one
      if (atom.kind == BoundKind::Lower) {
        sys.push_back({{{atom.var, -1}}, Rational(-atom.value), true});
      } else {
        sys.push_back({{{atom.var, 1}}, atom.value, true});
      }
    }
    if (valid_below) add_strict_upper(sys, obj, *valid_below, problem, x);
    if (solve_system(sys, s.continuous)) valid = false;
  });
  return valid;
}

}  // namespace cutca
