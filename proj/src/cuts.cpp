#include "cutca/cuts.hpp"

#include <optional>

#include "cutca/conflict.hpp"
#include "cutca/propagation.hpp"
#include "cutca/trail.hpp"

namespace cutca {

const char* to_string(ReductionStrategy s) {
  switch (s) {
    case ReductionStrategy::Clause:
      return "clause";
    case ReductionStrategy::CoefTight:
      return "coeftight";
    case ReductionStrategy::WMir:
      return "wmir";
    case ReductionStrategy::CMir:
      return "cmir";
  }
  return "?";
}

ReductionStrategy parse_strategy(const std::string& s) {
  if (s == "clause") return ReductionStrategy::Clause;
  if (s == "coeftight") return ReductionStrategy::CoefTight;
  if (s == "wmir") return ReductionStrategy::WMir;
  if (s == "cmir") return ReductionStrategy::CMir;
  throw PreconditionError("unknown reduction strategy '" + s + "'");
}

LinearConstraint weaken(const LinearConstraint& c, VarIndex var, const Domain& domain) {
  Rational a = c.coef(var);
  if (a == 0) throw PreconditionError("cannot weaken a variable that is not in the constraint");
  const ExtRational& bound = a > 0 ? domain.global.ub[var] : domain.global.lb[var];
  if (!bound.is_finite()) throw PreconditionError("cannot weaken a variable with an infinite bound");
  LinearConstraint out = c;
  out.erase(var);
  out.set_rhs(Rational(c.rhs() - a * bound.value()));
  return out;
}

Complemented complement(const LinearConstraint& c, VarIndex var, const Domain& domain) {
  const ExtRational& ub = domain.global.ub[var];
  if (!ub.is_finite()) throw PreconditionError("cannot complement a variable with infinite upper bound");
  Rational a = c.coef(var);
  if (a == 0) throw PreconditionError("cannot complement a variable that is not in the constraint");
  Complemented out{c, {}};
  out.row.set_coef(var, Rational(-a));
  out.row.set_rhs(Rational(c.rhs() - a * ub.value()));
  out.record.complement(var, ub.value());
  return out;
}

LinearConstraint uncomplement(const LinearConstraint& c, const SubstitutionRecord& record) {
  return to_original(c, record);
}

namespace {

void require_lb_zero(const LinearConstraint& c, const Domain& domain, const char* op) {
  for (const auto& [v, a] : c.terms()) {
    if (domain.global.lb[v] != ExtRational(0)) {
      throw PreconditionError(std::string(op) + " needs every variable to have lower bound 0");
    }
  }
}

void require_binary(const LinearConstraint& c, const Domain& domain, const char* op) {
  for (const auto& [v, a] : c.terms()) {
    if (!domain.is_binary(v)) throw PreconditionError(std::string(op) + " needs a pure binary constraint");
  }
}

}  // namespace

LinearConstraint saturate(const LinearConstraint& c, const Domain& domain) {
  require_binary(c, domain, "saturate");
  if (c.rhs() <= 0) throw PreconditionError("saturate needs a positive right-hand side");
  LinearConstraint out = c;
  for (const auto& [v, a] : c.terms()) {
    if (a < 0) throw PreconditionError("saturate needs non-negative coefficients");
    if (a > c.rhs()) out.set_coef(v, c.rhs());
  }
  return out;
}

LinearConstraint coef_tighten(const LinearConstraint& c, const Domain& domain) {
  ExtRational minact = min_activity(c, domain.global);
  if (minact >= ExtRational(c.rhs())) throw PreconditionError("coefficient tightening needs a non-redundant constraint");
  if (!minact.is_finite()) return c;
  Rational slack = c.rhs() - minact.value();
  LinearConstraint out = c;
  for (const auto& [v, a] : c.terms()) {
    if (!domain.is_integral(v)) continue;
    if (a > slack) {
      out.set_coef(v, slack);
      out.set_rhs(Rational(out.rhs() - (a - slack) * domain.global.lb[v].value()));
    } else if (a < -slack) {
      out.set_coef(v, Rational(-slack));
      out.set_rhs(Rational(out.rhs() + (-a - slack) * domain.global.ub[v].value()));
    }
  }
  return out;
}

LinearConstraint cg_cut(const LinearConstraint& c, const Domain& domain) {
  for (const auto& [v, a] : c.terms()) {
    if (!domain.is_integral(v)) throw PreconditionError("cg_cut needs integer variables only");
  }
  require_lb_zero(c, domain, "cg_cut");
  LinearConstraint::Terms t;
  for (const auto& [v, a] : c.terms()) t[v] = ceil_q(a);
  return LinearConstraint(std::move(t), ceil_q(c.rhs()), c.origin());
}

LinearConstraint mir_cut(const LinearConstraint& c, const Domain& domain) {
  require_lb_zero(c, domain, "mir_cut");
  Rational fb = frac_q(c.rhs());
  if (fb == 0) throw PreconditionError("mir_cut needs a fractional right-hand side");
  LinearConstraint::Terms t;
  for (const auto& [v, a] : c.terms()) {
    if (domain.is_integral(v)) {
      Rational fa = frac_q(a);
      Rational ratio = fa / fb;
      t[v] = floor_q(a) + (ratio < 1 ? ratio : Rational(1));
    } else if (a > 0) {
      t[v] = a / fb;
    }
  }
  return LinearConstraint(std::move(t), ceil_q(c.rhs()), c.origin());
}

namespace {

struct Literals {
  NormalizedRow n;
  Box box;
  Domain domain;
};

Literals to_literals(const LinearConstraint& reason, VarIndex r, const Box& local, const Domain& domain) {
  require_binary(reason, domain, "binary reduction");
  Literals l{normalize_for_reduction(reason, r, domain), {}, {}};
  l.box = literal_box(local, l.n.record);
  l.domain = literal_domain(domain, l.n.record);
  return l;
}

// complements the literal of j in place (binary literal, so its ub is 1)
void complement_literal(LinearConstraint& row, SubstitutionRecord& rec, VarIndex j) {
  Rational a = row.coef(j);
  row.set_coef(j, Rational(-a));
  row.set_rhs(Rational(row.rhs() - a));
  rec.complement(j, 1);
}

LinearConstraint finish(const LinearConstraint& literal_row, const SubstitutionRecord& rec) {
  return scale_to_primitive(to_original(literal_row, rec));
}

}  // namespace

LinearConstraint reduce_clause(const LinearConstraint& reason, VarIndex r, const Box& local, const Domain& domain) {
  Literals l = to_literals(reason, r, local, domain);
  LinearConstraint::Terms t{{r, 1}};
  for (const auto& [j, a] : l.n.row.terms()) {
    if (j != r && l.box.ub[j] == ExtRational(0)) t[j] = 1;
  }
  return finish(LinearConstraint(std::move(t), 1), l.n.record);
}

namespace {

template <class Done>
LinearConstraint coeftight_loop(const LinearConstraint& reason, VarIndex r, const Box& local, const Domain& domain,
                                Done done) {
  require_binary(reason, domain, "binary reduction");
  LinearConstraint row = reason;
  // weaken one relaxable variable at a time, in index order
  while (!done(row)) {
    std::optional<VarIndex> pick;
    for (const auto& [j, a] : row.terms()) {
      if (j != r && is_relaxable(row, j, local, domain)) {
        pick = j;
        break;
      }
    }
    if (!pick) {
      // nothing left to weaken: one more tightening pass (covers P empty)
      LinearConstraint tightened = coef_tighten(row, domain);
      if (tightened == row) throw ReductionFailed("no relaxable variable left to weaken");
      row = tightened;
      continue;
    }
    row = weaken(row, *pick, domain);
    if (row.coef(r) == 0 || min_activity(row, domain.global) >= ExtRational(row.rhs())) {
      throw ReductionFailed("weakened reason no longer propagates");
    }
    row = coef_tighten(row, domain);
  }
  return scale_to_primitive(row);
}

}  // namespace

LinearConstraint reduce_coeftight(const LinearConstraint& reason, const LinearConstraint& conflict, VarIndex r,
                                  const Box& local, const Domain& domain) {
  return coeftight_loop(reason, r, local, domain,
                        [&](const LinearConstraint& row) { return is_infeasible(resolve(row, conflict, r), local); });
}

LinearConstraint reduce_coeftight(const LinearConstraint& reason, VarIndex r, const Box& local, const Domain& domain) {
  return coeftight_loop(reason, r, local, domain, [&](const LinearConstraint& row) {
    auto t = candidate_bound(row, r, local, domain);
    return t && is_integral(t->pre_round);
  });
}

LinearConstraint reduce_cmir(const LinearConstraint& reason, VarIndex r, const Box& local, const Domain& domain) {
  Literals l = to_literals(reason, r, local, domain);
  LinearConstraint row = l.n.row;
  SubstitutionRecord rec = l.n.record;
  for (const auto& [j, a] : l.n.row.terms()) {
    if (j != r && l.box.ub[j] == ExtRational(1)) complement_literal(row, rec, j);
  }
  if (frac_q(row.rhs()) == 0) throw ReductionFailed("reason propagates tightly, nothing to reduce");
  return finish(mir_cut(row, literal_domain(domain, rec)), rec);
}

LinearConstraint reduce_wmir(const LinearConstraint& reason, VarIndex r, const Box& local, const Domain& domain) {
  Literals l = to_literals(reason, r, local, domain);
  LinearConstraint row = l.n.row;
  SubstitutionRecord rec = l.n.record;
  for (const auto& [j, a] : l.n.row.terms()) {
    if (j == r || l.box.ub[j] != ExtRational(1)) continue;
    if (is_integral(a)) {
      complement_literal(row, rec, j);
    } else {
      row = weaken(row, j, l.domain);
    }
  }
  if (frac_q(row.rhs()) == 0) throw ReductionFailed("reason propagates tightly, nothing to reduce");
  return finish(mir_cut(row, literal_domain(domain, rec)), rec);
}

LinearConstraint reduce(ReductionStrategy s, const LinearConstraint& reason, const LinearConstraint& conflict,
                        VarIndex r, const Box& local, const Domain& domain) {
  switch (s) {
    case ReductionStrategy::Clause:
      return reduce_clause(reason, r, local, domain);
    case ReductionStrategy::CoefTight:
      return reduce_coeftight(reason, conflict, r, local, domain);
    case ReductionStrategy::WMir:
      return reduce_wmir(reason, r, local, domain);
    case ReductionStrategy::CMir:
      return reduce_cmir(reason, r, local, domain);
  }
  throw PreconditionError("unknown strategy");
}

}  // namespace cutca
