#include "cutca/propagation.hpp"

namespace cutca {

namespace {

ExtRational max_term(const Rational& a, VarIndex v, const Box& box) { return a > 0 ? box.ub[v] * a : box.lb[v] * a; }

bool improves(const Tightening& t, const Box& box) {
  return t.kind == BoundKind::Lower ? ExtRational(t.value) > box.lb[t.var] : ExtRational(t.value) < box.ub[t.var];
}

bool capped(VarIndex v, const Domain& domain) {
  return domain.kind[v] == VarKind::Continuous || !domain.global.lb[v].is_finite() ||
         !domain.global.ub[v].is_finite();
}

}  // namespace

std::optional<Tightening> candidate_bound(const LinearConstraint& c, VarIndex var, const Box& box,
                                          const Domain& domain) {
  Rational ar = c.coef(var);
  if (ar == 0) throw PreconditionError("variable does not appear in the constraint");
  Rational residual = 0;
  for (const auto& [v, a] : c.terms()) {
    if (v == var) continue;
    ExtRational t = max_term(a, v, box);
    if (!t.is_finite()) return std::nullopt;
    residual += t.value();
  }
  Tightening out;
  out.var = var;
  out.pre_round = (c.rhs() - residual) / ar;
  out.kind = ar > 0 ? BoundKind::Lower : BoundKind::Upper;
  out.value = out.pre_round;
  if (domain.is_integral(var)) out.value = ar > 0 ? ceil_q(out.pre_round) : floor_q(out.pre_round);
  return out;
}

RowPropagation propagate_constraint(const LinearConstraint& c, const Box& box, const Domain& domain) {
  RowPropagation out;
  if (is_infeasible(c, box)) {
    out.status = PropStatus::Conflict;
    return out;
  }
  for (const auto& [v, a] : c.terms()) {
    auto t = candidate_bound(c, v, box, domain);
    if (t && improves(*t, box)) out.changes.push_back(std::move(*t));
  }
  if (!out.changes.empty()) out.status = PropStatus::Tightened;
  return out;
}

bool propagates(const LinearConstraint& c, const Box& box, const Domain& domain) {
  for (const auto& [v, a] : c.terms()) {
    auto t = candidate_bound(c, v, box, domain);
    if (t && improves(*t, box)) return true;
  }
  return false;
}

bool is_tight_propagation(const LinearConstraint& c, const BoundChange& change, const Box& box, const Domain& domain) {
  auto t = candidate_bound(c, change.var, box, domain);
  if (!t || t->kind != change.kind) throw PreconditionError("change is not derivable from the constraint");
  bool implied = change.kind == BoundKind::Lower ? t->value >= change.new_value : t->value <= change.new_value;
  if (!implied) throw PreconditionError("change is not derivable from the constraint");
  if (domain.kind[change.var] == VarKind::Continuous) return true;
  return is_integral(t->pre_round);
}

DisjunctionPropagation propagate_disjunction(const BoundDisjunction& d, const Box& box, const Domain& domain) {
  DisjunctionPropagation out;
  const BoundAtom* open = nullptr;
  std::size_t open_count = 0;
  for (const auto& atom : d.atoms()) {
    bool violated = atom.kind == BoundKind::Lower ? ExtRational(atom.value) > box.ub[atom.var]
                                                  : ExtRational(atom.value) < box.lb[atom.var];
    if (!violated) {
      open = &atom;
      ++open_count;
    }
  }
  if (open_count == 0) {
    out.status = PropStatus::Conflict;
    return out;
  }
  if (open_count > 1) return out;
  Tightening t;
  t.var = open->var;
  t.kind = open->kind;
  t.pre_round = open->value;
  t.value = open->value;
  if (domain.is_integral(t.var)) t.value = t.kind == BoundKind::Lower ? ceil_q(t.value) : floor_q(t.value);
  if (improves(t, box)) {
    out.status = PropStatus::Tightened;
    out.change = t;
  }
  return out;
}

FixpointResult propagate_fixpoint(Trail& trail, std::span<const LinearConstraint> rows,
                                  std::span<const BoundDisjunction> disjunctions, PropagationCounters* counters) {
  if (counters) {
    counters->row_hits.resize(std::max(counters->row_hits.size(), rows.size()), 0);
    counters->disjunction_hits.resize(std::max(counters->disjunction_hits.size(), disjunctions.size()), 0);
  }
  const Domain& domain = trail.domain();
  std::vector<std::size_t> repeats(domain.size(), 0);
  auto allowed = [&](const Tightening& t) { return !capped(t.var, domain) || repeats[t.var] < kMaxRepeatTightenings; };
  auto apply = [&](const Tightening& t, Reason reason) {
    ++repeats[t.var];
    trail.push_deduction(t.var, t.kind, t.value, reason, t.pre_round);
  };

  FixpointResult res;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      // apply one tightening, then look at the same row again
      while (true) {
        const auto& row = rows[i];
        if (is_infeasible(row, trail.box())) {
          res.conflict = true;
          res.conflict_row = i;
          res.state = trail.state_at(trail.size());
          return res;
        }
        std::optional<Tightening> next;
        for (const auto& [v, a] : row.terms()) {
          auto t = candidate_bound(row, v, trail.box(), domain);
          if (t && improves(*t, trail.box()) && allowed(*t)) {
            next = std::move(t);
            break;
          }
        }
        if (!next) break;
        apply(*next, Reason::row(i));
        if (counters) ++counters->row_hits[i];
        changed = true;
      }
    }
    for (std::size_t i = 0; i < disjunctions.size(); ++i) {
      auto p = propagate_disjunction(disjunctions[i], trail.box(), domain);
      if (p.status == PropStatus::Conflict) {
        res.conflict = true;
        res.conflict_disjunction = i;
        res.state = trail.state_at(trail.size());
        return res;
      }
      if (p.status == PropStatus::Tightened && allowed(*p.change)) {
        apply(*p.change, Reason::disjunction(i));
        if (counters) ++counters->disjunction_hits[i];
        changed = true;
      }
    }
  }
  res.state = trail.state_at(trail.size());
  return res;
}

}  // namespace cutca
