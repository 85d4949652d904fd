#include "cutca/conflict.hpp"

#include <map>
#include <ostream>
#include <set>

#include "cutca/propagation.hpp"

namespace cutca {

LinearConstraint resolve(const LinearConstraint& c1, const LinearConstraint& c2, VarIndex var) {
  Rational a1 = c1.coef(var);
  Rational a2 = c2.coef(var);
  if (a1 == 0 || a2 == 0) throw PreconditionError("resolve needs the variable in both constraints");
  if (sgn(a1) == sgn(a2)) throw PreconditionError("resolve needs opposite signs on the variable");
  LinearConstraint out = c1;
  out.add_scaled(c2, Rational(abs(a1) / abs(a2)));
  out.erase(var);
  out.set_origin({OriginKind::Derived, ""});
  return out;
}

const char* to_string(AnalysisOutcome o) {
  switch (o) {
    case AnalysisOutcome::Learned:
      return "learned";
    case AnalysisOutcome::LearnedDisjunction:
      return "learned-disjunction";
    case AnalysisOutcome::GlobalInfeasibility:
      return "global-infeasibility";
    case AnalysisOutcome::Abandoned:
      return "abandoned";
  }
  return "?";
}

std::optional<std::size_t> first_infeasible(const LinearConstraint& c, const Trail& trail) {
  if (!is_infeasible(c, trail.box())) return std::nullopt;
  // infeasibility is monotone along the trail
  std::size_t lo = 0, hi = trail.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (is_infeasible(c, trail.box_at(mid))) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

namespace {

std::optional<StateId> asserting_at(const LinearConstraint& c, const Trail& trail, std::size_t cursor) {
  int level = trail.level_at(cursor);
  if (level == 0) return std::nullopt;
  const Domain& d = trail.domain();
  if (!propagates(c, trail.box_at(trail.level_end(level - 1)), d)) return std::nullopt;
  for (int k = 0; k < level; ++k) {
    std::size_t end = trail.level_end(k);
    if (propagates(c, trail.box_at(end), d)) return trail.state_at(end);
  }
  return std::nullopt;
}

bool tight_change(const BoundChange& ch, const LinearConstraint& reason, const Box& pre, const Domain& d) {
  if (d.kind[ch.var] == VarKind::Continuous) return true;
  if (ch.pre_round) return is_integral(*ch.pre_round);
  return is_tight_propagation(reason, ch, pre, d);
}

void strengthen(LinearConstraint& c, const Domain& d) {
  ExtRational minact = min_activity(c, d.global);
  if (minact < ExtRational(c.rhs())) c = coef_tighten(c, d);
  c = scale_to_primitive(c);
}

}  // namespace

std::optional<StateId> is_asserting(const LinearConstraint& c, const Trail& trail) {
  auto cursor = first_infeasible(c, trail);
  if (!cursor) return std::nullopt;
  return asserting_at(c, trail, *cursor);
}

AnalysisResult analyze(const LinearConstraint& conflict, const Trail& trail, const ReasonStore& reasons,
                       const AnalysisConfig& config) {
  const Domain& d = trail.domain();
  AnalysisResult res;
  res.strategy = config.strategy;
  LinearConstraint learn = conflict;
  auto cursor = first_infeasible(learn, trail);
  if (!cursor) throw PreconditionError("conflict row is not infeasible at the current state");

  auto abandon = [&](std::string why) {
    res.outcome = AnalysisOutcome::Abandoned;
    res.abandon_reason = std::move(why);
    res.learned = learn;
    return res;
  };
  auto trace = [&](const BoundChange& ch, const char* action) {
    if (config.trace) {
      *config.trace << "iter " << res.iterations << " state " << ch.state.str() << " var " << ch.var << " action "
                    << action << " len " << learn.size() << '\n';
    }
  };

  while (true) {
    if (*cursor == 0) {
      res.outcome = AnalysisOutcome::GlobalInfeasibility;
      res.learned = learn;
      return res;
    }
    if (auto target = asserting_at(learn, trail, *cursor)) {
      res.outcome = AnalysisOutcome::Learned;
      learn.set_origin({OriginKind::Learned, to_string(config.strategy)});
      res.learned = learn;
      res.backjump_target = target;
      return res;
    }
    std::size_t pos = *cursor - 1;
    const BoundChange& ch = trail.change(pos);
    if (ch.reason.kind == ReasonKind::Decision) return abandon("reached a decision without asserting");
    if (ch.reason.kind == ReasonKind::Disjunction) return abandon("reason is a bound disjunction");
    const LinearConstraint& reason = reasons.rows[ch.reason.id];
    Box pre = trail.box_at(pos);
    VarIndex r = ch.var;
    bool tight = tight_change(ch, reason, pre, d);

    LinearConstraint reduced;
    const char* action = "resolve";
    bool general_integer = false;
    if (tight || !config.reduce) {
      reduced = reason;
      if (tight) ++res.tight_resolution_checks;
    } else if (d.is_binary(r)) {
      try {
        MbpResult m = reduce_mbp(reason, learn, pos, trail, reasons, config.strategy);
        if (m.kind == MbpResult::Kind::EarlierConflict) {
          learn = m.row;
          strengthen(learn, d);
          ++res.iterations;
          trace(ch, "earlier-conflict");
          cursor = first_infeasible(learn, trail);
          continue;
        }
        reduced = m.row;
        action = m.continuous_resolved ? "mbp-reduce" : "reduce";
      } catch (const NeedsGeneralInteger&) {
        general_integer = true;
      } catch (const ReductionFailed& e) {
        return abandon(e.what());
      }
    } else {
      general_integer = true;
    }
    if (general_integer) {
      GeneralIntegerResult g = resolve_general_integer(reason, learn, pos, trail);
      if (g.kind == GeneralIntegerResult::Kind::Failed) return abandon("general integer reason could not be reduced");
      reduced = *g.reason;
      action = g.kind == GeneralIntegerResult::Kind::Resolved ? "resolve" : "separation-cut";
    }

    LinearConstraint next = resolve(learn, reduced, r);
    if (!is_infeasible(next, pre)) {
      if (tight) ++res.tight_resolution_violations;
      return abandon("resolvent is not infeasible");
    }
    strengthen(next, d);
    learn = std::move(next);
    ++res.iterations;
    trace(ch, action);
    cursor = first_infeasible(learn, trail);
  }
}

MbpResult reduce_mbp(const LinearConstraint& reason, const LinearConstraint& conflict, std::size_t pos,
                     const Trail& trail, const ReasonStore& reasons, ReductionStrategy strategy) {
  const Domain& d = trail.domain();
  VarIndex r = trail.change(pos).var;
  if (!d.is_binary(r)) throw PreconditionError("reduce_mbp resolves binary variables only");
  Box pre = trail.box_at(pos);
  int sign = sgn(reason.coef(r));
  MbpResult out;
  LinearConstraint work = reason;
  std::size_t limit = pos;
  while (true) {
    std::optional<std::size_t> next;
    for (const auto& [v, a] : work.terms()) {
      if (d.kind[v] != VarKind::Continuous) continue;
      auto c = trail.latest_change(v, a > 0 ? BoundKind::Upper : BoundKind::Lower, limit);
      if (c && (!next || *c > *next)) next = c;
    }
    if (!next) break;
    const BoundChange& cont = trail.change(*next);
    if (cont.reason.kind != ReasonKind::Row) throw ReductionFailed("continuous bound change without a row reason");
    work = resolve(work, reasons.rows[cont.reason.id], cont.var);
    ++out.continuous_resolved;
    out.aggregates.push_back(work);
    limit = *next;
    if (is_infeasible(work, pre)) {
      out.kind = MbpResult::Kind::EarlierConflict;
      out.row = scale_to_primitive(work);
      return out;
    }
    if (sgn(work.coef(r)) != sign) throw ReductionFailed("aggregation lost the resolved variable");
  }

  for (const auto& [v, a] : LinearConstraint::Terms(work.terms())) {
    if (v == r || d.is_binary(v)) continue;
    const ExtRational& bound = a > 0 ? d.global.ub[v] : d.global.lb[v];
    if (bound.is_finite() && is_relaxable(work, v, pre, d)) work = weaken(work, v, d);
  }
  for (const auto& [v, a] : work.terms()) {
    if (d.is_binary(v)) continue;
    if (d.kind[v] == VarKind::Integer) throw NeedsGeneralInteger("reason keeps non-relaxable general integers");
    throw ReductionFailed("reason keeps a continuous variable");
  }

  auto cand = candidate_bound(work, r, pre, d);
  if (!cand) throw ReductionFailed("reduced reason no longer propagates");
  if (is_integral(cand->pre_round)) {
    out.row = scale_to_primitive(work);
    return out;
  }
  out.row = reduce(strategy, work, conflict, r, pre, d);
  return out;
}

GeneralIntegerResult resolve_general_integer(const LinearConstraint& reason, const LinearConstraint& conflict,
                                             std::size_t pos, const Trail& trail) {
  const Domain& d = trail.domain();
  VarIndex r = trail.change(pos).var;
  Box pre = trail.box_at(pos);
  GeneralIntegerResult out;
  if (is_infeasible(resolve(conflict, reason, r), pre)) {
    out.kind = GeneralIntegerResult::Kind::Resolved;
    out.reason = reason;
    return out;
  }
  try {
    NormalizedRow n = normalize_for_reduction(reason, r, d);
    LinearConstraint row = n.row;
    SubstitutionRecord rec = n.record;
    Domain ld = literal_domain(d, rec);
    for (const auto& [j, a] : n.row.terms()) {
      const ExtRational& lo = ld.global.lb[j];
      if (!lo.is_finite()) return out;
      row.set_rhs(Rational(row.rhs() - a * lo.value()));
      rec.shift(j, lo.value());
    }
    ld = literal_domain(d, rec);
    Box lbox = literal_box(pre, rec);
    for (const auto& [j, a] : n.row.terms()) {
      if (j == r || !ld.global.ub[j].is_finite() || lbox.ub[j] != ld.global.ub[j]) continue;
      Rational u = ld.global.ub[j].value();
      row.set_coef(j, Rational(-a));
      row.set_rhs(Rational(row.rhs() - a * u));
      rec.complement(j, u);
    }
    if (frac_q(row.rhs()) == 0) return out;
    LinearConstraint cut = scale_to_primitive(to_original(mir_cut(row, literal_domain(d, rec)), rec));
    if (sgn(cut.coef(r)) != sgn(reason.coef(r))) return out;
    if (is_infeasible(resolve(conflict, cut, r), pre)) {
      out.kind = GeneralIntegerResult::Kind::SeparationCut;
      out.reason = cut;
    }
  } catch (const PreconditionError&) {
    out.kind = GeneralIntegerResult::Kind::Failed;
  }
  return out;
}

namespace {

class ConflictSet {
 public:
  ConflictSet(const Trail& trail, const ReasonStore& reasons) : trail_(trail), reasons_(reasons) {}

  void add_row(const LinearConstraint& c, std::size_t before, std::optional<VarIndex> skip) {
    Box b = trail_.box_at(before);
    const Domain& d = trail_.domain();
    for (const auto& [v, a] : c.terms()) {
      if ((skip && v == *skip) || is_relaxable(c, v, b, d)) continue;
      auto ch = trail_.latest_change(v, a > 0 ? BoundKind::Upper : BoundKind::Lower, before);
      if (ch) positions_.insert(*ch);
    }
  }

  void add_disjunction(const BoundDisjunction& dj, std::size_t before,
                       std::optional<std::pair<VarIndex, BoundKind>> skip) {
    Box b = trail_.box_at(before);
    for (const auto& atom : dj.atoms()) {
      if (skip && atom.var == skip->first && atom.kind == skip->second) continue;
      if (atom.kind == BoundKind::Lower && b.ub[atom.var] < ExtRational(atom.value)) {
        if (auto ch = trail_.latest_change(atom.var, BoundKind::Upper, before)) positions_.insert(*ch);
      } else if (atom.kind == BoundKind::Upper && b.lb[atom.var] > ExtRational(atom.value)) {
        if (auto ch = trail_.latest_change(atom.var, BoundKind::Lower, before)) positions_.insert(*ch);
      }
    }
  }

  void expand(std::size_t pos) {
    const BoundChange& ch = trail_.change(pos);
    positions_.erase(pos);
    if (ch.reason.kind == ReasonKind::Row) {
      add_row(reasons_.rows[ch.reason.id], pos, ch.var);
    } else if (ch.reason.kind == ReasonKind::Disjunction) {
      add_disjunction(reasons_.disjunctions[ch.reason.id], pos, std::make_pair(ch.var, ch.kind));
    } else {
      throw std::logic_error("decisions cannot be expanded");
    }
  }

  void drop_root() {
    std::erase_if(positions_, [&](std::size_t p) { return trail_.change(p).state.level == 0; });
  }

  const std::set<std::size_t>& positions() const { return positions_; }

 private:
  const Trail& trail_;
  const ReasonStore& reasons_;
  std::set<std::size_t> positions_;
};

}  // namespace

AnalysisResult graph_fallback(const ConflictSource& conflict, const Trail& trail, const ReasonStore& reasons) {
  const Domain& d = trail.domain();
  AnalysisResult res;
  res.graph_fallback = true;
  ConflictSet set(trail, reasons);
  if (const auto* row = std::get_if<LinearConstraint>(&conflict)) {
    set.add_row(*row, trail.size(), std::nullopt);
  } else {
    set.add_disjunction(std::get<BoundDisjunction>(conflict), trail.size(), std::nullopt);
  }

  while (true) {
    set.drop_root();
    const auto& pos = set.positions();
    if (pos.empty()) {
      res.outcome = AnalysisOutcome::GlobalInfeasibility;
      return res;
    }
    int top = trail.change(*pos.rbegin()).state.level;
    std::size_t at_top = 0;
    std::optional<std::size_t> continuous;
    for (std::size_t p : pos) {
      if (trail.change(p).state.level == top) ++at_top;
      if (d.kind[trail.change(p).var] == VarKind::Continuous) continuous = p;
    }
    std::optional<std::size_t> pick;
    if (at_top > 1) {
      pick = *pos.rbegin();
    } else if (continuous) {
      pick = continuous;
    }
    if (!pick) break;
    set.expand(*pick);
    ++res.iterations;
  }

  // negate the remaining changes, keeping the tightest change per (var, kind)
  std::map<std::pair<VarIndex, BoundKind>, std::size_t> latest;
  std::set<int> levels;
  for (std::size_t p : set.positions()) {
    const BoundChange& ch = trail.change(p);
    auto& slot = latest[{ch.var, ch.kind}];
    slot = std::max(slot, p);
    levels.insert(ch.state.level);
  }
  std::vector<BoundAtom> atoms;
  bool all_binary = true;
  for (const auto& [key, p] : latest) {
    const BoundChange& ch = trail.change(p);
    all_binary = all_binary && d.is_binary(ch.var);
    if (ch.kind == BoundKind::Lower) {
      atoms.push_back({ch.var, BoundKind::Upper, Rational(ch.new_value - 1)});
    } else {
      atoms.push_back({ch.var, BoundKind::Lower, Rational(ch.new_value + 1)});
    }
  }
  int back = levels.size() > 1 ? *std::next(levels.rbegin()) : 0;
  res.backjump_target = trail.state_at(trail.level_end(back));

  if (all_binary) {
    LinearConstraint::Terms t;
    Rational rhs = 1;
    for (const auto& a : atoms) {
      if (a.kind == BoundKind::Lower) {
        t[a.var] = 1;
      } else {
        t[a.var] = -1;
        rhs -= 1;
      }
    }
    res.outcome = AnalysisOutcome::Learned;
    res.learned = LinearConstraint(std::move(t), rhs, {OriginKind::Learned, "graph"});
  } else {
    res.outcome = AnalysisOutcome::LearnedDisjunction;
    res.disjunction = BoundDisjunction(std::move(atoms));
  }
  return res;
}

}  // namespace cutca
