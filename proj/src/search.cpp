#include "cutca/search.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

#include "cutca/lp.hpp"
#include "cutca/propagation.hpp"
#include "cutca/trail.hpp"

namespace cutca {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::Unbounded:
      return "Unbounded";
    case SolveStatus::LimitReached:
      return "LimitReached";
  }
  return "?";
}

std::optional<Branch> select_branching(const Box& box, const Domain& domain) {
  for (VarIndex v = 0; v < domain.size(); ++v) {
    if (!domain.is_integral(v)) continue;
    const ExtRational& lb = box.lb[v];
    const ExtRational& ub = box.ub[v];
    if (lb.is_finite() && ub.is_finite() && lb == ub) continue;
    Rational split;
    if (lb.is_finite() && ub.is_finite()) {
      split = floor_q(Rational((lb.value() + ub.value()) / 2));
    } else if (lb.is_finite()) {
      split = lb.value();
    } else if (ub.is_finite()) {
      split = ub.value() - 1;
    } else {
      split = 0;
    }
    return Branch{v, BoundKind::Upper, split};
  }
  return std::nullopt;
}

namespace {

Branch flip(const Branch& b) {
  if (b.kind == BoundKind::Upper) return {b.var, BoundKind::Lower, Rational(b.value + 1)};
  return {b.var, BoundKind::Upper, Rational(b.value - 1)};
}

BoundAtom negate(const Branch& b) {
  Branch f = flip(b);
  return {f.var, f.kind, f.value};
}

class Solver {
 public:
  Solver(const Problem& p, const SolverConfig& cfg) : p_(p), cfg_(cfg), d_(p.domain()), trail_(p.domain()) {
    rows_ = p.constraints();
    const auto& obj = p.objective();
    if (obj) {
      integral_objective_ = std::all_of(obj->begin(), obj->end(), [&](const auto& t) { return d_.is_integral(t.first); });
    }
    if (cfg_.mode == SolveMode::ExploitConflicts) {
      for (const auto& rec : cfg_.exploit.records) {
        if (const auto* row = std::get_if<LinearConstraint>(&rec.object)) {
          learned_rows_.push_back(rows_.size());
          rows_.push_back(*row);
        } else {
          dis_.push_back(std::get<BoundDisjunction>(rec.object));
        }
      }
      if (cfg_.exploit.incumbent_value) {
        incumbent_ = cfg_.exploit.incumbent_value;
        witness_ = cfg_.exploit.incumbent;
        if (obj) add_cutoff();
      }
    }
  }

  SolveResult run() {
    SolveResult res;
    stats_.nodes = 1;
    SolveStatus status = SolveStatus::Infeasible;
    while (true) {
      if (stats_.nodes > cfg_.node_limit || stats_.conflicts_analyzed > cfg_.conflict_limit) {
        status = SolveStatus::LimitReached;
        break;
      }
      FixpointResult fix = propagate_fixpoint(trail_, rows_, dis_, &counters_);
      if (fix.conflict) {
        ConflictSource src = fix.conflict_row ? ConflictSource(rows_[*fix.conflict_row])
                                              : ConflictSource(dis_[*fix.conflict_disjunction]);
        if (!on_conflict(src)) {
          status = finished();
          break;
        }
        continue;
      }
      auto br = select_branching(trail_.box(), d_);
      if (br) {
        if (stats_.nodes >= cfg_.node_limit) {
          status = SolveStatus::LimitReached;
          break;
        }
        decide(*br, false);
        continue;
      }
      auto leaf = on_leaf();
      if (leaf) {
        status = *leaf;
        break;
      }
    }
    res.status = status;
    if (status == SolveStatus::Optimal || (status == SolveStatus::LimitReached && incumbent_)) {
      res.objective = incumbent_;
      res.witness = witness_;
    }
    finish_stats();
    res.stats = stats_;
    res.learned = std::move(learned_);
    return res;
  }

 private:
  struct Decision {
    Branch branch;
    bool flipped = false;
  };

  bool learning() const { return cfg_.mode == SolveMode::Solve && cfg_.enable_learning; }
  bool analyzing() const { return learning() || cfg_.mode == SolveMode::GenerateConflicts; }

  std::optional<Rational> valid_below() const { return p_.objective() ? incumbent_ : std::nullopt; }

  SolveStatus finished() const { return incumbent_ ? SolveStatus::Optimal : SolveStatus::Infeasible; }

  void decide(const Branch& b, bool flipped) {
    ++stats_.nodes;
    decisions_.push_back({b, flipped});
    trail_.push_decision(b.var, b.kind, b.value);
  }

  // Flips the deepest unflipped decision; false when none is left.
  bool backtrack() {
    while (!decisions_.empty() && decisions_.back().flipped) decisions_.pop_back();
    if (decisions_.empty()) return false;
    Branch b = decisions_.back().branch;
    int level = static_cast<int>(decisions_.size());
    decisions_.pop_back();
    trail_.backtrack_to(trail_.level_end(level - 1));
    decide(flip(b), true);
    return true;
  }

  void backjump(const StateId& target) {
    trail_.backjump(target);
    decisions_.resize(static_cast<std::size_t>(trail_.level()));
  }

  void add_cutoff() {
    LinearConstraint::Terms t;
    for (const auto& [v, c] : *p_.objective()) t[v] = -c;
    LinearConstraint row(std::move(t), -*incumbent_, {OriginKind::Derived, "cutoff"});
    if (integral_objective_ && row.empty()) {
      row.set_rhs(1);
    } else if (integral_objective_) {
      LinearConstraint prim = scale_to_primitive(row);
      Rational k = prim.terms().begin()->second / row.terms().begin()->second;
      row = LinearConstraint(prim.terms(), Rational(k * row.rhs() + 1), {OriginKind::Derived, "cutoff"});
    }
    rows_.push_back(std::move(row));
  }

  void record(const LearnedObject& obj) {
    LearnedRecord rec{obj, valid_below()};
    if (cfg_.on_learn) cfg_.on_learn(rec, trail_.box());
    if (const auto* row = std::get_if<LinearConstraint>(&obj)) {
      ++stats_.learned_linear;
      length_sum_ += row->size();
    } else {
      ++stats_.learned_disjunctions;
    }
    learned_.push_back(std::move(rec));
  }

  void install(const LearnedObject& obj) {
    if (const auto* row = std::get_if<LinearConstraint>(&obj)) {
      learned_rows_.push_back(rows_.size());
      rows_.push_back(*row);
    } else {
      dis_.push_back(std::get<BoundDisjunction>(obj));
    }
  }

  bool too_long(const AnalysisResult& a) const {
    if (!cfg_.max_learned_length) return false;
    std::size_t len = a.learned ? a.learned->size() : a.disjunction->size();
    return len > *cfg_.max_learned_length;
  }

  struct Learned {
    bool global = false;
    std::optional<LearnedObject> object;
    StateId target;
  };

  Learned analyze_conflict(const ConflictSource& src) {
    ++stats_.conflicts_analyzed;
    ReasonStore store{rows_, dis_};
    Learned out;
    if (const auto* row = std::get_if<LinearConstraint>(&src)) {
      AnalysisResult a = analyze(*row, trail_, store, {cfg_.strategy, true, cfg_.trace});
      stats_.tight_resolution_checks += a.tight_resolution_checks;
      stats_.tight_resolution_violations += a.tight_resolution_violations;
      if (a.outcome == AnalysisOutcome::Abandoned) ++stats_.abandoned;
      if (a.outcome == AnalysisOutcome::GlobalInfeasibility) {
        out.global = true;
        return out;
      }
      if (a.outcome == AnalysisOutcome::Learned && !too_long(a)) {
        // iterations == 0: the conflict row itself already asserts
        std::optional<LearnedObject> obj;
        if (a.iterations > 0) {
          obj = *a.learned;
          record(*obj);
        }
        if (progresses(*a.learned, *a.backjump_target)) {
          out.object = std::move(obj);
          out.target = *a.backjump_target;
          return out;
        }
        // only continuous bounds move at the target; keep the row, jump on a
        // no-good over integral bounds instead
        if (obj) extra_.push_back(std::move(*obj));
      }
    }
    ++stats_.fallbacks;
    AnalysisResult g = graph_fallback(src, trail_, store);
    if (g.outcome == AnalysisOutcome::GlobalInfeasibility) {
      out.global = true;
      return out;
    }
    if (too_long(g)) return out;
    if (g.learned) {
      out.object = *g.learned;
    } else {
      out.object = *g.disjunction;
    }
    out.target = *g.backjump_target;
    record(*out.object);
    return out;
  }

  // Infeasible at the target, or tightens an integral bound there.
  bool progresses(const LearnedObject& obj, const StateId& target) const {
    Box box = trail_.box_at(trail_.count_of(target));
    if (const auto* row = std::get_if<LinearConstraint>(&obj)) {
      if (is_infeasible(*row, box)) return true;
      auto prop = propagate_constraint(*row, box, d_);
      return std::any_of(prop.changes.begin(), prop.changes.end(), [&](const Tightening& t) { return d_.is_integral(t.var); });
    }
    auto prop = propagate_disjunction(std::get<BoundDisjunction>(obj), box, d_);
    return prop.status == PropStatus::Conflict || (prop.change && d_.is_integral(prop.change->var));
  }

  // Returns false when the search is over.
  bool on_conflict(const ConflictSource& src) {
    if (trail_.level() == 0) return false;
    if (!analyzing()) return backtrack();
    Learned l = analyze_conflict(src);
    if (!learning()) {
      extra_.clear();
      return backtrack();
    }
    for (auto& obj : extra_) install(obj);
    extra_.clear();
    if (l.global) return false;
    if (cfg_.trace) *cfg_.trace << "conflict level " << trail_.level() << " backjump " << l.target.str() << '\n';
    if (l.object) {
      install(*l.object);
      if (!progresses(*l.object, l.target)) return backtrack();
    } else if (!std::holds_alternative<LinearConstraint>(src) || !progresses(std::get<LinearConstraint>(src), l.target)) {
      return backtrack();
    }
    backjump(l.target);
    return true;
  }

  // Every integral variable is fixed and no row is violated.
  std::optional<SolveStatus> on_leaf() {
    std::size_t n = p_.num_vars();
    std::vector<Rational> x(n);
    Rational value = 0;
    bool has_continuous = false;
    for (VarIndex v = 0; v < n; ++v) has_continuous = has_continuous || !d_.is_integral(v);
    if (has_continuous) {
      std::vector<Rational> c(n);
      if (p_.objective()) {
        for (const auto& [v, a] : *p_.objective()) c[v] = a;
      }
      LpResult lp = solve_lp(rows_, c, trail_.box());
      if (lp.status == LpStatus::Unbounded) return SolveStatus::Unbounded;
      if (lp.status == LpStatus::Infeasible) return leaf_conflict() ? std::nullopt : std::optional(finished());
      x = lp.x;
      value = lp.value;
    } else {
      for (VarIndex v = 0; v < n; ++v) x[v] = trail_.lb(v).value();
      if (p_.objective()) {
        for (const auto& [v, a] : *p_.objective()) value += a * x[v];
      }
    }
    if (!p_.objective()) {
      witness_ = x;
      incumbent_ = Rational(0);
      return SolveStatus::Optimal;
    }
    if (incumbent_ && value >= *incumbent_) return leaf_conflict() ? std::nullopt : std::optional(finished());
    incumbent_ = value;
    witness_ = x;
    if (cfg_.trace) *cfg_.trace << "incumbent " << to_string(value) << '\n';
    add_cutoff();
    bool go_on;
    if (integral_objective_) {
      go_on = on_conflict(rows_.back());
    } else {
      go_on = leaf_conflict();
    }
    return go_on ? std::nullopt : std::optional(finished());
  }

  // The leaf holds no (better) solution: learn the negated decisions.
  bool leaf_conflict() {
    if (decisions_.empty()) return false;
    if (!learning()) return backtrack();
    std::vector<BoundAtom> atoms;
    bool all_binary = true;
    for (const auto& dec : decisions_) {
      atoms.push_back(negate(dec.branch));
      all_binary = all_binary && d_.is_binary(dec.branch.var);
    }
    LearnedObject obj;
    if (all_binary) {
      LinearConstraint::Terms t;
      Rational rhs = 1;
      for (const auto& a : atoms) {
        t[a.var] = a.kind == BoundKind::Lower ? 1 : -1;
        if (a.kind == BoundKind::Upper) rhs -= 1;
      }
      obj = LinearConstraint(std::move(t), rhs, {OriginKind::Learned, "nogood"});
    } else {
      obj = BoundDisjunction(std::move(atoms));
    }
    if (cfg_.max_learned_length && decisions_.size() > *cfg_.max_learned_length) return backtrack();
    record(obj);
    install(obj);
    int level = trail_.level();
    trail_.backtrack_to(trail_.level_end(level - 1));
    decisions_.resize(static_cast<std::size_t>(trail_.level()));
    return true;
  }

  void finish_stats() {
    std::size_t used = 0;
    std::size_t objects = 0;
    counters_.row_hits.resize(rows_.size());
    counters_.disjunction_hits.resize(dis_.size());
    for (std::size_t i : learned_rows_) {
      ++objects;
      if (counters_.row_hits[i] > 0) ++used;
      stats_.bound_changes_by_learned += counters_.row_hits[i];
    }
    for (std::size_t h : counters_.disjunction_hits) {
      ++objects;
      if (h > 0) ++used;
      stats_.bound_changes_by_learned += h;
    }
    if (cfg_.mode == SolveMode::ExploitConflicts) {
      for (const auto& rec : cfg_.exploit.records) {
        if (const auto* row = std::get_if<LinearConstraint>(&rec.object)) {
          ++stats_.learned_linear;
          length_sum_ += row->size();
        } else {
          ++stats_.learned_disjunctions;
        }
      }
    }
    if (stats_.learned_linear > 0) {
      stats_.avg_learned_length = static_cast<double>(length_sum_) / static_cast<double>(stats_.learned_linear);
    }
    if (objects > 0) stats_.learned_used_in_propagation_pct = 100.0 * static_cast<double>(used) / static_cast<double>(objects);
  }

  const Problem& p_;
  const SolverConfig& cfg_;
  const Domain& d_;
  Trail trail_;
  std::vector<LinearConstraint> rows_;
  std::vector<std::size_t> learned_rows_;
  std::vector<BoundDisjunction> dis_;
  std::vector<LearnedObject> extra_;
  PropagationCounters counters_;
  std::vector<Decision> decisions_;
  std::optional<Rational> incumbent_;
  std::optional<std::vector<Rational>> witness_;
  bool integral_objective_ = false;
  Stats stats_;
  std::size_t length_sum_ = 0;
  std::vector<LearnedRecord> learned_;
};

}  // namespace

SolveResult solve(const Problem& problem, const SolverConfig& config) {
  if (config.node_limit == 0 || config.conflict_limit == 0) throw PreconditionError("limits must be positive");
  Solver s(problem, config);
  return s.run();
}

TwoPhaseResult run_two_phase(const Problem& problem, SolverConfig config) {
  TwoPhaseResult out;
  config.mode = SolveMode::GenerateConflicts;
  out.phase1 = solve(problem, config);
  LearnedFile file;
  file.records = out.phase1.learned;
  if (problem.objective() && out.phase1.objective) {
    file.incumbent_value = out.phase1.objective;
    file.incumbent = out.phase1.witness;
  }
  out.learned_file = write_learned_file(file, problem);
  config.mode = SolveMode::ExploitConflicts;
  config.exploit = read_learned_file(out.learned_file, problem);
  out.phase2 = solve(problem, config);
  return out;
}

std::string write_learned_file(const LearnedFile& file, const Problem& problem) {
  const auto& names = problem.names();
  std::ostringstream os;
  if (file.incumbent_value) {
    os << "incumbent " << to_string(*file.incumbent_value);
    if (file.incumbent) {
      for (VarIndex v = 0; v < file.incumbent->size(); ++v) os << ' ' << names[v] << '=' << to_string((*file.incumbent)[v]);
    }
    os << '\n';
  }
  for (const auto& rec : file.records) {
    if (rec.valid_below) os << "below " << to_string(*rec.valid_below) << '\n';
    if (const auto* row = std::get_if<LinearConstraint>(&rec.object)) {
      os << "lin " << to_string(row->rhs());
      for (const auto& [v, a] : row->terms()) os << ' ' << names[v] << ':' << to_string(a);
    } else {
      os << "dis";
      for (const auto& a : std::get<BoundDisjunction>(rec.object).atoms()) {
        os << ' ' << names[a.var] << (a.kind == BoundKind::Lower ? ">=" : "<=") << to_string(a.value);
      }
    }
    os << '\n';
  }
  return os.str();
}

namespace {

[[noreturn]] void bad_line(std::size_t line, const std::string& what) {
  throw PreconditionError("learned file line " + std::to_string(line) + ": " + what);
}

}  // namespace

LearnedFile read_learned_file(const std::string& text, const Problem& problem) {
  LearnedFile file;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::optional<Rational> below;
  auto var = [&](const std::string& name) {
    auto v = problem.find(name);
    if (!v) bad_line(lineno, "unknown variable '" + name + "'");
    return *v;
  };
  auto number = [&](const std::string& s) {
    try {
      return parse_rational(s);
    } catch (const std::exception&) {
      bad_line(lineno, "malformed number '" + s + "'");
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (head == "incumbent") {
      if (tok.empty()) bad_line(lineno, "missing incumbent value");
      file.incumbent_value = number(tok[0]);
      if (tok.size() > 1) {
        std::vector<Rational> x(problem.num_vars());
        for (std::size_t i = 1; i < tok.size(); ++i) {
          auto eq = tok[i].find('=');
          if (eq == std::string::npos) bad_line(lineno, "expected <var>=<value>");
          x[var(tok[i].substr(0, eq))] = number(tok[i].substr(eq + 1));
        }
        file.incumbent = std::move(x);
      }
    } else if (head == "below") {
      if (tok.size() != 1) bad_line(lineno, "expected one value after 'below'");
      below = number(tok[0]);
    } else if (head == "lin") {
      if (tok.empty()) bad_line(lineno, "missing rhs");
      LinearConstraint::Terms t;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        auto colon = tok[i].find(':');
        if (colon == std::string::npos) bad_line(lineno, "expected <var>:<coef>");
        t[var(tok[i].substr(0, colon))] += number(tok[i].substr(colon + 1));
      }
      file.records.push_back({LinearConstraint(std::move(t), number(tok[0]), {OriginKind::Learned, "file"}), below});
      below.reset();
    } else if (head == "dis") {
      std::vector<BoundAtom> atoms;
      for (const auto& s : tok) {
        auto op = s.find_first_of("<>");
        if (op == std::string::npos || op + 1 >= s.size() || s[op + 1] != '=') bad_line(lineno, "expected <var><op><value>");
        atoms.push_back({var(s.substr(0, op)), s[op] == '>' ? BoundKind::Lower : BoundKind::Upper, number(s.substr(op + 2))});
      }
      try {
        file.records.push_back({BoundDisjunction(std::move(atoms)), below});
      } catch (const PreconditionError& e) {
        bad_line(lineno, e.what());
      }
      below.reset();
    } else {
      bad_line(lineno, "unknown record '" + head + "'");
    }
  }
  return file;
}

}  // namespace cutca
