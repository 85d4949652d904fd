#include "cutca/trail.hpp"

#include <sstream>

namespace cutca {

Trail::Trail(Domain domain) : domain_(std::move(domain)), box_(domain_.global) {}

bool Trail::bound_inconsistent() const {
  for (std::size_t v = 0; v < box_.size(); ++v) {
    if (box_.lb[v] > box_.ub[v]) return true;
  }
  return false;
}

StateId Trail::push(VarIndex var, BoundKind kind, const Rational& value, Reason reason,
                    std::optional<Rational> pre_round) {
  if (var >= domain_.size()) throw PreconditionError("bound change on unknown variable");
  if (domain_.is_integral(var) && !is_integral(value)) {
    throw PreconditionError("integer variable needs an integral bound");
  }
  ExtRational& slot = kind == BoundKind::Lower ? box_.lb[var] : box_.ub[var];
  bool tightens = kind == BoundKind::Lower ? ExtRational(value) > slot : ExtRational(value) < slot;
  if (!tightens) throw PreconditionError("bound change does not tighten the current bound");

  BoundChange ch;
  if (reason.kind == ReasonKind::Decision) {
    ++level_;
    ch.state = {level_, 0};
  } else if (changes_.empty() || changes_.back().state.level != level_) {
    ch.state = {level_, level_ == 0 ? 0 : 1};
  } else {
    ch.state = {level_, changes_.back().state.index + 1};
  }
  ch.var = var;
  ch.kind = kind;
  ch.new_value = value;
  ch.old_value = slot;
  ch.reason = reason;
  ch.pre_round = std::move(pre_round);
  slot = value;
  changes_.push_back(std::move(ch));
  return changes_.back().state;
}

StateId Trail::push_decision(VarIndex var, BoundKind kind, const Rational& value) {
  if (var < domain_.size() && domain_.kind[var] == VarKind::Continuous) {
    throw PreconditionError("continuous variables are never branched on");
  }
  return push(var, kind, value, Reason::decision(), std::nullopt);
}

StateId Trail::push_deduction(VarIndex var, BoundKind kind, const Rational& value, Reason reason,
                              std::optional<Rational> pre_round) {
  if (reason.kind == ReasonKind::Decision) throw PreconditionError("deduction needs a reason");
  return push(var, kind, value, reason, std::move(pre_round));
}

StateId Trail::state_at(std::size_t count) const {
  if (count == 0) return {0, -1};
  return changes_.at(count - 1).state;
}

std::size_t Trail::count_of(const StateId& s) const {
  std::size_t c = 0;
  while (c < changes_.size() && changes_[c].state <= s) ++c;
  return c;
}

Box Trail::box_at(std::size_t count) const {
  Box b = box_;
  for (std::size_t i = changes_.size(); i > count; --i) {
    const auto& ch = changes_[i - 1];
    (ch.kind == BoundKind::Lower ? b.lb : b.ub)[ch.var] = ch.old_value;
  }
  return b;
}

std::size_t Trail::level_end(int level) const {
  std::size_t c = 0;
  while (c < changes_.size() && changes_[c].state.level <= level) ++c;
  return c;
}

std::optional<std::size_t> Trail::latest_change(VarIndex var, BoundKind kind, std::size_t before) const {
  for (std::size_t i = std::min(before, changes_.size()); i > 0; --i) {
    const auto& ch = changes_[i - 1];
    if (ch.var == var && ch.kind == kind) return i - 1;
  }
  return std::nullopt;
}

void Trail::backtrack_to(std::size_t count) {
  if (count > changes_.size()) throw PreconditionError("backtrack target beyond the current state");
  while (changes_.size() > count) {
    const auto& ch = changes_.back();
    (ch.kind == BoundKind::Lower ? box_.lb : box_.ub)[ch.var] = ch.old_value;
    changes_.pop_back();
  }
  level_ = changes_.empty() ? 0 : changes_.back().state.level;
}

void Trail::backjump(const StateId& target) {
  if (target > state_at(changes_.size())) throw PreconditionError("backjump target beyond the current state");
  std::size_t c = count_of(target);
  backtrack_to(c);
  // jumping to the end of a level keeps that level open
  level_ = std::max(level_, target.level);
}

std::string Trail::serialize() const {
  std::ostringstream os;
  for (const auto& ch : changes_) {
    os << ch.state.str() << ' ' << ch.var << ' ' << (ch.kind == BoundKind::Lower ? 'L' : 'U') << ' '
       << to_string(ch.new_value) << ' ';
    switch (ch.reason.kind) {
      case ReasonKind::Decision:
        os << "decision";
        break;
      case ReasonKind::Row:
        os << "row:" << ch.reason.id;
        break;
      case ReasonKind::Disjunction:
        os << "dis:" << ch.reason.id;
        break;
    }
    if (ch.pre_round) os << " pre=" << to_string(*ch.pre_round);
    os << '\n';
  }
  return os.str();
}

Trail Trail::replay(Domain domain, const std::string& text) {
  Trail t(std::move(domain));
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string state, kind, value, reason, extra;
    VarIndex var = 0;
    if (!(ls >> state >> var >> kind >> value >> reason) || (kind != "L" && kind != "U")) {
      throw PreconditionError("malformed trail line " + std::to_string(lineno));
    }
    std::optional<Rational> pre;
    if (ls >> extra) {
      if (extra.rfind("pre=", 0) != 0) throw PreconditionError("malformed trail line " + std::to_string(lineno));
      pre = parse_rational(extra.substr(4));
    }
    BoundKind bk = kind == "L" ? BoundKind::Lower : BoundKind::Upper;
    Rational q = parse_rational(value);
    StateId got;
    if (reason == "decision") {
      got = t.push_decision(var, bk, q);
    } else if (reason.rfind("row:", 0) == 0) {
      got = t.push_deduction(var, bk, q, Reason::row(std::stoul(reason.substr(4))), pre);
    } else if (reason.rfind("dis:", 0) == 0) {
      got = t.push_deduction(var, bk, q, Reason::disjunction(std::stoul(reason.substr(4))), pre);
    } else {
      throw PreconditionError("unknown reason on trail line " + std::to_string(lineno));
    }
    if (got.str() != state) throw PreconditionError("state id mismatch on trail line " + std::to_string(lineno));
  }
  return t;
}

ExtRational max_activity(const LinearConstraint& c, const Box& box) {
  ExtRational sum = 0;
  for (const auto& [v, a] : c.terms()) sum += a > 0 ? box.ub[v] * a : box.lb[v] * a;
  return sum;
}

ExtRational min_activity(const LinearConstraint& c, const Box& box) {
  ExtRational sum = 0;
  for (const auto& [v, a] : c.terms()) sum += a > 0 ? box.lb[v] * a : box.ub[v] * a;
  return sum;
}

bool is_relaxable(const LinearConstraint& c, VarIndex var, const Box& local, const Domain& domain) {
  Rational a = c.coef(var);
  if (a == 0) throw PreconditionError("variable does not appear in the constraint");
  return a > 0 ? local.ub[var] == domain.global.ub[var] : local.lb[var] == domain.global.lb[var];
}

bool is_infeasible(const LinearConstraint& c, const Box& box) { return max_activity(c, box) < ExtRational(c.rhs()); }

}  // namespace cutca
