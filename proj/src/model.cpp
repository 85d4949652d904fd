#include "cutca/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

namespace cutca {

const char* to_string(VarKind k) {
  switch (k) {
    case VarKind::Binary:
      return "binary";
    case VarKind::Integer:
      return "integer";
    case VarKind::Continuous:
      return "continuous";
  }
  return "?";
}

LinearConstraint::LinearConstraint(Terms terms, Rational rhs, Origin origin)
    : terms_(std::move(terms)), rhs_(std::move(rhs)), origin_(std::move(origin)) {
  std::erase_if(terms_, [](const auto& t) { return t.second == 0; });
}

Rational LinearConstraint::coef(VarIndex v) const {
  auto it = terms_.find(v);
  return it == terms_.end() ? Rational(0) : it->second;
}

void LinearConstraint::set_coef(VarIndex v, const Rational& a) {
  if (a == 0) {
    terms_.erase(v);
  } else {
    terms_[v] = a;
  }
}

void LinearConstraint::add_to_coef(VarIndex v, const Rational& a) {
  if (a == 0) return;
  auto [it, inserted] = terms_.try_emplace(v, a);
  if (!inserted) {
    it->second += a;
    if (it->second == 0) terms_.erase(it);
  }
}

LinearConstraint& LinearConstraint::add_scaled(const LinearConstraint& other, const Rational& k) {
  for (const auto& [v, a] : other.terms_) add_to_coef(v, Rational(a * k));
  rhs_ += other.rhs_ * k;
  return *this;
}

LinearConstraint LinearConstraint::scaled(const Rational& k) const {
  if (k <= 0) throw PreconditionError("scaling factor must be positive");
  LinearConstraint out = *this;
  for (auto& [v, a] : out.terms_) a *= k;
  out.rhs_ *= k;
  return out;
}

std::string LinearConstraint::str(std::span<const std::string> names) const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, a] : terms_) {
    Rational mag = abs(a);
    if (first) {
      if (a < 0) os << "-";
    } else {
      os << (a < 0 ? " - " : " + ");
    }
    if (mag != 1) os << to_string(mag) << " ";
    if (v < names.size()) {
      os << names[v];
    } else {
      os << "x" << v;
    }
    first = false;
  }
  if (first) os << "0";
  os << " >= " << to_string(rhs_);
  return os.str();
}

LinearConstraint scale_to_primitive(const LinearConstraint& c) {
  if (c.empty()) return c;
  Rational g = 0;
  for (const auto& [v, a] : c.terms()) g = gcd_q(g, a);
  return c.scaled(Rational(1 / g));
}

BoundDisjunction::BoundDisjunction(std::vector<BoundAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw PreconditionError("bound disjunction must not be empty");
  std::set<std::pair<VarIndex, BoundKind>> seen;
  for (const auto& a : atoms_) {
    if (!seen.emplace(a.var, a.kind).second) {
      throw PreconditionError("bound disjunction repeats a (variable, bound kind) pair");
    }
  }
}

std::string BoundDisjunction::str(std::span<const std::string> names) const {
  std::ostringstream os;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& a = atoms_[i];
    if (i) os << " | ";
    if (a.var < names.size()) {
      os << names[a.var];
    } else {
      os << "x" << a.var;
    }
    os << (a.kind == BoundKind::Lower ? " >= " : " <= ") << to_string(a.value);
  }
  return os.str();
}

std::optional<VarIndex> Problem::find(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<VarIndex>(it - names_.begin());
}

VarIndex Problem::index_of(const std::string& name) const {
  auto v = find(name);
  if (!v) throw PreconditionError("unknown variable '" + name + "'");
  return *v;
}

bool operator==(const Problem& a, const Problem& b) {
  if (a.variables_.size() != b.variables_.size()) return false;
  for (std::size_t i = 0; i < a.variables_.size(); ++i) {
    const auto& x = a.variables_[i];
    const auto& y = b.variables_[i];
    if (x.name != y.name || x.kind != y.kind || x.lb != y.lb || x.ub != y.ub) return false;
  }
  return a.constraints_ == b.constraints_ && a.objective_ == b.objective_;
}

namespace {

LinearConstraint::Terms collect_terms(const std::vector<std::pair<std::string, Rational>>& terms,
                                      const std::unordered_map<std::string, VarIndex>& index,
                                      const std::string& context) {
  LinearConstraint::Terms out;
  for (const auto& [name, a] : terms) {
    auto it = index.find(name);
    if (it == index.end()) {
      throw PreconditionError(context + " references undeclared variable '" + name + "'");
    }
    out[it->second] += a;
  }
  std::erase_if(out, [](const auto& t) { return t.second == 0; });
  return out;
}

LinearConstraint negated(const LinearConstraint& c) {
  LinearConstraint::Terms t;
  for (const auto& [v, a] : c.terms()) t[v] = -a;
  return LinearConstraint(std::move(t), Rational(-c.rhs()), c.origin());
}

}  // namespace

Problem build_problem(std::vector<VariableSpec> variables, std::vector<ConstraintSpec> constraints,
                      std::optional<std::vector<std::pair<std::string, Rational>>> objective) {
  Problem p;
  std::unordered_map<std::string, VarIndex> index;
  for (auto& spec : variables) {
    if (spec.name.empty()) throw PreconditionError("variable name must not be empty");
    if (!index.emplace(spec.name, p.variables_.size()).second) {
      throw PreconditionError("duplicate variable name '" + spec.name + "'");
    }
    if (spec.kind == VarKind::Binary && (spec.lb != ExtRational(0) || spec.ub != ExtRational(1))) {
      throw PreconditionError("binary variable '" + spec.name + "' must have bounds [0, 1]");
    }
    if (spec.lb > spec.ub) throw PreconditionError("variable '" + spec.name + "' has lb > ub");
    if (spec.lb.is_pos_inf() || spec.ub.is_neg_inf()) {
      throw PreconditionError("variable '" + spec.name + "' has an empty domain");
    }
    if (spec.kind == VarKind::Integer) {
      if ((spec.lb.is_finite() && !is_integral(spec.lb.value())) ||
          (spec.ub.is_finite() && !is_integral(spec.ub.value()))) {
        throw PreconditionError("integer variable '" + spec.name + "' needs integral bounds");
      }
    }
    Variable v{p.variables_.size(), spec.name, spec.kind, spec.lb, spec.ub};
    p.domain_.kind.push_back(v.kind);
    p.domain_.global.lb.push_back(v.lb);
    p.domain_.global.ub.push_back(v.ub);
    p.names_.push_back(v.name);
    p.variables_.push_back(std::move(v));
  }

  for (auto& spec : constraints) {
    std::string context = "constraint '" + spec.name + "'";
    LinearConstraint row(collect_terms(spec.terms, index, context), spec.rhs, {OriginKind::Model, spec.name});
    switch (spec.sense) {
      case Sense::GreaterEqual:
        p.constraints_.push_back(std::move(row));
        p.constraint_names_.push_back(spec.name);
        break;
      case Sense::LessEqual:
        p.constraints_.push_back(negated(row));
        p.constraint_names_.push_back(spec.name);
        break;
      case Sense::Equal:
        p.constraints_.push_back(negated(row));
        p.constraints_.push_back(std::move(row));
        // keep ">=" first so an equality reads "name", "name#le"
        std::swap(p.constraints_[p.constraints_.size() - 1], p.constraints_[p.constraints_.size() - 2]);
        p.constraint_names_.push_back(spec.name);
        p.constraint_names_.push_back(spec.name + "#le");
        break;
    }
  }

  if (objective) p.objective_ = collect_terms(*objective, index, "objective");
  return p;
}

Problem with_extra_rows(const Problem& p, std::vector<LinearConstraint> rows) {
  Problem out = p;
  for (auto& r : rows) {
    for (const auto& [v, a] : r.terms()) {
      if (v >= out.num_vars()) throw PreconditionError("row references undeclared variable index");
    }
    out.constraint_names_.push_back("extra" + std::to_string(out.constraints_.size()));
    out.constraints_.push_back(std::move(r));
  }
  return out;
}

bool SubstitutionRecord::is_complemented(VarIndex v) const {
  auto it = subs.find(v);
  return it != subs.end() && it->second.negated;
}

void SubstitutionRecord::complement(VarIndex v, const Rational& literal_ub) {
  auto [it, inserted] = subs.try_emplace(v, Affine{});
  Affine& a = it->second;
  a.negated = !a.negated;
  a.offset = literal_ub - a.offset;
  if (!a.negated && a.offset == 0) subs.erase(it);
}

void SubstitutionRecord::shift(VarIndex v, const Rational& literal_lb) {
  if (literal_lb == 0) return;
  auto [it, inserted] = subs.try_emplace(v, Affine{});
  it->second.offset -= literal_lb;
  if (!it->second.negated && it->second.offset == 0) subs.erase(it);
}

LinearConstraint to_original(const LinearConstraint& literal_row, const SubstitutionRecord& record) {
  LinearConstraint out({}, literal_row.rhs(), literal_row.origin());
  for (const auto& [v, c] : literal_row.terms()) {
    auto it = record.subs.find(v);
    if (it == record.subs.end()) {
      out.add_to_coef(v, c);
      continue;
    }
    const Affine& a = it->second;
    out.add_to_coef(v, a.negated ? Rational(-c) : c);
    out.set_rhs(Rational(out.rhs() - c * a.offset));
  }
  return out;
}

LinearConstraint to_literal(const LinearConstraint& c, const SubstitutionRecord& record) {
  LinearConstraint out({}, c.rhs(), c.origin());
  for (const auto& [v, a] : c.terms()) {
    auto it = record.subs.find(v);
    if (it == record.subs.end()) {
      out.add_to_coef(v, a);
      continue;
    }
    const Affine& s = it->second;
    if (s.negated) {
      out.add_to_coef(v, Rational(-a));
      out.set_rhs(Rational(out.rhs() - a * s.offset));
    } else {
      out.add_to_coef(v, a);
      out.set_rhs(Rational(out.rhs() + a * s.offset));
    }
  }
  return out.scaled(Rational(1 / record.divisor));
}

LinearConstraint denormalize(const NormalizedRow& n) {
  return to_original(n.row, n.record).scaled(n.record.divisor);
}

NormalizedRow normalize_for_reduction(const LinearConstraint& c, VarIndex pivot, const Domain& domain) {
  Rational ar = c.coef(pivot);
  if (ar == 0) throw PreconditionError("pivot variable does not appear in the constraint");
  NormalizedRow out;
  out.record.pivot = pivot;
  for (const auto& [v, a] : c.terms()) {
    if (a > 0) continue;
    const ExtRational& ub = domain.global.ub[v];
    if (!ub.is_finite()) {
      throw PreconditionError("cannot complement a variable with infinite upper bound");
    }
    out.record.complement(v, ub.value());
  }
  out.record.divisor = abs(ar);
  out.row = to_literal(c, out.record);
  return out;
}

Box literal_box(const Box& box, const SubstitutionRecord& record) {
  Box out = box;
  for (const auto& [v, a] : record.subs) {
    if (a.negated) {
      out.lb[v] = ExtRational(a.offset) - box.ub[v];
      out.ub[v] = ExtRational(a.offset) - box.lb[v];
    } else {
      out.lb[v] = box.lb[v] + ExtRational(a.offset);
      out.ub[v] = box.ub[v] + ExtRational(a.offset);
    }
  }
  return out;
}

Domain literal_domain(const Domain& domain, const SubstitutionRecord& record) {
  Domain out = domain;
  out.global = literal_box(domain.global, record);
  return out;
}

Evaluation evaluate(const LinearConstraint& c, std::span<const Rational> point) {
  Rational activity = 0;
  for (const auto& [v, a] : c.terms()) {
    if (v >= point.size()) throw PreconditionError("point dimension does not match the variable count");
    activity += a * point[v];
  }
  Evaluation e;
  e.slack = activity - c.rhs();
  e.satisfied = e.slack >= 0;
  return e;
}

}  // namespace cutca
