#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cutca/rational.hpp"

namespace cutca {

using VarIndex = std::size_t;

/// Raised when an operation is called outside its domain (bad input, unmet
/// precondition). Distinct from internal logic errors.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class VarKind { Binary, Integer, Continuous };
enum class BoundKind { Lower, Upper };

inline bool is_integral_kind(VarKind k) { return k != VarKind::Continuous; }
const char* to_string(VarKind k);

struct Variable {
  VarIndex index = 0;
  std::string name;
  VarKind kind = VarKind::Binary;
  ExtRational lb = 0;
  ExtRational ub = 1;
};

/// Per-variable lower and upper bounds.
struct Box {
  std::vector<ExtRational> lb;
  std::vector<ExtRational> ub;

  std::size_t size() const { return lb.size(); }
};

/// Global bounds and variable kinds; everything the cut operators need to know
/// about the variable space.
struct Domain {
  std::vector<VarKind> kind;
  Box global;

  std::size_t size() const { return kind.size(); }
  bool is_binary(VarIndex v) const { return kind[v] == VarKind::Binary; }
  bool is_integral(VarIndex v) const { return is_integral_kind(kind[v]); }
};

enum class OriginKind { Model, Learned, Derived };

struct Origin {
  OriginKind kind = OriginKind::Derived;
  std::string tag;
};

/// Sparse row  sum_j a_j x_j >= rhs  with exact coefficients. Zero
/// coefficients are never stored and terms are ordered by variable index.
class LinearConstraint {
 public:
  using Terms = std::map<VarIndex, Rational>;

  LinearConstraint() = default;
  LinearConstraint(Terms terms, Rational rhs, Origin origin = {});

  const Terms& terms() const { return terms_; }
  const Rational& rhs() const { return rhs_; }
  const Origin& origin() const { return origin_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Zero when the variable is absent.
  Rational coef(VarIndex v) const;
  bool contains(VarIndex v) const { return terms_.count(v) != 0; }

  void set_coef(VarIndex v, const Rational& a);
  void add_to_coef(VarIndex v, const Rational& a);
  void erase(VarIndex v) { terms_.erase(v); }
  void set_rhs(Rational rhs) { rhs_ = std::move(rhs); }
  void set_origin(Origin o) { origin_ = std::move(o); }

  /// this += k * other
  LinearConstraint& add_scaled(const LinearConstraint& other, const Rational& k);
  /// Multiplies by a positive factor.
  LinearConstraint scaled(const Rational& k) const;

  /// Row equality ignores the origin tag.
  friend bool operator==(const LinearConstraint& a, const LinearConstraint& b) {
    return a.terms_ == b.terms_ && a.rhs_ == b.rhs_;
  }

  /// Human-readable form, e.g. "2 x1 - x3 >= 1/2". Without names "x<i>" is used
  /// with the 0-based index.
  std::string str(std::span<const std::string> names = {}) const;

 private:
  Terms terms_;
  Rational rhs_;
  Origin origin_;
};

/// Positive rescaling that makes all coefficients integers with gcd 1.
LinearConstraint scale_to_primitive(const LinearConstraint& c);

struct BoundAtom {
  VarIndex var = 0;
  BoundKind kind = BoundKind::Lower;
  Rational value;

  /// Whether a point value satisfies the atom.
  bool holds(const Rational& x) const { return kind == BoundKind::Lower ? x >= value : x <= value; }
  friend bool operator==(const BoundAtom&, const BoundAtom&) = default;
};

/// At least one atom holds.
class BoundDisjunction {
 public:
  BoundDisjunction() = default;
  /// Throws PreconditionError when empty or when a (var, kind) pair repeats.
  explicit BoundDisjunction(std::vector<BoundAtom> atoms);

  const std::vector<BoundAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  std::string str(std::span<const std::string> names = {}) const;

  friend bool operator==(const BoundDisjunction&, const BoundDisjunction&) = default;

 private:
  std::vector<BoundAtom> atoms_;
};

enum class Sense { GreaterEqual, LessEqual, Equal };

struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::Binary;
  ExtRational lb = 0;
  ExtRational ub = 1;
};

struct ConstraintSpec {
  std::string name;
  std::vector<std::pair<std::string, Rational>> terms;
  Sense sense = Sense::GreaterEqual;
  Rational rhs;
};

class Problem {
 public:
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::vector<std::string>& constraint_names() const { return constraint_names_; }
  const std::optional<LinearConstraint::Terms>& objective() const { return objective_; }
  const Domain& domain() const { return domain_; }
  const std::vector<std::string>& names() const { return names_; }

  std::size_t num_vars() const { return variables_.size(); }
  std::optional<VarIndex> find(const std::string& name) const;
  /// Throws PreconditionError for unknown names.
  VarIndex index_of(const std::string& name) const;

  friend bool operator==(const Problem& a, const Problem& b);

 private:
  friend Problem build_problem(std::vector<VariableSpec>, std::vector<ConstraintSpec>,
                               std::optional<std::vector<std::pair<std::string, Rational>>>);
  friend Problem with_extra_rows(const Problem&, std::vector<LinearConstraint>);

  std::vector<Variable> variables_;
  std::vector<LinearConstraint> constraints_;
  std::vector<std::string> constraint_names_;
  std::optional<LinearConstraint::Terms> objective_;
  Domain domain_;
  std::vector<std::string> names_;
};

/// Validates and canonicalizes: <= rows are negated, = rows split into two >=
/// rows ("<name>" and "<name>#le").
Problem build_problem(std::vector<VariableSpec> variables, std::vector<ConstraintSpec> constraints,
                      std::optional<std::vector<std::pair<std::string, Rational>>> objective = std::nullopt);

/// Copy of `p` with additional model rows appended.
Problem with_extra_rows(const Problem& p, std::vector<LinearConstraint> rows);

/// Affine substitution  literal = (negated ? -x : x) + offset.
struct Affine {
  bool negated = false;
  Rational offset;
  friend bool operator==(const Affine&, const Affine&) = default;
};

/// Records the change of variables performed before a reduction: complemented
/// or shifted variables plus the positive divisor applied to the row.
struct SubstitutionRecord {
  std::map<VarIndex, Affine> subs;
  Rational divisor = 1;
  VarIndex pivot = 0;

  bool is_complemented(VarIndex v) const;
  /// Composes a complementation literal' = ub_literal - literal on top of the
  /// existing substitution for v.
  void complement(VarIndex v, const Rational& literal_ub);
  /// Composes a shift literal' = literal - literal_lb.
  void shift(VarIndex v, const Rational& literal_lb);
};

struct NormalizedRow {
  LinearConstraint row;  ///< coefficients on literals
  SubstitutionRecord record;
};

/// Complements every variable with a negative coefficient (the pivot
/// included) and divides by |a_r|, so the pivot literal has coefficient 1 and
/// every other coefficient is non-negative.
NormalizedRow normalize_for_reduction(const LinearConstraint& c, VarIndex pivot, const Domain& domain);

/// Maps a literal-space row back to the original variables. The divisor is not
/// undone: the result is a new row, only its variable space changes.
LinearConstraint to_original(const LinearConstraint& literal_row, const SubstitutionRecord& record);
/// Inverse of normalize_for_reduction: to_original followed by multiplying
/// with the divisor.
LinearConstraint denormalize(const NormalizedRow& n);
/// Forward mapping of an original-space row into literal space (divides too).
LinearConstraint to_literal(const LinearConstraint& c, const SubstitutionRecord& record);

Box literal_box(const Box& box, const SubstitutionRecord& record);
Domain literal_domain(const Domain& domain, const SubstitutionRecord& record);

struct Evaluation {
  bool satisfied = false;
  Rational slack;
};

/// slack = sum a_j x_j - rhs.
Evaluation evaluate(const LinearConstraint& c, std::span<const Rational> point);

}  // namespace cutca
