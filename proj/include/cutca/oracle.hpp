#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "cutca/model.hpp"

namespace cutca {

/// The oracle declines inputs beyond its size limits instead of truncating.
class OracleRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kOracleMaxIntegral = 20;
inline constexpr std::size_t kOracleMaxContinuous = 6;
inline constexpr std::size_t kOracleMaxPoints = std::size_t{1} << 20;
inline constexpr std::size_t kOracleMaxFmRows = 10000;

/// Fourier-Motzkin step on >= rows: rows without `var` are kept, and each
/// (positive, negative) pair gives P + (a_p / |a_n|) N.
std::vector<LinearConstraint> fm_eliminate(const std::vector<LinearConstraint>& rows, VarIndex var);

/// Whether the rows have a real solution (all variables treated as continuous).
bool fm_feasible(const std::vector<LinearConstraint>& rows);

struct FeasiblePoint {
  /// Integral part from the enumeration; continuous part is a certificate.
  std::vector<Rational> x;
};

std::vector<FeasiblePoint> enumerate_feasible(const Problem& problem);

struct OracleOptimum {
  enum class Status { Optimal, Infeasible, Unbounded } status = Status::Infeasible;
  Rational value;
  std::vector<Rational> witness;
};

/// Exact minimum of the objective (0 for feasibility problems).
OracleOptimum oracle_optimum(const Problem& problem);

/// Whether every feasible point satisfies the learned object. With
/// `valid_below`, only points with objective strictly below it count.
bool validate_learned(const Problem& problem, const LinearConstraint& learned,
                      const std::optional<Rational>& valid_below = std::nullopt);
bool validate_learned(const Problem& problem, const BoundDisjunction& learned,
                      const std::optional<Rational>& valid_below = std::nullopt);

}  // namespace cutca
