#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cutca/model.hpp"
#include "cutca/search.hpp"

namespace cutca {

/// Input error with a 1-based position.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Linear OPB subset: "* comment", optional "min: <terms> ;", and rows
/// "<terms> >=|<=|= <int> ;" with integer coefficients. Variables are binary;
/// names of the form x<i> are ordered by i, others by first appearance.
Problem parse_opb(std::string_view text);

/// Line-based mixed format:
///   var <name> binary [lo, hi] | integer [lo, hi] | continuous [lo, hi]
///   min: <terms>
///   con <name>: <terms> >=|<=|= <rhs>
/// Terms are "<coef> <name>" with coefficients "p", "p/q" or decimals; bounds
/// may be "inf"/"-inf"; "#" starts a comment line.
Problem parse_native(std::string_view text);

/// Writes the canonical (>=) rows in the native format.
std::string print_native(const Problem& problem);

/// Reads a file and dispatches on the extension (".opb" or native).
Problem load_problem(const std::string& path);

/// One JSON object with a fixed key order.
std::string emit_stats(const Stats& stats, SolveStatus status, const std::optional<Rational>& objective);

}  // namespace cutca
