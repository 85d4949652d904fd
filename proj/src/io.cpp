#include "cutca/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace cutca {

namespace {

std::string position_text(std::size_t line, std::size_t column, const std::string& what) {
  if (line == 0) return what;
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
}

struct Token {
  std::string text;
  std::size_t column = 0;  // 1-based
};

// Whitespace split; a trailing ';' becomes its own token.
std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != ';') ++i;
    if (i > start) out.push_back({std::string(line.substr(start, i - start)), start + 1});
    if (i < line.size() && line[i] == ';') {
      out.push_back({";", i + 1});
      ++i;
    }
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view l = text.substr(start, end - start);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    lines.push_back(l);
    start = end + 1;
  }
  return lines;
}

bool is_name(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '.' || c == '[' || c == ']';
  });
}

bool is_operator(const std::string& s) { return s == ">=" || s == "<=" || s == "="; }

Sense to_sense(const std::string& op) {
  if (op == ">=") return Sense::GreaterEqual;
  if (op == "<=") return Sense::LessEqual;
  return Sense::Equal;
}

std::optional<Rational> try_rational(const std::string& s) {
  try {
    return parse_rational(s);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

Problem build_or_throw(std::vector<VariableSpec> vars, std::vector<ConstraintSpec> cons,
                       std::optional<std::vector<std::pair<std::string, Rational>>> obj) {
  try {
    return build_problem(std::move(vars), std::move(cons), std::move(obj));
  } catch (const PreconditionError& e) {
    throw ParseError(0, 0, e.what());
  }
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error(position_text(line, column, what)), line_(line), column_(column) {}

Problem parse_opb(std::string_view text) {
  std::vector<std::string> order;
  std::map<std::string, bool> seen;
  std::vector<ConstraintSpec> cons;
  std::optional<std::vector<std::pair<std::string, Rational>>> obj;
  auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::size_t lineno = ln + 1;
    std::string_view line = lines[ln];
    auto toks = tokenize(line);
    if (toks.empty() || toks[0].text[0] == '*') continue;
    auto fail = [&](std::size_t col, const std::string& what) -> ParseError { return ParseError(lineno, col, what); };
    std::size_t end_col = line.size() + 1;
    std::size_t i = 0;
    bool objective = false;
    if (toks[0].text == "min:") {
      if (obj) throw fail(toks[0].column, "second objective");
      objective = true;
      i = 1;
    }
    std::vector<std::pair<std::string, Rational>> terms;
    while (i < toks.size() && !is_operator(toks[i].text) && toks[i].text != ";") {
      const Token& c = toks[i];
      auto coef = try_rational(c.text);
      if (!coef) {
        if (c.text.find_first_of("<>=") != std::string::npos) throw fail(c.column, "unknown operator '" + c.text + "'");
        throw fail(c.column, "expected a coefficient, found '" + c.text + "'");
      }
      if (!is_integral(*coef) || c.text.find_first_of("./") != std::string::npos) {
        throw fail(c.column, "non-integer coefficient '" + c.text + "'");
      }
      if (i + 1 >= toks.size()) throw fail(end_col, "expected a variable after the coefficient");
      const Token& v = toks[i + 1];
      if (!is_name(v.text)) throw fail(v.column, "expected a variable, found '" + v.text + "'");
      if (!seen[v.text]) {
        seen[v.text] = true;
        order.push_back(v.text);
      }
      terms.push_back({v.text, *coef});
      i += 2;
    }
    if (objective) {
      if (i >= toks.size() || toks[i].text != ";") throw fail(i < toks.size() ? toks[i].column : end_col, "expected ';'");
      if (i + 1 != toks.size()) throw fail(toks[i + 1].column, "unexpected text after ';'");
      obj = std::move(terms);
      continue;
    }
    if (i >= toks.size()) throw fail(end_col, "expected an operator");
    if (!is_operator(toks[i].text)) throw fail(toks[i].column, "expected an operator");
    std::string op = toks[i].text;
    if (i + 1 >= toks.size() || toks[i + 1].text == ";") throw fail(i + 1 < toks.size() ? toks[i + 1].column : end_col, "expected a right-hand side");
    const Token& r = toks[i + 1];
    auto rhs = try_rational(r.text);
    if (!rhs || r.text.find_first_of("./") != std::string::npos) throw fail(r.column, "expected an integer right-hand side");
    if (i + 2 >= toks.size()) throw fail(end_col, "syntax error: missing ';' at end of line");
    if (toks[i + 2].text != ";") throw fail(toks[i + 2].column, "expected ';'");
    if (i + 3 != toks.size()) throw fail(toks[i + 3].column, "unexpected text after ';'");
    cons.push_back({"c" + std::to_string(cons.size() + 1), std::move(terms), to_sense(op), *rhs});
  }

  static const std::regex indexed("x([0-9]+)");
  bool all_indexed = std::all_of(order.begin(), order.end(), [](const std::string& s) { return std::regex_match(s, indexed); });
  if (all_indexed) {
    std::stable_sort(order.begin(), order.end(), [](const std::string& a, const std::string& b) {
      return mpz_class(a.substr(1)) < mpz_class(b.substr(1));
    });
  }
  std::vector<VariableSpec> vars;
  for (const auto& n : order) vars.push_back({n});
  return build_or_throw(std::move(vars), std::move(cons), std::move(obj));
}

namespace {

ExtRational parse_bound(const std::string& s, std::size_t line, std::size_t col) {
  if (s == "inf" || s == "+inf") return ExtRational::pos_inf();
  if (s == "-inf") return ExtRational::neg_inf();
  auto q = try_rational(s);
  if (!q) throw ParseError(line, col, "malformed rational '" + s + "'");
  return *q;
}

}  // namespace

Problem parse_native(std::string_view text) {
  std::vector<VariableSpec> vars;
  std::map<std::string, VarKind> declared;
  std::vector<ConstraintSpec> cons;
  std::optional<std::vector<std::pair<std::string, Rational>>> obj;
  static const std::regex bounds(R"(^\s*\[\s*([^,\s]+)\s*,\s*([^\]\s]+)\s*\]\s*$)");

  auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::size_t lineno = ln + 1;
    std::string_view line = lines[ln];
    auto toks = tokenize(line);
    if (toks.empty() || toks[0].text[0] == '#') continue;
    auto fail = [&](std::size_t col, const std::string& what) -> ParseError { return ParseError(lineno, col, what); };
    std::size_t end_col = line.size() + 1;

    // terms up to an operator (or the end); returns the index after them
    auto read_terms = [&](std::size_t i, std::vector<std::pair<std::string, Rational>>& terms) {
      while (i < toks.size() && !is_operator(toks[i].text)) {
        Rational sign = 1;
        if (toks[i].text == "+" || toks[i].text == "-") {
          if (toks[i].text == "-") sign = -1;
          if (++i >= toks.size()) throw fail(end_col, "dangling sign");
        }
        Rational coef = 1;
        if (!is_name(toks[i].text)) {
          auto q = try_rational(toks[i].text);
          if (!q) {
            if (toks[i].text.find_first_of("<>=") != std::string::npos) {
              throw fail(toks[i].column, "unknown operator '" + toks[i].text + "'");
            }
            throw fail(toks[i].column, "malformed rational '" + toks[i].text + "'");
          }
          coef = *q;
          if (++i >= toks.size()) throw fail(end_col, "expected a variable after the coefficient");
        }
        const Token& v = toks[i];
        if (!is_name(v.text)) throw fail(v.column, "expected a variable, found '" + v.text + "'");
        if (!declared.count(v.text)) throw fail(v.column, "unknown variable '" + v.text + "'");
        terms.push_back({v.text, Rational(sign * coef)});
        ++i;
      }
      return i;
    };

    const std::string& head = toks[0].text;
    if (head == "var") {
      if (toks.size() < 3) throw fail(end_col, "expected 'var <name> <kind>'");
      const Token& name = toks[1];
      if (!is_name(name.text)) throw fail(name.column, "malformed variable name '" + name.text + "'");
      if (declared.count(name.text)) throw fail(name.column, "variable '" + name.text + "' declared twice");
      const Token& kind = toks[2];
      VariableSpec spec{name.text};
      if (kind.text == "binary") {
        spec.kind = VarKind::Binary;
      } else if (kind.text == "integer") {
        spec.kind = VarKind::Integer;
      } else if (kind.text == "continuous") {
        spec.kind = VarKind::Continuous;
      } else {
        throw fail(kind.column, "unknown variable kind '" + kind.text + "'");
      }
      std::size_t rest_col = kind.column + kind.text.size();
      std::string rest(line.substr(rest_col - 1));
      if (rest.find_first_not_of(" \t") == std::string::npos) {
        if (spec.kind != VarKind::Binary) throw fail(end_col, "expected bounds '[lo, hi]'");
      } else {
        std::smatch m;
        if (!std::regex_match(rest, m, bounds)) throw fail(rest_col + rest.find_first_not_of(" \t"), "expected bounds '[lo, hi]'");
        std::size_t lo_col = rest_col + static_cast<std::size_t>(m.position(1));
        std::size_t hi_col = rest_col + static_cast<std::size_t>(m.position(2));
        spec.lb = parse_bound(m[1], lineno, lo_col);
        spec.ub = parse_bound(m[2], lineno, hi_col);
        if (spec.kind == VarKind::Binary && (spec.lb != ExtRational(0) || spec.ub != ExtRational(1))) {
          throw fail(lo_col, "binary variable '" + spec.name + "' must have bounds [0, 1]");
        }
      }
      if (spec.kind == VarKind::Integer) {
        for (const ExtRational* b : {&spec.lb, &spec.ub}) {
          if (b->is_finite() && !is_integral(b->value())) throw fail(rest_col, "integer variable needs integral bounds");
        }
      }
      if (spec.lb > spec.ub) throw fail(rest_col, "lower bound exceeds upper bound");
      declared[spec.name] = spec.kind;
      vars.push_back(std::move(spec));
    } else if (head == "min:") {
      if (obj) throw fail(toks[0].column, "second objective");
      std::vector<std::pair<std::string, Rational>> terms;
      std::size_t i = read_terms(1, terms);
      if (i != toks.size()) throw fail(toks[i].column, "unexpected operator in objective");
      obj = std::move(terms);
    } else if (head == "con") {
      if (toks.size() < 2) throw fail(end_col, "expected 'con <name>:'");
      std::string name = toks[1].text;
      std::size_t i = 2;
      if (!name.empty() && name.back() == ':') {
        name.pop_back();
      } else if (i < toks.size() && toks[i].text == ":") {
        ++i;
      } else {
        throw fail(toks[1].column + toks[1].text.size(), "expected ':' after the constraint name");
      }
      if (!is_name(name)) throw fail(toks[1].column, "malformed constraint name '" + name + "'");
      std::vector<std::pair<std::string, Rational>> terms;
      i = read_terms(i, terms);
      if (i >= toks.size()) throw fail(end_col, "expected an operator");
      std::string op = toks[i].text;
      if (i + 1 >= toks.size()) throw fail(end_col, "expected a right-hand side");
      auto rhs = try_rational(toks[i + 1].text);
      if (!rhs) throw fail(toks[i + 1].column, "malformed rational '" + toks[i + 1].text + "'");
      if (i + 2 != toks.size()) throw fail(toks[i + 2].column, "unexpected text after the right-hand side");
      cons.push_back({name, std::move(terms), to_sense(op), *rhs});
    } else {
      throw fail(toks[0].column, "unknown statement '" + head + "'");
    }
  }
  return build_or_throw(std::move(vars), std::move(cons), std::move(obj));
}

namespace {

void print_terms(std::ostream& os, const LinearConstraint::Terms& terms, const std::vector<std::string>& names) {
  for (const auto& [v, a] : terms) os << ' ' << (a > 0 ? "+" : "") << to_string(a) << ' ' << names[v];
}

}  // namespace

std::string print_native(const Problem& problem) {
  std::ostringstream os;
  const auto& names = problem.names();
  for (const auto& v : problem.variables()) {
    os << "var " << v.name << ' ' << to_string(v.kind);
    if (v.kind != VarKind::Binary) os << " [" << v.lb.str() << ", " << v.ub.str() << ']';
    os << '\n';
  }
  if (problem.objective()) {
    os << "min:";
    print_terms(os, *problem.objective(), names);
    os << '\n';
  }
  const auto& cons = problem.constraints();
  for (std::size_t i = 0; i < cons.size(); ++i) {
    os << "con " << problem.constraint_names()[i] << ':';
    print_terms(os, cons[i].terms(), names);
    os << " >= " << to_string(cons[i].rhs()) << '\n';
  }
  return os.str();
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, 0, "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  bool opb = path.size() >= 4 && path.compare(path.size() - 4, 4, ".opb") == 0;
  return opb ? parse_opb(text) : parse_native(text);
}

std::string emit_stats(const Stats& stats, SolveStatus status, const std::optional<Rational>& objective) {
  nlohmann::ordered_json j;
  j["nodes"] = stats.nodes;
  j["conflicts_analyzed"] = stats.conflicts_analyzed;
  j["learned_linear"] = stats.learned_linear;
  j["learned_disjunctions"] = stats.learned_disjunctions;
  j["fallbacks"] = stats.fallbacks;
  j["avg_learned_length"] = stats.avg_learned_length ? nlohmann::ordered_json(*stats.avg_learned_length) : nullptr;
  j["used_pct"] = stats.learned_used_in_propagation_pct ? nlohmann::ordered_json(*stats.learned_used_in_propagation_pct)
                                                        : nullptr;
  j["bdchgs_by_learned"] = stats.bound_changes_by_learned;
  j["status"] = to_string(status);
  j["objective"] = objective ? nlohmann::ordered_json(to_string(*objective)) : nullptr;
  return j.dump();
}

}  // namespace cutca
