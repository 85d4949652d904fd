#include "cutca/lp.hpp"

#include <optional>

namespace cutca {

namespace {

// x_j = offset + sum of sign * column
struct Mapping {
  Rational offset;
  std::vector<std::pair<std::size_t, int>> cols;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : a_(rows, std::vector<Rational>(cols + 1)), basis_(rows) {}

  std::vector<Rational>& row(std::size_t i) { return a_[i]; }
  Rational& rhs(std::size_t i) { return a_[i].back(); }
  std::size_t rows() const { return a_.size(); }
  std::size_t cols() const { return a_.empty() ? 0 : a_[0].size() - 1; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c, std::vector<Rational>& obj) {
    Rational p = a_[r][c];
    for (auto& v : a_[r]) v /= p;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (i == r || a_[i][c] == 0) continue;
      Rational f = a_[i][c];
      for (std::size_t k = 0; k < a_[i].size(); ++k) a_[i][k] -= f * a_[r][k];
    }
    if (obj[c] != 0) {
      Rational f = obj[c];
      for (std::size_t k = 0; k < obj.size(); ++k) obj[k] -= f * a_[r][k];
    }
    basis_[r] = c;
  }

  // Minimizes with reduced costs `obj` (last entry: minus the objective
  // value). Columns at or above `limit` never enter. False when unbounded.
  bool optimize(std::vector<Rational>& obj, std::size_t limit) {
    while (true) {
      std::optional<std::size_t> enter;
      for (std::size_t c = 0; c < limit; ++c) {
        if (obj[c] < 0) {
          enter = c;
          break;
        }
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < a_.size(); ++i) {
        if (a_[i][*enter] <= 0) continue;
        Rational ratio = a_[i].back() / a_[i][*enter];
        if (!leave || ratio < best || (ratio == best && basis_[i] < basis_[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter, obj);
    }
  }

 private:
  std::vector<std::vector<Rational>> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const std::vector<LinearConstraint>& rows, const std::vector<Rational>& c, const Box& bounds) {
  std::size_t n = bounds.size();
  std::vector<Mapping> map(n);
  std::size_t structural = 0;
  std::vector<LinearConstraint> all = rows;
  for (std::size_t j = 0; j < n; ++j) {
    const ExtRational& lo = bounds.lb[j];
    const ExtRational& hi = bounds.ub[j];
    if (lo.is_finite()) {
      map[j] = {lo.value(), {{structural++, 1}}};
      if (hi.is_finite()) all.push_back(LinearConstraint({{j, -1}}, Rational(-hi.value())));
    } else if (hi.is_finite()) {
      map[j] = {hi.value(), {{structural++, -1}}};
    } else {
      map[j] = {0, {{structural, 1}, {structural + 1, -1}}};
      structural += 2;
    }
  }

  // columns: structural, one surplus per row, one artificial per row
  std::size_t m = all.size();
  std::size_t art = structural + m;
  Tableau t(m, structural + 2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    auto& r = t.row(i);
    Rational b = all[i].rhs();
    for (const auto& [j, a] : all[i].terms()) {
      b -= a * map[j].offset;
      for (auto [col, sign] : map[j].cols) r[col] += sign * a;
    }
    r[structural + i] = -1;
    r.back() = b;
    if (b < 0) {
      for (auto& v : r) v = -v;
    }
    r[art + i] = 1;
    t.basis()[i] = art + i;
  }

  LpResult res;
  std::size_t width = structural + 2 * m + 1;
  std::vector<Rational> phase1(width);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < width; ++k) {
      if (k < art || k == width - 1) phase1[k] -= t.row(i)[k];
    }
  }
  t.optimize(phase1, art);
  if (phase1.back() != 0) return res;

  // drive zero artificials out of the basis where possible
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis()[i] < art) continue;
    for (std::size_t k = 0; k < art; ++k) {
      if (t.row(i)[k] != 0) {
        t.pivot(i, k, phase1);
        break;
      }
    }
  }

  std::vector<Rational> obj(width);
  Rational constant;
  for (std::size_t j = 0; j < n && j < c.size(); ++j) {
    constant += c[j] * map[j].offset;
    for (auto [col, sign] : map[j].cols) obj[col] += sign * c[j];
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t b = t.basis()[i];
    if (obj[b] == 0) continue;
    Rational f = obj[b];
    for (std::size_t k = 0; k < width; ++k) obj[k] -= f * t.row(i)[k];
  }
  if (!t.optimize(obj, art)) {
    res.status = LpStatus::Unbounded;
    return res;
  }

  std::vector<Rational> col(structural + 2 * m);
  for (std::size_t i = 0; i < m; ++i) col[t.basis()[i]] = t.rhs(i);
  res.status = LpStatus::Optimal;
  res.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    res.x[j] = map[j].offset;
    for (auto [k, sign] : map[j].cols) res.x[j] += sign * col[k];
  }
  res.value = constant - obj.back();
  return res;
}

}  // namespace cutca
