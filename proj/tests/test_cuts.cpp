#include <random>

#include "cutca/conflict.hpp"
#include "cutca/cuts.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace cutca;
using cutca::testing::Q;
using cutca::testing::row;

namespace {

Domain mixed_domain() {
  Domain d = cutca::testing::binary_domain(2);
  d.kind[1] = VarKind::Continuous;
  return d;
}

// MIR example reason and local box {x1 = 0}; x4 is index 3
cutca::testing::ReasonCase example2() {
  cutca::testing::ReasonCase rc;
  rc.domain = cutca::testing::binary_domain(4);
  rc.reason = row({{0, 3}, {1, 3}, {2, 3}, {3, 2}}, 7);
  rc.r = 3;
  rc.local = rc.domain.global;
  rc.local.ub[0] = 0;
  rc.propagated = *candidate_bound(rc.reason, 3, rc.local, rc.domain);
  return rc;
}

cutca::testing::ReasonCase example1() {
  cutca::testing::ReasonCase rc;
  rc.domain = cutca::testing::binary_domain(5);
  rc.reason = row({{0, 1}, {1, 1}, {2, 2}}, 2);
  rc.r = 2;
  rc.local = rc.domain.global;
  rc.local.ub[0] = 0;
  rc.propagated = *candidate_bound(rc.reason, 2, rc.local, rc.domain);
  return rc;
}

}  // namespace

TEST_CASE("weaken") {
  Domain d = cutca::testing::binary_domain(3);
  CHECK(weaken(row({{0, 1}, {1, 1}, {2, 2}}, 2), 1, d) == row({{0, 1}, {2, 2}}, 1));
  CHECK(weaken(row({{0, -3}, {1, 1}}, 0), 0, d) == row({{1, 1}}, 0));
  CHECK_THROWS_AS(weaken(row({{0, 1}}, 1), 2, d), PreconditionError);
  Domain inf = d;
  inf.kind[0] = VarKind::Continuous;
  inf.global.ub[0] = ExtRational::pos_inf();
  CHECK_THROWS_AS(weaken(row({{0, 1}}, 1), 0, inf), PreconditionError);
}

TEST_CASE("complement") {
  Domain d = cutca::testing::binary_domain(4);
  auto c = row({{0, 3}, {1, 3}, {2, 3}, {3, 2}}, 7);
  auto one = complement(c, 1, d);
  auto two = complement(one.row, 2, d);
  CHECK(two.row == row({{0, 3}, {1, -3}, {2, -3}, {3, 2}}, 1));
  CHECK(uncomplement(uncomplement(two.row, two.record), one.record) == c);
  CHECK(complement(one.row, 1, d).row == c);
  CHECK(complement(row({{0, 1}}, 0), 0, d).row == row({{0, -1}}, -1));
  Domain inf = d;
  inf.kind[0] = VarKind::Continuous;
  inf.global.ub[0] = ExtRational::pos_inf();
  CHECK_THROWS_AS(complement(row({{0, 1}}, 0), 0, inf), PreconditionError);
}

TEST_CASE("saturate") {
  Domain d = cutca::testing::binary_domain(2);
  CHECK(saturate(row({{0, 3}, {1, 5}}, 3), d) == row({{0, 3}, {1, 3}}, 3));
  CHECK(saturate(row({{0, 1}, {1, 2}}, 3), d) == row({{0, 1}, {1, 2}}, 3));
  CHECK(saturate(row({{0, 7}}, 2), d) == row({{0, 2}}, 2));
  CHECK_THROWS_AS(saturate(row({{0, -1}}, 2), d), PreconditionError);
  CHECK_THROWS_AS(saturate(row({{0, 1}}, 0), d), PreconditionError);
  CHECK_THROWS_AS(saturate(row({{0, 1}, {1, 1}}, 1), mixed_domain()), PreconditionError);
}

TEST_CASE("coefficient tightening") {
  CHECK(coef_tighten(row({{0, 5}, {1, 2}}, 3), mixed_domain()) == row({{0, 3}, {1, 2}}, 3));
  Domain d = cutca::testing::binary_domain(5);
  auto r = row({{0, 2}, {1, 1}, {3, 1}, {4, 1}}, 3);
  CHECK(coef_tighten(r, d) == r);
  CHECK(coef_tighten(row({{0, 1}, {2, 2}}, 1), d) == row({{0, 1}, {2, 1}}, 1));
  // -5 x0 + x1 >= 0: minact -5, b~ = 5, nothing to clip
  CHECK(coef_tighten(row({{0, -5}, {1, 1}}, 0), d) == row({{0, -5}, {1, 1}}, 0));
  // -5 x0 + x1 >= -1: minact -5, b~ = 4, so -5 -> -4 and rhs -1 + 1 = 0
  CHECK(coef_tighten(row({{0, -5}, {1, 1}}, -1), d) == row({{0, -4}, {1, 1}}, 0));
  CHECK_THROWS_AS(coef_tighten(row({{0, 1}}, 0), d), PreconditionError);

  // on 0/1 data with non-negative coefficients it is saturation
  std::mt19937 rng(23);
  for (int it = 0; it < 200; ++it) {
    auto c = cutca::testing::random_row(rng, 5, 0, 8);
    if (c.rhs() <= 0) continue;
    CHECK(coef_tighten(c, d) == saturate(c, d));
  }
}

TEST_CASE("chvatal-gomory cut") {
  Domain d = cutca::testing::binary_domain(4);
  CHECK(cg_cut(row({{0, Q(3, 2)}, {1, Q(23, 10)}}, Q(11, 10)), d) == row({{0, 2}, {1, 3}}, 2));
  CHECK(cg_cut(row({{0, 2}, {1, -1}}, 1), d) == row({{0, 2}, {1, -1}}, 1));
  CHECK(cg_cut(row({{0, Q(1, 2)}, {2, 1}}, Q(1, 2)), d) == row({{0, 1}, {2, 1}}, 1));
  CHECK_THROWS_AS(cg_cut(row({{1, 1}}, Q(1, 2)), mixed_domain()), PreconditionError);
}

TEST_CASE("mixed integer rounding cut") {
  Domain d = cutca::testing::binary_domain(4);
  auto in = row({{0, Q(3, 2)}, {1, Q(-3, 2)}, {2, Q(-3, 2)}, {3, 1}}, Q(1, 2));
  CHECK(mir_cut(in, d) == row({{0, 2}, {1, -1}, {2, -1}, {3, 1}}, 1));

  Domain y;
  y.kind = {VarKind::Continuous};
  y.global.lb = {ExtRational(0)};
  y.global.ub = {ExtRational(1)};
  CHECK(mir_cut(row({{0, 1}}, Q(1, 2)), y) == row({{0, 2}}, 1));
  CHECK(mir_cut(row({{0, -1}}, Q(-1, 2)), y) == row({}, 0));

  CHECK(mir_cut(row({{0, 2}, {1, 3}}, Q(5, 2)), d) == row({{0, 2}, {1, 3}}, 3));
  CHECK_THROWS_AS(mir_cut(row({{0, 1}}, 1), d), PreconditionError);
  Domain neg = d;
  neg.kind[0] = VarKind::Integer;
  neg.global.lb[0] = -1;
  CHECK_THROWS_AS(mir_cut(row({{0, 1}}, Q(1, 2)), neg), PreconditionError);
}

TEST_CASE("operator validity on 0/1 and mixed points") {
  std::mt19937 rng(29);
  Domain d = cutca::testing::binary_domain(6);
  for (int it = 0; it < 300; ++it) {
    auto c = cutca::testing::random_row(rng, 6, -7, 7);
    std::vector<std::pair<const char*, LinearConstraint>> outs;
    if (min_activity(c, d.global) < ExtRational(c.rhs())) outs.emplace_back("ct", coef_tighten(c, d));
    outs.emplace_back("cg", cg_cut(c.scaled(Q(1, 3)), d));
    if (frac_q(Rational(c.rhs() / 3)) != 0) outs.emplace_back("mir", mir_cut(c.scaled(Q(1, 3)), d));
    for (const auto& x : cutca::testing::binary_points(d.global)) {
      if (!evaluate(c, x).satisfied) continue;
      for (const auto& [name, out] : outs) {
        INFO(name, " ", c.str(), " -> ", out.str());
        CHECK(evaluate(out, x).satisfied);
      }
    }
  }
}

TEST_CASE("clause reduction") {
  auto rc = example1();
  CHECK(reduce_clause(rc.reason, 2, rc.local, rc.domain) == row({{0, 1}, {2, 1}}, 1));
  Box free = rc.domain.global;
  CHECK(reduce_clause(row({{2, 2}, {1, 1}}, 1), 2, free, rc.domain) == row({{2, 1}}, 1));

  // 17.5 x1 - 3.5 x3 >= 0.25 under {x3 = 0}: xbar3 is not falsified
  Domain d = cutca::testing::binary_domain(3);
  Box b = d.global;
  b.ub[2] = 0;
  b.ub[1] = 0;
  CHECK(reduce_clause(row({{0, Q(35, 2)}, {2, Q(-7, 2)}}, Q(1, 4)), 0, b, d) == row({{0, 1}}, 1));
}

TEST_CASE("coefficient tightening reduction") {
  auto rc = example1();
  auto cc = row({{0, 1}, {2, -2}, {3, 1}, {4, 1}}, 1);
  auto reduced = reduce_coeftight(rc.reason, cc, 2, rc.local, rc.domain);
  CHECK(reduced == row({{0, 1}, {2, 1}}, 1));
  auto res = resolve(cc, reduced, 2);
  CHECK(res == row({{0, 3}, {3, 1}, {4, 1}}, 3));
  CHECK(is_infeasible(res, rc.local));

  // already tight: returned unchanged
  auto tight = row({{0, 1}, {2, 1}}, 1);
  CHECK(reduce_coeftight(tight, cc, 2, rc.local, rc.domain) == tight);
}

TEST_CASE("cMIR and wMIR on the MIR example") {
  auto rc = example2();
  CHECK(reduce_cmir(rc.reason, 3, rc.local, rc.domain) == row({{0, 2}, {1, 1}, {2, 1}, {3, 1}}, 3));
  CHECK(reduce_wmir(rc.reason, 3, rc.local, rc.domain) == row({{0, 2}, {3, 1}}, 1));
  auto cmir = reduce_cmir(rc.reason, 3, rc.local, rc.domain);
  CHECK(weaken(weaken(cmir, 1, rc.domain), 2, rc.domain) == row({{0, 2}, {3, 1}}, 1));

  auto e1 = example1();
  CHECK(reduce_cmir(e1.reason, 2, e1.local, e1.domain) == row({{0, 1}, {2, 1}}, 1));
  CHECK(reduce_wmir(e1.reason, 2, e1.local, e1.domain) == row({{0, 1}, {2, 1}}, 1));

  // P empty: CG-style rounding of the normalized row
  Box fixed = e1.local;
  fixed.ub[1] = 0;
  auto loose = row({{0, 1}, {1, 1}, {2, 2}}, 1);
  CHECK(reduce_cmir(loose, 2, fixed, e1.domain) == row({{0, 1}, {1, 1}, {2, 1}}, 1));
  CHECK(reduce_cmir(loose, 2, fixed, e1.domain) == cg_cut(loose.scaled(Q(1, 2)), e1.domain));

  CHECK_THROWS_AS(reduce_cmir(row({{0, 1}, {2, 1}}, 1), 2, e1.local, e1.domain), ReductionFailed);
}

TEST_CASE("reductions match the closed forms") {
  std::mt19937 rng(31);
  int seen = 0;
  while (seen < 300) {
    auto rc = cutca::testing::random_reason(rng, 6);
    if (!rc) continue;
    ++seen;
    INFO(rc->reason.str(), " r=", rc->r);
    CHECK(reduce_cmir(rc->reason, rc->r, rc->local, rc->domain) == cutca::testing::closed_form_mir(*rc, true));
    CHECK(reduce_wmir(rc->reason, rc->r, rc->local, rc->domain) == cutca::testing::closed_form_mir(*rc, false));
  }
}

TEST_CASE("wMIR equals cMIR when every coefficient in P is integral") {
  std::mt19937 rng(37);
  int seen = 0;
  while (seen < 200) {
    auto rc = cutca::testing::random_reason(rng, 6);
    if (!rc) continue;
    NormalizedRow n = normalize_for_reduction(rc->reason, rc->r, rc->domain);
    Box lb = literal_box(rc->local, n.record);
    bool integral_p = true;
    for (const auto& [j, a] : n.row.terms()) {
      if (j != rc->r && lb.ub[j] == ExtRational(1) && !is_integral(a)) integral_p = false;
    }
    if (!integral_p) continue;
    ++seen;
    CHECK(reduce_cmir(rc->reason, rc->r, rc->local, rc->domain) ==
          reduce_wmir(rc->reason, rc->r, rc->local, rc->domain));
  }
}

TEST_CASE("reductions propagate tightly and cMIR dominates wMIR") {
  std::mt19937 rng(43);
  int seen = 0;
  while (seen < 400) {
    auto rc = cutca::testing::random_reason(rng, 6);
    if (!rc) continue;
    ++seen;
    INFO(rc->reason.str(), " r=", rc->r);
    auto cm = reduce_cmir(rc->reason, rc->r, rc->local, rc->domain);
    auto wm = reduce_wmir(rc->reason, rc->r, rc->local, rc->domain);
    CHECK(cutca::testing::propagates_tightly(cm, *rc));
    CHECK(cutca::testing::propagates_tightly(wm, *rc));
    CHECK(cutca::testing::propagates_tightly(reduce_coeftight(rc->reason, rc->r, rc->local, rc->domain), *rc));
    for (const auto& x : cutca::testing::binary_points(rc->domain.global)) {
      if (evaluate(cm, x).satisfied) CHECK(evaluate(wm, x).satisfied);
    }
    // weakening the fractional part of P in the cMIR row gives the wMIR row
    NormalizedRow n = normalize_for_reduction(rc->reason, rc->r, rc->domain);
    Box lb = literal_box(rc->local, n.record);
    LinearConstraint weak = cm;
    for (const auto& [j, a] : n.row.terms()) {
      if (j != rc->r && lb.ub[j] == ExtRational(1) && !is_integral(a) && weak.coef(j) != 0) {
        weak = weaken(weak, j, rc->domain);
      }
    }
    CHECK(scale_to_primitive(weak) == wm);
  }
}

TEST_CASE("cMIR separates the one-row LP vertex") {
  // resolution example: vertex (0, 1, 1/2) of the one-row LP
  auto e1 = example1();
  auto cut = reduce_cmir(e1.reason, 2, e1.local, e1.domain);
  std::vector<Rational> vertex{0, 1, Q(1, 2), 0, 0};
  CHECK(evaluate(e1.reason, vertex).satisfied);
  CHECK_FALSE(evaluate(cut, vertex).satisfied);

  std::mt19937 rng(41);
  int seen = 0;
  while (seen < 300) {
    auto rc = cutca::testing::random_reason(rng, 6);
    if (!rc) continue;
    ++seen;
    // free variables sit at the bound supporting the propagation
    std::vector<Rational> x(6);
    for (VarIndex v = 0; v < 6; ++v) {
      Rational a = rc->reason.coef(v);
      if (v == rc->r) {
        x[v] = rc->propagated.pre_round;
      } else if (a >= 0) {
        x[v] = rc->local.ub[v].value();
      } else {
        x[v] = rc->local.lb[v].value();
      }
    }
    CHECK(evaluate(rc->reason, x).slack == 0);
    CHECK_FALSE(evaluate(reduce_cmir(rc->reason, rc->r, rc->local, rc->domain), x).satisfied);
  }
}

TEST_CASE("resolve") {
  auto cr = row({{0, 1}, {1, 1}, {2, 2}}, 2);
  auto cc = row({{0, 1}, {2, -2}, {3, 1}, {4, 1}}, 1);
  CHECK(resolve(cr, cc, 2) == row({{0, 2}, {1, 1}, {3, 1}, {4, 1}}, 3));
  auto c1 = row({{0, -2}, {3, -4}, {4, -2}}, -3);
  auto c2 = row({{0, 20}, {3, 5}, {4, -1}}, 4);
  CHECK(resolve(c2, c1, 3) == row({{0, Q(35, 2)}, {4, Q(-7, 2)}}, Q(1, 4)));
  CHECK(resolve(row({{0, 1}, {1, 1}}, 1), row({{0, -1}, {1, 1}}, 0), 0) == row({{1, 2}}, 1));
  CHECK_THROWS_AS(resolve(cr, cr, 2), PreconditionError);
  CHECK_THROWS_AS(resolve(cr, cc, 3), PreconditionError);
}
