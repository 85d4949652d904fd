#include <random>

#include "cutca/model.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace cutca;
using cutca::testing::Q;
using cutca::testing::row;

TEST_CASE("rational parsing and arithmetic") {
  CHECK(parse_rational("0.25") == Q(1, 4));
  CHECK(parse_rational("1.5") == Q(3, 2));
  CHECK(parse_rational("-7/14") == Q(-1, 2));
  CHECK(parse_rational("+3") == 3);
  CHECK_THROWS(parse_rational("1e5"));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("."));
  CHECK(floor_q(Q(-1, 2)) == -1);
  CHECK(ceil_q(Q(-1, 2)) == 0);
  CHECK(frac_q(Q(-1, 4)) == Q(3, 4));
  CHECK(gcd_q(Q(3, 2), Q(9, 4)) == Q(3, 4));

  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-50, 50);
  for (int i = 0; i < 200; ++i) {
    Rational p(d(rng), 1 + std::abs(d(rng)));
    Rational q(d(rng), 1 + std::abs(d(rng)));
    p.canonicalize();
    q.canonicalize();
    CHECK(Rational(p + q - q) == p);
    if (q != 0) CHECK(Rational(p * q / q) == p);
  }
}

TEST_CASE("extended rationals") {
  ExtRational inf = ExtRational::pos_inf();
  CHECK(inf + ExtRational(3) == inf);
  CHECK_THROWS_AS(inf + ExtRational::neg_inf(), std::domain_error);
  CHECK(inf * Rational(-2) == ExtRational::neg_inf());
  CHECK(inf * Rational(0) == ExtRational(0));
  CHECK(ExtRational::neg_inf() < ExtRational(-1000));
  CHECK(ExtRational(Q(1, 2)) < ExtRational(1));
  CHECK_THROWS(inf.value());
}

TEST_CASE("build_problem canonicalizes rows") {
  std::vector<VariableSpec> vars{{"x1"}, {"x2"}};
  Problem p = build_problem(vars, {{"c", {{"x1", 1}, {"x2", 1}}, Sense::LessEqual, 1}});
  REQUIRE(p.constraints().size() == 1);
  CHECK(p.constraints()[0] == row({{0, -1}, {1, -1}}, -1));

  Problem q = build_problem({{"x"}}, {{"e", {{"x", 1}}, Sense::Equal, 1}});
  REQUIRE(q.constraints().size() == 2);
  CHECK(q.constraints()[0] == row({{0, 1}}, 1));
  CHECK(q.constraints()[1] == row({{0, -1}}, -1));
  CHECK(q.constraint_names()[1] == "e#le");

  Problem ex1 = cutca::testing::example1();
  CHECK(ex1.num_vars() == 5);
  CHECK(ex1.constraints().size() == 2);
  CHECK(ex1.constraints()[0] == row({{0, 1}, {1, 1}, {2, 2}}, 2));
  CHECK(ex1.constraints()[1] == row({{0, 1}, {2, -2}, {3, 1}, {4, 1}}, 1));
}

TEST_CASE("build_problem rejects bad input") {
  CHECK_THROWS_AS(build_problem({{"x"}, {"x"}}, {}), PreconditionError);
  CHECK_THROWS_AS(build_problem({{"x", VarKind::Binary, 0, 2}}, {}), PreconditionError);
  CHECK_THROWS_AS(build_problem({{"x"}}, {{"c", {{"w", 1}}, Sense::GreaterEqual, 0}}), PreconditionError);
  CHECK_THROWS_AS(build_problem({{"z", VarKind::Integer, Q(1, 2), 3}}, {}), PreconditionError);
  CHECK_THROWS_AS(build_problem({{"y", VarKind::Continuous, 2, 1}}, {}), PreconditionError);
}

TEST_CASE("build_problem is idempotent on canonical input") {
  Problem p = cutca::testing::mbp5();
  std::vector<VariableSpec> vars;
  for (const auto& v : p.variables()) vars.push_back({v.name, v.kind, v.lb, v.ub});
  std::vector<ConstraintSpec> cons;
  for (std::size_t i = 0; i < p.constraints().size(); ++i) {
    ConstraintSpec s{p.constraint_names()[i], {}, Sense::GreaterEqual, p.constraints()[i].rhs()};
    for (const auto& [v, a] : p.constraints()[i].terms()) s.terms.emplace_back(p.names()[v], a);
    cons.push_back(s);
  }
  CHECK(build_problem(vars, cons) == p);
}

TEST_CASE("normalize_for_reduction") {
  Domain d = cutca::testing::binary_domain(5);

  auto n = normalize_for_reduction(row({{0, 3}, {1, 3}, {2, 3}, {3, 2}}, 7), 3, d);
  CHECK(n.row == row({{0, Q(3, 2)}, {1, Q(3, 2)}, {2, Q(3, 2)}, {3, 1}}, Q(7, 2)));
  CHECK(n.record.subs.empty());
  CHECK(n.record.divisor == 2);

  auto m = normalize_for_reduction(row({{0, 1}, {1, 1}, {2, 2}}, 2), 2, d);
  CHECK(m.row == row({{0, Q(1, 2)}, {1, Q(1, 2)}, {2, 1}}, 1));

  // -x4 + x1 >= 0 becomes xbar4 + x1 >= 1
  auto c = normalize_for_reduction(row({{0, 1}, {3, -1}}, 0), 3, d);
  CHECK(c.row == row({{0, 1}, {3, 1}}, 1));
  CHECK(c.record.is_complemented(3));
  CHECK(denormalize(c) == row({{0, 1}, {3, -1}}, 0));

  CHECK_THROWS_AS(normalize_for_reduction(row({{0, 1}}, 1), 2, d), PreconditionError);
}

TEST_CASE("substitution record round trip") {
  std::mt19937 rng(11);
  Domain d = cutca::testing::binary_domain(6);
  for (int it = 0; it < 300; ++it) {
    LinearConstraint c = cutca::testing::random_row(rng, 6, -6, 6);
    if (c.empty()) continue;
    VarIndex r = c.terms().begin()->first;
    auto n = normalize_for_reduction(c, r, d);
    CHECK(n.row.coef(r) == 1);
    for (const auto& [v, a] : n.row.terms()) CHECK(a > 0);
    CHECK(denormalize(n) == c);
    CHECK(to_literal(denormalize(n), n.record) == n.row);
  }
}

TEST_CASE("evaluate") {
  std::vector<Rational> p{1, 0};
  auto e = evaluate(row({{0, 1}, {1, 1}}, 1), p);
  CHECK(e.satisfied);
  CHECK(e.slack == 0);

  std::vector<Rational> q{0, 1, 0, 1, 1};
  e = evaluate(row({{0, 2}, {1, 1}, {3, 1}, {4, 1}}, 3), q);
  CHECK(e.satisfied);
  CHECK(e.slack == 0);

  std::vector<Rational> y{1, Q(3, 4), 0};
  e = evaluate(row({{0, -20}, {1, 5}, {2, -10}}, -16), y);
  CHECK_FALSE(e.satisfied);
  CHECK(e.slack == Q(-1, 4));

  CHECK_THROWS_AS(evaluate(row({{3, 1}}, 0), p), PreconditionError);
}

TEST_CASE("scale_to_primitive and printing") {
  auto c = scale_to_primitive(row({{0, Q(35, 2)}, {2, Q(-7, 2)}}, Q(1, 4)));
  CHECK(c == row({{0, 5}, {2, -1}}, Q(1, 14)));
  CHECK(row({{0, 2}, {2, -1}}, Q(1, 2)).str() == "2 x0 - x2 >= 1/2");
  std::vector<std::string> names{"a", "b"};
  CHECK(row({{1, -1}}, 0).str(names) == "-b >= 0");
}

TEST_CASE("bound disjunction validation") {
  CHECK_THROWS_AS(BoundDisjunction(std::vector<BoundAtom>{}), PreconditionError);
  CHECK_THROWS_AS(BoundDisjunction({{0, BoundKind::Lower, 1}, {0, BoundKind::Lower, 2}}), PreconditionError);
  BoundDisjunction d({{0, BoundKind::Upper, 2}, {1, BoundKind::Lower, 5}});
  CHECK(d.size() == 2);
}
