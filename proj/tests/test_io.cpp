#include <doctest.h>

#include <json.hpp>

#include "cutca/io.hpp"
#include "testutil.hpp"

using namespace cutca;
using namespace cutca::testing;

namespace {

const char* kMbpNative = R"(# mixed binary system
var x1 binary
var x2 binary
var x3 binary
var y1 continuous [0, 1]
var y2 continuous [-1, 1]
con C1: -2 x1 -4 y1 -2 y2 >= -3
con C2: 20 x1 +5 y1 -1 y2 >= 4
con C3: -20 x1 +5 y1 -10 y2 >= -16
con C4: -1 y2 -1 x2 >= 0
con C5: 1 y2 -1 x3 >= 0
)";

std::size_t error_column(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.column();
  }
  return 0;
}

}  // namespace

TEST_CASE("parse_opb") {
  Problem p = parse_opb("+1 x1 +1 x2 +2 x3 >= 2 ;\n");
  REQUIRE(p.num_vars() == 3);
  CHECK(p.constraints()[0] == row({{0, Q(1)}, {1, Q(1)}, {2, Q(2)}}, Q(2)));
  CHECK(p.domain().is_binary(2));

  Problem q = parse_opb("* comment\nmin: +1 x1 ;\n+1 x1 >= 1 ;\n");
  REQUIRE(q.objective());
  CHECK(q.objective()->at(0) == 1);
  CHECK(q.constraints().size() == 1);

  Problem e1 = parse_opb("min: +1 x1 +1 x2 +1 x4 +1 x5 ;\n+1 x1 +1 x2 +2 x3 >= 2 ;\n+1 x1 -2 x3 +1 x4 +1 x5 >= 1 ;\n");
  CHECK(e1 == example1(true));

  Problem le = parse_opb("+3 x1 +2 x2 <= 4 ;\n+1 x1 = 1 ;\n");
  CHECK(le.constraints().size() == 3);
  CHECK(le.constraints()[0] == row({{0, Q(-3)}, {1, Q(-2)}}, Q(-4)));
}

TEST_CASE("parse_opb errors") {
  std::string missing = "+3 x1 +2 x2 >= 2";
  try {
    parse_opb(missing);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == missing.size() + 1);
  }
  CHECK(error_column([] { parse_opb("+1 x1 >= 1 ;\n+1/2 x1 >= 0 ;"); }) == 1);
  CHECK(error_column([] { parse_opb("+1 x1 => 1 ;"); }) == 7);
  CHECK_THROWS_AS(parse_opb("+1 x1 >= 1.5 ;"), ParseError);
  CHECK_THROWS_AS(parse_opb("+1 ~x1 >= 1 ;"), ParseError);
}

TEST_CASE("parse_native") {
  Problem p = parse_native(kMbpNative);
  CHECK(p == mbp5());
  CHECK(p.constraints().size() == 5);

  Problem z = parse_native("var z integer [0, 10]\ncon c: 2 z >= 3\n");
  CHECK(z.domain().kind[0] == VarKind::Integer);
  CHECK(z.constraints()[0] == row({{0, Q(2)}}, Q(3)));

  Problem d = parse_native("var y continuous [-inf, inf]\nmin: 0.25 y\ncon c: 1.5 y - 1/3 y >= -0.5\n");
  CHECK(d.objective()->at(0) == Q(1, 4));
  CHECK(d.constraints()[0] == row({{0, Q(7, 6)}}, Q(-1, 2)));
  CHECK(d.variables()[0].lb == ExtRational::neg_inf());
}

TEST_CASE("parse_native errors") {
  CHECK_THROWS_WITH_AS(parse_native("con c: 1 w >= 0\n"), doctest::Contains("unknown variable 'w'"), ParseError);
  CHECK_THROWS_AS(parse_native("var y continuous [0, 1e3]\n"), ParseError);
  CHECK_THROWS_AS(parse_native("var y continuous [0, 1]\ncon c: 1e2 y >= 0\n"), ParseError);
  CHECK_THROWS_AS(parse_native("var x binary [0, 2]\n"), ParseError);
  CHECK_THROWS_AS(parse_native("var x binary\nvar x binary\n"), ParseError);
  CHECK_THROWS_AS(parse_native("var z integer\n"), ParseError);
  CHECK_THROWS_AS(parse_native("var z integer [0, 1/2]\n"), ParseError);
  CHECK_THROWS_AS(parse_native("bogus line\n"), ParseError);
  CHECK(error_column([] { parse_native("var x binary\ncon c: 1 x >= 1/0\n"); }) == 15);
}

TEST_CASE("native round trip") {
  CHECK(parse_native(print_native(mbp5())) == mbp5());
  CHECK(parse_native(print_native(example1(true))) == example1(true));
  std::mt19937 rng(12);
  for (int it = 0; it < 200; ++it) {
    RandomShape shape{1 + rng() % 4, rng() % 3, rng() % 3, rng() % 5, 10, rng() % 2 == 0};
    Problem p = random_problem(rng, shape);
    CHECK(parse_native(print_native(p)) == p);
  }
}

TEST_CASE("emit_stats") {
  Stats s;
  std::string zero = emit_stats(s, SolveStatus::Infeasible, std::nullopt);
  CHECK(zero ==
        R"({"nodes":0,"conflicts_analyzed":0,"learned_linear":0,"learned_disjunctions":0,"fallbacks":0,)"
        R"("avg_learned_length":null,"used_pct":null,"bdchgs_by_learned":0,"status":"Infeasible","objective":null})");
  s.learned_linear = 2;
  s.avg_learned_length = 4.0;
  s.learned_used_in_propagation_pct = 25.0;
  auto j = nlohmann::json::parse(emit_stats(s, SolveStatus::Optimal, Q(-3, 2)));
  CHECK(j.size() == 10);
  CHECK(j["avg_learned_length"].get<double>() == 4.0);
  CHECK(j["used_pct"].get<double>() == 25.0);
  CHECK(j["objective"] == "-3/2");
  CHECK(j["status"] == "Optimal");
}
