#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>

#include "cutca/io.hpp"
#include "cutca/oracle.hpp"
#include "cutca/search.hpp"

namespace py = pybind11;
using namespace cutca;

namespace {

using NamedTerms = std::map<std::string, std::string>;

std::vector<std::string> point_strings(const std::vector<Rational>& x) {
  std::vector<std::string> out;
  for (const auto& v : x) out.push_back(to_string(v));
  return out;
}

NamedTerms named(const LinearConstraint::Terms& t, const Problem& p) {
  NamedTerms out;
  for (const auto& [v, a] : t) out[p.names()[v]] = to_string(a);
  return out;
}

LinearConstraint::Terms indexed(const NamedTerms& t, const Problem& p) {
  LinearConstraint::Terms out;
  for (const auto& [name, a] : t) out[p.index_of(name)] += parse_rational(a);
  return out;
}

SolverConfig make_config(const std::string& reduction, bool learning, std::size_t node_limit,
                         std::size_t conflict_limit, std::optional<std::size_t> max_len, std::uint64_t seed) {
  SolverConfig cfg;
  cfg.strategy = parse_strategy(reduction);
  cfg.enable_learning = learning;
  cfg.node_limit = node_limit;
  cfg.conflict_limit = conflict_limit;
  cfg.max_learned_length = max_len;
  cfg.seed = seed;
  return cfg;
}

py::dict result_dict(const SolveResult& r) {
  py::dict d;
  d["status"] = to_string(r.status);
  d["objective"] = r.objective ? py::object(py::str(to_string(*r.objective))) : py::object(py::none());
  d["witness"] = r.witness ? py::object(py::cast(point_strings(*r.witness))) : py::object(py::none());
  d["stats"] = emit_stats(r.stats, r.status, r.objective);
  d["learned"] = r.learned.size();
  return d;
}

}  // namespace

PYBIND11_MODULE(_cutca, m) {
  m.doc() = "Conflict analysis with cutting-plane reductions (native core)";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<ReductionFailed>(m, "ReductionFailed", PyExc_RuntimeError);
  py::register_exception<OracleRefusal>(m, "OracleRefusal", PyExc_RuntimeError);

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("num_vars", &Problem::num_vars)
      .def_property_readonly("names", &Problem::names)
      .def_property_readonly("kinds",
                             [](const Problem& p) {
                               std::vector<std::string> out;
                               for (const auto& v : p.variables()) out.push_back(to_string(v.kind));
                               return out;
                             })
      .def_property_readonly("constraints",
                             [](const Problem& p) {
                               std::vector<std::pair<NamedTerms, std::string>> out;
                               for (const auto& c : p.constraints()) out.push_back({named(c.terms(), p), to_string(c.rhs())});
                               return out;
                             })
      .def_property_readonly("objective",
                             [](const Problem& p) -> std::optional<NamedTerms> {
                               if (!p.objective()) return std::nullopt;
                               return named(*p.objective(), p);
                             })
      .def("to_native", &print_native)
      .def("__eq__", [](const Problem& a, const Problem& b) { return a == b; });

  m.def("parse_opb", [](const std::string& text) { return parse_opb(text); });
  m.def("parse_native", [](const std::string& text) { return parse_native(text); });
  m.def("load_problem", &load_problem);

  m.def(
      "solve",
      [](const Problem& p, const std::string& reduction, bool learning, std::size_t node_limit,
         std::size_t conflict_limit, std::optional<std::size_t> max_len, std::uint64_t seed) {
        SolveResult r;
        {
          py::gil_scoped_release release;
          r = solve(p, make_config(reduction, learning, node_limit, conflict_limit, max_len, seed));
        }
        return result_dict(r);
      },
      py::arg("problem"), py::arg("reduction") = "cmir", py::arg("learning") = true,
      py::arg("node_limit") = SolverConfig{}.node_limit, py::arg("conflict_limit") = SolverConfig{}.conflict_limit,
      py::arg("max_learned_length") = py::none(), py::arg("seed") = 0);

  m.def(
      "run_two_phase",
      [](const Problem& p, const std::string& reduction, std::size_t node_limit, std::size_t conflict_limit,
         std::uint64_t seed) {
        TwoPhaseResult r;
        {
          py::gil_scoped_release release;
          r = run_two_phase(p, make_config(reduction, true, node_limit, conflict_limit, std::nullopt, seed));
        }
        py::dict d;
        d["phase1"] = result_dict(r.phase1);
        d["phase2"] = result_dict(r.phase2);
        d["learned_file"] = r.learned_file;
        return d;
      },
      py::arg("problem"), py::arg("reduction") = "cmir", py::arg("node_limit") = SolverConfig{}.node_limit,
      py::arg("conflict_limit") = SolverConfig{}.conflict_limit, py::arg("seed") = 0);

  m.def("oracle_optimum", [](const Problem& p) {
    OracleOptimum o = oracle_optimum(p);
    const char* status = o.status == OracleOptimum::Status::Optimal      ? "Optimal"
                         : o.status == OracleOptimum::Status::Infeasible ? "Infeasible"
                                                                         : "Unbounded";
    py::dict d;
    d["status"] = status;
    d["value"] = o.status == OracleOptimum::Status::Optimal ? py::object(py::str(to_string(o.value))) : py::object(py::none());
    d["witness"] = point_strings(o.witness);
    return d;
  });

  m.def(
      "validate_row",
      [](const Problem& p, const NamedTerms& terms, const std::string& rhs, std::optional<std::string> below) {
        std::optional<Rational> vb;
        if (below) vb = parse_rational(*below);
        return validate_learned(p, LinearConstraint(indexed(terms, p), parse_rational(rhs)), vb);
      },
      py::arg("problem"), py::arg("terms"), py::arg("rhs"), py::arg("valid_below") = py::none());

  m.def(
      "reduce",
      [](const Problem& p, const std::string& strategy, const NamedTerms& terms, const std::string& rhs,
         const std::string& var, const std::map<std::string, std::string>& lower,
         const std::map<std::string, std::string>& upper) {
        Box local = p.domain().global;
        for (const auto& [n, v] : lower) local.lb[p.index_of(n)] = parse_rational(v);
        for (const auto& [n, v] : upper) local.ub[p.index_of(n)] = parse_rational(v);
        LinearConstraint reason(indexed(terms, p), parse_rational(rhs));
        VarIndex r = p.index_of(var);
        LinearConstraint out;
        switch (parse_strategy(strategy)) {
          case ReductionStrategy::Clause:
            out = reduce_clause(reason, r, local, p.domain());
            break;
          case ReductionStrategy::CoefTight:
            out = reduce_coeftight(reason, r, local, p.domain());
            break;
          case ReductionStrategy::WMir:
            out = reduce_wmir(reason, r, local, p.domain());
            break;
          case ReductionStrategy::CMir:
            out = reduce_cmir(reason, r, local, p.domain());
            break;
        }
        return std::make_pair(named(out.terms(), p), to_string(out.rhs()));
      },
      py::arg("problem"), py::arg("strategy"), py::arg("terms"), py::arg("rhs"), py::arg("var"),
      py::arg("lower") = std::map<std::string, std::string>{}, py::arg("upper") = std::map<std::string, std::string>{});
}
