"""Conflict analysis with cutting-plane reductions.

Rationals cross the native boundary as "p/q" strings and come back as
fractions.Fraction.
"""

import json
from fractions import Fraction

from . import _cutca
from ._cutca import (
    OracleRefusal,
    ParseError,
    PreconditionError,
    Problem,
    ReductionFailed,
    load_problem,
    parse_native,
    parse_opb,
)

__all__ = [
    "OracleRefusal",
    "ParseError",
    "PreconditionError",
    "Problem",
    "ReductionFailed",
    "load_problem",
    "oracle_optimum",
    "parse_native",
    "parse_opb",
    "reduce",
    "run_two_phase",
    "solve",
    "validate_row",
]


def _frac(s):
    return None if s is None else Fraction(s)


def _result(d):
    return {
        "status": d["status"],
        "objective": _frac(d["objective"]),
        "witness": None if d["witness"] is None else [Fraction(v) for v in d["witness"]],
        "stats": json.loads(d["stats"]),
        "learned": d["learned"],
    }


def solve(problem, reduction="cmir", learning=True, node_limit=50000, conflict_limit=5000,
          max_learned_length=None, seed=0):
    return _result(_cutca.solve(problem, reduction, learning, node_limit, conflict_limit,
                                max_learned_length, seed))


def run_two_phase(problem, reduction="cmir", node_limit=50000, conflict_limit=5000, seed=0):
    d = _cutca.run_two_phase(problem, reduction, node_limit, conflict_limit, seed)
    return {"phase1": _result(d["phase1"]), "phase2": _result(d["phase2"]),
            "learned_file": d["learned_file"]}


def oracle_optimum(problem):
    d = _cutca.oracle_optimum(problem)
    return {"status": d["status"], "value": _frac(d["value"]),
            "witness": [Fraction(v) for v in d["witness"]]}


def _terms(terms):
    return {k: str(Fraction(v)) for k, v in terms.items()}


def validate_row(problem, terms, rhs, valid_below=None):
    below = None if valid_below is None else str(Fraction(valid_below))
    return _cutca.validate_row(problem, _terms(terms), str(Fraction(rhs)), below)


def reduce(problem, strategy, terms, rhs, var, lower=None, upper=None):
    """Reduce the reason `terms >= rhs` for the variable `var` under the local
    bounds; returns (terms, rhs)."""
    out_terms, out_rhs = _cutca.reduce(problem, strategy, _terms(terms), str(Fraction(rhs)), var,
                                       _terms(lower or {}), _terms(upper or {}))
    return {k: Fraction(v) for k, v in out_terms.items()}, Fraction(out_rhs)
