"""Smoke test for the pycovercount extension module."""

import json
import math
from fractions import Fraction

import pycovercount as cc


def check_cnf():
    tri = cc.MonotoneCnf(3, [[0, 1], [1, 2], [0, 2]])
    est = cc.count_cnf(tri)
    assert abs(est.count - 4) < 1e-9, est
    assert cc.exact_count_cnf(tri) == 4
    assert cc.marginal_exact(cc.MonotoneCnf(2, [[0, 1]]), 0) == Fraction(1, 2)
    assert cc.marginal(cc.MonotoneCnf(2, [[0, 1]]), 0, 0) == 1.0

    f = cc.MonotoneCnf.random(7, 12, 14, 2, 4)
    assert cc.MonotoneCnf.from_dimacs(f.to_dimacs()) == f
    exact = cc.exact_count_cnf(f)
    est = cc.count_cnf(f, mode="adaptive", epsilon=0.01)
    assert abs(est.log_count - math.log(exact)) < 0.01, (est, exact)
    assert abs(sum(math.log(v) for _, v in est.factors) - est.log_count) < 1e-12

    uncovered = cc.MonotoneCnf.from_setcover("1 2\n1\n")
    assert cc.count_cnf(uncovered).log_count == float("-inf")

    try:
        cc.MonotoneCnf.from_dimacs("p cnf 2 1\n-1 2 0\n")
    except ValueError as e:
        assert "line 2" in str(e)
    else:
        raise AssertionError("negative literal accepted")

    try:
        cc.count_cnf(f, mode="heuristic", depth=20, node_budget=5)
    except cc.BudgetExceeded:
        pass
    else:
        raise AssertionError("budget not enforced")


def check_matchings():
    tri = cc.Hypergraph(3, [[0, 1], [1, 2], [0, 2]])
    assert abs(cc.count_matchings(tri).count - 4) < 1e-9
    assert cc.exact_count_matchings(tri) == 4
    edge = cc.Hypergraph.from_text("3 1\n1 2 3\n")
    assert edge.is_uniform(3)
    assert abs(cc.count_matchings(edge).count - 2) < 1e-9
    amo = cc.AmoInstance(3, [[0, 1, 2]])
    assert cc.exact_count_matchings(amo) == 4
    assert cc.AmoInstance.from_json(amo.to_json()).constraints == amo.constraints
    h = cc.Hypergraph.random(3, 10, 12, 2, 3)
    norm = h.to_amo().normalize()
    for x in norm.free_vars():
        exact = cc.marginal_amo(norm, x)
        assert isinstance(exact, Fraction) and 0 <= exact <= 1
        assert abs(cc.marginal_amo(norm, x, depth=40) - float(exact)) < 1e-6


def check_decay():
    assert cc.certified_depth(10, 0.1) == 407
    assert cc.certified_depth(10, 0.1, problem="matching") == 755
    k = cc.kappa("cnf-single-layer", [1], [0.5])
    assert abs(k - 1 / (math.sqrt(6) * 0.981)) < 1e-12
    ok, report = cc.verify_decay()
    assert ok
    assert len(json.loads(report)["bounds"]) > 50


if __name__ == "__main__":
    check_cnf()
    check_matchings()
    check_decay()
    print("pycovercount smoke test passed")
