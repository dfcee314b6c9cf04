from fractions import Fraction

import pytest

from decomp import solver
from decomp.core import FamilySpec, ShapeError, from_callable, make_family, random_predicate, verify_certificate
from oracles import brute_agreement, split_feasible


def fam(name, **kw):
    return make_family(FamilySpec(name, **kw))


def test_xor_feasibility():
    T = fam("xor", p=1, q=1, r=1)
    res = solver.feasible(T, 1, 1)
    assert res.status == solver.FEASIBLE and verify_certificate(T, res.certificate)
    assert solver.feasible(T, 1, 0).status == solver.INFEASIBLE
    assert not split_feasible(T.values.tolist(), 1, 1, 1, 1, 0)


def test_constant_needs_nothing():
    T = fam("constant", p=2, q=1, r=2, value=1)
    res = solver.feasible(T, 0, 0)
    assert res.status == solver.FEASIBLE and res.certificate.t.tolist() == [1]
    assert solver.exact_dc(T).dc == 0


def test_dc_examples():
    assert solver.exact_dc(fam("xor", p=1, q=1, r=1)).dc == 2
    eq = solver.exact_dc(fam("equality", p=2, q=0, r=2))
    assert eq.status == solver.EXACT and eq.dc == 4
    idx = solver.exact_dc(fam("indexing", k=1))
    assert idx.status == solver.EXACT and idx.dc in (2, 3)
    # frozen after the search was cross-checked against the counting and slice bounds
    assert idx.dc == 3


def test_budget_gives_bounds_only():
    T = fam("indexing", k=1)
    res = solver.exact_dc(T, solver.SearchBudget(max_nodes=1))
    assert res.status == solver.BOUNDS_ONLY and res.dc is None
    assert (res.lower, res.upper) == (0, 3)
    assert verify_certificate(T, res.certificate)
    with pytest.raises(solver.BudgetExhausted):
        solver.feasible(T, 1, 1, solver.SearchBudget(max_nodes=1, allow_unknown=False))


def test_max_m_caps_search():
    res = solver.exact_dc(fam("equality", p=2, q=0, r=2), solver.SearchBudget(max_m=1))
    assert res.status == solver.BOUNDS_ONLY and res.lower == 2 and res.upper == 4


def test_parallel_matches_serial():
    for seed in range(5):
        T = random_predicate(1, 2, 1, seed)
        a = solver.exact_dc(T, workers=1)
        b = solver.exact_dc(T, workers=3)
        assert (a.dc, a.split, a.certificate) == (b.dc, b.split, b.certificate)


def test_split_examples():
    T = random_predicate(1, 2, 1, seed=2)
    D = solver.upper_bound_split(T, 1)
    assert (D.u, D.v) == (2, 2) and verify_certificate(T, D)
    D = solver.upper_bound_split(T, T.q)
    assert D.a.tolist() == list(range(8)) and D.b.tolist() == [i & 1 for i in range(8)]
    D = solver.upper_bound_split(T, 0)
    assert D.a.tolist() == [x for x in range(2) for _ in range(4)] and D.b.tolist() == list(range(8))
    with pytest.raises(ValueError):
        solver.upper_bound_split(T, 3)


def test_slice_examples():
    eq = fam("equality", p=1, q=0, r=1)
    D = solver.upper_bound_slice(eq, "right")
    assert D.size == 3 and verify_certificate(eq, D)
    const = fam("constant", p=1, q=1, r=2, value=0)
    assert solver.upper_bound_slice(const).size == 2 ** 2 + 2
    T = random_predicate(3, 1, 1, seed=5)
    D = solver.upper_bound_slice(T, "left")
    assert D.size == 2 ** 3 + 3 and verify_certificate(T, D)


def test_counting_examples():
    rep = solver.counting_lower_bound(8, 16, 8)
    assert rep.m == 31 and rep.check()
    assert rep.evaluations[31]["total"] == 5 + 31 * 2 ** 24 * 2 + 2 ** 31
    assert solver.counting_lower_bound(2, 4, 2).m == 1
    empty = solver.counting_lower_bound(0, 0, 0)
    assert empty.m is None and empty.check() and empty.to_json()["vacuous"]


def test_approx_examples():
    assert solver.counting_lower_bound_approx(8, 16, 8, Fraction(1, 4)).m == 23
    assert solver.counting_lower_bound_approx(8, 16, 8, 0).m == 31
    for eps in (Fraction(1, 2), Fraction(-1, 3)):
        with pytest.raises(ValueError):
            solver.counting_lower_bound_approx(1, 1, 1, eps)


def test_indexing_formula():
    assert [solver.indexing_lower_bound(k).m for k in (1, 2, 5)] == [2, 4, 32]
    assert solver.indexing_lower_bound(3).check()


def test_best_agreement_examples():
    xor = fam("xor", p=1, q=1, r=1)
    assert solver.best_agreement(xor, 0, 0).value == Fraction(1, 2)
    value, cert = solver.best_agreement(xor, 1, 1)
    assert value == 1 and verify_certificate(xor, cert)


def test_best_agreement_equality_matches_enumeration():
    eq = fam("equality", p=1, q=0, r=1)
    res = solver.best_agreement(eq, 1, 0)
    assert res.value == brute_agreement(eq.values.tolist(), 1, 0, 1, 1, 0) == Fraction(1, 2)
    assert res.optimal


def test_best_agreement_against_enumeration_random():
    for seed in range(20):
        T = random_predicate(1, 1, 1, seed)
        for u, v in ((0, 1), (1, 0), (1, 1)):
            assert solver.best_agreement(T, u, v).value == brute_agreement(T.values.tolist(), 1, 1, 1, u, v)


def test_best_agreement_guard():
    T = random_predicate(3, 3, 1, seed=1)
    with pytest.raises(ShapeError):
        solver.best_agreement(T, 1, 1)
    T = random_predicate(1, 1, 1, seed=1)
    with pytest.raises(ShapeError):
        solver.best_agreement(T, 3, 2)
    assert solver.best_agreement(T, 3, 2, override_guard=True).value == 1


def test_result_json_has_no_timing():
    res = solver.exact_dc(fam("xor", p=1, q=1, r=1))
    assert "seconds" not in res.to_json() and solver.check_result(fam("xor", p=1, q=1, r=1), res)


def test_mirror_symmetry_examples():
    for seed in range(10):
        T = random_predicate(1, 1, 2, seed)
        assert solver.exact_dc(T).dc == solver.exact_dc(T.mirror()).dc
