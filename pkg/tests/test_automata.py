import numpy as np
import pytest

from decomp import automata, solver
from decomp.automata import CARule, TriangleCircuit
from decomp.core import FamilySpec, ShapeError, make_family, verify_certificate
from oracles import full_rectangle_run


def test_asap_examples():
    assert automata.asap_schedule(5) == (2, 2)
    assert automata.asap_schedule(4) == (1, 2)
    assert automata.asap_schedule(1) == (0, 0)


@pytest.mark.parametrize("n", range(1, 30))
def test_asap_is_earliest_covering_point(n):
    c, t = automata.asap_schedule(n)
    assert c - t <= 0 and c + t >= n - 1
    if t > 0:
        assert not any(cc - (t - 1) <= 0 and cc + (t - 1) >= n - 1 for cc in range(n))


def test_identity_rule_keeps_input():
    rule = automata.identity_rule()
    trace = automata.ca_run(rule, [1, 0, 1, 1], 7, bits=True)
    assert all(conf.cells == (1, 0, 1, 1) and conf.offset == 0 for conf in trace)


def test_neutral_input_stays_neutral():
    rule = automata.indexing_ca_build(1).rule
    trace = automata.ca_run(rule, [rule.neutral] * 4, 100)
    assert all(not conf.cells for conf in trace[1:])


def test_window_grows_at_most_one_cell_per_side():
    rng = np.random.default_rng(3)
    delta = rng.integers(0, 3, 27)
    delta[26] = 2
    rule = CARule(3, 2, 0, 1, delta)
    trace = automata.ca_run(rule, [0, 1, 1, 0, 1], 10, bits=True)
    for t, conf in enumerate(trace):
        assert conf.offset >= -t and conf.offset + len(conf.cells) <= 5 + t


def test_rule_validation():
    with pytest.raises(ShapeError):
        CARule(2, 0, 0, 1, np.ones(8, dtype=int))  # neutral not stable
    with pytest.raises(ShapeError):
        CARule(2, 0, 0, 1, np.zeros(7, dtype=int))
    with pytest.raises(ShapeError):
        automata.ca_run(automata.identity_rule(), [5], 1)


def test_rule_json_round_trip():
    rule = automata.indexing_ca_build(1).rule
    again = CARule.from_json(rule.to_json())
    assert np.array_equal(again.delta, rule.delta) and again.neutral == rule.neutral


def test_indexing_ca_sample_input():
    ca = automata.indexing_ca_build(1)
    y = [0, 1, 1, 0]
    trace = automata.ca_run(ca.rule, ca.encode(1, y, 0), ca.steps)
    last = trace[-1].state(ca.output_cell, ca.rule.neutral)
    assert ca.answer(last) == y[2]


def test_indexing_ca_zero_matrix():
    ca = automata.indexing_ca_build(2)
    for x in range(4):
        for z in range(4):
            trace = automata.ca_run(ca.rule, ca.encode(x, [0] * 16, z), ca.steps)
            assert ca.answer(trace[-1].state(ca.output_cell, ca.rule.neutral)) == 0


def test_indexing_ca_k1_exhaustive_and_rule_independent_of_k():
    rep = automata.check_indexing_ca(1)
    assert rep.ok and rep.inputs == 64
    assert automata.indexing_ca_build(1).rule is automata.indexing_ca_build(3).rule


def test_indexing_ca_k3_sampled():
    rep = automata.check_indexing_ca(3, samples=300, seed=2)
    assert rep.ok and rep.max_steps <= 4 * 70


def test_triangle_uniform_matches_ca_run():
    rule = automata.indexing_ca_build(1).rule
    ca = automata.indexing_ca_build(1)
    for t_extra in (0, 3):
        n = ca.n
        c, t = automata.asap_schedule(n)
        C = TriangleCircuit.from_rule(rule, n, t + t_extra, ca.input_states())
        bits = [1, 0, 1, 1, 0, 1]
        trace = automata.ca_run(rule, ca.encode_bits(bits), t + t_extra)
        assert automata.triangle_run(C, bits) == trace[-1].state(c, rule.neutral)


def test_triangle_single_cell():
    C = TriangleCircuit(1, 0, 3, neutral=2, zero=0, one=1, seed=0)
    assert automata.triangle_run(C, [1]) == 1 and automata.triangle_run(C, [0]) == 0


def test_triangle_matches_reference_evaluator():
    C = TriangleCircuit.random(8, 4, 3, seed=5)
    inputs = automata.all_inputs(8)
    fast = automata.triangle_run(C, inputs)
    assert all(fast[i] == full_rectangle_run(C, inputs[i].tolist()) for i in range(256))


def test_explicit_circuit_json_round_trip():
    C = TriangleCircuit.random(5, 2, 2, seed=1)
    tables = {(c, t): C.vertex_table(c, t).tolist() for t in range(1, 3) for c in C.cone(t)}
    E = TriangleCircuit(5, 2, 2, C.neutral, C.zero, C.one, vertices=tables)
    E2 = TriangleCircuit.from_json(E.to_json())
    inputs = automata.all_inputs(5)
    assert np.array_equal(automata.triangle_run(C, inputs), automata.triangle_run(E2, inputs))


def test_extraction_examples():
    for delay in (0, 1):
        C = TriangleCircuit.random(8, 4 + delay, 3, seed=delay)
        D = automata.extract_decomposition(C, 2, 4, delay)
        assert verify_certificate(automata.circuit_function(C, 2, 4), D)
        assert D.size <= (2 * 2 + 2 * delay + 1) * 2


def test_extraction_from_indexing_ca():
    ca = automata.indexing_ca_build(1)
    C = TriangleCircuit.from_rule(ca.rule, 6, automata.asap_schedule(6)[1], ca.input_states())
    D = automata.extract_decomposition(C, 1, 4, 0)
    assert verify_certificate(automata.circuit_function(C, 1, 4), D)


def test_extraction_errors():
    C = TriangleCircuit.random(4, 2, 3, seed=0)
    with pytest.raises(ShapeError):
        automata.extract_decomposition(C, 2, 0, 0)
    with pytest.raises(ShapeError):
        automata.extract_decomposition(C, 1, 2, 1)


def test_state_bound_examples():
    assert automata.min_state_bound(4, 0).sigma == 4
    assert automata.min_state_bound(6, 0).sigma == 31
    rep = automata.min_state_bound(1, 0)
    assert rep.sigma == 2 and rep.dc_lower == 2 and rep.width == 3


def test_chaining_to_solver():
    # any sigma=2 circuit at the ASAP schedule for n = 1 + 4 + 1 yields a certificate of
    # at most 3 bits, so it can only compute T_1 if dc(T_1) <= 3
    bound = (2 * 1 + 1) * automata.state_width(2)
    res = solver.exact_dc(make_family(FamilySpec("indexing", k=1)))
    assert res.lower >= 2
    computable = res.lower <= bound
    assert computable or res.status == solver.EXACT
    for seed in range(5):
        C = TriangleCircuit.random(6, automata.asap_schedule(6)[1], 2, seed)
        D = automata.extract_decomposition(C, 1, 4, 0)
        F = automata.circuit_function(C, 1, 4)
        assert D.size <= bound and verify_certificate(F, D)
        assert solver.exact_dc(F).dc <= D.size
