import itertools
import math
import random

import pytest

from ddequiv import circuit as C
from ddequiv import fixtures as F
from ddequiv.circuit import Circuit, CircuitError
from ddequiv.dense import circuit_unitary, equivalent
from ddequiv.equivalence import (
    ActiveQubitPool,
    CheckTimeout,
    Checker,
    Side,
    Strategy,
    StrategyConfig,
    Verdict,
    check_position_match,
    proportional_rounds,
    run_check,
)


def cfg(strategy, **kw):
    return StrategyConfig(strategy=strategy, **kw)


def test_bell_is_equivalent(strategy):
    a, b = F.bell_pair()
    assert run_check(a, b, cfg(strategy)).verdict is Verdict.EQUIVALENT


def test_extra_x_is_caught(strategy):
    a, b = F.bell_pair()
    b = b.copy(b.gates + [C.x(1)])
    assert run_check(a, b, cfg(strategy)).verdict is Verdict.NOT_EQUIVALENT


def test_toffoli_against_clifford_t(strategy):
    a, b = F.toffoli_pair()
    res = run_check(a, b, cfg(strategy, apply_preprocess=False))
    assert res.verdict is Verdict.EQUIVALENT
    assert res.steps_circ1 == 1 and res.steps_circ2 == 15


def test_global_phase_handling(strategy):
    a = Circuit(1, [C.rz(0, 0.8)])
    b = Circuit(1, [C.p(0, 0.8)])  # rz = e^{-0.4i} p
    res = run_check(a, b, cfg(strategy, apply_preprocess=False))
    assert res.verdict is Verdict.EQUIVALENT_UP_TO_GLOBAL_PHASE
    res = run_check(a, b, cfg(strategy, apply_preprocess=False, up_to_global_phase=False))
    assert res.verdict is Verdict.NOT_EQUIVALENT
    b = b.copy()
    b.global_phase = -0.4
    assert run_check(a, b, cfg(strategy, apply_preprocess=False)).verdict is Verdict.EQUIVALENT


def test_width_mismatch_is_padded(strategy):
    a = Circuit(2, [C.h(0)])
    b = Circuit(3, [C.h(0)])
    assert run_check(a, b, cfg(strategy)).equivalent


def test_empty_circuits(strategy):
    assert run_check(Circuit(0), Circuit(0), cfg(strategy)).verdict is Verdict.EQUIVALENT


def test_checker_rejects_measurement_without_stripping():
    with pytest.raises(CircuitError):
        Checker(Circuit(1, [C.measure(0, 0)], n_clbits=1), Circuit(1))


def test_timeout_raises():
    rng = random.Random(3)
    big = F.random_circuit(rng, 8, 400)
    with pytest.raises(CheckTimeout):
        run_check(big, F.equivalent_variant(big, rng), cfg(Strategy.LOOKAHEAD, timeout=1e-4))


def test_proportional_rounds():
    assert proportional_rounds(4, 19) == [5, 5, 5, 4]
    assert proportional_rounds(3, 3) == [1, 1, 1]
    assert sum(proportional_rounds(7, 50)) == 50
    assert proportional_rounds(0, 5) == []


def test_lookahead_counts_two_evaluations_per_contested_step():
    a, b = F.toffoli_pair()
    res = run_check(a, b, cfg(Strategy.LOOKAHEAD, apply_preprocess=False))
    # one CCX against 15 gates: the CCX is taken at some greedy step, after
    # which circuit 2 drains without comparisons
    greedy_steps = res.tentative_evaluations // 2
    assert res.tentative_evaluations % 2 == 0
    assert 1 <= greedy_steps <= 15
    assert res.schedule.count(1) == 1


def test_position_match_skips_comparisons_inside_the_pool():
    a, b = F.toffoli_pair()
    res = run_check(a, b, cfg(Strategy.POSITION_MATCH, apply_preprocess=False))
    # the CCX fills the pool with all three qubits, every later gate fits
    assert res.tentative_evaluations == 0
    assert res.schedule[0] == 1


def test_pool_never_exceeds_capacity():
    rng = random.Random(11)
    for _ in range(25):
        c = F.random_circuit(rng, 5, 30)
        d = F.equivalent_variant(c, rng)
        trace = []
        check_position_match(c, d.padded(c.n_qubits), StrategyConfig(apply_preprocess=False), trace)
        for _side, members, capacity in trace:
            assert len(members) <= capacity


def test_pool_overflow_is_loud():
    pool = ActiveQubitPool(2)
    pool.add({0, 1})
    assert {0} in pool and {0, 2} not in pool
    with pytest.raises(ValueError):
        pool.add({2})


def _all_interleavings(m, n):
    for picks in itertools.combinations(range(m + n), m):
        chosen = set(picks)
        yield [Side.CIRC1 if i in chosen else Side.CIRC2 for i in range(m + n)]


@pytest.mark.parametrize("last", [C.tdg(1), C.t(1)], ids=["equivalent", "mutant"])
def test_every_interleaving_gives_the_dense_verdict(last):
    # the final working DD is U1 U2^dagger whatever the schedule; S Tdg = T
    c1 = Circuit(2, [C.h(0), C.cx(0, 1), C.t(1)])
    c2 = Circuit(2, [C.h(0), C.cx(0, 1), C.s(1), last])
    truth = equivalent(circuit_unitary(c1), circuit_unitary(c2))
    orders = list(_all_interleavings(3, 4))
    assert len(orders) == 35
    for order in orders:
        ck = Checker(c1, c2)
        for side in order:
            ck.apply_step(side)
        assert ck.verdict().is_equivalent == truth
    for strat in Strategy:
        assert run_check(c1, c2, cfg(strat, apply_preprocess=False)).equivalent == truth


def test_verdicts_agree_with_dense_oracle_on_random_pairs():
    rng = random.Random(77)
    for i in range(12):
        c = F.random_circuit(rng, rng.randint(2, 5), rng.randint(5, 25))
        d = F.equivalent_variant(c, rng) if i % 2 else F.mutant(c, rng)
        truth = equivalent(circuit_unitary(c), circuit_unitary(d))
        for strat in Strategy:
            assert run_check(c, d, cfg(strat)).equivalent == truth, (i, strat)


def test_result_dict_is_serializable():
    a, b = F.bell_pair()
    d = run_check(a, b).to_dict()
    assert d["verdict"] == "equivalent" and d["strategy"] == "position-match"
    assert "schedule" not in d and math.isfinite(d["wall_time"])
