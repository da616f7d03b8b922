import math
import random

import numpy as np
import pytest
from hypothesis import example, given, settings, strategies as st

from ddequiv import circuit as C
from ddequiv.circuit import Circuit, GateKind as K
from ddequiv.dense import circuit_unitary, equivalent
from ddequiv.fixtures import random_circuit
from ddequiv.passes import (
    fuse_single_qubit_gates,
    preprocess,
    reconstruct_swaps,
    remove_diagonal_before_measure,
    reorder_operations,
    zyz_u3,
)

UNITARY_PASSES = [fuse_single_qubit_gates, reconstruct_swaps, reorder_operations, preprocess]


def test_fuse_collapses_a_run_to_one_u3():
    c = Circuit(2, [C.h(0), C.t(0), C.s(0), C.cx(0, 1), C.h(1)])
    out = fuse_single_qubit_gates(c)
    assert [g.kind for g in out.gates] == [K.U3, K.CX, K.H]
    np.testing.assert_allclose(circuit_unitary(out), circuit_unitary(c), atol=1e-12)


def test_fuse_drops_identity_runs_and_keeps_phase():
    c = Circuit(1, [C.s(0), C.s(0), C.z(0)])  # Z Z = I exactly
    out = fuse_single_qubit_gates(c)
    assert out.gates == []
    c = Circuit(1, [C.sx(0), C.sx(0), C.x(0)])  # X X = I, no phase
    assert fuse_single_qubit_gates(c).gates == []
    c = Circuit(1, [C.rz(0, 0.5), C.p(0, -0.5)])  # e^{-0.25i} I
    out = fuse_single_qubit_gates(c)
    assert out.gates == []
    np.testing.assert_allclose(circuit_unitary(out), circuit_unitary(c), atol=1e-12)


@pytest.mark.parametrize("m", [
    C.gate_unitary(C.x(0)), C.gate_unitary(C.y(0)), C.gate_unitary(C.h(0)),
    C.gate_unitary(C.t(0)), C.gate_unitary(C.sxdg(0)), C.gate_unitary(C.u3(0, 1, 2, 3)),
])
def test_zyz_reconstructs(m):
    alpha, (t, p, l) = zyz_u3(m)
    np.testing.assert_allclose(np.exp(1j * alpha) * C.u3_matrix(t, p, l), m, atol=1e-12)


def test_swap_reconstruction_tolerates_unrelated_gates():
    c = Circuit(3, [C.cx(0, 1), C.h(2), C.cx(1, 0), C.t(2), C.cx(0, 1)])
    out = reconstruct_swaps(c)
    assert [g.kind for g in out.gates] == [K.SWAP, K.H, K.T]


def test_swap_reconstruction_blocked_by_intervening_gate():
    c = Circuit(2, [C.cx(0, 1), C.h(0), C.cx(1, 0), C.cx(0, 1)])
    assert reconstruct_swaps(c).gates == c.gates


def test_diagonal_before_measure_is_removed():
    c = Circuit(2, [C.h(0), C.t(0), C.cz(0, 1), C.rz(1, 0.3), C.measure(0, 0), C.measure(1, 1)],
                n_clbits=2)
    out = remove_diagonal_before_measure(c)
    assert [g.kind for g in out.gates] == [K.H, K.Measure, K.Measure]


def test_diagonal_kept_when_a_gate_follows():
    c = Circuit(2, [C.t(0), C.h(0), C.measure(0, 0)], n_clbits=1)
    assert remove_diagonal_before_measure(c).gates == c.gates
    c = Circuit(2, [C.cz(0, 1), C.measure(0, 0)], n_clbits=1)  # q1 never measured
    assert remove_diagonal_before_measure(c).gates == c.gates


def test_reorder_sorts_disjoint_gates_by_lowest_qubit():
    c = Circuit(4, [C.h(3), C.cx(1, 2), C.x(0), C.h(2)])
    out = reorder_operations(c)
    assert [g.qubits for g in out.gates] == [(0,), (1, 2), (2,), (3,)]


def _measured_distribution(c):
    bare, measured = C.strip_measurements(c)
    state = circuit_unitary(bare)[:, 0]
    probs = np.abs(state) ** 2
    n = c.n_qubits
    out = {}
    for idx, pr in enumerate(probs):
        key = tuple((idx >> (n - 1 - q)) & 1 for q in sorted(measured))
        out[key] = out.get(key, 0) + pr
    return out


def test_diagonal_removal_preserves_measurement_statistics(rng):
    for _ in range(20):
        c = random_circuit(rng, 3, 12)
        c = Circuit(3, c.gates + [C.t(0), C.cz(0, 2), C.rz(1, 0.7)] +
                    [C.measure(q, q) for q in range(3)], n_clbits=3)
        out = remove_diagonal_before_measure(c)
        a, b = _measured_distribution(c), _measured_distribution(out)
        assert a.keys() == b.keys()
        for k in a:
            assert math.isclose(a[k], b[k], abs_tol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 5), st.integers(0, 40))
@example(seed=5, n=5, size=19)  # fused runs once drifted right and broke idempotence
def test_unitary_passes_preserve_unitary_and_are_idempotent(seed, n, size):
    c = random_circuit(random.Random(seed), n, size)
    ref = circuit_unitary(c)
    for fn in UNITARY_PASSES:
        once = fn(c)
        assert equivalent(circuit_unitary(once), ref, 1e-9), fn.__name__
        assert fn(once).gates == once.gates, fn.__name__
