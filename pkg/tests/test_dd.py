import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ddequiv import circuit as C
from ddequiv.circuit import Circuit
from ddequiv.dd import TERMINAL, DDError, DDPackage
from ddequiv.dense import circuit_unitary, lift
from ddequiv.fixtures import random_circuit

# Expected listings were derived by hand from the quadrant definitions:
# H = 1/sqrt2 [[1,1],[1,-1]], CX = diag(I, X) with qubit 0 the control.
H_DUMP = """root 0.707106781187+0i->n0
n0 level=0 [1+0i->T 1+0i->T 1+0i->T -1+0i->T]"""

CX_DUMP = """root 1+0i->n0
n0 level=0 [1+0i->n1 0 0 1+0i->n2]
n1 level=1 [1+0i->T 0 0 1+0i->T]
n2 level=1 [0 1+0i->T 1+0i->T 0]"""


def test_frozen_small_dumps():
    dd = DDPackage()
    assert dd.dump(dd.make_gate_dd(C.h(0), 1)) == H_DUMP
    assert dd.dump(dd.make_gate_dd(C.cx(0, 1), 2)) == CX_DUMP


@pytest.mark.parametrize("n", range(1, 17))
def test_identity_has_one_node_per_level(n):
    dd = DDPackage()
    e = dd.make_identity(n)
    assert dd.count_nodes(e) == n
    assert dd.is_identity(e, up_to_global_phase=False)


def test_gate_dds_match_dense_lift(rng):
    dd = DDPackage()
    gates = [C.h(1), C.cx(2, 0), C.cz(0, 3), C.swap(1, 3), C.ccx(3, 0, 2), C.mcx((0, 1, 3), 2),
             C.u3(2, 0.4, -1.0, 2.2), C.rx(0, 0.9), C.sxdg(3)]
    for g in gates:
        np.testing.assert_allclose(dd.to_matrix(dd.make_gate_dd(g, 4), 4), lift(g, 4),
                                   atol=1e-12, err_msg=str(g))


def test_from_matrix_round_trips():
    dd = DDPackage()
    u = circuit_unitary(random_circuit(random.Random(5), 3, 20))
    np.testing.assert_allclose(dd.to_matrix(dd.from_matrix(u), 3), u, atol=1e-12)


def test_equal_matrices_share_a_root():
    dd = DDPackage()
    a = dd.make_circuit_dd(Circuit(3, [C.h(0), C.cx(0, 1), C.t(2)]))
    b = dd.make_circuit_dd(Circuit(3, [C.t(2), C.h(0), C.cx(0, 1)]))
    assert a.node is b.node
    assert cmath.isclose(a.weight, b.weight, abs_tol=1e-12)


def test_structurally_identical_nodes_are_deduplicated():
    dd = DDPackage()
    before = dd.live_nodes
    dd.make_identity(5)
    grown = dd.live_nodes - before
    dd.from_matrix(np.eye(32))
    assert dd.live_nodes - before == grown


def test_every_node_is_normalized_after_random_work():
    dd = DDPackage()
    for seed in range(20):
        dd.make_circuit_dd(random_circuit(random.Random(seed), 4, 25))
    assert dd.check_normalized()
    for node in dd.unique.values():
        mags = [abs(e.weight) for e in node.edges]
        # magnitudes within eps of the maximum count as tied
        first = next(i for i, m in enumerate(mags) if m >= max(mags) - dd.eps)
        assert node.edges[first].weight == 1
        assert max(mags) <= 1 + dd.eps


def test_dimension_mismatch_is_loud():
    dd = DDPackage()
    with pytest.raises(DDError):
        dd.multiply(dd.make_identity(2), dd.make_identity(3))


def test_terminal_products():
    dd = DDPackage()
    e = dd.make_gate_dd(C.x(0), 1)
    assert dd.to_matrix(dd.multiply(e, e), 1).tolist() == [[1, 0], [0, 1]]
    assert TERMINAL.level == -1


def test_is_identity_respects_phase_flag():
    dd = DDPackage()
    e = dd.make_circuit_dd(Circuit(2, [], global_phase=0.3))
    assert dd.is_identity(e)
    assert not dd.is_identity(e, up_to_global_phase=False)
    assert not dd.is_identity(dd.make_gate_dd(C.z(1), 2))


def test_garbage_collection_keeps_roots_usable():
    dd = DDPackage()
    c = random_circuit(random.Random(9), 4, 30)
    keep = dd.make_circuit_dd(c)
    for seed in range(5):
        dd.make_circuit_dd(random_circuit(random.Random(100 + seed), 4, 30))
    before = dd.live_nodes
    freed = dd.collect(keep)
    assert freed > 0 and dd.live_nodes == before - freed
    np.testing.assert_allclose(dd.to_matrix(keep, 4), circuit_unitary(c), atol=1e-9)
    # rebuilding after collection still lands on the same canonical node
    assert dd.make_circuit_dd(c).node is keep.node


angles = st.floats(-math.pi, math.pi, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 4), st.integers(0, 20))
def test_memoized_ops_agree_with_fresh_package(seed, n, size):
    c = random_circuit(random.Random(seed), n, size)
    warm = DDPackage()
    for s in range(3):
        warm.make_circuit_dd(random_circuit(random.Random(seed + s + 1), n, size))
    a = warm.to_matrix(warm.make_circuit_dd(c), n)
    fresh = DDPackage()
    b = fresh.to_matrix(fresh.make_circuit_dd(c), n)
    np.testing.assert_allclose(a, b, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(angles, angles, angles)
def test_add_is_commutative_and_matches_dense(t, p, l):
    dd = DDPackage()
    a = dd.make_gate_dd(C.u3(0, t, p, l), 2)
    b = dd.make_gate_dd(C.cx(1, 0), 2)
    ab, ba = dd.add(a, b), dd.add(b, a)
    assert ab.node is ba.node
    np.testing.assert_allclose(dd.to_matrix(ab, 2), lift(C.u3(0, t, p, l), 2) + lift(C.cx(1, 0), 2),
                               atol=1e-9)
