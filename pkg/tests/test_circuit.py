import math

import numpy as np
import pytest

from ddequiv import circuit as C
from ddequiv.circuit import Circuit, CircuitError, Gate, GateKind as K
from ddequiv.dense import circuit_unitary, equivalent

S2 = 1 / math.sqrt(2)


def test_fixed_matrices():
    np.testing.assert_allclose(C.gate_unitary(C.h(0)), S2 * np.array([[1, 1], [1, -1]]))
    np.testing.assert_allclose(C.gate_unitary(C.sx(0)), 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]))
    np.testing.assert_allclose(C.gate_unitary(C.t(0)), np.diag([1, np.exp(1j * math.pi / 4)]))


def test_cx_places_target_in_low_bit_block():
    # controls first, so the operand order is (control, target)
    expected = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    np.testing.assert_array_equal(C.gate_unitary(C.cx(0, 1)), expected)


def test_u3_matches_textbook_form():
    th, ph, lam = 0.3, -1.1, 2.0
    m = C.u3_matrix(th, ph, lam)
    ref = np.array([
        [math.cos(th / 2), -np.exp(1j * lam) * math.sin(th / 2)],
        [np.exp(1j * ph) * math.sin(th / 2), np.exp(1j * (ph + lam)) * math.cos(th / 2)],
    ])
    np.testing.assert_allclose(m, ref, atol=1e-15)


@pytest.mark.parametrize("bad", [
    lambda: Gate(K.CX, (0,), controls=(0,)),
    lambda: Gate(K.RX, (0,)),
    lambda: Gate(K.H, (0, 1)),
    lambda: Gate(K.X, (-1,)),
    lambda: Gate(K.Measure, (0,)),
])
def test_malformed_gates_are_rejected(bad):
    with pytest.raises(CircuitError):
        bad()


def test_circuit_rejects_out_of_range_qubit():
    with pytest.raises(CircuitError):
        Circuit(2, [C.cx(0, 2)])


def test_adjoint_of_every_kind_inverts_it(rng):
    gates = [C.i_(0), C.x(0), C.y(0), C.z(0), C.h(0), C.s(0), C.sdg(0), C.t(0), C.tdg(0),
             C.sx(0), C.sxdg(0), C.rx(0, 0.7), C.ry(0, -0.4), C.rz(0, 1.9), C.p(0, 0.2),
             C.u3(0, 0.3, 1.2, -2.2), C.cx(0, 1), C.cz(1, 0), C.swap(0, 2), C.ccx(0, 1, 2),
             C.mcx((0, 1, 2), 3)]
    for g in gates:
        prod = C.gate_unitary(C.adjoint_gate(g)) @ C.gate_unitary(g)
        np.testing.assert_allclose(prod, np.eye(prod.shape[0]), atol=1e-12, err_msg=g.kind.value)


def test_inverse_circuit_undoes_circuit():
    c = Circuit(3, [C.h(0), C.cx(0, 1), C.t(2), C.ccx(0, 2, 1), C.rx(1, 0.5)], global_phase=0.4)
    u = circuit_unitary(c) @ circuit_unitary(C.inverse_circuit(c))
    np.testing.assert_allclose(u, np.eye(8), atol=1e-12)


def test_inverse_refuses_measurements():
    with pytest.raises(CircuitError):
        C.inverse_circuit(Circuit(1, [C.measure(0, 0)], n_clbits=1))


def test_ccx_decomposition_is_exact():
    g = C.ccx(2, 0, 1)
    dec = Circuit(3, C.decompose_ccx(g))
    assert len(dec.gates) == 15
    assert sum(x.kind is K.CX for x in dec.gates) == 6
    np.testing.assert_allclose(circuit_unitary(dec), circuit_unitary(Circuit(3, [g])), atol=1e-14)


def test_strip_measurements_reports_measured():
    c = Circuit(3, [C.h(0), C.measure(0, 0), C.barrier(0, 1), C.measure(2, 1)], n_clbits=2)
    bare, measured = C.strip_measurements(c)
    assert [g.kind for g in bare.gates] == [K.H]
    assert measured == {0, 2}


def test_padded_keeps_unitary_on_low_qubits():
    c = Circuit(1, [C.h(0)])
    wide = c.padded(2)
    assert equivalent(circuit_unitary(wide), np.kron(C.gate_unitary(C.h(0)), np.eye(2)))
