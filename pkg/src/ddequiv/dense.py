"""Brute-force dense reference for small circuits.

Deliberately shares nothing with the decision-diagram code: gates are lifted
by explicit basis-index bookkeeping, circuits by sequential matmul.
"""

from __future__ import annotations

import cmath

import numpy as np

from .circuit import Circuit, CircuitError, Gate, gate_unitary

MAX_DENSE_QUBITS = 12
MAX_STATE_QUBITS = 24


def lift(g: Gate, n_qubits: int) -> np.ndarray:
    if n_qubits > MAX_DENSE_QUBITS:
        raise CircuitError(f"dense lift limited to {MAX_DENSE_QUBITS} qubits")
    local = gate_unitary(g)
    ops = g.qubits
    k = len(ops)
    dim = 1 << n_qubits
    shifts = [n_qubits - 1 - q for q in ops]
    mask = 0
    for sh in shifts:
        mask |= 1 << sh
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        rest = col & ~mask
        local_col = 0
        for sh in shifts:
            local_col = (local_col << 1) | ((col >> sh) & 1)
        for local_row in range(1 << k):
            amp = local[local_row, local_col]
            if amp == 0:
                continue
            row = rest
            for i, sh in enumerate(shifts):
                if (local_row >> (k - 1 - i)) & 1:
                    row |= 1 << sh
            out[row, col] = amp
    return out


def circuit_unitary(c: Circuit) -> np.ndarray:
    """U = g_n ... g_1 (first gate applied first), times the circuit's global phase."""
    u = np.eye(1 << c.n_qubits, dtype=complex)
    for g in c.gates:
        if not g.is_unitary:
            continue
        u = lift(g, c.n_qubits) @ u
    if c.global_phase:
        u = u * cmath.exp(1j * c.global_phase)
    return u


def simulate(c: Circuit, state: np.ndarray | None = None) -> np.ndarray:
    """Statevector after the unitary gates of ``c``, starting from |0...0>.

    Wider circuits than :func:`circuit_unitary` allows; measurements and
    barriers are skipped.
    """
    n = c.n_qubits
    if n > MAX_STATE_QUBITS:
        raise CircuitError(f"statevector limited to {MAX_STATE_QUBITS} qubits")
    if state is None:
        psi = np.zeros((2,) * n, dtype=complex)
        psi[(0,) * n] = 1
    else:
        psi = np.asarray(state, dtype=complex).reshape((2,) * n)
    for g in c.gates:
        if not g.is_unitary:
            continue
        ops = list(g.qubits)
        k = len(ops)
        m = gate_unitary(g).reshape((2,) * (2 * k))
        psi = np.tensordot(m, psi, axes=(list(range(k, 2 * k)), ops))
        psi = np.moveaxis(psi, list(range(k)), ops)
    psi = psi.reshape(-1)
    if c.global_phase:
        psi = psi * cmath.exp(1j * c.global_phase)
    return psi


def phase_aligned_distance(u: np.ndarray, v: np.ndarray) -> float:
    """min over theta of max|u - e^{i theta} v|."""
    overlap = np.vdot(v, u)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    return float(np.max(np.abs(u - phase * v)))


def equivalent(u: np.ndarray, v: np.ndarray, tol: float = 1e-9, up_to_global_phase=True) -> bool:
    if u.shape != v.shape:
        return False
    if up_to_global_phase:
        return phase_aligned_distance(u, v) <= tol * max(1.0, float(np.max(np.abs(v))))
    return float(np.max(np.abs(u - v))) <= tol
