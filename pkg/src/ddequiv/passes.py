"""Circuit normalization passes run before equivalence checking.

Fixed order: fuse -> reconstruct_swaps -> remove_diagonal_before_measure ->
reorder. Each pass is deterministic and idempotent.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .circuit import (
    DIAGONAL_KINDS,
    SINGLE_QUBIT_KINDS,
    Circuit,
    Gate,
    GateKind as K,
    gate_unitary,
    swap,
    u3,
    u3_matrix,
)

FUSE_IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class PassConfig:
    fuse: bool = True
    reconstruct_swaps: bool = True
    remove_diagonal_before_measure: bool = True
    reorder: bool = True


def zyz_u3(m: np.ndarray) -> tuple[float, tuple[float, float, float]]:
    """Split a 2x2 unitary into ``e^{i alpha} * U3(theta, phi, lam)``."""
    a00, a10 = m[0, 0], m[1, 0]
    theta = 2 * math.atan2(abs(a10), abs(a00))
    if abs(a00) > 1e-12:
        alpha = cmath.phase(a00)
        v = m * cmath.exp(-1j * alpha)
        if abs(a10) > 1e-12:
            phi = cmath.phase(v[1, 0])
            lam = cmath.phase(-v[0, 1])
        else:
            phi, lam = 0.0, cmath.phase(v[1, 1])
    else:
        # theta == pi: only the off-diagonal entries carry information
        alpha = cmath.phase(a10)
        v = m * cmath.exp(-1j * alpha)
        phi = 0.0
        lam = cmath.phase(-v[0, 1])
    return alpha, (theta, phi, lam)


def _fold(gates: list[Gate]) -> tuple[list[Gate], float]:
    """Product of a single-qubit run as at most one gate, plus dropped phase."""
    if len(gates) == 1:
        return gates, 0.0
    m = np.eye(2, dtype=complex)
    for g in gates:
        m = gate_unitary(g) @ m
    q = gates[0].targets[0]
    alpha, (theta, phi, lam) = zyz_u3(m)
    if abs(m[0, 1]) <= FUSE_IDENTITY_TOL and abs(m[1, 0]) <= FUSE_IDENTITY_TOL \
            and abs(m[1, 1] - m[0, 0]) <= FUSE_IDENTITY_TOL:
        return [], cmath.phase(m[0, 0])
    rebuilt = cmath.exp(1j * alpha) * u3_matrix(theta, phi, lam)
    assert np.max(np.abs(rebuilt - m)) < 1e-9, "ZYZ split drifted"
    return [u3(q, theta, phi, lam)], alpha


def fuse_single_qubit_gates(c: Circuit) -> Circuit:
    """Replace each maximal run of single-qubit gates on a wire with one U3.

    A run ends at the next multi-qubit gate, measurement or barrier on that
    wire; the fused gate takes the slot of the run's first gate. Runs of one
    gate are left as they are; runs whose product is the identity (up to
    phase) disappear. Dropped phases go into ``global_phase`` so the circuit
    unitary is preserved exactly.
    """
    pending: dict[int, tuple[int, list[Gate]]] = {}
    out: list[list[Gate]] = []  # one slot per emitted item, runs filled on flush
    phase = c.global_phase

    def flush(q):
        nonlocal phase
        slot, run = pending.pop(q, (None, None))
        if run:
            fused, dropped = _fold(run)
            out[slot] = fused
            phase += dropped

    for g in c.gates:
        if g.kind in SINGLE_QUBIT_KINDS:
            q = g.targets[0]
            if q not in pending:
                pending[q] = (len(out), [])
                out.append([])
            pending[q][1].append(g)
            continue
        for q in sorted(g.operand_set):
            flush(q)
        out.append([g])
    for q in sorted(pending):
        flush(q)
    res = c.copy([g for slot in out for g in slot])
    res.global_phase = math.remainder(phase, 2 * math.pi) if phase else 0.0
    return res


def _next_touching(gates, start, qubits):
    for j in range(start, len(gates)):
        if gates[j] is not None and gates[j].operand_set & qubits:
            return j
    return None


def _is_cx(g, a, b):
    return g.kind is K.CX and g.controls == (a,) and g.targets == (b,)


def reconstruct_swaps(c: Circuit) -> Circuit:
    """Rewrite CX(a,b) CX(b,a) CX(a,b) as SWAP(a,b).

    The three CXs need only be consecutive on wires a and b; gates on other
    wires may sit between them. The SWAP takes the first CX's slot.
    """
    gates: list[Gate | None] = list(c.gates)
    changed = True
    while changed:
        changed = False
        for i, g in enumerate(gates):
            if g is None or g.kind is not K.CX:
                continue
            a, b = g.controls[0], g.targets[0]
            pair = frozenset((a, b))
            j = _next_touching(gates, i + 1, pair)
            if j is None or not _is_cx(gates[j], b, a):
                continue
            k = _next_touching(gates, j + 1, pair)
            if k is None or not _is_cx(gates[k], a, b):
                continue
            gates[i] = swap(a, b)
            gates[j] = gates[k] = None
            changed = True
        gates = [g for g in gates if g is not None]
    return c.copy(gates)


def remove_diagonal_before_measure(c: Circuit) -> Circuit:
    """Drop diagonal gates whose every operand is next measured.

    Diagonal gates commute with a computational-basis measurement, so the
    outcome distribution is unchanged (the unitary is not).
    """
    measured_next = [False] * c.n_qubits
    kept: list[Gate] = []
    for g in reversed(c.gates):
        ops = g.qubits
        if g.kind is K.Measure:
            measured_next[ops[0]] = True
        elif g.kind in DIAGONAL_KINDS and all(measured_next[q] for q in ops):
            continue
        else:
            for q in ops:
                measured_next[q] = False
        kept.append(g)
    kept.reverse()
    return c.copy(kept)


def _order_key(g: Gate) -> int:
    return min(g.qubits)


def reorder_operations(c: Circuit) -> Circuit:
    """Sort gates by lowest operand index, swapping only disjoint neighbours.

    Equivalent to repeated stable bubble passes: a gate moves left past its
    neighbour only when they share no qubit and the neighbour's key is larger.
    """
    out: list[Gate] = []
    for g in c.gates:
        key = _order_key(g)
        ops = g.operand_set
        pos = len(out)
        while pos > 0:
            prev = out[pos - 1]
            if prev.operand_set & ops or _order_key(prev) <= key:
                break
            pos -= 1
        out.insert(pos, g)
    return c.copy(out)


def preprocess(c: Circuit, cfg: PassConfig | None = None) -> Circuit:
    cfg = cfg or PassConfig()
    if cfg.fuse:
        c = fuse_single_qubit_gates(c)
    if cfg.reconstruct_swaps:
        c = reconstruct_swaps(c)
    if cfg.remove_diagonal_before_measure:
        c = remove_diagonal_before_measure(c)
    if cfg.reorder:
        c = reorder_operations(c)
    return c
