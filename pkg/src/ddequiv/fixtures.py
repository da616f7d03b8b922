"""Reproducible test and benchmark circuits."""

from __future__ import annotations

import math
import os
import random

from . import circuit as C
from .circuit import Circuit, Gate, GateKind as K
from .dense import circuit_unitary, equivalent
from .passes import preprocess
from .qec import MappingEntry, QecMapping

SEED_ENV = "QUBEC_SEED"
DEFAULT_SEED = 20231014


def env_seed(default: int = DEFAULT_SEED) -> int:
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw not in (None, "") else default


_ONE_Q = [K.X, K.Y, K.Z, K.H, K.S, K.Sdg, K.T, K.Tdg, K.SX, K.SXdg]
_ROT = [K.RX, K.RY, K.RZ, K.P]


def random_gate(rng: random.Random, n: int, allow_ccx=True) -> Gate:
    roll = rng.random()
    if n >= 3 and allow_ccx and roll < 0.08:
        a, b, c = rng.sample(range(n), 3)
        return C.ccx(a, b, c)
    if n >= 2 and roll < 0.40:
        a, b = rng.sample(range(n), 2)
        kind = rng.choice([K.CX, K.CX, K.CX, K.CZ, K.SWAP])
        if kind is K.SWAP:
            return C.swap(a, b)
        return Gate(kind, (b,), controls=(a,))
    q = rng.randrange(n)
    if roll < 0.55:
        return Gate(rng.choice(_ROT), (q,), params=(rng.uniform(-math.pi, math.pi),))
    if roll < 0.60:
        return C.u3(q, *(rng.uniform(-math.pi, math.pi) for _ in range(3)))
    return Gate(rng.choice(_ONE_Q), (q,))


def random_circuit(rng: random.Random, n: int, n_gates: int, allow_ccx=True) -> Circuit:
    return Circuit(n, [random_gate(rng, n, allow_ccx) for _ in range(n_gates)])


def commuting_shuffle(c: Circuit, rng: random.Random, sweeps: int = 2) -> Circuit:
    """Randomly swap neighbouring gates that act on disjoint qubits."""
    gates = list(c.gates)
    for _ in range(sweeps * max(len(gates), 1)):
        if len(gates) < 2:
            break
        i = rng.randrange(len(gates) - 1)
        if not gates[i].operand_set & gates[i + 1].operand_set:
            gates[i], gates[i + 1] = gates[i + 1], gates[i]
    return c.copy(gates)


def equivalent_variant(c: Circuit, rng: random.Random) -> Circuit:
    """Same unitary, different gate list: passes, CCX decomposition, reorders."""
    out = preprocess(c)
    out = C.decompose_all_ccx(out)
    return commuting_shuffle(out, rng)


def mutant(c: Circuit, rng: random.Random, attempts: int = 50) -> Circuit:
    """Replace one gate so that the unitary changes (checked densely)."""
    ref = circuit_unitary(c)
    for _ in range(attempts):
        gates = list(c.gates)
        i = rng.randrange(len(gates))
        gates[i] = random_gate(rng, c.n_qubits)
        cand = c.copy(gates)
        if not equivalent(circuit_unitary(cand), ref, 1e-6):
            return cand
    raise RuntimeError("could not find an inequivalent mutant")


def interleave_pair() -> tuple[Circuit, Circuit]:
    """A 4-gate circuit and a 19-gate compiled form of it on five qubits.

    The compiled side expands the Toffoli into Clifford+T and X into two SX.
    """
    c1 = Circuit(5, [C.cx(2, 4), C.ccx(0, 1, 3), C.x(0), C.h(2)])
    c2 = Circuit(5, [C.cx(2, 4), *C.decompose_ccx(C.ccx(0, 1, 3)), C.sx(0), C.sx(0), C.h(2)])
    return c1, c2


def toffoli_pair() -> tuple[Circuit, Circuit]:
    g = C.ccx(0, 1, 2)
    return Circuit(3, [g]), Circuit(3, C.decompose_ccx(g))


def bell_pair() -> tuple[Circuit, Circuit]:
    return Circuit(2, [C.h(0), C.cx(0, 1)]), Circuit(2, [C.h(0), C.cx(0, 1)])


# -- QEC fixtures ----------------------------------------------------------
#
# Each returns (original, qec, mapping). The original prepares one qubit in
# a superposition with a relative phase using a single U3; only unitary gates
# count towards the gate totals below (measurements are extra).

PSI = (math.pi / 3, math.pi / 4, 0.0)


def _prep(q=0):
    return C.u3(q, *PSI)


def bit_flip_code() -> tuple[Circuit, Circuit, QecMapping]:
    """Three-qubit repetition code with two syndrome ancillas (5 qubits, 9 gates).

    q0 carries the data, q1/q2 are copies, q3 = q0^q1 and q4 = q0^q2. A
    deliberate X error on q1 shows the code at work; the Toffoli flips q0
    back only when both syndromes fire. q0 alone is measured, so pruning
    keeps just the state preparation.
    """
    qec = Circuit(5, [
        _prep(0),
        C.cx(0, 1), C.cx(0, 2),
        C.x(1),
        C.cx(0, 3), C.cx(1, 3), C.cx(0, 4), C.cx(2, 4),
        C.ccx(3, 4, 0),
        C.measure(0, 0),
    ], n_clbits=1)
    orig = Circuit(1, [_prep(0)])
    mapping = QecMapping((MappingEntry(0, 0, ()),))
    return orig, qec, mapping


def phase_flip_code() -> tuple[Circuit, Circuit, QecMapping]:
    """Three-qubit phase-flip code decoded by majority vote (3 qubits, 13 gates).

    Encode into the Hadamard basis, suffer a Z error on q2, decode and let a
    Toffoli restore q0. Pruning to the measured q0 leaves prep + H + H.
    """
    qec = Circuit(3, [
        _prep(0),
        C.cx(0, 1), C.cx(0, 2),
        C.h(0), C.h(1), C.h(2),
        C.z(2),
        C.h(0), C.h(1), C.h(2),
        C.cx(0, 1), C.cx(0, 2),
        C.ccx(1, 2, 0),
        C.measure(0, 0),
    ], n_clbits=1)
    orig = Circuit(1, [_prep(0)])
    mapping = QecMapping((MappingEntry(0, 0, ()),))
    return orig, qec, mapping


SHOR_LEADERS = (0, 5, 10)


def shor_code() -> tuple[Circuit, Circuit, QecMapping]:
    """Shor's nine-qubit code laid out as three 5-qubit blocks (15 qubits).

    Block b uses qubits 5b..5b+4: a leader, two bit-flip copies and two
    syndrome ancillas. The leaders q0, q5, q10 form the phase-flip layer and
    are the measured qubits. Each block encodes, extracts its bit-flip
    syndrome, corrects its leader and decodes; the phase layer is undone with
    H and CX, leaving q5/q10 as phase syndromes read out with q0.

    Pruning to the leaders keeps prep, 4 CX and 6 H: 11 gates that act as
    the bare preparation on q0, so the mapping pads the original with two
    idle qubits instead of appending copies (``copy: false``).
    """
    gates = [_prep(0)]
    gates += [C.cx(0, 5), C.cx(0, 10), C.h(0), C.h(5), C.h(10)]
    for lead in SHOR_LEADERS:
        r1, r2, a1, a2 = lead + 1, lead + 2, lead + 3, lead + 4
        gates += [C.cx(lead, r1), C.cx(lead, r2)]
        gates += [C.cx(lead, a1), C.cx(r1, a1), C.cx(lead, a2), C.cx(r2, a2)]
        gates += [C.ccx(a1, a2, lead)]
        gates += [C.cx(lead, r1), C.cx(lead, r2)]
    gates += [C.h(0), C.h(5), C.h(10), C.cx(0, 5), C.cx(0, 10)]
    gates += [C.measure(q, i) for i, q in enumerate(SHOR_LEADERS)]
    qec = Circuit(15, gates, n_clbits=3)
    orig = Circuit(1, [_prep(0)])
    mapping = QecMapping((MappingEntry(0, 0, (5, 10), copy=False),))
    return orig, qec, mapping


def duplication_code(n: int = 3) -> tuple[Circuit, Circuit, QecMapping]:
    """``n`` independent qubits, each copied once by a CX (2n qubits, measured)."""
    rng = random.Random(n)
    prep = [C.u3(q, *(rng.uniform(0, math.pi) for _ in range(3))) for q in range(n)]
    gates = list(prep) + [C.cx(q, n + q) for q in range(n)]
    gates += [C.measure(q, q) for q in range(2 * n)]
    qec = Circuit(2 * n, gates, n_clbits=2 * n)
    orig = Circuit(n, list(prep))
    mapping = QecMapping(tuple(MappingEntry(q, q, (n + q,)) for q in range(n)))
    return orig, qec, mapping


QEC_FIXTURES = {
    "bit_flip": bit_flip_code,
    "phase_flip": phase_flip_code,
    "shor": shor_code,
}


def corrupt(qec: Circuit, carrier: int) -> Circuit:
    """Insert an X on ``carrier`` just before its measurement."""
    gates = list(qec.gates)
    at = next(i for i, g in enumerate(gates) if g.kind is K.Measure and g.targets[0] == carrier)
    gates.insert(at, C.x(carrier))
    return qec.copy(gates)
