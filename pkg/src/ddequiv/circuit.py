"""Gate-level circuit IR.

Qubit 0 is the most significant bit of every basis index. A gate's local
matrix orders its operands as ``controls + targets``, first operand most
significant.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np


class GateKind(str, Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"
    S = "S"
    Sdg = "Sdg"
    T = "T"
    Tdg = "Tdg"
    SX = "SX"
    SXdg = "SXdg"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    P = "P"
    U3 = "U3"
    CX = "CX"
    CZ = "CZ"
    SWAP = "SWAP"
    CCX = "CCX"
    MCX = "MCX"
    Measure = "Measure"
    Barrier = "Barrier"


K = GateKind

PARAM_COUNT = {K.RX: 1, K.RY: 1, K.RZ: 1, K.P: 1, K.U3: 3}
SINGLE_QUBIT_KINDS = frozenset(
    {K.I, K.X, K.Y, K.Z, K.H, K.S, K.Sdg, K.T, K.Tdg, K.SX, K.SXdg,
     K.RX, K.RY, K.RZ, K.P, K.U3}
)
DIAGONAL_KINDS = frozenset({K.I, K.Z, K.S, K.Sdg, K.T, K.Tdg, K.RZ, K.P, K.CZ})
SELF_INVERSE_KINDS = frozenset(
    {K.I, K.X, K.Y, K.Z, K.H, K.CX, K.CZ, K.SWAP, K.CCX, K.MCX, K.Barrier}
)
NON_UNITARY_KINDS = frozenset({K.Measure, K.Barrier})

# (controls, targets) operand counts; None means "any number >= 1"
_ARITY = {K.CX: (1, 1), K.CZ: (1, 1), K.SWAP: (0, 2), K.CCX: (2, 1), K.Measure: (0, 1)}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    params: tuple[float, ...] = ()
    clbit: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        ops = self.controls + self.targets
        if len(set(ops)) != len(ops):
            raise CircuitError(f"duplicate operand qubits in {self.kind.value}: {ops}")
        if any(q < 0 for q in ops):
            raise CircuitError(f"negative qubit index in {self.kind.value}")
        if len(self.params) != PARAM_COUNT.get(self.kind, 0):
            raise CircuitError(
                f"{self.kind.value} takes {PARAM_COUNT.get(self.kind, 0)} parameter(s), "
                f"got {len(self.params)}"
            )
        kind = self.kind
        if kind in SINGLE_QUBIT_KINDS:
            shape_ok = not self.controls and len(self.targets) == 1
        elif kind is K.MCX:
            shape_ok = len(self.controls) >= 1 and len(self.targets) == 1
        elif kind is K.Barrier:
            shape_ok = not self.controls and len(self.targets) >= 1
        else:
            nc, nt = _ARITY[kind]
            shape_ok = len(self.controls) == nc and len(self.targets) == nt
        if not shape_ok:
            raise CircuitError(
                f"bad operand shape for {kind.value}: controls={self.controls} targets={self.targets}"
            )
        if kind is K.Measure and self.clbit is None:
            raise CircuitError("Measure needs a classical bit")

    @property
    def qubits(self) -> tuple[int, ...]:
        """Operands in local-matrix order (controls first)."""
        return self.controls + self.targets

    @property
    def operand_set(self) -> frozenset[int]:
        return frozenset(self.controls + self.targets)

    @property
    def arity(self) -> int:
        return len(self.controls) + len(self.targets)

    @property
    def is_unitary(self) -> bool:
        return self.kind not in NON_UNITARY_KINDS

    def remap(self, mapping) -> Gate:
        return replace(
            self,
            targets=tuple(mapping[q] for q in self.targets),
            controls=tuple(mapping[q] for q in self.controls),
        )

    def __str__(self):
        args = ",".join(str(q) for q in self.qubits)
        if self.params:
            return f"{self.kind.value}({', '.join(f'{p:.6g}' for p in self.params)})[{args}]"
        return f"{self.kind.value}[{args}]"


# -- constructors --------------------------------------------------------

def _single(kind):
    def make(q, *params):
        return Gate(kind, (q,), params=params)
    make.__name__ = kind.value.lower()
    return make


i_ = _single(K.I)
x = _single(K.X)
y = _single(K.Y)
z = _single(K.Z)
h = _single(K.H)
s = _single(K.S)
sdg = _single(K.Sdg)
t = _single(K.T)
tdg = _single(K.Tdg)
sx = _single(K.SX)
sxdg = _single(K.SXdg)


def rx(q, theta):
    return Gate(K.RX, (q,), params=(theta,))


def ry(q, theta):
    return Gate(K.RY, (q,), params=(theta,))


def rz(q, theta):
    return Gate(K.RZ, (q,), params=(theta,))


def p(q, lam):
    return Gate(K.P, (q,), params=(lam,))


def u3(q, theta, phi, lam):
    return Gate(K.U3, (q,), params=(theta, phi, lam))


def cx(c, tq):
    return Gate(K.CX, (tq,), controls=(c,))


def cz(c, tq):
    return Gate(K.CZ, (tq,), controls=(c,))


def swap(a, b):
    return Gate(K.SWAP, (a, b))


def ccx(c0, c1, tq):
    return Gate(K.CCX, (tq,), controls=(c0, c1))


def mcx(controls, tq):
    return Gate(K.MCX, (tq,), controls=tuple(controls))


def measure(q, c):
    return Gate(K.Measure, (q,), clbit=c)


def barrier(*qs):
    return Gate(K.Barrier, tuple(qs))


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)
    n_clbits: int = 0
    # scalar e^{i*global_phase} factor; only the fusion pass makes it non-zero
    global_phase: float = 0.0

    def __post_init__(self):
        self.gates = list(self.gates)
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate):
        if any(q >= self.n_qubits for q in g.qubits):
            raise CircuitError(f"gate {g} addresses a qubit outside 0..{self.n_qubits - 1}")
        if g.clbit is not None and g.clbit >= self.n_clbits:
            raise CircuitError(f"gate {g} addresses clbit {g.clbit} >= {self.n_clbits}")

    def append(self, g: Gate) -> Circuit:
        self._check(g)
        self.gates.append(g)
        return self

    def extend(self, gates) -> Circuit:
        for g in gates:
            self.append(g)
        return self

    def copy(self, gates=None) -> Circuit:
        return Circuit(
            self.n_qubits,
            list(self.gates if gates is None else gates),
            self.n_clbits,
            self.global_phase,
        )

    @property
    def measured_qubits(self) -> set[tuple[int, int]]:
        return {(g.targets[0], g.clbit) for g in self.gates if g.kind is K.Measure}

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def padded(self, n_qubits: int) -> Circuit:
        """Same gates on a wider register; the extra qubits stay idle."""
        if n_qubits < self.n_qubits:
            raise CircuitError("cannot pad to a narrower width")
        return Circuit(n_qubits, self.gates, self.n_clbits, self.global_phase)


# -- matrices --------------------------------------------------------------

_SQ2 = 1 / math.sqrt(2)

_FIXED = {
    K.I: np.eye(2, dtype=complex),
    K.X: np.array([[0, 1], [1, 0]], dtype=complex),
    K.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    K.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    K.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    K.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    K.Sdg: np.array([[1, 0], [0, -1j]], dtype=complex),
    K.T: np.array([[1, 0], [0, cmath.exp(1j * math.pi / 4)]], dtype=complex),
    K.Tdg: np.array([[1, 0], [0, cmath.exp(-1j * math.pi / 4)]], dtype=complex),
    K.SX: 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    K.SXdg: 0.5 * np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]], dtype=complex),
    K.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}


def u3_matrix(theta, phi, lam):
    c, sn = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -cmath.exp(1j * lam) * sn],
            [cmath.exp(1j * phi) * sn, cmath.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def base_matrix(g: Gate) -> np.ndarray:
    """Matrix acting on the gate's targets, before control expansion."""
    kind = g.kind
    if kind in _FIXED:
        return _FIXED[kind]
    if kind in (K.CX, K.CCX, K.MCX):
        return _FIXED[K.X]
    if kind is K.CZ:
        return _FIXED[K.Z]
    if kind is K.RX:
        (th,) = g.params
        c, sn = math.cos(th / 2), math.sin(th / 2)
        return np.array([[c, -1j * sn], [-1j * sn, c]], dtype=complex)
    if kind is K.RY:
        (th,) = g.params
        c, sn = math.cos(th / 2), math.sin(th / 2)
        return np.array([[c, -sn], [sn, c]], dtype=complex)
    if kind is K.RZ:
        (th,) = g.params
        return np.array([[cmath.exp(-0.5j * th), 0], [0, cmath.exp(0.5j * th)]])
    if kind is K.P:
        (lam,) = g.params
        return np.array([[1, 0], [0, cmath.exp(1j * lam)]], dtype=complex)
    if kind is K.U3:
        return u3_matrix(*g.params)
    raise CircuitError(f"{kind.value} has no unitary")


MAX_DENSE_ARITY = 12


def gate_unitary(g: Gate) -> np.ndarray:
    """Dense 2^k x 2^k matrix over ``g.qubits`` (controls first)."""
    if not g.is_unitary:
        raise CircuitError(f"{g.kind.value} has no unitary")
    if g.arity > MAX_DENSE_ARITY:
        raise CircuitError(f"refusing dense unitary for a {g.arity}-qubit gate")
    base = base_matrix(g)
    nc = len(g.controls)
    if nc == 0:
        return base.copy()
    dim = 2 ** g.arity
    out = np.eye(dim, dtype=complex)
    m = base.shape[0]
    out[dim - m:, dim - m:] = base
    return out


def adjoint_gate(g: Gate) -> Gate:
    kind = g.kind
    if kind is K.Measure:
        raise CircuitError("Measure has no adjoint")
    if kind in SELF_INVERSE_KINDS:
        return g
    swap_pair = {K.S: K.Sdg, K.Sdg: K.S, K.T: K.Tdg, K.Tdg: K.T, K.SX: K.SXdg, K.SXdg: K.SX}
    if kind in swap_pair:
        return replace(g, kind=swap_pair[kind])
    if kind in (K.RX, K.RY, K.RZ, K.P):
        return replace(g, params=(-g.params[0],))
    if kind is K.U3:
        th, ph, lam = g.params
        return replace(g, params=(-th, -lam, -ph))
    raise CircuitError(f"no adjoint rule for {kind.value}")


def inverse_circuit(c: Circuit) -> Circuit:
    if any(g.kind is K.Measure for g in c.gates):
        raise CircuitError("strip measurements before inverting a circuit")
    return Circuit(
        c.n_qubits,
        [adjoint_gate(g) for g in reversed(c.gates)],
        c.n_clbits,
        -c.global_phase,
    )


def decompose_ccx(g: Gate) -> list[Gate]:
    """Standard 15-gate Clifford+T Toffoli network (H, T, Tdg, CX)."""
    if g.kind is not K.CCX:
        raise CircuitError(f"decompose_ccx expects CCX, got {g.kind.value}")
    a, b = g.controls
    (c,) = g.targets
    return [
        h(c),
        cx(b, c), tdg(c),
        cx(a, c), t(c),
        cx(b, c), tdg(c),
        cx(a, c), t(b), t(c), h(c),
        cx(a, b), t(a), tdg(b),
        cx(a, b),
    ]


def decompose_all_ccx(c: Circuit) -> Circuit:
    gates = []
    for g in c.gates:
        gates.extend(decompose_ccx(g) if g.kind is K.CCX else [g])
    return c.copy(gates)


def strip_measurements(c: Circuit) -> tuple[Circuit, set[int]]:
    measured = {g.targets[0] for g in c.gates if g.kind is K.Measure}
    kept = [g for g in c.gates if g.kind not in NON_UNITARY_KINDS]
    return c.copy(kept), measured
