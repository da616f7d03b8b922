"""DD-based equivalence checking with four gate-scheduling strategies.

Both circuits are folded onto one working DD that starts at the identity.
Gates of the first circuit multiply from the left (``W <- G W``), adjoints of
the second circuit's gates from the right (``W <- W G^dagger``), so after all
gates ``W = U1 U2^dagger`` whatever order the two sides were interleaved in.
The circuits are equivalent iff ``W`` is the identity DD.

Strategies only differ in that order:

* naive: strict alternation.
* proportional: one gate from the shorter circuit per round, ``k // m``
  (plus one for the first ``k % m`` rounds) from the longer one.
* lookahead: try both sides, keep whichever leaves the smaller DD.
* position match: prefer the side whose next gate sits entirely on qubits
  touched by recently applied gates (the active qubit pool); fall back to
  the lookahead comparison otherwise.
"""

from __future__ import annotations

import cmath
import time
from dataclasses import asdict, dataclass, field
from enum import Enum

from .circuit import Circuit, CircuitError, Gate, adjoint_gate, strip_measurements
from .dd import EPS_NUM, DDPackage, Edge
from .passes import PassConfig, preprocess


class Strategy(str, Enum):
    NAIVE = "naive"
    PROPORTIONAL = "proportional"
    LOOKAHEAD = "lookahead"
    POSITION_MATCH = "position-match"


STRATEGY_ORDER = (Strategy.NAIVE, Strategy.PROPORTIONAL, Strategy.LOOKAHEAD, Strategy.POSITION_MATCH)


class Verdict(str, Enum):
    EQUIVALENT = "equivalent"
    EQUIVALENT_UP_TO_GLOBAL_PHASE = "equivalent_up_to_global_phase"
    NOT_EQUIVALENT = "not_equivalent"

    @property
    def is_equivalent(self):
        return self is not Verdict.NOT_EQUIVALENT


class Side(Enum):
    CIRC1 = 1
    CIRC2 = 2


class CheckTimeout(RuntimeError):
    pass


@dataclass(frozen=True)
class StrategyConfig:
    strategy: Strategy = Strategy.POSITION_MATCH
    tolerance: float = 1e-9
    up_to_global_phase: bool = True
    apply_preprocess: bool = True
    passes: PassConfig = PassConfig()
    eps_num: float = EPS_NUM
    timeout: float | None = None  # seconds

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass
class VerificationResult:
    verdict: Verdict
    strategy: Strategy
    peak_live_nodes: int = 0
    final_nodes: int = 0
    tentative_evaluations: int = 0
    steps_circ1: int = 0
    steps_circ2: int = 0
    wall_time: float = 0.0  # seconds
    schedule: list[int] = field(default_factory=list, repr=False)

    @property
    def equivalent(self) -> bool:
        return self.verdict.is_equivalent

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        d["strategy"] = self.strategy.value
        d.pop("schedule")
        return d


class ActiveQubitPool:
    """Bounded set of qubits touched by recently applied gates."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.members: set[int] = set()

    def __contains__(self, qubits) -> bool:
        return set(qubits) <= self.members

    def fits(self, qubits) -> bool:
        return len(self.members | set(qubits)) <= self.capacity

    def add(self, qubits):
        if not self.fits(qubits):
            raise ValueError(f"pool overflow: {sorted(self.members)} + {sorted(qubits)} > {self.capacity}")
        self.members.update(qubits)

    def reset(self, capacity: int):
        self.capacity = capacity
        self.members.clear()

    def __len__(self):
        return len(self.members)

    def __repr__(self):
        return f"ActiveQubitPool({sorted(self.members)}, capacity={self.capacity})"


class Checker:
    """Working DD plus one cursor into each circuit.

    ``circ1``/``circ2`` must be measurement-free and equally wide.
    """

    def __init__(self, circ1: Circuit, circ2: Circuit, cfg: StrategyConfig = StrategyConfig(),
                 package: DDPackage | None = None):
        if circ1.n_qubits != circ2.n_qubits:
            raise CircuitError(f"width mismatch: {circ1.n_qubits} vs {circ2.n_qubits} qubits")
        for c in (circ1, circ2):
            if any(not g.is_unitary for g in c.gates):
                raise CircuitError("strip measurements and barriers before checking")
        self.cfg = cfg
        self.n = max(circ1.n_qubits, 1)
        self.dd = package or DDPackage(eps=cfg.eps_num)
        self.gates1 = list(circ1.gates)
        self.gates2 = list(circ2.gates)
        self.cursor1 = 0
        self.cursor2 = 0
        ident = self.dd.make_identity(self.n)
        self.working = self.dd._scale(cmath.exp(1j * (circ1.global_phase - circ2.global_phase)), ident)
        self.peak = self.dd.count_nodes(self.working)
        self.tentative = 0
        self.schedule: list[int] = []
        self.deadline = None if cfg.timeout is None else time.perf_counter() + cfg.timeout
        self._gate_cache: dict[Side, tuple[int, Edge]] = {}

    # -- queries ------------------------------------------------------

    def pending(self, side: Side) -> Gate | None:
        if side is Side.CIRC1:
            return self.gates1[self.cursor1] if self.cursor1 < len(self.gates1) else None
        return self.gates2[self.cursor2] if self.cursor2 < len(self.gates2) else None

    @property
    def both_pending(self) -> bool:
        return self.cursor1 < len(self.gates1) and self.cursor2 < len(self.gates2)

    def _gate_dd(self, side: Side) -> Edge:
        idx = self.cursor1 if side is Side.CIRC1 else self.cursor2
        hit = self._gate_cache.get(side)
        if hit is not None and hit[0] == idx:
            return hit[1]
        g = self.pending(side)
        if side is Side.CIRC2:
            g = adjoint_gate(g)
        e = self.dd.make_gate_dd(g, self.n)
        self._gate_cache[side] = (idx, e)
        return e

    # -- stepping -----------------------------------------------------

    def candidate(self, side: Side) -> Edge:
        """Working DD after applying ``side``'s pending gate, without committing."""
        if self.pending(side) is None:
            raise IndexError(f"{side.name} is exhausted")
        g = self._gate_dd(side)
        if side is Side.CIRC1:
            return self.dd.multiply(g, self.working)
        return self.dd.multiply(self.working, g)

    def commit(self, side: Side, result: Edge):
        self.working = result
        if side is Side.CIRC1:
            self.cursor1 += 1
        else:
            self.cursor2 += 1
        self.schedule.append(side.value)
        nodes = self.dd.count_nodes(result)
        if nodes > self.peak:
            self.peak = nodes
        if self.dd.maybe_collect(result):
            # cached gate DDs may point at swept nodes
            self._gate_cache.clear()
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise CheckTimeout(f"exceeded {self.cfg.timeout:g}s")

    def apply_step(self, side: Side) -> Edge:
        result = self.candidate(side)
        self.commit(side, result)
        return result

    def greedy_step(self) -> Side:
        """Evaluate both sides, commit the one with fewer nodes (ties: circ1)."""
        r1 = self.candidate(Side.CIRC1)
        r2 = self.candidate(Side.CIRC2)
        self.tentative += 2
        if self.dd.count_nodes(r2) < self.dd.count_nodes(r1):
            self.commit(Side.CIRC2, r2)
            return Side.CIRC2
        self.commit(Side.CIRC1, r1)
        return Side.CIRC1

    def drain(self):
        while self.pending(Side.CIRC1) is not None:
            self.apply_step(Side.CIRC1)
        while self.pending(Side.CIRC2) is not None:
            self.apply_step(Side.CIRC2)

    # -- verdict ------------------------------------------------------

    def verdict(self) -> Verdict:
        tol = self.cfg.tolerance
        w = self.working
        if self.dd.is_identity(w, tol, up_to_global_phase=False):
            return Verdict.EQUIVALENT
        if self.cfg.up_to_global_phase and self.dd.is_identity(w, tol, up_to_global_phase=True):
            return Verdict.EQUIVALENT_UP_TO_GLOBAL_PHASE
        return Verdict.NOT_EQUIVALENT

    def result(self, strategy: Strategy, started: float) -> VerificationResult:
        return VerificationResult(
            verdict=self.verdict(),
            strategy=strategy,
            peak_live_nodes=self.peak,
            final_nodes=self.dd.count_nodes(self.working),
            tentative_evaluations=self.tentative,
            steps_circ1=self.cursor1,
            steps_circ2=self.cursor2,
            wall_time=time.perf_counter() - started,
            schedule=self.schedule,
        )


# -- strategies --------------------------------------------------------------

def check_naive(c1: Circuit, c2: Circuit, cfg: StrategyConfig = StrategyConfig()) -> VerificationResult:
    started = time.perf_counter()
    ck = Checker(c1, c2, cfg)
    while ck.both_pending:
        ck.apply_step(Side.CIRC1)
        ck.apply_step(Side.CIRC2)
    ck.drain()
    return ck.result(Strategy.NAIVE, started)


def proportional_rounds(m: int, k: int) -> list[int]:
    """Gates taken from the longer circuit in each of the ``m`` rounds (m <= k)."""
    if m == 0:
        return []
    r, extra = divmod(k, m)
    return [r + 1 if i < extra else r for i in range(m)]


def check_proportional(c1: Circuit, c2: Circuit, cfg: StrategyConfig = StrategyConfig()) -> VerificationResult:
    started = time.perf_counter()
    ck = Checker(c1, c2, cfg)
    m1, m2 = len(c1.gates), len(c2.gates)
    small, large = (Side.CIRC1, Side.CIRC2) if m1 <= m2 else (Side.CIRC2, Side.CIRC1)
    for burst in proportional_rounds(min(m1, m2), max(m1, m2)):
        counts = {small: 1, large: burst}
        for side in (Side.CIRC1, Side.CIRC2):
            for _ in range(counts[side]):
                ck.apply_step(side)
    ck.drain()
    return ck.result(Strategy.PROPORTIONAL, started)


def check_lookahead(c1: Circuit, c2: Circuit, cfg: StrategyConfig = StrategyConfig()) -> VerificationResult:
    started = time.perf_counter()
    ck = Checker(c1, c2, cfg)
    while ck.both_pending:
        ck.greedy_step()
    ck.drain()
    return ck.result(Strategy.LOOKAHEAD, started)


def check_position_match(c1: Circuit, c2: Circuit, cfg: StrategyConfig = StrategyConfig(),
                         trace: list | None = None) -> VerificationResult:
    """Active-qubit-pool scheduling.

    If ``trace`` is given, ``(side, pool members, capacity)`` is appended
    after every step while both circuits still have gates.
    """
    started = time.perf_counter()
    ck = Checker(c1, c2, cfg)
    if ck.both_pending:
        pool = ActiveQubitPool(max(ck.pending(Side.CIRC1).arity, ck.pending(Side.CIRC2).arity))
        first = ck.pending(Side.CIRC1)
        ck.apply_step(Side.CIRC1)
        pool.add(first.operand_set)
        if trace is not None:
            trace.append((Side.CIRC1, frozenset(pool.members), pool.capacity))
        while ck.both_pending:
            set1 = ck.pending(Side.CIRC1).operand_set
            set2 = ck.pending(Side.CIRC2).operand_set
            max_size = max(len(set1), len(set2))
            in1, in2 = set1 in pool, set2 in pool
            if in1 and not in2:
                ck.apply_step(Side.CIRC1)
                pool.add(set1)
            elif in2 and not in1:
                ck.apply_step(Side.CIRC2)
                pool.add(set2)
            else:
                side = ck.greedy_step()
                ops = set1 if side is Side.CIRC1 else set2
                if not pool.fits(ops):
                    pool.reset(max_size)
                pool.add(ops)
            if trace is not None:
                trace.append((Side(ck.schedule[-1]), frozenset(pool.members), pool.capacity))
    ck.drain()
    return ck.result(Strategy.POSITION_MATCH, started)


STRATEGY_FUNCS = {
    Strategy.NAIVE: check_naive,
    Strategy.PROPORTIONAL: check_proportional,
    Strategy.LOOKAHEAD: check_lookahead,
    Strategy.POSITION_MATCH: check_position_match,
}


def prepare_pair(c1: Circuit, c2: Circuit, cfg: StrategyConfig = StrategyConfig()) -> tuple[Circuit, Circuit]:
    """Preprocess (if enabled), strip measurements and pad to a common width."""
    if cfg.apply_preprocess:
        c1, c2 = preprocess(c1, cfg.passes), preprocess(c2, cfg.passes)
    c1, _ = strip_measurements(c1)
    c2, _ = strip_measurements(c2)
    width = max(c1.n_qubits, c2.n_qubits, 1)
    return c1.padded(width), c2.padded(width)


def run_check(c1: Circuit, c2: Circuit, cfg: StrategyConfig = StrategyConfig()) -> VerificationResult:
    started = time.perf_counter()
    a, b = prepare_pair(c1, c2, cfg)
    res = STRATEGY_FUNCS[cfg.strategy](a, b, cfg)
    res.wall_time = time.perf_counter() - started
    return res
