"""Decision-diagram package for 2^n x 2^n complex matrices.

Level 0 is the root and corresponds to qubit 0 (the most significant index
bit). Each node splits its matrix into quadrants ordered 00, 01, 10, 11 as
``2 * row_bit + col_bit``. Levels are never skipped: every path from a root
visits one node per qubit, except that zero-weight edges point straight at
the terminal.

Nodes are normalized so that the first child whose magnitude equals the
maximum child magnitude (within eps) carries weight exactly 1. Together with
the complex table (which snaps numerically close weights onto one stored
value) and the unique table, this makes equal matrices share one root node.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .circuit import CircuitError, Gate, base_matrix

EPS_NUM = 1e-10
MAX_QUBITS = 64
MAX_DENSE_QUBITS = 12


class DDError(ValueError):
    pass


class Node:
    __slots__ = ("level", "edges", "height", "is_identity", "__weakref__")

    def __init__(self, level, edges, height, is_identity=False):
        self.level = level
        self.edges = edges
        self.height = height
        self.is_identity = is_identity

    def __repr__(self):
        if self.edges is None:
            return "Node(terminal)"
        return f"Node(level={self.level}, id={id(self):#x})"


TERMINAL = Node(-1, None, 0)


class Edge(NamedTuple):
    weight: complex
    node: Node

    @property
    def is_terminal(self):
        return self.node is TERMINAL

    @property
    def is_zero(self):
        return self.weight == 0


ZERO = Edge(0j, TERMINAL)
ONE = Edge(1 + 0j, TERMINAL)


class ComplexTable:
    """Snaps complex values that agree within ``eps`` componentwise onto one
    stored representative.

    Values are bucketed on an ``eps`` grid; a lookup scans the 3x3 neighbour
    buckets, so any stored value within ``eps`` is found.
    """

    def __init__(self, eps=EPS_NUM):
        self.eps = eps
        self._buckets: dict[tuple[int, int], list[complex]] = {}
        for v in (0j, 1 + 0j, -1 + 0j, 1j, -1j):
            self.lookup(v)

    def __len__(self):
        return sum(len(b) for b in self._buckets.values())

    def lookup(self, z: complex) -> complex:
        eps = self.eps
        re, im = z.real, z.imag
        if abs(re) < eps and abs(im) < eps:
            return 0j
        if not (math.isfinite(re) and math.isfinite(im)):
            raise DDError(f"non-finite weight {z}")
        kr, ki = math.floor(re / eps), math.floor(im / eps)
        buckets = self._buckets
        for dr in (0, -1, 1):
            for di in (0, -1, 1):
                for v in buckets.get((kr + dr, ki + di), ()):
                    if abs(v.real - re) <= eps and abs(v.imag - im) <= eps:
                        return v
        v = complex(re, im)
        buckets.setdefault((kr, ki), []).append(v)
        return v


class DDPackage:
    """One engine instance: complex table, unique table and compute tables.

    Not thread-safe; create one per worker.
    """

    def __init__(self, eps=EPS_NUM, gc_watermark=200_000):
        self.eps = eps
        self.ctable = ComplexTable(eps)
        self.unique: dict[tuple, Node] = {}
        self.mult_cache: dict[tuple[Node, Node], Edge] = {}
        self.add_cache: dict[tuple, Edge] = {}
        self._identity: dict[int, Edge] = {}
        self._pinned: dict[Node, int] = {}
        self.gc_watermark = gc_watermark
        self.peak_unique = 0
        self.collections = 0

    # -- construction --------------------------------------------------

    def _edge(self, w: complex, node: Node) -> Edge:
        w = self.ctable.lookup(w)
        if w == 0:
            return ZERO
        return Edge(w, node)

    def make_node(self, level: int, children) -> Edge:
        """Normalized, hash-consed node for ``level`` with 4 child edges."""
        mags = [abs(e.weight) for e in children]
        top = max(mags)
        if top < self.eps:
            return ZERO
        cutoff = top - self.eps * max(1.0, top)
        idx = next(i for i, m in enumerate(mags) if m >= cutoff)
        norm = children[idx].weight
        lookup = self.ctable.lookup
        kids = []
        height = None
        for i, e in enumerate(children):
            if i == idx:
                kids.append(Edge(1 + 0j, e.node))
            else:
                w = lookup(e.weight / norm) if e.weight != 0 else 0j
                kids.append(ZERO if w == 0 else Edge(w, e.node))
            if kids[-1].node is not TERMINAL:
                h = kids[-1].node.height
                if height is not None and h != height:
                    raise DDError("children of a node disagree on height")
                height = h
        if height is None:
            height = 0
        for e in kids:
            if e.node is TERMINAL and e.weight != 0 and height != 0:
                raise DDError("non-zero terminal edge above the bottom level")
        kids = tuple(kids)
        key = (level, kids)
        node = self.unique.get(key)
        if node is None:
            node = Node(level, kids, height + 1)
            self.unique[key] = node
            if len(self.unique) > self.peak_unique:
                self.peak_unique = len(self.unique)
        return self._edge(norm, node)

    def make_identity(self, n_qubits: int) -> Edge:
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise DDError(f"identity needs 1..{MAX_QUBITS} qubits, got {n_qubits}")
        cached = self._identity.get(n_qubits)
        if cached is not None and cached.node.is_identity:
            return cached
        e = ONE
        for level in range(n_qubits - 1, -1, -1):
            e = self.make_node(level, (e, ZERO, ZERO, e))
            e.node.is_identity = True
        self._identity[n_qubits] = e
        self._pinned[e.node] = self._pinned.get(e.node, 0) + 1
        return e

    def make_gate_dd(self, gate: Gate, n_qubits: int) -> Edge:
        """DD of ``gate`` lifted to ``n_qubits``.

        Built structurally level by level; controls contribute a single
        ``|1><1|`` branch, so multi-controlled gates never touch a dense
        2^n matrix. A controlled gate is assembled as ``I + P_c (U - I)``.
        """
        if not gate.is_unitary:
            raise DDError(f"{gate.kind.value} has no unitary")
        ops = gate.qubits
        if any(q >= n_qubits for q in ops):
            raise DDError(f"gate {gate} exceeds {n_qubits} qubits")
        try:
            base = base_matrix(gate)
        except CircuitError as exc:
            raise DDError(str(exc)) from exc
        controls = set(gate.controls)
        if controls:
            base = base - np.eye(base.shape[0])
        tpos = {q: i for i, q in enumerate(gate.targets)}
        nt = len(gate.targets)
        last = max(ops)
        memo = {}
        ident_below = {}

        def ident(level):
            if level >= n_qubits:
                return ONE
            if level not in ident_below:
                ident_below[level] = self.make_identity_from(level, n_qubits)
            return ident_below[level]

        def build(level, row, col):
            # row/col: bits already fixed on targets, indexed by target position
            if level > last:
                w = complex(base[row, col])
                sub = ident(level)
                return ZERO if abs(w) < self.eps else Edge(w * sub.weight, sub.node)
            key = (level, row, col)
            if key in memo:
                return memo[key]
            if level in controls:
                below = build(level + 1, row, col)
                kids = (ZERO, ZERO, ZERO, below)
            elif level in tpos:
                bit = nt - 1 - tpos[level]
                kids = tuple(
                    build(level + 1, row | (rb << bit), col | (cb << bit))
                    for rb in (0, 1) for cb in (0, 1)
                )
            else:
                below = build(level + 1, row, col)
                kids = (below, ZERO, ZERO, below)
            e = self.make_node(level, kids)
            memo[key] = e
            return e

        e = build(0, 0, 0)
        if controls:
            e = self.add(self.make_identity(n_qubits), e)
        return e

    def make_identity_from(self, level: int, n_qubits: int) -> Edge:
        """Identity over qubits ``level .. n_qubits-1``."""
        e = self.make_identity(n_qubits)
        while e.node.level < level:
            e = e.node.edges[0]
        return e

    def make_circuit_dd(self, circuit) -> Edge:
        """Unitary of a measurement-free circuit, global phase included."""
        n = max(circuit.n_qubits, 1)
        e = self._scale(complex(math.cos(circuit.global_phase), math.sin(circuit.global_phase)),
                        self.make_identity(n))
        for g in circuit.gates:
            if not g.is_unitary:
                raise CircuitError(f"{g.kind.value} has no unitary")
            e = self.multiply(self.make_gate_dd(g, n), e)
        return e

    def from_matrix(self, m: np.ndarray) -> Edge:
        """DD of a dense matrix (debug and test aid)."""
        m = np.asarray(m, dtype=complex)
        dim = m.shape[0]
        n = dim.bit_length() - 1
        if m.shape != (dim, dim) or 1 << n != dim or n == 0:
            raise DDError("expected a square 2^n matrix with n >= 1")

        def rec(block, level):
            if block.shape[0] == 1:
                return self._edge(complex(block[0, 0]), TERMINAL)
            half = block.shape[0] // 2
            kids = (
                rec(block[:half, :half], level + 1),
                rec(block[:half, half:], level + 1),
                rec(block[half:, :half], level + 1),
                rec(block[half:, half:], level + 1),
            )
            return self.make_node(level, kids)

        return rec(m, 0)

    # -- arithmetic ------------------------------------------------------

    def _scale(self, w: complex, e: Edge) -> Edge:
        if e.weight == 0 or w == 0:
            return ZERO
        return self._edge(w * e.weight, e.node)

    def add(self, a: Edge, b: Edge) -> Edge:
        if a.weight == 0:
            return b
        if b.weight == 0:
            return a
        if a.node is TERMINAL and b.node is TERMINAL:
            return self._edge(a.weight + b.weight, TERMINAL)
        if a.node.height != b.node.height:
            raise DDError("dimension mismatch in add")
        if id(a.node) > id(b.node):
            a, b = b, a
        ratio = self.ctable.lookup(b.weight / a.weight)
        key = (a.node, b.node, ratio)
        hit = self.add_cache.get(key)
        if hit is None:
            if ratio == 0:
                hit = Edge(1 + 0j, a.node)
            else:
                kids = tuple(
                    self.add(ca, self._scale(ratio, cb))
                    for ca, cb in zip(a.node.edges, b.node.edges)
                )
                hit = self.make_node(a.node.level, kids)
            self.add_cache[key] = hit
        return self._scale(a.weight, hit)

    def multiply(self, a: Edge, b: Edge) -> Edge:
        if a.weight == 0 or b.weight == 0:
            return ZERO
        an, bn = a.node, b.node
        if an is TERMINAL or bn is TERMINAL:
            if an is not bn:
                raise DDError("dimension mismatch in multiply")
            return self._edge(a.weight * b.weight, TERMINAL)
        if an.height != bn.height or an.level != bn.level:
            raise DDError(
                f"dimension mismatch in multiply: levels {an.level}/{bn.level}, "
                f"heights {an.height}/{bn.height}"
            )
        w = a.weight * b.weight
        if an.is_identity:
            return self._edge(w, bn)
        if bn.is_identity:
            return self._edge(w, an)
        return self._scale(w, self._mult_nodes(an, bn))

    def _mult_nodes(self, an: Node, bn: Node) -> Edge:
        key = (an, bn)
        hit = self.mult_cache.get(key)
        if hit is not None:
            return hit
        A, B = an.edges, bn.edges
        mul, add = self.multiply, self.add
        kids = []
        for i in (0, 1):
            for j in (0, 1):
                kids.append(add(mul(A[2 * i], B[j]), mul(A[2 * i + 1], B[2 + j])))
        hit = self.make_node(an.level, tuple(kids))
        self.mult_cache[key] = hit
        return hit

    # -- inspection ------------------------------------------------------

    def is_identity(self, e: Edge, tol=1e-9, up_to_global_phase=True) -> bool:
        if e.node is TERMINAL or not e.node.is_identity:
            return False
        if up_to_global_phase:
            return abs(abs(e.weight) - 1) <= tol
        return abs(e.weight - 1) <= tol

    @staticmethod
    def count_nodes(e: Edge) -> int:
        if e.node is TERMINAL:
            return 0
        seen = {e.node}
        stack = [e.node]
        while stack:
            node = stack.pop()
            for c in node.edges:
                cn = c.node
                if cn is not TERMINAL and cn not in seen:
                    seen.add(cn)
                    stack.append(cn)
        return len(seen)

    def to_matrix(self, e: Edge, n_qubits: int) -> np.ndarray:
        if n_qubits > MAX_DENSE_QUBITS:
            raise DDError(f"to_matrix limited to {MAX_DENSE_QUBITS} qubits")
        if e.node is not TERMINAL and e.node.height != n_qubits:
            raise DDError(f"edge spans {e.node.height} qubits, asked for {n_qubits}")
        memo = {}

        def rec(node, size):
            if node is TERMINAL:
                return np.ones((1, 1), dtype=complex)
            if node in memo:
                return memo[node]
            half = size // 2
            out = np.zeros((size, size), dtype=complex)
            for q, c in enumerate(node.edges):
                if c.weight == 0:
                    continue
                r, col = divmod(q, 2)
                out[r * half:(r + 1) * half, col * half:(col + 1) * half] = c.weight * rec(c.node, half)
            memo[node] = out
            return out

        size = 1 << n_qubits
        if e.weight == 0:
            return np.zeros((size, size), dtype=complex)
        return e.weight * rec(e.node, size)

    def dump(self, e: Edge) -> str:
        """Text adjacency listing, one line per node, parents before children."""
        ids: dict[Node, int] = {}
        order = []

        def visit(node):
            if node is TERMINAL or node in ids:
                return
            ids[node] = len(ids)
            order.append(node)
            for c in node.edges:
                visit(c.node)

        visit(e.node)

        def ref(c):
            if c.weight == 0:
                return "0"
            tgt = "T" if c.node is TERMINAL else f"n{ids[c.node]}"
            return f"{_fmt(c.weight)}->{tgt}"

        root_tgt = "T" if e.node is TERMINAL else "n0"
        lines = [f"root {_fmt(e.weight)}->{root_tgt}"]
        for node in order:
            kids = " ".join(ref(c) for c in node.edges)
            lines.append(f"n{ids[node]} level={node.level} [{kids}]")
        return "\n".join(lines)

    # -- memory ----------------------------------------------------------

    @property
    def live_nodes(self) -> int:
        return len(self.unique)

    def pin(self, e: Edge):
        if e.node is not TERMINAL:
            self._pinned[e.node] = self._pinned.get(e.node, 0) + 1

    def unpin(self, e: Edge):
        n = e.node
        if n is TERMINAL:
            return
        left = self._pinned.get(n, 0) - 1
        if left <= 0:
            self._pinned.pop(n, None)
        else:
            self._pinned[n] = left

    def collect(self, *roots: Edge) -> int:
        """Drop every node unreachable from ``roots`` and pinned edges.

        Compute tables are cleared wholesale. Returns the number of freed
        nodes. Any edge not passed as a root (or pinned) must not be used
        afterwards.
        """
        marked = set()
        stack = [r.node for r in roots if r.node is not TERMINAL]
        stack.extend(self._pinned)
        while stack:
            node = stack.pop()
            if node in marked:
                continue
            marked.add(node)
            for c in node.edges:
                if c.node is not TERMINAL:
                    stack.append(c.node)
        before = len(self.unique)
        self.unique = {k: v for k, v in self.unique.items() if v in marked}
        self.mult_cache.clear()
        self.add_cache.clear()
        self.collections += 1
        return before - len(self.unique)

    def maybe_collect(self, *roots: Edge) -> int:
        if len(self.unique) > self.gc_watermark:
            return self.collect(*roots)
        return 0

    def check_normalized(self) -> bool:
        """Table scan: every live node has its first max-magnitude child at weight 1."""
        for node in self.unique.values():
            mags = [abs(c.weight) for c in node.edges]
            top = max(mags)
            idx = next(i for i, m in enumerate(mags) if m >= top - self.eps * max(1.0, top))
            if node.edges[idx].weight != 1:
                return False
            if any(m > 1 + self.eps for m in mags):
                return False
        return True


def _fmt(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}i"
