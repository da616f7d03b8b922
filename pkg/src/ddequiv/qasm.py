"""OpenQASM 2.0 subset: recursive-descent parser and emitter.

Supported: the ``OPENQASM 2.0;`` header, ``include "qelib1.inc";`` (resolved
to a built-in library), ``qreg``/``creg``, gate applications with register
broadcasting, user ``gate`` macros (inlined), ``barrier`` and ``measure``.
``if``, ``opaque`` and ``reset`` are rejected. Registers are flattened in
declaration order.

``mcx c0,...,ck,t;`` is accepted as a native multi-controlled X (alongside
qelib1's ``c3x``/``c4x``) so that emitted circuits round-trip unchanged.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass

from .circuit import Circuit, CircuitError, Gate, GateKind as K

MAX_QUBITS = 4096
MAX_EXPR_DEPTH = 200
MAX_GATES = 5_000_000


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    start: int  # byte offsets into the UTF-8 source
    end: int

    def __str__(self):
        return f"{self.line}:{self.column}"


class QasmError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


# -- lexing ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<real>(?:[0-9]+\.[0-9]*|\.[0-9]+)(?:[eE][-+]?[0-9]+)?|[0-9]+[eE][-+]?[0-9]+)
  | (?P<int>[0-9]+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<eqeq>==)
  | (?P<sym>[;,()\[\]{}+\-*/^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int  # character offset


class _Source:
    def __init__(self, text: str):
        self.text = text
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def span(self, pos: int, end: int | None = None) -> SourceSpan:
        end = pos if end is None else end
        line = bisect.bisect_right(self._line_starts, pos) - 1
        col = pos - self._line_starts[line] + 1
        b0 = len(self.text[:pos].encode("utf-8", "surrogatepass"))
        b1 = b0 + len(self.text[pos:end].encode("utf-8", "surrogatepass"))
        return SourceSpan(line + 1, col, b0, b1)


def tokenize(src: _Source) -> list[Token]:
    text = src.text
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QasmError(f"unexpected character {text[pos]!r}", src.span(pos, pos + 1))
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tok_kind = "sym" if kind in ("arrow", "eqeq") else kind
            out.append(Token(tok_kind, m.group(), pos))
        pos = m.end()
    out.append(Token("eof", "", n))
    return out


# -- built-in gate library -------------------------------------------------
# name -> (kind, number of params, number of qubits, param mapper)

_NATIVE = {
    "U": (K.U3, 3, 1, None),
    "u3": (K.U3, 3, 1, None),
    "u": (K.U3, 3, 1, None),
    "u2": (K.U3, 2, 1, lambda ph, lam: (math.pi / 2, ph, lam)),
    "u1": (K.P, 1, 1, None),
    "p": (K.P, 1, 1, None),
    "CX": (K.CX, 0, 2, None),
    "cx": (K.CX, 0, 2, None),
    "id": (K.I, 0, 1, None),
    "x": (K.X, 0, 1, None),
    "y": (K.Y, 0, 1, None),
    "z": (K.Z, 0, 1, None),
    "h": (K.H, 0, 1, None),
    "s": (K.S, 0, 1, None),
    "sdg": (K.Sdg, 0, 1, None),
    "t": (K.T, 0, 1, None),
    "tdg": (K.Tdg, 0, 1, None),
    "sx": (K.SX, 0, 1, None),
    "sxdg": (K.SXdg, 0, 1, None),
    "rx": (K.RX, 1, 1, None),
    "ry": (K.RY, 1, 1, None),
    "rz": (K.RZ, 1, 1, None),
    "cz": (K.CZ, 0, 2, None),
    "swap": (K.SWAP, 0, 2, None),
    "ccx": (K.CCX, 0, 3, None),
    "c3x": (K.MCX, 0, 4, None),
    "c4x": (K.MCX, 0, 5, None),
    "mcx": (K.MCX, 0, None, None),  # variable arity, >= 2 qubits
}

# qelib1 composites that have no native kind, inlined like user macros
_QELIB1_MACROS = """
gate cy a,b { sdg b; cx a,b; s b; }
gate ch a,b { h b; sdg b; cx a,b; h b; t b; cx a,b; t b; h b; s b; x b; s a; }
gate crx(lambda) a,b { u1(pi/2) b; cx a,b; u3(-lambda/2,0,0) b; cx a,b; u3(lambda/2,-pi/2,0) b; }
gate cry(lambda) a,b { ry(lambda/2) b; cx a,b; ry(-lambda/2) b; cx a,b; }
gate crz(lambda) a,b { rz(lambda/2) b; cx a,b; rz(-lambda/2) b; cx a,b; }
gate cu1(lambda) a,b { u1(lambda/2) a; cx a,b; u1(-lambda/2) b; cx a,b; u1(lambda/2) b; }
gate cp(lambda) a,b { u1(lambda/2) a; cx a,b; u1(-lambda/2) b; cx a,b; u1(lambda/2) b; }
gate cu3(theta,phi,lambda) c,t { u1((lambda+phi)/2) c; u1((lambda-phi)/2) t; cx c,t; u3(-theta/2,0,-(phi+lambda)/2) t; cx c,t; u3(theta/2,phi,0) t; }
gate cswap a,b,c { cx c,b; ccx a,b,c; cx c,b; }
gate rzz(theta) a,b { cx a,b; u1(theta) b; cx a,b; }
gate rxx(theta) a,b { u3(pi/2,theta,0) a; h b; cx a,b; u1(-theta) b; cx a,b; h b; u2(-pi,pi-theta) a; }
"""


@dataclass
class _Macro:
    name: str
    params: list[str]
    qargs: list[str]
    body: list  # (name, param exprs, qarg names, token) | ("barrier", qarg names, token)


# -- parsing ---------------------------------------------------------------

_FUNCS = {"sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
          "ln": math.log, "sqrt": math.sqrt}


class _Parser:
    def __init__(self, src: _Source, tokens: list[Token], macros: dict, require_header=True):
        self.src = src
        self.toks = tokens
        self.i = 0
        self.macros = macros
        self.qregs: dict[str, tuple[int, int]] = {}
        self.cregs: dict[str, tuple[int, int]] = {}
        self.n_qubits = 0
        self.n_clbits = 0
        self.gates: list[Gate] = []
        self.require_header = require_header
        self.included = False

    # token helpers
    def peek(self, k=0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def span(self, tok: Token) -> SourceSpan:
        return self.src.span(tok.pos, tok.pos + len(tok.text))

    def error(self, msg, tok=None):
        raise QasmError(msg, self.span(tok or self.peek()))

    def expect(self, text=None, kind=None) -> Token:
        tok = self.peek()
        if (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            want = repr(text) if text is not None else kind
            got = "end of input" if tok.kind == "eof" else repr(tok.text)
            self.error(f"expected {want}, got {got}", tok)
        return self.next()

    def accept(self, text) -> bool:
        if self.peek().text == text and self.peek().kind != "string":
            self.next()
            return True
        return False

    # program structure
    def program(self):
        if self.require_header:
            tok = self.peek()
            if tok.text != "OPENQASM":
                self.error("expected 'OPENQASM 2.0;' header", tok)
            self.next()
            ver = self.next()
            if ver.kind not in ("real", "int") or ver.text not in ("2.0", "2"):
                self.error(f"unsupported OpenQASM version {ver.text!r}", ver)
            self.expect(";")
        while self.peek().kind != "eof":
            self.statement()

    def statement(self):
        tok = self.peek()
        if tok.kind != "id":
            self.error(f"unexpected {tok.text!r}" if tok.text else "unexpected end of input", tok)
        word = tok.text
        if word == "include":
            self.include()
        elif word in ("qreg", "creg"):
            self.register()
        elif word == "gate":
            self.gate_def()
        elif word == "measure":
            self.measure()
        elif word == "barrier":
            self.barrier()
        elif word in ("if", "opaque", "reset", "OPENQASM"):
            self.error(f"unsupported construct: {word}", tok)
        else:
            self.gate_call()

    def include(self):
        self.next()
        name = self.expect(kind="string")
        if name.text != '"qelib1.inc"':
            self.error(f"cannot include {name.text}; only \"qelib1.inc\" is built in", name)
        self.expect(";")
        self.included = True

    def register(self):
        kw = self.next()
        name = self.expect(kind="id")
        self.expect("[")
        size_tok = self.expect(kind="int")
        self.expect("]")
        self.expect(";")
        size = int(size_tok.text)
        if size == 0:
            self.error("register size must be positive", size_tok)
        if name.text in self.qregs or name.text in self.cregs:
            self.error(f"register {name.text!r} already declared", name)
        if kw.text == "qreg":
            if self.n_qubits + size > MAX_QUBITS:
                self.error(f"more than {MAX_QUBITS} qubits declared", size_tok)
            self.qregs[name.text] = (self.n_qubits, size)
            self.n_qubits += size
        else:
            if self.n_clbits + size > MAX_QUBITS:
                self.error(f"more than {MAX_QUBITS} classical bits declared", size_tok)
            self.cregs[name.text] = (self.n_clbits, size)
            self.n_clbits += size

    def argument(self, regs, what) -> list[int]:
        """``name`` (whole register) or ``name[i]``; flattened indices."""
        name = self.expect(kind="id")
        if name.text not in regs:
            self.error(f"undefined {what} register {name.text!r}", name)
        offset, size = regs[name.text]
        if self.accept("["):
            idx_tok = self.expect(kind="int")
            self.expect("]")
            idx = int(idx_tok.text)
            if idx >= size:
                self.error(f"index {idx} out of range for {name.text}[{size}]", idx_tok)
            return [offset + idx]
        return list(range(offset, offset + size))

    def arg_list(self, regs, what):
        args = [self.argument(regs, what)]
        while self.accept(","):
            args.append(self.argument(regs, what))
        return args

    def broadcast(self, args, tok) -> list[list[int]]:
        sizes = {len(a) for a in args if len(a) > 1}
        if len(sizes) > 1:
            self.error("register arguments have different sizes", tok)
        width = sizes.pop() if sizes else 1
        return [[a[0] if len(a) == 1 else a[j] for a in args] for j in range(width)]

    def measure(self):
        kw = self.next()
        q = self.argument(self.qregs, "quantum")
        self.expect("->")
        c = self.argument(self.cregs, "classical")
        self.expect(";")
        if len(q) != len(c):
            self.error("measure operands have different sizes", kw)
        for qi, ci in zip(q, c):
            self.emit(Gate(K.Measure, (qi,), clbit=ci), kw)

    def barrier(self):
        kw = self.next()
        args = self.arg_list(self.qregs, "quantum")
        self.expect(";")
        qubits = []
        for a in args:
            for q in a:
                if q not in qubits:
                    qubits.append(q)
        self.emit(Gate(K.Barrier, tuple(qubits)), kw)

    def emit(self, g: Gate, tok):
        if len(self.gates) >= MAX_GATES:
            self.error(f"more than {MAX_GATES} gates after expansion", tok)
        self.gates.append(g)

    # gate definitions and calls
    def gate_def(self):
        self.next()
        name = self.expect(kind="id")
        if name.text in _NATIVE or name.text in self.macros:
            self.error(f"gate {name.text!r} is already defined", name)
        params = []
        if self.accept("("):
            if not self.accept(")"):
                params.append(self.expect(kind="id").text)
                while self.accept(","):
                    params.append(self.expect(kind="id").text)
                self.expect(")")
        qargs = [self.expect(kind="id").text]
        while self.accept(","):
            qargs.append(self.expect(kind="id").text)
        if len(set(qargs)) != len(qargs):
            self.error("duplicate qubit argument in gate definition", name)
        self.expect("{")
        body = []
        while not self.accept("}"):
            tok = self.peek()
            if tok.kind == "eof":
                self.error("unterminated gate body", tok)
            if tok.text == "barrier":
                self.next()
                names = [self.expect(kind="id").text]
                while self.accept(","):
                    names.append(self.expect(kind="id").text)
                self.expect(";")
                for n in names:
                    if n not in qargs:
                        self.error(f"unknown qubit argument {n!r}", tok)
                body.append(("barrier", names, tok))
                continue
            if tok.kind != "id":
                self.error(f"unexpected {tok.text!r} in gate body", tok)
            if tok.text in ("if", "opaque", "reset", "measure", "gate"):
                self.error(f"unsupported construct in gate body: {tok.text}", tok)
            self.next()
            exprs = self.param_list(set(params))
            names = [self.expect(kind="id").text]
            while self.accept(","):
                names.append(self.expect(kind="id").text)
            self.expect(";")
            for n in names:
                if n not in qargs:
                    self.error(f"unknown qubit argument {n!r}", tok)
            self.check_callable(tok, len(exprs), len(names))
            body.append((tok.text, exprs, names, tok))
        self.macros[name.text] = _Macro(name.text, params, qargs, body)

    def check_callable(self, tok, n_params, n_qubits):
        name = tok.text
        if name in _NATIVE:
            _, np_, nq, _ = _NATIVE[name]
            ok_q = n_qubits >= 2 if nq is None else n_qubits == nq
        elif name in self.macros:
            mac = self.macros[name]
            np_, ok_q = len(mac.params), n_qubits == len(mac.qargs)
            nq = len(mac.qargs)
        else:
            self.error(f"undefined gate {name!r}", tok)
        if n_params != np_:
            self.error(f"gate {name!r} takes {np_} parameter(s), got {n_params}", tok)
        if not ok_q:
            want = "at least 2" if nq is None else str(nq)
            self.error(f"gate {name!r} takes {want} qubit(s), got {n_qubits}", tok)

    def param_list(self, allowed: set[str]) -> list:
        exprs = []
        if self.accept("("):
            if not self.accept(")"):
                exprs.append(self.expr(allowed, 0))
                while self.accept(","):
                    exprs.append(self.expr(allowed, 0))
                self.expect(")")
        return exprs

    def gate_call(self):
        tok = self.next()
        exprs = self.param_list(set())
        args = self.arg_list(self.qregs, "quantum")
        self.expect(";")
        self.check_callable(tok, len(exprs), len(args))
        values = [self.evaluate(e, {}, tok) for e in exprs]
        if not all(math.isfinite(v) for v in values):
            self.error(f"non-finite parameter in {tok.text!r} call", tok)
        for qubits in self.broadcast(args, tok):
            if len(set(qubits)) != len(qubits):
                self.error(f"repeated qubit in {tok.text!r} call", tok)
            self.apply(tok.text, values, qubits, tok)

    def apply(self, name, values, qubits, tok):
        if name in _NATIVE:
            kind, _, _, mapper = _NATIVE[name]
            if mapper is not None:
                values = mapper(*values)
            if kind in (K.CX, K.CZ, K.CCX, K.MCX):
                g = Gate(kind, (qubits[-1],), controls=tuple(qubits[:-1]))
            else:
                g = Gate(kind, tuple(qubits), params=tuple(values))
            self.emit(g, tok)
            return
        mac = self.macros[name]
        env = dict(zip(mac.params, values))
        qmap = dict(zip(mac.qargs, qubits))
        for item in mac.body:
            if item[0] == "barrier":
                self.emit(Gate(K.Barrier, tuple(qmap[n] for n in item[1])), item[2])
                continue
            sub, exprs, names, sub_tok = item
            vals = [self.evaluate(e, env, sub_tok) for e in exprs]
            self.apply(sub, vals, [qmap[n] for n in names], sub_tok)

    # expressions: parsed to nested tuples, evaluated per call
    def expr(self, allowed, depth):
        if depth > MAX_EXPR_DEPTH:
            self.error("expression nested too deeply")
        left = self.term(allowed, depth)
        while self.peek().text in ("+", "-") and self.peek().kind == "sym":
            op = self.next()
            left = ("bin", op.text, left, self.term(allowed, depth), op)
        return left

    def term(self, allowed, depth):
        left = self.power(allowed, depth)
        while self.peek().text in ("*", "/") and self.peek().kind == "sym":
            op = self.next()
            left = ("bin", op.text, left, self.power(allowed, depth), op)
        return left

    def power(self, allowed, depth):
        base = self.unary(allowed, depth)
        if self.peek().text == "^" and self.peek().kind == "sym":
            op = self.next()
            return ("bin", "^", base, self.power(allowed, depth + 1), op)
        return base

    def unary(self, allowed, depth):
        tok = self.peek()
        if tok.kind == "sym" and tok.text in ("-", "+"):
            self.next()
            inner = self.unary(allowed, depth + 1)
            return ("neg", inner) if tok.text == "-" else inner
        return self.atom(allowed, depth)

    def atom(self, allowed, depth):
        tok = self.next()
        if tok.kind in ("real", "int"):
            return ("num", float(tok.text))
        if tok.kind == "id":
            if tok.text == "pi":
                return ("num", math.pi)
            if tok.text in _FUNCS:
                self.expect("(")
                arg = self.expr(allowed, depth + 1)
                self.expect(")")
                return ("call", tok.text, arg, tok)
            if tok.text in allowed:
                return ("var", tok.text)
            self.error(f"unknown identifier {tok.text!r} in expression", tok)
        if tok.text == "(":
            inner = self.expr(allowed, depth + 1)
            self.expect(")")
            return inner
        self.error("expected an expression", tok)

    def evaluate(self, node, env, tok):
        kind = node[0]
        try:
            if kind == "num":
                return node[1]
            if kind == "var":
                return env[node[1]]
            if kind == "neg":
                return -self.evaluate(node[1], env, tok)
            if kind == "call":
                return _FUNCS[node[1]](self.evaluate(node[2], env, tok))
            _, op, a, b, op_tok = node
            x, y = self.evaluate(a, env, tok), self.evaluate(b, env, tok)
            if op == "+":
                return x + y
            if op == "-":
                return x - y
            if op == "*":
                return x * y
            if op == "/":
                return x / y
            out = x ** y
            if isinstance(out, complex):
                raise ValueError("complex result")
            return out
        except (ZeroDivisionError, OverflowError, ValueError) as exc:
            if isinstance(exc, QasmError):
                raise
            raise QasmError(f"cannot evaluate expression: {exc}", self.span(tok)) from None


def _builtin_macros() -> dict:
    src = _Source(_QELIB1_MACROS)
    p = _Parser(src, tokenize(src), {}, require_header=False)
    p.program()
    return p.macros


_QELIB1 = _builtin_macros()


def parse_qasm(text: str | bytes) -> Circuit:
    """Parse an OpenQASM 2.0 program into a flat :class:`Circuit`.

    Raises :class:`QasmError` (with a :class:`SourceSpan`) on any problem.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise QasmError(f"invalid UTF-8: {exc.reason}", SourceSpan(1, 1, exc.start, exc.end)) from None
    src = _Source(text)
    tokens = tokenize(src)
    parser = _Parser(src, tokens, dict(_QELIB1))
    try:
        parser.program()
        return Circuit(parser.n_qubits, parser.gates, parser.n_clbits)
    except QasmError:
        raise
    except (CircuitError, RecursionError) as exc:
        tok = parser.peek()
        raise QasmError(str(exc), parser.span(tok)) from None


def load_qasm(path) -> Circuit:
    with open(path, "rb") as fh:
        return parse_qasm(fh.read())


# -- emission --------------------------------------------------------------

_EMIT_NAME = {
    K.I: "id", K.X: "x", K.Y: "y", K.Z: "z", K.H: "h", K.S: "s", K.Sdg: "sdg",
    K.T: "t", K.Tdg: "tdg", K.SX: "sx", K.SXdg: "sxdg", K.RX: "rx", K.RY: "ry",
    K.RZ: "rz", K.P: "u1", K.U3: "u3", K.CX: "cx", K.CZ: "cz", K.SWAP: "swap",
    K.CCX: "ccx", K.MCX: "mcx",
}


def _num(v: float) -> str:
    text = f"{v:.17g}"
    if text in ("inf", "-inf", "nan"):
        raise CircuitError(f"cannot emit non-finite angle {v}")
    return text


def emit_qasm(c: Circuit) -> str:
    """Serialize with one ``q`` and one ``c`` register. Global phase is not
    representable in OpenQASM 2.0 and is dropped."""
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{max(c.n_qubits, 1)}];"]
    if c.n_clbits:
        lines.append(f"creg c[{c.n_clbits}];")
    for g in c.gates:
        args = ",".join(f"q[{q}]" for q in g.qubits)
        if g.kind is K.Measure:
            lines.append(f"measure q[{g.targets[0]}] -> c[{g.clbit}];")
        elif g.kind is K.Barrier:
            lines.append(f"barrier {args};")
        else:
            name = _EMIT_NAME[g.kind]
            if g.params:
                name += "(" + ",".join(_num(v) for v in g.params) + ")"
            lines.append(f"{name} {args};")
    return "\n".join(lines) + "\n"
