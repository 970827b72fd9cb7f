"""Circuit IR: gates, circuits, a QASM-2-style text format, and DAG utilities.

The text format is a deliberate subset: one qreg, one optional creg, the
twelve supported gate mnemonics, and terminal measurements only.  Bitstring
convention everywhere: qubit index i maps to character position i, leftmost
character is qubit 0.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction


class CircuitError(ValueError):
    """Raised on invalid circuit construction."""


class QasmError(ValueError):
    """Raised on text-format problems, with line/column attached."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        loc = f" (line {line}, col {col})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.col = col


class GateKind(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RZ = "rz"
    U3 = "u3"
    CX = "cx"
    CZ = "cz"

    @property
    def arity(self) -> int:
        return 2 if self in (GateKind.CX, GateKind.CZ) else 1

    @property
    def n_params(self) -> int:
        if self is GateKind.RZ:
            return 1
        if self is GateKind.U3:
            return 3
        return 0


CLIFFORD_KINDS = frozenset(
    {GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S, GateKind.SDG,
     GateKind.CX, GateKind.CZ}
)
T_KINDS = frozenset({GateKind.T, GateKind.TDG})


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    uid: int = -1
    inserted: bool = False  # provenance flag for pass-added gates; dropped on serialization

    def __post_init__(self):
        if len(self.qubits) != self.kind.arity:
            raise CircuitError(f"{self.kind.value} expects {self.kind.arity} qubits, got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.kind.value} qubit indices must be distinct: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"negative qubit index in {self.qubits}")
        if len(self.params) != self.kind.n_params:
            raise CircuitError(f"{self.kind.value} expects {self.kind.n_params} params, got {len(self.params)}")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    measured_qubits: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CircuitError("circuit width must be >= 1")
        for g in self.gates:
            if any(q >= self.n_qubits for q in g.qubits):
                raise CircuitError(f"gate {g.kind.value} on {g.qubits} exceeds width {self.n_qubits}")
        seen = set()
        for q in self.measured_qubits:
            if not 0 <= q < self.n_qubits:
                raise CircuitError(f"measured qubit {q} out of range")
            if q in seen:
                raise CircuitError(f"qubit {q} measured twice")
            seen.add(q)
        object.__setattr__(self, "measured_qubits", tuple(sorted(self.measured_qubits)))

    @classmethod
    def build(cls, n_qubits: int, ops, measured=()) -> "Circuit":
        """Assemble a circuit from (kind, *qubits[, params]) tuples or Gates, assigning uids."""
        gates = []
        for i, op in enumerate(ops):
            if isinstance(op, Gate):
                gates.append(replace(op, uid=i))
                continue
            kind = op[0] if isinstance(op[0], GateKind) else GateKind(op[0])
            rest = op[1:]
            if rest and isinstance(rest[-1], (tuple, list)):
                qubits, params = tuple(rest[:-1]), tuple(rest[-1])
            else:
                qubits, params = tuple(rest), ()
            gates.append(Gate(kind, qubits, params, uid=i))
        return cls(n_qubits, tuple(gates), tuple(measured))

    def gate_by_uid(self, uid: int) -> Gate:
        for g in self.gates:
            if g.uid == uid:
                return g
        raise KeyError(uid)


def same_semantics(a: Circuit, b: Circuit) -> bool:
    """Structural equality ignoring uids and provenance flags."""
    return (
        a.n_qubits == b.n_qubits
        and a.measured_qubits == b.measured_qubits
        and len(a.gates) == len(b.gates)
        and all(
            ga.kind == gb.kind and ga.qubits == gb.qubits and ga.params == gb.params
            for ga, gb in zip(a.gates, b.gates)
        )
    )


def concat(a: Circuit, b: Circuit) -> Circuit:
    """Join two equal-width circuits; uids are reassigned, measurements come from b."""
    if a.n_qubits != b.n_qubits:
        raise CircuitError(f"width mismatch: {a.n_qubits} vs {b.n_qubits}")
    if a.measured_qubits:
        raise CircuitError("left operand of concat must not measure")
    gates = tuple(
        replace(g, uid=i) for i, g in enumerate(list(a.gates) + list(b.gates))
    )
    return Circuit(a.n_qubits, gates, b.measured_qubits)


# --- text format -----------------------------------------------------------

_MNEMONICS = {k.value: k for k in GateKind}


def _eval_angle(expr: str, line: int, col: int) -> float:
    """Evaluate an angle expression over numbers, pi, + - * / and parentheses."""
    tokens: list[str] = []
    i = 0
    s = expr.strip()
    while i < len(s):
        c = s[i]
        if c.isspace():
            i += 1
        elif c in "+-*/()":
            tokens.append(c)
            i += 1
        elif c.isdigit() or c == ".":
            j = i
            while j < len(s) and (s[j].isdigit() or s[j] in ".eE" or (s[j] in "+-" and s[j - 1] in "eE")):
                j += 1
            tokens.append(s[i:j])
            i = j
        elif s[i:i + 2] == "pi" and (i + 2 == len(s) or not s[i + 2].isalnum()):
            tokens.append("pi")
            i += 2
        else:
            raise QasmError(f"bad character {c!r} in angle expression", line, col)

    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_expr() -> float:
        val = parse_term()
        while peek() in ("+", "-"):
            op = take()
            rhs = parse_term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def parse_term() -> float:
        val = parse_factor()
        while peek() in ("*", "/"):
            op = take()
            rhs = parse_factor()
            if op == "/":
                if rhs == 0:
                    raise QasmError("division by zero in angle", line, col)
                val = val / rhs
            else:
                val = val * rhs
        return val

    def parse_factor() -> float:
        tok = peek()
        if tok is None:
            raise QasmError("unexpected end of angle expression", line, col)
        if tok == "-":
            take()
            return -parse_factor()
        if tok == "+":
            take()
            return parse_factor()
        if tok == "(":
            take()
            val = parse_expr()
            if peek() != ")":
                raise QasmError("missing ')' in angle expression", line, col)
            take()
            return val
        if tok == "pi":
            take()
            return math.pi
        take()
        try:
            return float(tok)
        except ValueError:
            raise QasmError(f"bad number {tok!r} in angle expression", line, col) from None

    val = parse_expr()
    if pos != len(tokens):
        raise QasmError("trailing tokens in angle expression", line, col)
    return val


def _format_angle(x: float) -> str:
    """Render an angle, preferring an exact small multiple of pi."""
    if x == 0:
        return "0"
    frac = Fraction(x / math.pi).limit_denominator(4096)
    if frac != 0:
        num, den = frac.numerator, frac.denominator
        sign = "-" if num < 0 else ""
        num = abs(num)
        if num == 1:
            body = "pi" if den == 1 else f"pi/{den}"
        else:
            body = f"{num}*pi" if den == 1 else f"{num}*pi/{den}"
        # only use the pretty form when it reparses to the identical float
        if _eval_angle(sign + body, 0, 0) == x:
            return sign + body
    return repr(x)


def parse_qasm(text: str) -> Circuit:
    """Parse the supported text subset into a Circuit.

    Grammar: optional OPENQASM/include header, a single qreg, optional cregs,
    the twelve gate mnemonics with indexed operands, and terminal measure
    statements.  Mid-circuit measurement is rejected.
    """
    # split into statements, tracking the line/col where each starts
    statements: list[tuple[str, int, int]] = []
    buf: list[str] = []
    line, col = 1, 1
    start: tuple[int, int] | None = None
    i = 0
    while i < len(text):
        c = text[i]
        if text[i:i + 2] == "//":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if c == "\n":
            line += 1
            col = 1
            i += 1
            if buf and not "".join(buf).isspace():
                buf.append(" ")
            continue
        if c == ";":
            stmt = "".join(buf).strip()
            if stmt:
                statements.append((stmt, start[0], start[1]))
            buf = []
            start = None
        else:
            if not c.isspace() and start is None:
                start = (line, col)
            buf.append(c)
        col += 1
        i += 1
    if buf and "".join(buf).strip():
        raise QasmError("missing ';' at end of input", line, col)

    n_qubits: int | None = None
    qreg_name: str | None = None
    cregs: dict[str, int] = {}
    gates: list[Gate] = []
    measured: list[int] = []
    uid = 0

    def operand_index(tok: str, reg: str, ln: int, cl: int) -> int:
        tok = tok.strip()
        if not (tok.startswith(reg + "[") and tok.endswith("]")):
            raise QasmError(f"expected {reg}[i] operand, got {tok!r}", ln, cl)
        try:
            return int(tok[len(reg) + 1:-1])
        except ValueError:
            raise QasmError(f"bad index in operand {tok!r}", ln, cl) from None

    for stmt, ln, cl in statements:
        head = stmt.split(None, 1)[0].lower()
        if head == "openqasm":
            continue
        if head == "include":
            continue
        if head in ("qreg", "creg"):
            body = stmt[len(head):].strip()
            if "[" not in body or not body.endswith("]"):
                raise QasmError(f"malformed {head} declaration", ln, cl)
            name, size_s = body[:-1].split("[", 1)
            try:
                size = int(size_s)
            except ValueError:
                raise QasmError(f"bad {head} size {size_s!r}", ln, cl) from None
            if head == "qreg":
                if n_qubits is not None:
                    raise QasmError("multiple qreg declarations are not supported", ln, cl)
                if size < 1:
                    raise QasmError("qreg size must be >= 1", ln, cl)
                n_qubits, qreg_name = size, name.strip()
            else:
                cregs[name.strip()] = size
            continue
        if head == "measure":
            if n_qubits is None:
                raise QasmError("measure before qreg declaration", ln, cl)
            body = stmt[len(head):].strip()
            if "->" not in body:
                raise QasmError("measure needs '-> c[j]'", ln, cl)
            lhs, rhs = (part.strip() for part in body.split("->", 1))
            if lhs == qreg_name:  # whole-register broadcast
                targets = list(range(n_qubits))
            else:
                targets = [operand_index(lhs, qreg_name, ln, cl)]
            for q in targets:
                if q >= n_qubits:
                    raise QasmError(f"measured qubit {q} out of range", ln, cl)
                if q in measured:
                    raise QasmError(f"qubit {q} measured twice", ln, cl)
                measured.append(q)
            continue
        if head == "barrier":
            raise QasmError("unsupported statement 'barrier'", ln, cl)

        # gate statement
        name = stmt
        params: tuple[float, ...] = ()
        if "(" in stmt:
            name, rest = stmt.split("(", 1)
            depth, j = 1, 0
            while j < len(rest) and depth:
                if rest[j] == "(":
                    depth += 1
                elif rest[j] == ")":
                    depth -= 1
                j += 1
            if depth:
                raise QasmError("missing ')' in gate parameters", ln, cl)
            arg_src, operand_src = rest[:j - 1], rest[j:]
            args = _split_top_level(arg_src)
            params = tuple(_eval_angle(a, ln, cl) for a in args)
        else:
            parts = stmt.split(None, 1)
            if len(parts) != 2:
                raise QasmError(f"malformed statement {stmt!r}", ln, cl)
            name, operand_src = parts
        mnemonic = name.strip().lower()
        if mnemonic not in _MNEMONICS:
            raise QasmError(f"unsupported gate kind {mnemonic!r}", ln, cl)
        kind = _MNEMONICS[mnemonic]
        if n_qubits is None:
            raise QasmError("gate before qreg declaration", ln, cl)
        qubits = tuple(operand_index(tok, qreg_name, ln, cl) for tok in operand_src.split(","))
        if len(params) != kind.n_params:
            raise QasmError(f"{mnemonic} expects {kind.n_params} parameter(s)", ln, cl)
        for q in qubits:
            if q >= n_qubits:
                raise QasmError(f"qubit {q} out of range", ln, cl)
            if q in measured:
                raise QasmError(f"mid-circuit measurement: qubit {q} used after measure", ln, cl)
        try:
            gates.append(Gate(kind, qubits, params, uid=uid))
        except CircuitError as exc:
            raise QasmError(str(exc), ln, cl) from None
        uid += 1

    if n_qubits is None:
        raise QasmError("no qreg declaration found")
    return Circuit(n_qubits, tuple(gates), tuple(measured))


def _split_top_level(src: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in src:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def emit_qasm(c: Circuit, header_comment: str | None = None) -> str:
    """Serialize a Circuit; round-trips through parse_qasm up to uid relabeling."""
    lines = []
    if header_comment:
        for row in header_comment.splitlines():
            lines.append(f"// {row}")
    lines.append("OPENQASM 2.0;")
    lines.append('include "qelib1.inc";')
    lines.append(f"qreg q[{c.n_qubits}];")
    if c.measured_qubits:
        lines.append(f"creg c[{len(c.measured_qubits)}];")
    for g in c.gates:
        ops = ",".join(f"q[{q}]" for q in g.qubits)
        if g.params:
            args = ",".join(_format_angle(p) for p in g.params)
            lines.append(f"{g.kind.value}({args}) {ops};")
        else:
            lines.append(f"{g.kind.value} {ops};")
    for j, q in enumerate(c.measured_qubits):
        lines.append(f"measure q[{q}] -> c[{j}];")
    return "\n".join(lines) + "\n"


# --- DAG and census --------------------------------------------------------

@dataclass(frozen=True)
class CircuitDag:
    """Qubit-dependency DAG: gate u -> v when v is the next gate sharing a wire."""

    nodes: tuple[Gate, ...]
    edges: tuple[tuple[int, int], ...]  # (uid, uid) pairs
    n_qubits: int
    succ: dict = field(compare=False, repr=False, default_factory=dict)
    pred: dict = field(compare=False, repr=False, default_factory=dict)


def build_dag(c: Circuit) -> CircuitDag:
    last: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    seen = set()
    for g in c.gates:
        for q in g.qubits:
            if q in last:
                e = (last[q], g.uid)
                if e not in seen:
                    seen.add(e)
                    edges.append(e)
            last[q] = g.uid
    succ: dict[int, list[int]] = {g.uid: [] for g in c.gates}
    pred: dict[int, list[int]] = {g.uid: [] for g in c.gates}
    for u, v in edges:
        succ[u].append(v)
        pred[v].append(u)
    return CircuitDag(c.gates, tuple(edges), c.n_qubits, succ, pred)


def dag_depth(dag: CircuitDag) -> int:
    """Longest path length counted in nodes."""
    level: dict[int, int] = {}
    for g in dag.nodes:  # nodes are already in topological (list) order
        level[g.uid] = 1 + max((level[p] for p in dag.pred[g.uid]), default=0)
    return max(level.values(), default=0)


def gate_census(c: Circuit) -> dict[str, int]:
    clifford = sum(1 for g in c.gates if g.kind in CLIFFORD_KINDS)
    t_count = sum(1 for g in c.gates if g.kind in T_KINDS)
    other = len(c.gates) - clifford - t_count
    return {
        "clifford_count": clifford,
        "t_count": t_count,
        "other_count": other,
        "depth": dag_depth(build_dag(c)),
        "total": len(c.gates),
    }


def random_clifford_t_circuit(
    n_qubits: int,
    n_gates: int,
    t_fraction: float,
    seed: int,
    measure: bool = True,
) -> Circuit:
    """Seeded random Clifford+T circuit over {H,S,X,Z,CX,T,Tdg}."""
    if n_qubits < 1:
        raise CircuitError("n_qubits must be >= 1")
    if n_gates < 0:
        raise CircuitError("n_gates must be >= 0")
    if not 0.0 <= t_fraction <= 1.0:
        raise CircuitError("t_fraction must be in [0, 1]")
    rng = random.Random(seed)
    one_q = [GateKind.H, GateKind.S, GateKind.X, GateKind.Z]
    ops = []
    for _ in range(n_gates):
        if rng.random() < t_fraction:
            kind = rng.choice([GateKind.T, GateKind.TDG])
            ops.append((kind, rng.randrange(n_qubits)))
        else:
            if n_qubits >= 2 and rng.random() < 0.3:
                c_, t_ = rng.sample(range(n_qubits), 2)
                ops.append((GateKind.CX, c_, t_))
            else:
                ops.append((rng.choice(one_q), rng.randrange(n_qubits)))
    measured = tuple(range(n_qubits)) if measure else ()
    return Circuit.build(n_qubits, ops, measured)
