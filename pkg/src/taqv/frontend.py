"""Text formats: an OpenQASM 2 subset for circuits, a line format for tree
automata, and JSON verdicts.

Qubit ``q[0]`` in a circuit file is engine qubit 1, the topmost tree variable
and the leftmost character of a basis string.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from .amplitude import Amplitude
from .automaton import TreeAutomaton, compact, from_trees, validate
from .circuit import ARITY, Gate, QuantumCircuit
from .tree_oracle import StateTree

SCHEMA = "taqv/1"


class ParseError(ValueError):
    """A syntax or semantic error at a 1-based line and column."""

    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


# -- circuits ------------------------------------------------------------------

_QASM_GATES = {
    "x": "X",
    "y": "Y",
    "z": "Z",
    "h": "H",
    "s": "S",
    "t": "T",
    "cx": "CNOT",
    "cz": "CZ",
    "ccx": "Toffoli",
    "cswap": "Fredkin",
}
_ROTATIONS = {"rx": "Rx90", "ry": "Ry90"}
_QASM_NAME = {v: k for k, v in _QASM_GATES.items()} | {"Rx90": "rx(pi/2)", "Ry90": "ry(pi/2)"}

_STMT = re.compile(
    r"(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*(?:\((?P<param>[^)]*)\))?\s*(?P<args>.*)",
    re.S,
)
_OPERAND = re.compile(r"\s*(?P<reg>[A-Za-z_][A-Za-z0-9_]*)\s*\[\s*(?P<idx>\d+)\s*\]\s*")
_PI_HALF = re.compile(r"\s*pi\s*/\s*2\s*")


def _statements(text: str):
    """Yield (statement, line, col) with comments removed; col points at the first character."""
    buf: list[str] = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0]
        for col, ch in enumerate(line, start=1):
            if ch == ";":
                if start is None:
                    raise ParseError("empty statement", lineno, col)
                yield "".join(buf).strip(), start[0], start[1]
                buf, start = [], None
            else:
                if start is None and not ch.isspace():
                    start = (lineno, col)
                if start is not None:
                    buf.append(ch)
        if start is not None:
            buf.append("\n")
    if start is not None:
        raise ParseError("missing ';' at end of statement", *start)


def parse_circuit(text: str) -> QuantumCircuit:
    """Parse the supported OpenQASM 2 subset into a circuit."""
    num_qubits = None
    reg = None
    gates: list[Gate] = []
    for stmt, line, col in _statements(text):
        if re.fullmatch(r"OPENQASM\s+2(\.0)?", stmt):
            continue
        if re.fullmatch(r'include\s+"[^"]*"', stmt):
            continue
        m = _STMT.fullmatch(stmt)
        if m is None:
            raise ParseError(f"cannot parse statement {stmt!r}", line, col)
        name, param, args = m.group("name"), m.group("param"), m.group("args")
        if name == "qreg":
            if reg is not None:
                raise ParseError("only a single qreg is supported", line, col)
            op = _OPERAND.fullmatch(args)
            if op is None or int(op.group("idx")) < 1:
                raise ParseError("expected 'qreg name[n];' with n >= 1", line, col)
            reg, num_qubits = op.group("reg"), int(op.group("idx"))
            continue
        if name in ("creg", "measure", "reset", "if"):
            raise ParseError(f"'{name}' is not supported: classical bits and measurement are out of scope", line, col)
        if name == "barrier":
            continue
        if name in _ROTATIONS:
            if param is None:
                raise ParseError(f"'{name}' needs an angle", line, col)
            if not _PI_HALF.fullmatch(param):
                raise ParseError(f"unsupported angle {param.strip()!r} for {name}; only pi/2 is supported", line, col)
            kind = _ROTATIONS[name]
        elif name in _QASM_GATES:
            if param is not None:
                raise ParseError(f"gate '{name}' takes no parameter", line, col)
            kind = _QASM_GATES[name]
        else:
            raise ParseError(f"unknown gate '{name}'", line, col)
        if reg is None:
            raise ParseError("gate before qreg declaration", line, col)
        qubits = []
        for operand in args.split(","):
            op = _OPERAND.fullmatch(operand)
            if op is None:
                raise ParseError(f"malformed operand {operand.strip()!r}", line, col)
            if op.group("reg") != reg:
                raise ParseError(f"unknown register '{op.group('reg')}'", line, col)
            idx = int(op.group("idx"))
            if idx >= num_qubits:
                raise ParseError(f"qubit index {idx} out of range for {reg}[{num_qubits}]", line, col)
            qubits.append(idx + 1)
        if len(qubits) != ARITY[kind]:
            raise ParseError(f"'{name}' takes {ARITY[kind]} operand(s), got {len(qubits)}", line, col)
        try:
            gates.append(Gate(kind, tuple(qubits)))
        except ValueError as exc:
            raise ParseError(str(exc), line, col) from None
    if num_qubits is None:
        raise ParseError("missing qreg declaration", 1, 1)
    return QuantumCircuit(num_qubits, tuple(gates))


def serialize_circuit(circuit: QuantumCircuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{circuit.num_qubits}];"]
    for g in circuit.gates:
        operands = ",".join(f"q[{q - 1}]" for q in g.qubits)
        lines.append(f"{_QASM_NAME[g.kind]} {operands};")
    return "\n".join(lines) + "\n"


# -- automata ------------------------------------------------------------------

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_INTERNAL_LINE = re.compile(rf"({_IDENT})\s*-x(\d+)->\s*\(\s*({_IDENT})\s*,\s*({_IDENT})\s*\)")
_LEAF_LINE = re.compile(rf"({_IDENT})\s*->\s*(\(.*\))")
_QID = re.compile(r"q(0|[1-9]\d*)")


def parse_automaton(text: str, check: bool = True) -> TreeAutomaton:
    """Parse the automaton line format.

    With ``check`` the result must pass :func:`validate`; the first
    diagnostic is reported as a :class:`ParseError`.
    """
    num_qubits = None
    roots: list[tuple[str, int, int]] = []
    internal: list[tuple] = []
    leaves: list[tuple] = []
    names: list[str] = []
    seen_names: set[str] = set()

    def note(name: str) -> str:
        if name not in seen_names:
            seen_names.add(name)
            names.append(name)
        return name

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        body = line.strip()
        if not body:
            continue
        col = len(line) - len(line.lstrip()) + 1
        words = body.split()
        if words[0] == "qubits":
            if num_qubits is not None:
                raise ParseError("duplicate 'qubits' line", lineno, col)
            if len(words) != 2 or not words[1].isdigit() or int(words[1]) < 1:
                raise ParseError("expected 'qubits <n>' with n >= 1", lineno, col)
            num_qubits = int(words[1])
            continue
        if words[0] == "root":
            for w in words[1:]:
                if not re.fullmatch(_IDENT, w):
                    raise ParseError(f"bad state name {w!r}", lineno, col + body.index(w))
                roots.append((note(w), lineno, col))
            continue
        m = _INTERNAL_LINE.fullmatch(body)
        if m:
            p, k, l, r = m.groups()
            internal.append((note(p), int(k), note(l), note(r), lineno, col))
            continue
        m = _LEAF_LINE.fullmatch(body)
        if m:
            p, amp_text = m.groups()
            try:
                amp = Amplitude.parse(amp_text)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, col + body.index(amp_text)) from None
            leaves.append((note(p), amp))
            continue
        raise ParseError(f"cannot parse line {body!r}", lineno, col)
    if num_qubits is None:
        raise ParseError("missing 'qubits <n>' line", 1, 1)
    for _, k, _, _, lineno, col in internal:
        if not 1 <= k <= num_qubits:
            raise ParseError(f"variable x{k} outside 1..{num_qubits}", lineno, col)
    if all(_QID.fullmatch(n) for n in names):
        ids = {n: int(n[1:]) for n in names}
    else:
        ids = {n: i for i, n in enumerate(names)}
    A = TreeAutomaton.build(
        num_qubits,
        (ids[r] for r, _, _ in roots),
        ((ids[p], k, None, ids[l], ids[r]) for p, k, l, r, _, _ in internal),
        ((ids[p], a) for p, a in leaves),
    )
    if check:
        diags = validate(A)
        if diags:
            raise ParseError(f"invalid automaton: {diags[0]}", 1, 1)
    return A


def serialize_automaton(A: TreeAutomaton) -> str:
    """Canonical text: states renumbered, one transition per line, sorted by parent."""
    if A.is_tagged():
        raise ValueError("tagged automata have no text form; untag first")
    B = compact(A)
    lines = [f"qubits {B.num_qubits}", "root " + " ".join(f"q{r}" for r in sorted(B.roots))]
    rows = [(p, 0, k, l, r) for p, k, _, l, r in B.internal]
    rows += [(p, 1, a) for p, a in B.leaves]
    for row in sorted(rows, key=lambda x: (x[0], x[1], x[2:] if x[1] == 0 else ())):
        if row[1] == 0:
            p, _, k, l, r = row
            lines.append(f"q{p} -x{k}-> (q{l}, q{r})")
        else:
            lines.append(f"q{row[0]} -> {row[2]!r}")
    return "\n".join(lines) + "\n"


# -- verdicts ------------------------------------------------------------------

EQUAL = "equal"
INCLUDED = "included"
VIOLATION = "violation"
RESULT_ONLY = "result-only"
POST_ONLY = "post-only"


@dataclass
class Verdict:
    """Outcome of checking a circuit's result against a postcondition."""

    outcome: str
    witness: StateTree | None = None
    side: str | None = None
    stats: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.outcome not in (EQUAL, INCLUDED, VIOLATION):
            raise ValueError(f"unknown outcome {self.outcome!r}")
        if (self.outcome == VIOLATION) != (self.witness is not None):
            raise ValueError("a witness is present exactly for violations")
        if self.witness is not None and self.side not in (RESULT_ONLY, POST_ONLY):
            raise ValueError(f"bad witness side {self.side!r}")

    @property
    def ok(self) -> bool:
        return self.outcome != VIOLATION


def witness_json(tree: StateTree, side: str | None = None) -> dict[str, Any]:
    basis = [
        {"basis": b, "amplitude": list(a)}
        for b, a in sorted(tree.basis_map().items())
        if not a.is_zero()
    ]
    out: dict[str, Any] = {}
    if side is not None:
        out["side"] = side
    out["basis"] = basis
    out["dirac"] = tree.dirac()
    out["automaton"] = serialize_automaton(from_trees(tree.num_qubits, [tree.strip()]))
    return out


def verdict_json(v: Verdict) -> dict[str, Any]:
    return {
        "outcome": v.outcome,
        "witness": None if v.witness is None else witness_json(v.witness, v.side),
        "stats": v.stats,
        "schema": SCHEMA,
    }


def serialize_verdict(v: Verdict, indent: int | None = 2) -> str:
    return json.dumps(verdict_json(v), indent=indent)
