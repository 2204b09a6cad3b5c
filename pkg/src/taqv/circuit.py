"""Gates and circuits.

Qubits are 1-based wire indices: qubit 1 is the topmost tree variable x_1 and
the most significant bit of a basis string.  OpenQASM's ``q[0]`` is qubit 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

SINGLE_QUBIT = ("X", "Y", "Z", "H", "S", "T", "Rx90", "Ry90")
CONTROLLED = ("CNOT", "CZ", "Toffoli")
GATE_KINDS = SINGLE_QUBIT + CONTROLLED + ("Fredkin",)

ARITY = {**{g: 1 for g in SINGLE_QUBIT}, "CNOT": 2, "CZ": 2, "Toffoli": 3, "Fredkin": 3}


@dataclass(frozen=True)
class Gate:
    """A gate applied to ``qubits``.

    The qubit order follows the gate matrix: controls first, target last.
    Fredkin is ``(control, a, b)`` and swaps a with b.
    """

    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qs = tuple(int(q) for q in self.qubits)
        if len(qs) != ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {ARITY[self.kind]} qubit(s), got {len(qs)}")
        if len(set(qs)) != len(qs):
            raise ValueError(f"{self.kind} on duplicate qubits {qs}")
        if any(q < 1 for q in qs):
            raise ValueError(f"qubit indices are 1-based, got {qs}")
        if self.kind == "Toffoli" and qs[0] > qs[1]:
            qs = (qs[1], qs[0], qs[2])
        object.__setattr__(self, "qubits", qs)

    @property
    def target(self) -> int:
        return self.qubits[-1]

    @property
    def controls(self) -> tuple[int, ...]:
        if self.kind == "Fredkin":
            return self.qubits[:1]
        return self.qubits[:-1]

    def check_width(self, n: int) -> None:
        bad = [q for q in self.qubits if q > n]
        if bad:
            raise ValueError(f"{self} uses qubit {bad[0]} outside 1..{n}")

    def __str__(self) -> str:
        return f"{self.kind}({', '.join(map(str, self.qubits))})"


def X(t: int) -> Gate:
    return Gate("X", (t,))


def H(t: int) -> Gate:
    return Gate("H", (t,))


def Z(t: int) -> Gate:
    return Gate("Z", (t,))


def CNOT(c: int, t: int) -> Gate:
    return Gate("CNOT", (c, t))


def CZ(c: int, t: int) -> Gate:
    return Gate("CZ", (c, t))


def Toffoli(c1: int, c2: int, t: int) -> Gate:
    return Gate("Toffoli", (c1, c2, t))


@dataclass(frozen=True)
class QuantumCircuit:
    """Gates in application order over ``num_qubits`` wires."""

    num_qubits: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        for g in self.gates:
            g.check_width(self.num_qubits)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)
