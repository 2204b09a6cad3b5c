"""Concrete states and the brute-force reference semantics.

A :class:`StateTree` is one full binary tree of height n; a :class:`StateVector`
is its dense 2^n-entry form.  :func:`apply_gate_matrix` multiplies by the
lifted gate matrix directly on basis indices and is used as the independent
oracle for every automaton transformer.  It is exponential on purpose.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import TYPE_CHECKING, NamedTuple, Union

from .amplitude import (
    INV_SQRT2,
    ONE,
    ZERO,
    Amplitude,
    add,
    div_sqrt2,
    mul_omega_pow,
    negate,
    to_complex,
)
from .circuit import Gate, QuantumCircuit

if TYPE_CHECKING:
    from .automaton import TreeAutomaton

Tag = Union[None, int, tuple[int, int]]


class Symbol(NamedTuple):
    """Internal node label ``x_qubit`` with an optional tag (id, or merged id pair)."""

    qubit: int
    tag: Tag = None

    def __str__(self) -> str:
        if self.tag is None:
            return f"x{self.qubit}"
        if isinstance(self.tag, tuple):
            return f"x{self.qubit}^{self.tag[0]},{self.tag[1]}"
        return f"x{self.qubit}^{self.tag}"


class LimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class StateTree:
    """A full binary tree of height ``num_qubits``.

    ``labels`` holds the 2^n - 1 internal node symbols in breadth-first order
    (node i has children 2i+1 and 2i+2); ``leaves`` holds the 2^n leaf
    amplitudes left to right.  Going left means the node's variable is 0.
    """

    num_qubits: int
    labels: tuple[Symbol, ...]
    leaves: tuple[Amplitude, ...]

    def __post_init__(self) -> None:
        n = self.num_qubits
        if len(self.leaves) != 1 << n or len(self.labels) != (1 << n) - 1:
            raise ValueError(f"malformed tree: height {n} needs {1 << n} leaves")

    @classmethod
    def from_leaves(cls, leaves) -> StateTree:
        """Tree in the standard variable order (depth d carries x_{d+1})."""
        leaves = tuple(x if isinstance(x, Amplitude) else Amplitude(*x) for x in leaves)
        n = len(leaves).bit_length() - 1
        if n < 0 or 1 << n != len(leaves):
            raise ValueError(f"leaf count {len(leaves)} is not a power of two")
        labels = tuple(Symbol(d + 1) for d in range(n) for _ in range(1 << d))
        return cls(n, labels, leaves)

    def strip(self) -> StateTree:
        """The same tree with all tags erased."""
        if all(s.tag is None for s in self.labels):
            return self
        return StateTree(self.num_qubits, tuple(Symbol(s.qubit) for s in self.labels), self.leaves)

    def tag(self) -> tuple[Symbol, ...]:
        """Tree shape with leaves replaced by a placeholder; only the labels matter."""
        return self.labels

    def is_single_valued(self) -> bool:
        return len(set(self.leaves)) == 1

    def basis_map(self) -> dict[str, Amplitude]:
        """Map each basis string (qubit 1 first) to its amplitude, reading node labels."""
        n = self.num_qubits
        out: dict[str, Amplitude] = {}
        for i, amp in enumerate(self.leaves):
            bits = [""] * n
            node = 0
            for depth in range(n):
                b = (i >> (n - 1 - depth)) & 1
                q = self.labels[node].qubit
                if not 1 <= q <= n or bits[q - 1]:
                    raise ValueError(f"malformed tree: variable x{q} repeated or out of range on a branch")
                bits[q - 1] = "01"[b]
                node = 2 * node + 1 + b
            out["".join(bits)] = amp
        return out

    def dirac(self) -> str:
        terms = [f"{amp!r}|{basis}>" for basis, amp in sorted(self.basis_map().items()) if not amp.is_zero()]
        return " + ".join(terms) if terms else "0"

    def __str__(self) -> str:
        def render(node: int, depth: int) -> str:
            if depth == self.num_qubits:
                return repr(self.leaves[node - ((1 << self.num_qubits) - 1)])
            return f"{self.labels[node]}({render(2 * node + 1, depth + 1)},{render(2 * node + 2, depth + 1)})"

        return render(0, 0)


@dataclass(frozen=True)
class StateVector:
    num_qubits: int
    amps: tuple[Amplitude, ...]

    def __post_init__(self) -> None:
        if len(self.amps) != 1 << self.num_qubits:
            raise ValueError(f"vector of {self.num_qubits} qubits needs {1 << self.num_qubits} entries")

    @classmethod
    def basis(cls, bits: str) -> StateVector:
        n = len(bits)
        idx = int(bits, 2) if bits else 0
        return cls(n, tuple(ONE if j == idx else ZERO for j in range(1 << n)))

    def norm_squared(self) -> float:
        return sum(abs(to_complex(a)) ** 2 for a in self.amps)


def tree_to_vector(t: StateTree) -> StateVector:
    n = t.num_qubits
    amps = [ZERO] * (1 << n)
    for basis, amp in t.basis_map().items():
        amps[int(basis, 2) if basis else 0] = amp
    return StateVector(n, tuple(amps))


def vector_to_tree(v: StateVector) -> StateTree:
    return StateTree.from_leaves(v.amps)


# -- gate matrices --------------------------------------------------------

_W2 = Amplitude(0, 0, 1, 0, 0)  # w^2 = i
_M = Amplitude(-1, 0, 0, 0, 0)
_O, _I = ZERO, ONE


def _h(x: Amplitude) -> Amplitude:
    return div_sqrt2(x)


def _perm(rows: list[int]) -> tuple[tuple[Amplitude, ...], ...]:
    size = len(rows)
    return tuple(tuple(_I if rows[r] == c else _O for c in range(size)) for r in range(size))


GATE_MATRICES: dict[str, tuple[tuple[Amplitude, ...], ...]] = {
    "X": ((_O, _I), (_I, _O)),
    "Y": ((_O, negate(_W2)), (_W2, _O)),
    "Z": ((_I, _O), (_O, _M)),
    "H": ((INV_SQRT2, INV_SQRT2), (INV_SQRT2, _h(_M))),
    "S": ((_I, _O), (_O, _W2)),
    "T": ((_I, _O), (_O, mul_omega_pow(ONE, 1))),
    "Rx90": ((INV_SQRT2, _h(negate(_W2))), (_h(negate(_W2)), INV_SQRT2)),
    "Ry90": ((INV_SQRT2, _h(_M)), (INV_SQRT2, INV_SQRT2)),
    "CZ": ((_I, _O, _O, _O), (_O, _I, _O, _O), (_O, _O, _I, _O), (_O, _O, _O, _M)),
    "CNOT": _perm([0, 1, 3, 2]),
    "Toffoli": _perm([0, 1, 2, 3, 4, 5, 7, 6]),
    "Fredkin": _perm([0, 1, 2, 3, 4, 6, 5, 7]),
}


def _as_monomial(x: Amplitude) -> tuple[int, int]:
    """Decompose a matrix entry as w^p * (1/sqrt2)^j."""
    nz = [(i, v) for i, v in enumerate(x[:4]) if v]
    if len(nz) != 1 or abs(nz[0][1]) != 1:
        raise ValueError(f"matrix entry {x!r} is not a monomial")
    i, v = nz[0]
    return (i + (4 if v < 0 else 0), x.k)


def _sparse(matrix) -> list[tuple[int, int, int, int]]:
    return [
        (r, c, *_as_monomial(e))
        for r, row in enumerate(matrix)
        for c, e in enumerate(row)
        if not e.is_zero()
    ]


_SPARSE = {kind: _sparse(m) for kind, m in GATE_MATRICES.items()}


def is_unitary(matrix, tol: float = 1e-9) -> bool:
    m = [[to_complex(e) for e in row] for row in matrix]
    size = len(m)
    for i in range(size):
        for j in range(size):
            s = sum(m[k][i].conjugate() * m[k][j] for k in range(size))
            if abs(s - (1.0 if i == j else 0.0)) > tol:
                return False
    return True


def _scale(x: Amplitude, p: int, j: int) -> Amplitude:
    if x.is_zero():
        return x
    y = mul_omega_pow(x, p)
    for _ in range(j):
        y = div_sqrt2(y)
    return y


def apply_gate_matrix(v: StateVector, g: Gate) -> StateVector:
    """``v' = U' v`` where U' lifts the gate matrix onto the gate's wires."""
    n = v.num_qubits
    g.check_width(n)
    shifts = [n - q for q in g.qubits]
    width = len(shifts)
    mask = 0
    for s in shifts:
        mask |= 1 << s
    spread = []
    for local in range(1 << width):
        bits = 0
        for pos, s in enumerate(shifts):
            if (local >> (width - 1 - pos)) & 1:
                bits |= 1 << s
        spread.append(bits)
    by_row: dict[int, list[tuple[int, int, int]]] = {}
    for r, c, p, j in _SPARSE[g.kind]:
        by_row.setdefault(r, []).append((c, p, j))
    out = [ZERO] * (1 << n)
    for idx in range(1 << n):
        base = idx & ~mask
        row = spread.index(idx & mask)
        acc = ZERO
        for c, p, j in by_row.get(row, ()):
            acc = add(acc, _scale(v.amps[base | spread[c]], p, j))
        out[idx] = acc
    return StateVector(n, tuple(out))


def simulate(v: StateVector, circuit: QuantumCircuit) -> StateVector:
    for g in circuit.gates:
        v = apply_gate_matrix(v, g)
    return v


def apply_gate_tree(t: StateTree, g: Gate) -> StateTree:
    return vector_to_tree(apply_gate_matrix(tree_to_vector(t), g))


# -- language enumeration --------------------------------------------------


def _flatten(n: int, nested) -> StateTree:
    labels: list[Symbol] = []
    level = [nested]
    for _ in range(n):
        nxt = []
        for sym, left, right in level:
            labels.append(sym)
            nxt.append(left)
            nxt.append(right)
        level = nxt
    return StateTree(n, tuple(labels), tuple(level))


def enumerate_language(A: TreeAutomaton, limit: int = 4096, keep_tags: bool = False) -> set[StateTree]:
    """All trees accepted by ``A``; tags are erased unless ``keep_tags``.

    Raises:
        LimitExceeded: if more than ``limit`` trees would be produced.
    """
    from .automaton import trim

    A = trim(A)
    leaf = dict(A.leaves)
    out_trans: dict[int, list] = {}
    for p, k, tag, l, r in A.internal:
        out_trans.setdefault(p, []).append((Symbol(k, tag if keep_tags else None), l, r))
    memo: dict[int, list] = {}

    def trees(q: int) -> list:
        if q in memo:
            return memo[q]
        seen = set()
        result = []
        if q in leaf:
            seen.add(leaf[q])
            result.append(leaf[q])
        for sym, l, r in out_trans.get(q, ()):
            for lt, rt in product(trees(l), trees(r)):
                t = (sym, lt, rt)
                if t not in seen:
                    seen.add(t)
                    result.append(t)
                    if len(result) > limit:
                        raise LimitExceeded(f"more than {limit} trees")
        memo[q] = result
        return result

    found: set[StateTree] = set()
    for root in sorted(A.roots):
        for t in trees(root):
            found.add(_flatten(A.num_qubits, t) if A.num_qubits else StateTree(0, (), (t,)))
            if len(found) > limit:
                raise LimitExceeded(f"more than {limit} trees")
    return found


def image(trees, circuit_or_gate) -> set[StateTree]:
    """Apply a gate or circuit to every tree through the matrix oracle."""
    gates = [circuit_or_gate] if isinstance(circuit_or_gate, Gate) else list(circuit_or_gate.gates)
    out = set()
    for t in trees:
        v = tree_to_vector(t)
        for g in gates:
            v = apply_gate_matrix(v, g)
        out.add(vector_to_tree(v))
    return out
