"""Gate application on tree automata.

Two families of transformers are provided.  Permutation transformers rewire
transitions directly and cover gates with one nonzero entry per matrix row
when controls sit above the target.  Composition transformers tag the
automaton, build each term of the gate's update formula with projection,
restriction and constant multiplication, sum the terms with a tag-matching
product, and untag.  :func:`apply_gate` dispatches between them.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import count

from .amplitude import INV_SQRT2, OMEGA, ZERO, Amplitude, add, div_sqrt2, mul_omega_pow, negate, sub
from .automaton import Transition, TreeAutomaton, reduce, tag, tag_key, trim, untag
from .circuit import CNOT, Gate, Toffoli

HYBRID = "hybrid"
COMPOSITION = "composition"
MODES = (HYBRID, COMPOSITION)


class FallbackRequired(ValueError):
    """A permutation transformer cannot handle this gate; use composition instead."""


def _require_untagged(A: TreeAutomaton, what: str) -> None:
    if A.is_tagged():
        raise ValueError(f"{what} expects an untagged automaton")


def _require_tagged(A: TreeAutomaton, what: str) -> None:
    if any(t[2] is None for t in A.internal):
        raise ValueError(f"{what} expects a tagged automaton")


# -- permutation transformers ----------------------------------------------

# (scalar on the 0-branch, scalar on the 1-branch), as powers of w.
# Y scales first and swaps afterwards, so its 1-branch scalar lands on the 0 side.
_BRANCH_SCALARS = {"Z": (0, 4), "S": (0, 2), "T": (0, 1), "Y": (2, 6)}


def _scale_branches(A: TreeAutomaton, t: int, p0: int, p1: int) -> TreeAutomaton:
    base = A.fresh()
    internal: set[Transition] = set()
    for p, k, tg, l, r in A.internal:
        internal.add((p + base, k, tg, l + base, r + base))
        internal.add((p, k, tg, l, r + base) if k == t else (p, k, tg, l, r))
    leaves = {(p, mul_omega_pow(a, p0)) for p, a in A.leaves}
    leaves |= {(p + base, mul_omega_pow(a, p1)) for p, a in A.leaves}
    return trim(TreeAutomaton.build(A.num_qubits, A.roots, internal, leaves))


def _swap_children(A: TreeAutomaton, t: int) -> TreeAutomaton:
    internal = frozenset((p, k, tg, r, l) if k == t else (p, k, tg, l, r) for p, k, tg, l, r in A.internal)
    return TreeAutomaton(A.num_qubits, A.roots, internal, A.leaves)


def apply_perm_single(A: TreeAutomaton, g: Gate) -> TreeAutomaton:
    """X, Y, Z, S or T by branch scaling through a primed copy and/or child swapping."""
    if g.kind not in ("X", "Y", "Z", "S", "T"):
        raise FallbackRequired(f"no permutation transformer for {g.kind}")
    _require_untagged(A, "apply_perm_single")
    g.check_width(A.num_qubits)
    t = g.target
    if g.kind in _BRANCH_SCALARS:
        A = _scale_branches(A, t, *_BRANCH_SCALARS[g.kind])
    if g.kind in ("X", "Y"):
        A = _swap_children(A, t)
    return A


def apply_perm_controlled(A: TreeAutomaton, g: Gate) -> TreeAutomaton:
    """CNOT, CZ or Toffoli with every control above the target.

    The gate restricted to the control's 1-branch is built as a transformed
    copy, and each x_c transition sends its right child into that copy.
    """
    if g.kind not in ("CNOT", "CZ", "Toffoli"):
        raise FallbackRequired(f"no controlled permutation transformer for {g.kind}")
    _require_untagged(A, "apply_perm_controlled")
    g.check_width(A.num_qubits)
    c, t = g.controls[0], g.target
    if max(g.controls) >= t:
        raise FallbackRequired(f"{g}: controls must lie above the target")
    if g.kind == "CNOT":
        inner = apply_perm_single(A, Gate("X", (t,)))
    elif g.kind == "CZ":
        inner = apply_perm_single(A, Gate("Z", (t,)))
    else:
        inner = apply_perm_controlled(A, CNOT(g.controls[1], t))
    base = max(A.fresh(), inner.fresh())
    internal: set[Transition] = {(p + base, k, tg, l + base, r + base) for p, k, tg, l, r in inner.internal}
    for p, k, tg, l, r in A.internal:
        internal.add((p, k, tg, l, r + base) if k == c else (p, k, tg, l, r))
    leaves = set(A.leaves) | {(p + base, a) for p, a in inner.leaves}
    return trim(TreeAutomaton.build(A.num_qubits, A.roots, internal, leaves))


# -- composition primitives -------------------------------------------------


def restrict(A: TreeAutomaton, t: int, value: bool) -> TreeAutomaton:
    """Zero every branch where x_t differs from ``value``.

    The killed child of each x_t transition is redirected into a primed copy
    whose leaves are all zero; the copy has the same tags, so tree tags are kept.
    """
    _require_tagged(A, "restrict")
    base = A.fresh()
    internal: set[Transition] = set()
    for p, k, tg, l, r in A.internal:
        internal.add((p + base, k, tg, l + base, r + base))
        if k == t:
            internal.add((p, k, tg, l + base, r) if value else (p, k, tg, l, r + base))
        else:
            internal.add((p, k, tg, l, r))
    leaves = set(A.leaves) | {(p + base, ZERO) for p, _ in A.leaves}
    return trim(TreeAutomaton.build(A.num_qubits, A.roots, internal, leaves))


def mult_const(A: TreeAutomaton, v: Amplitude) -> TreeAutomaton:
    """Multiply every leaf by ``v``, which must be w or 1/sqrt2."""
    if v == OMEGA:
        scale = lambda a: mul_omega_pow(a, 1)  # noqa: E731
    elif v == INV_SQRT2:
        scale = div_sqrt2
    else:
        raise ValueError(f"mult_const supports w and 1/sqrt2 only, got {v!r}")
    leaves = frozenset((p, scale(a)) for p, a in A.leaves)
    return TreeAutomaton(A.num_qubits, A.roots, A.internal, leaves)


def subtree_copy(A: TreeAutomaton, t: int, value: bool) -> TreeAutomaton:
    """Make both children of each x_t transition the ``value``-side child.

    Only sound when x_t is the layer directly above the leaves.
    """
    _require_tagged(A, "subtree_copy")
    leaf = A.leaf_map
    internal = set()
    for p, k, tg, l, r in A.internal:
        if k == t:
            if l not in leaf or r not in leaf:
                raise ValueError(f"subtree copy on x{t} requires x{t} to be the layer above the leaves")
            c = r if value else l
            internal.add((p, k, tg, c, c))
        else:
            internal.add((p, k, tg, l, r))
    return trim(TreeAutomaton.build(A.num_qubits, A.roots, internal, A.leaves))


def f_swap(A: TreeAutomaton, t: int) -> TreeAutomaton:
    """Move x_t one layer down, recording the two lower tags on the lifted symbol."""
    _require_tagged(A, "f_swap")
    out = A.out
    fresh = count(A.fresh())
    removed: set[Transition] = set()
    added: set[Transition] = set()
    for top in sorted(A.internal, key=_key):
        q, k, h, q0, q1 = top
        if k != t:
            continue
        if not out.get(q0) or not out.get(q1):
            raise ValueError(f"forward swap on x{t}: x{t} is already the last variable")
        removed.add(top)
        for left in out[q0]:
            for right in out[q1]:
                _, low, i, q00, q01 = left
                _, low_r, j, q10, q11 = right
                if low != low_r:
                    raise ValueError(f"forward swap on x{t}: children carry x{low} and x{low_r}")
                if isinstance(i, tuple) or isinstance(j, tuple) or i is None or j is None:
                    raise ValueError(f"forward swap on x{t}: x{low} must carry single tags")
                n0, n1 = next(fresh), next(fresh)
                added.add((q, low, (i, j), n0, n1))
                added.add((n0, t, h, q00, q10))
                added.add((n1, t, h, q01, q11))
                removed.add(left)
                removed.add(right)
    internal = (A.internal - removed) | added
    return trim(TreeAutomaton.build(A.num_qubits, A.roots, internal, A.leaves))


def b_swap(A: TreeAutomaton, t: int) -> TreeAutomaton:
    """Undo one forward swap of x_t, restoring the recorded tags."""
    _require_tagged(A, "b_swap")
    out = A.out
    fresh = count(A.fresh())
    removed: set[Transition] = set()
    added: set[Transition] = set()
    for top in sorted(A.internal, key=_key):
        q, low, ij, n0, n1 = top
        if not isinstance(ij, tuple):
            continue
        lefts = [x for x in out.get(n0, ()) if x[1] == t]
        rights = [x for x in out.get(n1, ()) if x[1] == t]
        if not lefts or not rights:
            continue
        i, j = ij
        removed.add(top)
        for left in lefts:
            for right in rights:
                _, _, h, q00, q10 = left
                _, _, h_r, q01, q11 = right
                if h != h_r:
                    continue
                m0, m1 = next(fresh), next(fresh)
                added.add((q, t, h, m0, m1))
                added.add((m0, low, i, q00, q01))
                added.add((m1, low, j, q10, q11))
                removed.add(left)
                removed.add(right)
    if not removed:
        raise ValueError(f"backward swap on x{t}: no merged-tag layer above x{t}")
    internal = (A.internal - removed) | added
    return trim(TreeAutomaton.build(A.num_qubits, A.roots, internal, A.leaves))


def project(A: TreeAutomaton, t: int, value: bool) -> TreeAutomaton:
    """Fix x_t to ``value`` in every tree: copy that subtree over the other one.

    x_t is first pushed down to the bottom layer, copied there, then lifted back.
    """
    _require_tagged(A, "project")
    steps = A.num_qubits - t
    for _ in range(steps):
        A = reduce(f_swap(A, t))
    A = reduce(subtree_copy(A, t, value))
    for _ in range(steps):
        A = reduce(b_swap(A, t))
    return A


def binary_op(A1: TreeAutomaton, A2: TreeAutomaton, op: str) -> TreeAutomaton:
    """Pointwise sum or difference of identically tagged trees (product construction)."""
    if op not in ("+", "-"):
        raise ValueError(f"binary_op expects '+' or '-', got {op!r}")
    if A1.num_qubits != A2.num_qubits:
        raise ValueError("binary_op on automata of different qubit counts")
    _require_tagged(A1, "binary_op")
    _require_tagged(A2, "binary_op")
    combine = add if op == "+" else sub
    by_sym2: dict[int, dict] = defaultdict(lambda: defaultdict(list))
    for p, k, tg, l, r in A2.internal:
        by_sym2[p][(k, tg)].append((l, r))
    leaf1, leaf2 = A1.leaf_map, A2.leaf_map
    ids: dict[tuple[int, int], int] = {}
    work: list[tuple[int, int]] = []

    def state(pair: tuple[int, int]) -> int:
        if pair not in ids:
            ids[pair] = len(ids)
            work.append(pair)
        return ids[pair]

    roots = [state((r1, r2)) for r1 in sorted(A1.roots) for r2 in sorted(A2.roots)]
    internal: set[Transition] = set()
    leaves: set[tuple[int, Amplitude]] = set()
    while work:
        p1, p2 = work.pop()
        me = ids[(p1, p2)]
        if p1 in leaf1 and p2 in leaf2:
            leaves.add((me, combine(leaf1[p1], leaf2[p2])))
        syms2 = by_sym2.get(p2)
        if not syms2:
            continue
        for _, k, tg, l1, r1 in A1.out.get(p1, ()):
            for l2, r2 in syms2.get((k, tg), ()):
                internal.add((me, k, tg, state((l1, l2)), state((r1, r2))))
    return trim(TreeAutomaton.build(A1.num_qubits, roots, internal, leaves))


def _key(t: Transition) -> tuple:
    p, k, tg, l, r = t
    return (p, k, tag_key(tg), l, r)


# -- update formulae --------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """``sign * w^omega * B_restrictions . (T projected on projections)``."""

    negative: bool = False
    omega: int = 0
    projections: tuple[tuple[int, bool], ...] = ()
    restrictions: tuple[tuple[int, bool], ...] = ()


def _x_terms(t: int, ctx=()) -> list[Term]:
    return [
        Term(restrictions=ctx + ((t, False),), projections=((t, True),)),
        Term(restrictions=ctx + ((t, True),), projections=((t, False),)),
    ]


def update_formula(g: Gate) -> tuple[list[Term], int]:
    """Terms of the gate's update formula and the number of trailing 1/sqrt2 factors."""
    kind, t = g.kind, g.target
    if kind == "X":
        return [Term(restrictions=((t, True),), projections=((t, False),)),
                Term(restrictions=((t, False),), projections=((t, True),))], 0
    if kind == "Y":
        return [Term(omega=2, restrictions=((t, True),), projections=((t, False),)),
                Term(negative=True, omega=2, restrictions=((t, False),), projections=((t, True),))], 0
    if kind == "Z":
        return [Term(restrictions=((t, False),)), Term(negative=True, restrictions=((t, True),))], 0
    if kind in ("S", "T"):
        return [Term(restrictions=((t, False),)),
                Term(omega=2 if kind == "S" else 1, restrictions=((t, True),))], 0
    if kind == "H":
        return [Term(projections=((t, False),)),
                Term(restrictions=((t, False),), projections=((t, True),)),
                Term(negative=True, restrictions=((t, True),))], 1
    if kind == "Rx90":
        return [Term(),
                Term(negative=True, omega=2, restrictions=((t, True),), projections=((t, False),)),
                Term(negative=True, omega=2, restrictions=((t, False),), projections=((t, True),))], 1
    if kind == "Ry90":
        return [Term(projections=((t, False),)),
                Term(restrictions=((t, True),)),
                Term(negative=True, restrictions=((t, False),), projections=((t, True),))], 1
    if kind == "CNOT":
        c = g.controls[0]
        return [Term(restrictions=((c, False),)), *_x_terms(t, ((c, True),))], 0
    if kind == "CZ":
        c = g.controls[0]
        return [Term(restrictions=((c, False),)),
                Term(restrictions=((c, True), (t, False))),
                Term(negative=True, restrictions=((c, True), (t, True)))], 0
    if kind == "Toffoli":
        c1, c2 = g.controls
        return [Term(restrictions=((c1, False),)),
                Term(restrictions=((c1, True), (c2, False))),
                *_x_terms(t, ((c1, True), (c2, True)))], 0
    raise ValueError(f"no update formula for {kind}")


def _build_term(tagged: TreeAutomaton, term: Term, cache: dict) -> TreeAutomaton:
    A = tagged
    for q, b in term.projections:
        key = (q, b)
        if key not in cache:
            cache[key] = project(tagged, q, b)
        A = cache[key]
    for q, b in term.restrictions:
        A = restrict(A, q, b)
    for _ in range(term.omega):
        A = mult_const(A, OMEGA)
    return A


def apply_composition(A: TreeAutomaton, g: Gate) -> TreeAutomaton:
    """Apply ``g`` by composing its update formula over a tagged copy of ``A``."""
    _require_untagged(A, "apply_composition")
    g.check_width(A.num_qubits)
    if g.kind == "Fredkin":
        for sub_gate in fredkin_decomposition(g):
            A = apply_composition(A, sub_gate)
        return A
    A = reduce(A)  # fewer duplicate runs means fewer tagged trees to carry through
    if not A.roots:
        return A
    terms, halvings = update_formula(g)
    tagged = tag(A)
    cache: dict = {}
    acc = None
    for term in terms:
        part = _build_term(tagged, term, cache)
        if acc is None:
            if term.negative:
                part = _negate_leaves(part)
            acc = part
        else:
            acc = reduce(binary_op(acc, part, "-" if term.negative else "+"))
    for _ in range(halvings):
        acc = mult_const(acc, INV_SQRT2)
    return reduce(untag(acc))


def _negate_leaves(A: TreeAutomaton) -> TreeAutomaton:
    return TreeAutomaton(A.num_qubits, A.roots, A.internal, frozenset((p, negate(a)) for p, a in A.leaves))


# -- dispatch ----------------------------------------------------------------


def fredkin_decomposition(g: Gate) -> tuple[Gate, Gate, Gate]:
    """Controlled swap of a and b as CNOT(b->a), Toffoli(c,a->b), CNOT(b->a)."""
    c, a, b = g.qubits
    return (CNOT(b, a), Toffoli(c, a, b), CNOT(b, a))


def uses_permutation(g: Gate) -> bool:
    """Whether hybrid mode handles ``g`` with a permutation transformer."""
    if g.kind in ("X", "Y", "Z", "S", "T"):
        return True
    if g.kind in ("CNOT", "CZ", "Toffoli"):
        return max(g.controls) < g.target
    return False


def apply_gate(A: TreeAutomaton, g: Gate, mode: str = HYBRID) -> TreeAutomaton:
    """Image of L(A) under ``g``, reduced."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    if not isinstance(g, Gate):
        raise ValueError(f"unknown gate {g!r}")
    g.check_width(A.num_qubits)
    if g.kind == "Fredkin":
        for sub_gate in fredkin_decomposition(g):
            A = apply_gate(A, sub_gate, mode)
        return A
    if mode == HYBRID and uses_permutation(g):
        if g.kind in ("CNOT", "CZ", "Toffoli"):
            return reduce(apply_perm_controlled(A, g))
        return reduce(apply_perm_single(A, g))
    return apply_composition(A, g)


__all__ = [
    "COMPOSITION",
    "HYBRID",
    "MODES",
    "FallbackRequired",
    "Term",
    "apply_composition",
    "apply_gate",
    "apply_perm_controlled",
    "apply_perm_single",
    "b_swap",
    "binary_op",
    "f_swap",
    "fredkin_decomposition",
    "mult_const",
    "project",
    "restrict",
    "subtree_copy",
    "update_formula",
    "uses_permutation",
]
