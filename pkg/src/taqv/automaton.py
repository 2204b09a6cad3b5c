"""Finite tree automata over full binary trees whose leaves are amplitudes.

An automaton is a frozen value: ``internal`` holds transitions
``(parent, qubit, tag, left, right)`` and ``leaves`` holds ``(parent, amplitude)``.
States are plain ints.  Every operation returns a new automaton.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from .amplitude import ONE, ZERO, Amplitude
from .tree_oracle import StateTree, Symbol, Tag, _flatten

Transition = tuple[int, int, Tag, int, int]

FIRST_ONLY = "first-only"
SECOND_ONLY = "second-only"


def tag_key(tag: Tag) -> tuple:
    if tag is None:
        return (0,)
    if isinstance(tag, tuple):
        return (2, *tag)
    return (1, tag)


def _trans_key(t: Transition) -> tuple:
    p, k, tag, l, r = t
    return (p, k, tag_key(tag), l, r)


@dataclass(frozen=True)
class TreeAutomaton:
    num_qubits: int
    roots: frozenset[int]
    internal: frozenset[Transition]
    leaves: frozenset[tuple[int, Amplitude]]

    @classmethod
    def build(
        cls,
        num_qubits: int,
        roots: Iterable[int],
        internal: Iterable[Transition],
        leaves: Iterable[tuple[int, Amplitude]],
    ) -> TreeAutomaton:
        return cls(num_qubits, frozenset(roots), frozenset(internal), frozenset(leaves))

    @cached_property
    def states(self) -> frozenset[int]:
        s = set(self.roots)
        for p, _, _, l, r in self.internal:
            s.update((p, l, r))
        s.update(p for p, _ in self.leaves)
        return frozenset(s)

    @cached_property
    def leaf_map(self) -> dict[int, Amplitude]:
        return dict(self.leaves)

    @cached_property
    def out(self) -> dict[int, list[Transition]]:
        d: dict[int, list[Transition]] = defaultdict(list)
        for t in sorted(self.internal, key=_trans_key):
            d[t[0]].append(t)
        return d

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_transitions(self) -> int:
        return len(self.internal) + len(self.leaves)

    def is_tagged(self) -> bool:
        return any(t[2] is not None for t in self.internal)

    def fresh(self) -> int:
        """Smallest id above every state in use."""
        return max(self.states, default=-1) + 1

    def __str__(self) -> str:
        from .frontend import serialize_automaton

        return serialize_automaton(self)


# -- structural checks -----------------------------------------------------


def validate(A: TreeAutomaton) -> list[str]:
    """Return diagnostics; an empty list means the automaton is well formed."""
    diags: list[str] = []
    n = A.num_qubits
    amps: dict[int, set] = defaultdict(set)
    for p, amp in A.leaves:
        amps[p].add(amp)
    for p in sorted(amps):
        if len(amps[p]) > 1:
            shown = ", ".join(sorted(map(repr, amps[p])))
            diags.append(f"leaf-parent uniqueness: state {p} has leaf transitions to {shown}")
    has_trans = set(amps) | {t[0] for t in A.internal}
    for t in sorted(A.internal, key=_trans_key):
        p, k, tag, l, r = t
        if not 1 <= k <= n:
            diags.append(f"qubit range: transition {_show(t)} uses x{k} outside 1..{n}")
        for child in (l, r):
            if child not in has_trans:
                diags.append(f"dangling: transition {_show(t)} refers to state {child} without transitions")
    depth: dict[int, int] = {}
    queue = deque()
    for q in sorted(A.roots):
        depth[q] = 0
        queue.append(q)
    while queue:
        q = queue.popleft()
        d = depth[q]
        if q in amps and d != n:
            diags.append(f"layering: leaf transition from state {q} at depth {d}, expected depth {n}")
        for t in A.out.get(q, ()):
            if d >= n or t[1] != d + 1:
                diags.append(f"layering: transition {_show(t)} fires x{t[1]} at depth {d}")
                continue
            for child in (t[3], t[4]):
                if child not in depth:
                    depth[child] = d + 1
                    queue.append(child)
                elif depth[child] != d + 1:
                    diags.append(f"layering: state {child} reachable at depths {depth[child]} and {d + 1}")
    return diags


def _show(t: Transition) -> str:
    p, k, tag, l, r = t
    return f"{p} -{Symbol(k, tag)}-> ({l}, {r})"


# -- trimming, renumbering, reduction --------------------------------------


def trim(A: TreeAutomaton) -> TreeAutomaton:
    """Drop states that lie on no accepting run."""
    productive = {p for p, _ in A.leaves}
    parents_of: dict[int, list[Transition]] = defaultdict(list)
    for t in A.internal:
        parents_of[t[3]].append(t)
        if t[4] != t[3]:
            parents_of[t[4]].append(t)
    work = list(productive)
    while work:
        q = work.pop()
        for t in parents_of.get(q, ()):
            p = t[0]
            if p not in productive and t[3] in productive and t[4] in productive:
                productive.add(p)
                work.append(p)
    useful_trans = [t for t in A.internal if t[3] in productive and t[4] in productive]
    by_parent: dict[int, list[Transition]] = defaultdict(list)
    for t in useful_trans:
        by_parent[t[0]].append(t)
    roots = A.roots & productive
    reach = set(roots)
    work = list(roots)
    while work:
        q = work.pop()
        for t in by_parent.get(q, ()):
            for c in (t[3], t[4]):
                if c not in reach:
                    reach.add(c)
                    work.append(c)
    internal = frozenset(t for t in useful_trans if t[0] in reach)
    leaves = frozenset(x for x in A.leaves if x[0] in reach)
    if internal == A.internal and leaves == A.leaves and roots == A.roots:
        return A
    return TreeAutomaton(A.num_qubits, frozenset(roots), internal, leaves)


def compact(A: TreeAutomaton) -> TreeAutomaton:
    """Renumber states 0, 1, ... top-down by structural signature.

    Within each height, states are ordered by their leaf amplitude and their
    outgoing transitions over already numbered children, so the numbering of a
    reduced automaton does not depend on the incoming state ids.
    """
    h = heights(A)
    leaf = A.leaf_map
    rank: dict[int, tuple] = {}
    by_height: dict[int, list[int]] = defaultdict(list)
    for q in A.states:
        by_height[h[q]].append(q)
    for height in sorted(by_height):
        sigs = []
        for q in by_height[height]:
            a = leaf.get(q)
            trans = sorted((k, tag_key(tg), rank[l], rank[r]) for _, k, tg, l, r in A.out.get(q, ()))
            sigs.append(((a is None, a or (), tuple(trans)), q))
        sigs.sort()
        for i, (_, q) in enumerate(sigs):
            rank[q] = (height, i)
    order = sorted(A.states, key=lambda q: (-rank[q][0], rank[q][1]))
    ids = {q: i for i, q in enumerate(order)}
    return TreeAutomaton(
        A.num_qubits,
        frozenset(ids[q] for q in A.roots),
        frozenset((ids[p], k, tag, ids[l], ids[r]) for p, k, tag, l, r in A.internal),
        frozenset((ids[p], amp) for p, amp in A.leaves),
    )


def heights(A: TreeAutomaton) -> dict[int, int]:
    """Distance from each state down to the leaves (leaf states have height 0)."""
    h: dict[int, int] = {p: 0 for p, _ in A.leaves}
    out = A.out

    def visit(q: int) -> int:
        if q in h:
            return h[q]
        h[q] = -1  # cycle guard
        best = 0
        for _, _, _, l, r in out.get(q, ()):
            best = max(best, visit(l) + 1, visit(r) + 1)
        h[q] = best
        return best

    for q in sorted(A.states):
        visit(q)
    return h


def reduce(A: TreeAutomaton) -> TreeAutomaton:
    """Merge states with identical outgoing transitions, bottom-up, then renumber.

    This is successor-identity merging only (no simulation); the language is
    unchanged, tags included.
    """
    A = trim(A)
    h = heights(A)
    rep: dict[int, int] = {}
    leaf = A.leaf_map
    seen: dict[tuple, int] = {}
    for q in sorted(A.states, key=lambda s: (h[s], s)):
        sig = (
            h[q],
            leaf.get(q),
            frozenset((k, tag, rep[l], rep[r]) for _, k, tag, l, r in A.out.get(q, ())),
        )
        rep[q] = seen.setdefault(sig, q)
    merged = TreeAutomaton(
        A.num_qubits,
        frozenset(rep[q] for q in A.roots),
        frozenset((rep[p], k, tag, rep[l], rep[r]) for p, k, tag, l, r in A.internal),
        frozenset((rep[p], amp) for p, amp in A.leaves),
    )
    return compact(merged)


# -- tags ------------------------------------------------------------------


def tag(A: TreeAutomaton) -> TreeAutomaton:
    """Give every internal transition a distinct tag 1, 2, ... in sorted order."""
    if A.is_tagged():
        raise ValueError("automaton is already tagged")
    ordered = sorted(A.internal, key=_trans_key)
    internal = frozenset((p, k, i, l, r) for i, (p, k, _, l, r) in enumerate(ordered, start=1))
    return TreeAutomaton(A.num_qubits, A.roots, internal, A.leaves)


def untag(A: TreeAutomaton) -> TreeAutomaton:
    if any(isinstance(t[2], tuple) for t in A.internal):
        raise ValueError("merged tags present: a forward swap was not undone")
    if not A.is_tagged():
        return A
    internal = frozenset((p, k, None, l, r) for p, k, _, l, r in A.internal)
    return TreeAutomaton(A.num_qubits, A.roots, internal, A.leaves)


# -- membership and inclusion ----------------------------------------------


def accepts(A: TreeAutomaton, t: StateTree) -> bool:
    if t.num_qubits != A.num_qubits:
        return False
    by_amp: dict[Amplitude, set[int]] = defaultdict(set)
    for p, amp in A.leaves:
        by_amp[amp].add(p)
    by_sym: dict[tuple, list[tuple[int, int, int]]] = defaultdict(list)
    for p, k, tag_, l, r in A.internal:
        by_sym[(k, tag_)].append((p, l, r))
    level = [by_amp.get(a, set()) for a in t.leaves]
    n = t.num_qubits
    for depth in range(n - 1, -1, -1):
        start = (1 << depth) - 1
        nxt = []
        for j in range(1 << depth):
            sym = t.labels[start + j]
            left, right = level[2 * j], level[2 * j + 1]
            nxt.append({p for p, l, r in by_sym.get((sym.qubit, sym.tag), ()) if l in left and r in right})
        level = nxt
    return bool(level[0] & A.roots)


def _antichain(cands: list[tuple[frozenset, object]]) -> list[tuple[frozenset, object]]:
    kept: list[tuple[frozenset, object]] = []
    for s, w in sorted(cands, key=lambda c: len(c[0])):
        if not any(k <= s for k, _ in kept):
            kept.append((s, w))
    return kept


def _counterexample(A: TreeAutomaton, B: TreeAutomaton):
    """A nested tree in L(A) minus L(B), or None.

    Bottom-up subset construction over B paired with states of A, keeping only
    the subset-minimal B-state sets per A-state.
    """
    if A.num_qubits != B.num_qubits:
        raise ValueError(f"qubit count mismatch: {A.num_qubits} vs {B.num_qubits}")
    A, B = trim(A), trim(B)
    b_by_amp: dict[Amplitude, set[int]] = defaultdict(set)
    for q, amp in B.leaves:
        b_by_amp[amp].add(q)
    b_index: dict[tuple, list[tuple[int, int]]] = defaultdict(list)
    for q, k, tag_, l, r in B.internal:
        b_index[(k, tag_, l)].append((r, q))

    def post(k: int, tag_: Tag, s1: frozenset, s2: frozenset) -> frozenset:
        res = set()
        for l in s1:
            for r, q in b_index.get((k, tag_, l), ()):
                if r in s2:
                    res.add(q)
        return frozenset(res)

    h = heights(A)
    pairs: dict[int, list] = {}
    for p, amp in A.leaves:
        pairs[p] = [(frozenset(b_by_amp.get(amp, ())), amp)]
    for p in sorted((s for s in A.states if s not in pairs), key=lambda s: (h[s], s)):
        cands = []
        for _, k, tag_, l, r in A.out.get(p, ()):
            sym = Symbol(k, tag_)
            for s1, w1 in pairs.get(l, ()):
                for s2, w2 in pairs.get(r, ()):
                    cands.append((post(k, tag_, s1, s2), (sym, w1, w2)))
        pairs[p] = _antichain(cands)
    for root in sorted(A.roots):
        for s, w in pairs.get(root, ()):
            if not (s & B.roots):
                return w
    return None


def included(A: TreeAutomaton, B: TreeAutomaton) -> bool:
    """Decide L(A) ⊆ L(B)."""
    return _counterexample(A, B) is None


def equivalent(A: TreeAutomaton, B: TreeAutomaton) -> bool:
    return included(A, B) and included(B, A)


class Witness(NamedTuple):
    tree: StateTree
    side: str  # FIRST_ONLY or SECOND_ONLY


def inclusion_witness(A: TreeAutomaton, B: TreeAutomaton) -> StateTree | None:
    w = _counterexample(A, B)
    return None if w is None else _flatten(A.num_qubits, w)


def diff_witness(A: TreeAutomaton, B: TreeAutomaton) -> Witness | None:
    """A tree accepted by exactly one of the two automata, or None if they are equivalent."""
    w = _counterexample(A, B)
    if w is not None:
        return Witness(_flatten(A.num_qubits, w), FIRST_ONLY)
    w = _counterexample(B, A)
    if w is not None:
        return Witness(_flatten(A.num_qubits, w), SECOND_ONLY)
    return None


# -- generators --------------------------------------------------------------


def basis_states(pattern: str) -> TreeAutomaton:
    """Basis states matching ``pattern`` over '0', '1' and '*' (either bit), qubit 1 first.

    Uses one "carries the 1" state and one all-zero state per layer, so an
    all-'*' pattern over n qubits gives 2n+1 states and 3n+1 transitions.
    """
    n = len(pattern)
    if n < 1 or set(pattern) - set("01*"):
        raise ValueError(f"bad basis pattern {pattern!r}")
    # state ids: root 0; one_d = 2d - 1, zero_d = 2d for 1 <= d < n; leaves 2n-1 (zero), 2n (one)
    zero_leaf, one_leaf = 2 * n - 1, 2 * n

    def one(d: int) -> int:
        return 0 if d == 0 else (one_leaf if d == n else 2 * d - 1)

    def zero(d: int) -> int:
        return zero_leaf if d == n else 2 * d

    internal = []
    for d in range(n):
        bit = pattern[d]
        if bit in "0*":
            internal.append((one(d), d + 1, None, one(d + 1), zero(d + 1)))
        if bit in "1*":
            internal.append((one(d), d + 1, None, zero(d + 1), one(d + 1)))
        if d >= 1:
            internal.append((zero(d), d + 1, None, zero(d + 1), zero(d + 1)))
    return TreeAutomaton.build(n, [0], internal, [(zero_leaf, ZERO), (one_leaf, ONE)])


def single_basis_state(bits: str) -> TreeAutomaton:
    if set(bits) - set("01"):
        raise ValueError(f"bad basis string {bits!r}")
    return basis_states(bits)


def all_basis_states(n: int) -> TreeAutomaton:
    return basis_states("*" * n)


def from_trees(num_qubits: int, trees: Iterable[StateTree]) -> TreeAutomaton:
    """Automaton accepting exactly the given trees (tags dropped), with shared subtrees."""
    ids: dict[object, int] = {}
    internal: set[Transition] = set()
    leaves: set[tuple[int, Amplitude]] = set()
    roots = set()

    def state_for(key, make) -> int:
        if key not in ids:
            ids[key] = len(ids)
            make(ids[key])
        return ids[key]

    for t in trees:
        if t.num_qubits != num_qubits:
            raise ValueError("tree height does not match the qubit count")
        level = [state_for(("leaf", a), lambda s, a=a: leaves.add((s, a))) for a in t.leaves]
        for depth in range(num_qubits - 1, -1, -1):
            start = (1 << depth) - 1
            nxt = []
            for j in range(1 << depth):
                k = t.labels[start + j].qubit
                l, r = level[2 * j], level[2 * j + 1]
                nxt.append(state_for((k, l, r), lambda s, k=k, l=l, r=r: internal.add((s, k, None, l, r))))
            level = nxt
        roots.add(level[0])
    return reduce(TreeAutomaton.build(num_qubits, roots, internal, leaves))
