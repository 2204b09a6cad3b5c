"""Shared fixtures: random layered automata and pointwise tree oracles.

The oracles here work on basis maps only and never call the automaton code,
so they are independent of the transformers under test.
"""

from __future__ import annotations

import random

import pytest
from hypothesis import settings

from taqv.amplitude import INV_SQRT2, OMEGA, ONE, ZERO, Amplitude, add, sub
from taqv.automaton import TreeAutomaton, trim
from taqv.frontend import parse_automaton
from taqv.tree_oracle import LimitExceeded, StateTree, enumerate_language

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

AMP_POOL = [
    ZERO,
    ONE,
    Amplitude(-1, 0, 0, 0, 0),
    OMEGA,
    INV_SQRT2,
    Amplitude(0, 0, 1, 0, 0),
    Amplitude(1, 1, 0, 0, 1),
    Amplitude(0, -1, 0, 2, 2),
    Amplitude(3, 0, 0, 0, 2),
]

# |00> and the Bell state, as input and expected output of the EPR circuit.
KET00_TEXT = """\
qubits 2
root q
q -x1-> (q1, q0)
q0 -x2-> (q2, q2)
q2 -> (0,0,0,0,0)
q1 -x2-> (q3, q2)
q3 -> (1,0,0,0,0)
"""

BELL_TEXT = """\
qubits 2
root q
q -x1-> (q0, q1)
q1 -x2-> (q2, q3)
q2 -> (0,0,0,0,0)
q0 -x2-> (q3, q2)
q3 -> (1,0,0,0,1)
"""

# Every 3-qubit basis state, with one "carries the 1" state per layer.
ALL_BASIS3_TEXT = """\
qubits 3
root q
q -x1-> (q10, q11)
q -x1-> (q11, q10)
q11 -x2-> (q20, q21)
q11 -x2-> (q21, q20)
q10 -x2-> (q20, q20)
q21 -x3-> (q0, q1)
q21 -x3-> (q1, q0)
q20 -x3-> (q0, q0)
q0 -> (0,0,0,0,0)
q1 -> (1,0,0,0,0)
"""


@pytest.fixture
def ket00_ta() -> TreeAutomaton:
    return parse_automaton(KET00_TEXT)


@pytest.fixture
def bell_ta() -> TreeAutomaton:
    return parse_automaton(BELL_TEXT)


def random_ta(rng: random.Random, n: int, max_trees: int = 8, width: int = 3, pool=AMP_POOL) -> TreeAutomaton:
    """A random layered automaton with between 1 and ``max_trees`` accepted trees."""
    while True:
        ids = rng.sample(range(1000), 1000)
        layers = [[ids.pop() for _ in range(rng.randint(1, 2))]]
        for _ in range(n):
            layers.append([ids.pop() for _ in range(rng.randint(1, width))])
        internal = set()
        for d in range(n):
            for q in layers[d]:
                for _ in range(rng.randint(1, 2)):
                    internal.add((q, d + 1, None, rng.choice(layers[d + 1]), rng.choice(layers[d + 1])))
        leaves = {(q, rng.choice(pool)) for q in layers[n]}
        roots = rng.sample(layers[0], rng.randint(1, len(layers[0])))
        A = trim(TreeAutomaton.build(n, roots, internal, leaves))
        if not A.roots:
            continue
        try:
            lang = enumerate_language(A, limit=max_trees)
        except LimitExceeded:
            continue
        if lang:
            return A


def random_tree(rng: random.Random, n: int, pool=AMP_POOL) -> StateTree:
    return StateTree.from_leaves([rng.choice(pool) for _ in range(1 << n)])


# -- pointwise oracles over basis maps --------------------------------------


def _from_map(n: int, f) -> StateTree:
    return StateTree.from_leaves([f(format(i, f"0{n}b")) for i in range(1 << n)])


def oracle_restrict(t: StateTree, q: int, value: bool) -> StateTree:
    """B_{x_q} . T (value True) or B_{not x_q} . T: zero where bit q differs from value."""
    m = t.basis_map()
    want = "1" if value else "0"
    return _from_map(t.num_qubits, lambda b: m[b] if b[q - 1] == want else ZERO)


def oracle_project(t: StateTree, q: int, value: bool) -> StateTree:
    """T with bit q fixed to value."""
    m = t.basis_map()
    want = "1" if value else "0"
    return _from_map(t.num_qubits, lambda b: m[b[: q - 1] + want + b[q:]])


def oracle_scale(t: StateTree, fn) -> StateTree:
    m = t.basis_map()
    return _from_map(t.num_qubits, lambda b: fn(m[b]))


def oracle_combine(t1: StateTree, t2: StateTree, op: str) -> StateTree:
    m1, m2 = t1.basis_map(), t2.basis_map()
    f = add if op == "+" else sub
    return _from_map(t1.num_qubits, lambda b: f(m1[b], m2[b]))


def tagged_language(A: TreeAutomaton) -> dict:
    """Map each accepted tree's tag (its labels) to its tag-stripped tree."""
    out: dict = {}
    for t in enumerate_language(A, keep_tags=True):
        out.setdefault(t.labels, set()).add(t.strip())
    return out


# -- acceptance report --------------------------------------------------------

ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
