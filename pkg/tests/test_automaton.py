import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ALL_BASIS3_TEXT, AMP_POOL, random_ta, random_tree, tagged_language
from taqv.amplitude import INV_SQRT2, ONE, ZERO, Amplitude
from taqv.automaton import (
    FIRST_ONLY,
    SECOND_ONLY,
    TreeAutomaton,
    accepts,
    all_basis_states,
    basis_states,
    compact,
    diff_witness,
    equivalent,
    from_trees,
    included,
    inclusion_witness,
    reduce,
    single_basis_state,
    tag,
    trim,
    untag,
    validate,
)
from taqv.frontend import parse_automaton
from taqv.tree_oracle import StateTree, StateVector, Symbol, enumerate_language, vector_to_tree

seeds = st.integers(0, 2**32 - 1)


def basis_tree(bits: str, amp=ONE) -> StateTree:
    v = StateVector.basis(bits)
    return vector_to_tree(StateVector(v.num_qubits, tuple(amp if a == ONE else a for a in v.amps)))


def bell() -> StateTree:
    return StateTree.from_leaves([INV_SQRT2, ZERO, ZERO, INV_SQRT2])


# -- reference automata -----------------------------------------------------


def test_ket00_reference(ket00_ta):
    assert enumerate_language(ket00_ta) == {basis_tree("00")}


def test_bell_reference(bell_ta):
    assert enumerate_language(bell_ta) == {bell()}


def test_accepting_run():
    # A run that labels node 01 with the all-zero state accepts trees whose
    # 1-leaf sits below prefix 00.
    A = parse_automaton(ALL_BASIS3_TEXT)
    assert accepts(A, basis_tree("000"))
    assert accepts(A, basis_tree("001"))
    assert not accepts(A, StateTree.from_leaves([ZERO] * 8))
    assert not accepts(A, basis_tree("001", amp=INV_SQRT2))


@pytest.mark.parametrize("n", range(3, 51))
def test_all_basis_states_counts(n):
    A = all_basis_states(n)
    assert (A.num_states, A.num_transitions) == (2 * n + 1, 3 * n + 1)


def test_all_basis_states_language():
    for n in (1, 2, 3, 4):
        lang = enumerate_language(all_basis_states(n))
        assert lang == {basis_tree(format(i, f"0{n}b")) for i in range(1 << n)}


def test_basis_pattern():
    lang = enumerate_language(basis_states("1*0"))
    assert lang == {basis_tree("100"), basis_tree("110")}
    with pytest.raises(ValueError):
        basis_states("12")
    with pytest.raises(ValueError):
        single_basis_state("0*")


def _tagged_pair() -> TreeAutomaton:
    # Tagged {|00>, |01>}: the two trees share a shape and differ only in tags 2 and 3.
    return TreeAutomaton.build(
        2,
        [0],
        [(0, 1, 1, 1, 2), (1, 2, 2, 4, 3), (1, 2, 3, 3, 4), (2, 2, 4, 3, 3)],
        [(3, ZERO), (4, ONE)],
    )


def test_untagged_trees_share_a_tag():
    A = untag(_tagged_pair())
    trees = enumerate_language(A, keep_tags=True)
    assert {t.labels for t in trees} == {(Symbol(1), Symbol(2), Symbol(2))}
    assert len(trees) == 2


def test_tagging_separates_trees():
    A = _tagged_pair()
    lang = tagged_language(A)
    t1 = (Symbol(1, 1), Symbol(2, 2), Symbol(2, 4))
    t2 = (Symbol(1, 1), Symbol(2, 3), Symbol(2, 4))
    assert set(lang) == {t1, t2}
    assert lang[t1] == {basis_tree("00")}
    assert lang[t2] == {basis_tree("01")}
    retagged = tag(untag(A))
    assert sorted(t[2] for t in retagged.internal) == [1, 2, 3, 4]


# -- validation -----------------------------------------------------------------


def test_validate_accepts_generators():
    assert validate(all_basis_states(5)) == []
    assert validate(parse_automaton(ALL_BASIS3_TEXT)) == []


@pytest.mark.parametrize(
    "internal, leaves, needle",
    [
        ([(0, 1, None, 1, 1)], [(1, ONE), (1, ZERO)], "leaf-parent uniqueness"),
        ([(0, 3, None, 1, 1)], [(1, ONE)], "qubit range"),
        ([(0, 1, None, 1, 2)], [(1, ONE)], "dangling"),
        ([(0, 1, None, 1, 1), (1, 2, None, 2, 2)], [(1, ONE), (2, ONE)], "layering"),
    ],
)
def test_validate_diagnostics(internal, leaves, needle):
    A = TreeAutomaton.build(1 if needle != "layering" else 2, [0], internal, leaves)
    assert any(d.startswith(needle) for d in validate(A))


# -- language-preserving clean-up ----------------------------------------------------


@given(seeds)
def test_trim_reduce_compact_preserve_language(seed):
    rng = random.Random(seed)
    A = random_ta(rng, rng.randint(1, 4))
    lang = enumerate_language(A)
    for B in (trim(A), reduce(A), compact(A)):
        assert enumerate_language(B) == lang
        assert validate(B) == []
    R = reduce(A)
    assert R.num_states <= trim(A).num_states
    assert reduce(R) == R
    assert compact(R) == R


@given(seeds)
def test_reduce_is_canonical_under_renaming(seed):
    rng = random.Random(seed)
    A = random_ta(rng, rng.randint(1, 4))
    perm = rng.sample(range(5000), len(A.states))
    ren = dict(zip(sorted(A.states), perm))
    B = TreeAutomaton.build(
        A.num_qubits,
        [ren[q] for q in A.roots],
        [(ren[p], k, t, ren[l], ren[r]) for p, k, t, l, r in A.internal],
        [(ren[p], a) for p, a in A.leaves],
    )
    assert reduce(A) == reduce(B)


@given(seeds)
def test_tag_untag_round_trip(seed):
    rng = random.Random(seed)
    A = random_ta(rng, rng.randint(1, 4))
    T = tag(A)
    assert T.is_tagged() and len({t[2] for t in T.internal}) == len(T.internal)
    assert enumerate_language(untag(T)) == enumerate_language(A)
    with pytest.raises(ValueError):
        tag(T)


@given(seeds)
def test_tagged_trees_have_distinct_tags(seed):
    rng = random.Random(seed)
    T = tag(random_ta(rng, rng.randint(1, 4)))
    for trees in tagged_language(T).values():
        assert len(trees) == 1


# -- membership and inclusion -----------------------------------------------------


@given(seeds)
def test_accepts_matches_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    A = random_ta(rng, n)
    lang = enumerate_language(A)
    for t in lang:
        assert accepts(A, t)
    for _ in range(5):
        t = random_tree(rng, n)
        assert accepts(A, t) == (t in lang)


@given(seeds)
def test_inclusion_matches_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    A, B = random_ta(rng, n), random_ta(rng, n)
    la, lb = enumerate_language(A), enumerate_language(B)
    assert included(A, B) == (la <= lb)
    assert equivalent(A, B) == (la == lb)
    w = inclusion_witness(A, B)
    assert (w is None) == (la <= lb)
    if w is not None:
        assert w in la and w not in lb


def test_diff_witness_sides(ket00_ta, bell_ta):
    w = diff_witness(ket00_ta, bell_ta)
    assert w.side == FIRST_ONLY and w.tree == basis_tree("00")
    w = diff_witness(ket00_ta, from_trees(2, [basis_tree("00"), bell()]))
    assert w.side == SECOND_ONLY and w.tree == bell()
    assert diff_witness(bell_ta, from_trees(2, [bell()])) is None


def test_qubit_mismatch():
    with pytest.raises(ValueError):
        included(single_basis_state("0"), single_basis_state("00"))


@given(seeds)
def test_from_trees_exact(seed):
    rng = random.Random(seed)
    n = rng.randint(0, 4)
    trees = {random_tree(rng, n, AMP_POOL[:3]) for _ in range(rng.randint(1, 6))}
    A = from_trees(n, trees)
    assert enumerate_language(A) == trees


def test_serialized_str(bell_ta):
    text = str(bell_ta)
    assert text.startswith("qubits 2\nroot q0\n")
    assert "(1,0,0,0,1)" in text
    assert parse_automaton(text) == compact(bell_ta)
    assert Amplitude.parse("(1,0,0,0,1)") == INV_SQRT2
