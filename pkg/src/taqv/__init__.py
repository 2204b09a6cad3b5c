"""Quantum circuit verification with tree automata.

Sets of quantum states are tree automata whose leaves are exact algebraic
amplitudes; gates are automaton transformers, and ``{P} C {Q}`` triples are
decided by language equivalence or inclusion with counterexample witnesses.
"""

from .amplitude import INV_SQRT2, OMEGA, ONE, ZERO, Amplitude
from .automaton import (
    TreeAutomaton,
    accepts,
    all_basis_states,
    basis_states,
    diff_witness,
    equivalent,
    included,
    reduce,
    single_basis_state,
    tag,
    trim,
    untag,
    validate,
)
from .circuit import Gate, QuantumCircuit
from .gates import apply_gate
from .tree_oracle import StateTree, StateVector, apply_gate_matrix, enumerate_language

__version__ = "0.1.0"

__all__ = [
    "INV_SQRT2",
    "OMEGA",
    "ONE",
    "ZERO",
    "Amplitude",
    "Gate",
    "QuantumCircuit",
    "StateTree",
    "StateVector",
    "TreeAutomaton",
    "accepts",
    "all_basis_states",
    "apply_gate",
    "apply_gate_matrix",
    "basis_states",
    "diff_witness",
    "enumerate_language",
    "equivalent",
    "included",
    "reduce",
    "single_basis_state",
    "tag",
    "trim",
    "untag",
    "validate",
]
