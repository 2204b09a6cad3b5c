"""Verification pipeline, benchmark families and bug hunting."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import NamedTuple

from .amplitude import to_complex
from .automaton import (
    FIRST_ONLY,
    TreeAutomaton,
    basis_states,
    diff_witness,
    inclusion_witness,
    reduce,
    single_basis_state,
)
from .circuit import ARITY, GATE_KINDS, CNOT, CZ, Gate, H, QuantumCircuit, Toffoli, X, Z
from .frontend import EQUAL, INCLUDED, POST_ONLY, RESULT_ONLY, VIOLATION, Verdict
from .gates import HYBRID, MODES, apply_gate
from .tree_oracle import LimitExceeded, StateTree, enumerate_language, image

EQUIVALENCE = "equivalence"
INCLUSION = "inclusion"
CHECKS = (EQUIVALENCE, INCLUSION)


@dataclass(frozen=True)
class VerifyJob:
    pre: TreeAutomaton
    circuit: QuantumCircuit
    post: TreeAutomaton
    check: str = EQUIVALENCE
    mode: str = HYBRID
    seed: int | None = None

    def __post_init__(self) -> None:
        n = self.circuit.num_qubits
        if self.pre.num_qubits != n or self.post.num_qubits != n:
            raise ValueError(
                f"qubit count mismatch: pre {self.pre.num_qubits}, circuit {n}, post {self.post.num_qubits}"
            )
        if self.check not in CHECKS:
            raise ValueError(f"unknown check {self.check!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class RunStats:
    mode: str
    gate_count: int = 0
    per_gate: list[dict] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def peak_states(self) -> int:
        return max((g["states"] for g in self.per_gate), default=0)

    @property
    def peak_transitions(self) -> int:
        return max((g["transitions"] for g in self.per_gate), default=0)

    def as_dict(self) -> dict:
        return {
            "gates": self.gate_count,
            "mode": self.mode,
            "peak_states": self.peak_states,
            "peak_transitions": self.peak_transitions,
            "seconds": round(self.seconds, 6),
            "per_gate": self.per_gate,
        }


def run_circuit(A: TreeAutomaton, circuit: QuantumCircuit, mode: str = HYBRID) -> tuple[TreeAutomaton, RunStats]:
    """Apply the circuit gate by gate, reducing after each one."""
    if A.num_qubits != circuit.num_qubits:
        raise ValueError(f"automaton has {A.num_qubits} qubits, circuit has {circuit.num_qubits}")
    stats = RunStats(mode=mode, gate_count=len(circuit))
    start = time.perf_counter()
    A = reduce(A)
    for g in circuit.gates:
        A = apply_gate(A, g, mode)
        stats.per_gate.append({"gate": str(g), "states": A.num_states, "transitions": A.num_transitions})
    stats.seconds = time.perf_counter() - start
    return A, stats


def verify(job: VerifyJob) -> Verdict:
    """Decide the triple: the circuit's image of pre against post."""
    start = time.perf_counter()
    result, run = run_circuit(job.pre, job.circuit, job.mode)
    if job.check == EQUIVALENCE:
        w = diff_witness(result, job.post)
        tree, side = (None, None) if w is None else (w.tree, RESULT_ONLY if w.side == FIRST_ONLY else POST_ONLY)
        outcome = EQUAL if w is None else VIOLATION
    else:
        tree = inclusion_witness(result, job.post)
        side = None if tree is None else RESULT_ONLY
        outcome = INCLUDED if tree is None else VIOLATION
    stats = run.as_dict()
    stats["check"] = job.check
    stats["seed"] = job.seed
    stats["result_states"] = result.num_states
    stats["result_transitions"] = result.num_transitions
    stats["total_seconds"] = round(time.perf_counter() - start, 6)
    return Verdict(outcome, tree, side, stats)


# -- benchmark families ------------------------------------------------------


class Benchmark(NamedTuple):
    pre: TreeAutomaton
    circuit: QuantumCircuit
    post: object  # TreeAutomaton, or a DominanceCheck for Grover


def generate_bv(hidden: str) -> Benchmark:
    """Bernstein-Vazirani for hidden string s_{m-1}...s_0; wire i+1 carries s_i.

    The target is the last wire.  A final H on the target turns it into |1>,
    so the expected output is the single basis state s_0 ... s_{m-1} 1.
    """
    if not hidden or set(hidden) - set("01"):
        raise ValueError(f"hidden string must be a nonempty bit string, got {hidden!r}")
    m = len(hidden)
    n = m + 1
    bit_on_wire = hidden[::-1]  # wire i+1 holds s_i
    gates: list[Gate] = [H(q) for q in range(1, n + 1)]
    gates.append(Z(n))
    gates += [CNOT(q, n) for q in range(1, m + 1) if bit_on_wire[q - 1] == "1"]
    gates += [H(q) for q in range(1, m + 1)]
    gates.append(H(n))
    return Benchmark(single_basis_state("0" * n), QuantumCircuit(n, gates), single_basis_state(bit_on_wire + "1"))


def _mcx_ladder(controls: list[int], work: list[int], target: int, final: str = "CNOT") -> list[Gate]:
    """AND of ``controls`` into the last work wire, ``final`` onto target, then uncompute."""
    compute = [Toffoli(controls[0], controls[1], work[0])]
    for i in range(2, len(controls)):
        compute.append(Toffoli(work[i - 2], controls[i], work[i - 1]))
    last = work[len(controls) - 2]
    middle = CNOT(last, target) if final == "CNOT" else CZ(min(last, target), max(last, target))
    return compute + [middle] + compute[::-1]


def generate_mctoffoli(m: int) -> Benchmark:
    """m-controlled X as a Toffoli ladder; wires c1, c2, w1, c3, w2, ..., c_m, w_{m-1}, target."""
    if m < 3:
        raise ValueError("MCToffoli needs m >= 3")
    controls = [1, 2] + [2 * i for i in range(2, m)]
    work = [2 * i + 1 for i in range(1, m)]
    target = 2 * m
    n = 2 * m
    gates = _mcx_ladder(controls, work, target)
    pattern = ["0"] * n
    for q in controls + [target]:
        pattern[q - 1] = "*"
    A = basis_states("".join(pattern))
    return Benchmark(A, QuantumCircuit(n, gates), A)


@dataclass(frozen=True)
class DominanceCheck:
    """Per tree, the designated success basis must carry strictly the largest |amplitude|^2.

    Either ``success`` names a fixed basis, or the success basis is the tree's
    own secret register (its first ``secret_width`` bits) written twice,
    followed by ``suffix``.
    """

    num_qubits: int
    success: str | None = None
    secret_width: int = 0
    suffix: str = ""

    def success_basis(self, tree: StateTree) -> str:
        if self.success is not None:
            return self.success
        bmap = tree.basis_map()
        secrets = {b[: self.secret_width] for b, a in bmap.items() if not a.is_zero()}
        if len(secrets) != 1:
            raise ValueError("secret register is not a basis state")
        s = secrets.pop()
        return s + s + self.suffix

    def margin(self, tree: StateTree) -> float:
        """|a_success|^2 minus the largest other |a|^2."""
        target = self.success_basis(tree)
        best_other = 0.0
        hit = 0.0
        for b, a in tree.basis_map().items():
            p = abs(to_complex(a)) ** 2
            if b == target:
                hit = p
            else:
                best_other = max(best_other, p)
        return hit - best_other

    def check(self, A: TreeAutomaton, limit: int = 4096) -> tuple[bool, float]:
        trees = enumerate_language(A, limit=limit)
        if not trees:
            return False, 0.0
        worst = min(self.margin(t) for t in trees)
        return worst > 0, worst


def grover_iterations(m: int) -> int:
    return max(1, math.floor(math.pi / 4 * math.sqrt(2**m)))


def _diffusion(search: list[int], work: list[int]) -> list[Gate]:
    gates = [H(q) for q in search] + [X(q) for q in search]
    if len(search) == 2:
        gates.append(CZ(search[0], search[1]))
    else:
        gates += _mcx_ladder(search[:-1], work, search[-1], final="CZ")
    gates += [X(q) for q in search] + [H(q) for q in search]
    return gates


def generate_grover_single(m: int, iters: int | None = None, secret: str | None = None) -> Benchmark:
    """Grover search with a hardwired oracle; wires: search 1..m, work m+1..2m-1, target 2m.

    The default secret follows the benchmark pattern (01)^(m/2), or (01)^((m-1)/2)0 for odd m.
    """
    if m < 2:
        raise ValueError("Grover needs m >= 2")
    if iters is None:
        iters = grover_iterations(m)
    if secret is None:
        secret = ("01" * m)[:m] if m % 2 == 0 else ("01" * m)[: m - 1] + "0"
    if len(secret) != m or set(secret) - set("01"):
        raise ValueError(f"secret must be {m} bits")
    search = list(range(1, m + 1))
    work = list(range(m + 1, 2 * m))
    target = 2 * m
    n = 2 * m
    flips = [X(search[i]) for i in range(m) if secret[i] == "0"]
    oracle = flips + _mcx_ladder(search, work, target) + flips
    gates = [H(q) for q in search] + [H(target)]
    for _ in range(iters):
        gates += oracle + _diffusion(search, work)
    gates.append(H(target))
    pre = single_basis_state("0" * (n - 1) + "1")
    success = secret + "0" * (m - 1) + "1"
    return Benchmark(pre, QuantumCircuit(n, gates), DominanceCheck(n, success=success))


def generate_grover_all(m: int, iters: int | None = None) -> Benchmark:
    """Grover search with the oracle reading the secret from an s-register.

    Wires: secret 1..m, search m+1..2m, work 2m+1..3m-1, target 3m.
    """
    if m < 2:
        raise ValueError("Grover needs m >= 2")
    if iters is None:
        iters = grover_iterations(m)
    secret_reg = list(range(1, m + 1))
    search = list(range(m + 1, 2 * m + 1))
    work = list(range(2 * m + 1, 3 * m))
    target = 3 * m
    n = 3 * m
    load = [X(s) for s in secret_reg] + [CNOT(s, x) for s, x in zip(secret_reg, search)]
    oracle = load + _mcx_ladder(search, work, target) + load[::-1]
    gates = [H(q) for q in search] + [H(target)]
    for _ in range(iters):
        gates += oracle + _diffusion(search, work)
    gates.append(H(target))
    pre = basis_states("*" * m + "0" * (2 * m - 1) + "1")
    check = DominanceCheck(n, secret_width=m, suffix="0" * (m - 1) + "1")
    return Benchmark(pre, QuantumCircuit(n, gates), check)


# -- random circuits and bugs ---------------------------------------------------


def _random_gate(n: int, rng: random.Random) -> Gate:
    kinds = [k for k in GATE_KINDS if ARITY[k] <= n]
    kind = rng.choice(kinds)
    return Gate(kind, tuple(rng.sample(range(1, n + 1), ARITY[kind])))


def generate_random_circuit(n: int, seed: int, num_gates: int | None = None) -> QuantumCircuit:
    """3n gates by default, kinds and distinct qubits drawn uniformly."""
    if n < 2:
        raise ValueError("random circuits need n >= 2")
    rng = random.Random(seed)
    count = 3 * n if num_gates is None else num_gates
    return QuantumCircuit(n, tuple(_random_gate(n, rng) for _ in range(count)))


def inject_bug(circuit: QuantumCircuit, seed: int) -> QuantumCircuit:
    """Insert one random gate at a random position."""
    rng = random.Random(seed)
    g = _random_gate(circuit.num_qubits, rng)
    pos = rng.randint(0, len(circuit))
    gates = list(circuit.gates)
    gates.insert(pos, g)
    return QuantumCircuit(circuit.num_qubits, tuple(gates))


# -- bug hunting -----------------------------------------------------------------


@dataclass
class BughuntResult:
    verdict: Verdict
    iterations: int
    pre_history: list[TreeAutomaton]
    origin: StateTree | None = None  # precondition tree the witness came from
    confirmed: bool | None = None  # None when the oracle check was skipped


def _reachable_depths(A: TreeAutomaton) -> dict[int, int]:
    depth = {r: 0 for r in A.roots}
    frontier = sorted(A.roots)
    while frontier:
        nxt = []
        for q in frontier:
            for _, _, _, l, r in A.out.get(q, ()):
                for c in (l, r):
                    if c not in depth:
                        depth[c] = depth[q] + 1
                        nxt.append(c)
        frontier = sorted(nxt)
    return depth


def add_nondeterminism(A: TreeAutomaton, rng: random.Random) -> TreeAutomaton | None:
    """Add one alternative transition that keeps the automaton layered.

    Prefers the child-swapped variant of an existing transition; otherwise pairs
    two states of the right depth.  Returns None when nothing new can be added.
    """
    present = set(A.internal)
    depth = _reachable_depths(A)
    swaps = sorted(
        (p, k, tg, r, l)
        for p, k, tg, l, r in A.internal
        if p in depth and l != r and (p, k, tg, r, l) not in present
    )
    if swaps:
        return TreeAutomaton(A.num_qubits, A.roots, A.internal | {rng.choice(swaps)}, A.leaves)
    by_depth: dict[int, list[int]] = {}
    for q, d in depth.items():
        by_depth.setdefault(d, []).append(q)
    options = []
    for p, k, tg, _, _ in sorted(A.internal):
        if p not in depth:
            continue
        level = sorted(by_depth.get(depth[p] + 1, ()))
        options += [(p, k, tg, l, r) for l in level for r in level if (p, k, tg, l, r) not in present]
    if not options:
        return None
    return TreeAutomaton(A.num_qubits, A.roots, A.internal | {rng.choice(options)}, A.leaves)


def _confirm(pre: TreeAutomaton, a: QuantumCircuit, b: QuantumCircuit, witness: StateTree, side: str, limit: int):
    """Find the precondition tree the witness came from and check it by matrix simulation."""
    try:
        trees = enumerate_language(pre, limit=limit)
    except LimitExceeded:
        return None, None
    own, other = (a, b) if side == FIRST_ONLY else (b, a)
    other_image = image(trees, other)
    target = witness.strip()
    for t in sorted(trees, key=str):
        if next(iter(image([t], own))) == target:
            return t, target not in other_image
    return None, False


def bughunt(
    circuit_a: QuantumCircuit,
    circuit_b: QuantumCircuit,
    max_iters: int = 10,
    seed: int = 0,
    mode: str = HYBRID,
    oracle_qubits: int = 12,
    oracle_limit: int = 256,
) -> BughuntResult:
    """Grow a precondition from one random basis state until the circuits' images differ."""
    if circuit_a.num_qubits != circuit_b.num_qubits:
        raise ValueError("circuits have different qubit counts")
    n = circuit_a.num_qubits
    rng = random.Random(seed)
    pre = single_basis_state("".join(rng.choice("01") for _ in range(n)))
    history: list[TreeAutomaton] = []
    start = time.perf_counter()
    peak_states = peak_trans = 0
    for it in range(1, max_iters + 1):
        if it > 1:
            grown = add_nondeterminism(pre, rng)
            if grown is None:
                break
            pre = reduce(grown)
        history.append(pre)
        res_a, stats_a = run_circuit(pre, circuit_a, mode)
        res_b, stats_b = run_circuit(pre, circuit_b, mode)
        peak_states = max(peak_states, stats_a.peak_states, stats_b.peak_states)
        peak_trans = max(peak_trans, stats_a.peak_transitions, stats_b.peak_transitions)
        w = diff_witness(res_a, res_b)
        if w is not None:
            origin, confirmed = None, None
            if n <= oracle_qubits:
                origin, confirmed = _confirm(pre, circuit_a, circuit_b, w.tree, w.side, oracle_limit)
            stats = _hunt_stats(it, seed, mode, circuit_a, circuit_b, peak_states, peak_trans, start)
            stats["confirmed"] = confirmed
            side = RESULT_ONLY if w.side == FIRST_ONLY else POST_ONLY
            return BughuntResult(Verdict(VIOLATION, w.tree, side, stats), it, history, origin, confirmed)
    stats = _hunt_stats(len(history), seed, mode, circuit_a, circuit_b, peak_states, peak_trans, start)
    return BughuntResult(Verdict(EQUAL, None, None, stats), len(history), history)


def _hunt_stats(it, seed, mode, a, b, peak_states, peak_trans, start) -> dict:
    return {
        "iterations": it,
        "seed": seed,
        "mode": mode,
        "gates_a": len(a),
        "gates_b": len(b),
        "peak_states": peak_states,
        "peak_transitions": peak_trans,
        "seconds": round(time.perf_counter() - start, 6),
    }


__all__ = [
    "Benchmark",
    "BughuntResult",
    "DominanceCheck",
    "RunStats",
    "VerifyJob",
    "add_nondeterminism",
    "bughunt",
    "generate_bv",
    "generate_grover_all",
    "generate_grover_single",
    "generate_mctoffoli",
    "generate_random_circuit",
    "grover_iterations",
    "inject_bug",
    "run_circuit",
    "verify",
]
