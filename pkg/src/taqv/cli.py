"""Command-line interface.

Exit codes: 0 equal or included, 1 violation, 2 usage or parse error,
3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .automaton import single_basis_state
from .driver import (
    EQUIVALENCE,
    INCLUSION,
    DominanceCheck,
    VerifyJob,
    bughunt,
    generate_bv,
    generate_grover_all,
    generate_grover_single,
    generate_mctoffoli,
    generate_random_circuit,
    inject_bug,
    run_circuit,
    verify,
)
from .frontend import (
    ParseError,
    Verdict,
    parse_automaton,
    parse_circuit,
    serialize_automaton,
    serialize_circuit,
    serialize_verdict,
    witness_json,
)
from .gates import MODES

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_automaton(path: str):
    try:
        return parse_automaton(_read(path))
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_circuit(path: str):
    try:
        return parse_circuit(_read(path))
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _report(v: Verdict, as_json: bool) -> int:
    if as_json:
        print(serialize_verdict(v))
    else:
        print(v.outcome)
        if v.witness is not None:
            w = witness_json(v.witness, v.side)
            print(f"witness ({w['side']}): {w['dirac']}")
        s = v.stats
        if "gates" in s:
            print(f"gates: {s['gates']}, peak states: {s['peak_states']}, peak transitions: {s['peak_transitions']}")
    return EXIT_OK if v.ok else EXIT_VIOLATION


def cmd_verify(args) -> int:
    pre, post = _load_automaton(args.pre), _load_automaton(args.post)
    circuit = _load_circuit(args.circuit)
    check = EQUIVALENCE if args.check == "eq" else INCLUSION
    try:
        job = VerifyJob(pre, circuit, post, check=check, mode=args.mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return _report(verify(job), args.json)


def cmd_run(args) -> int:
    pre = _load_automaton(args.pre)
    circuit = _load_circuit(args.circuit)
    if pre.num_qubits != circuit.num_qubits:
        raise UsageError(f"pre has {pre.num_qubits} qubits, circuit has {circuit.num_qubits}")
    result, stats = run_circuit(pre, circuit, args.mode)
    Path(args.out).write_text(serialize_automaton(result), encoding="utf-8")
    print(f"wrote {args.out}: {result.num_states} states, {result.num_transitions} transitions "
          f"({stats.gate_count} gates, {stats.seconds:.3f}s)")
    return EXIT_OK


def _write(out_dir: Path, name: str, text: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text, encoding="utf-8")
    print(out_dir / name)


def _dominance_json(check: DominanceCheck) -> str:
    body = {"kind": "dominant-basis", "num_qubits": check.num_qubits}
    if check.success is not None:
        body["success"] = check.success
    else:
        body["success"] = f"<s><s>{check.suffix}"
        body["secret_width"] = check.secret_width
    return json.dumps(body, indent=2) + "\n"


def cmd_gen(args) -> int:
    out = Path(args.out_dir)
    try:
        if args.family == "bv":
            bench = generate_bv(args.hidden)
        elif args.family == "mctoffoli":
            bench = generate_mctoffoli(args.m)
        elif args.family == "grover-single":
            bench = generate_grover_single(args.m, args.iters)
        elif args.family == "grover-all":
            bench = generate_grover_all(args.m, args.iters)
        else:
            circuit = generate_random_circuit(args.n, args.seed)
            _write(out, "pre.ta", serialize_automaton(single_basis_state("0" * args.n)))
            _write(out, "circuit.qasm", serialize_circuit(circuit))
            if args.bug_seed is not None:
                _write(out, "buggy.qasm", serialize_circuit(inject_bug(circuit, args.bug_seed)))
            return EXIT_OK
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(out, "pre.ta", serialize_automaton(bench.pre))
    _write(out, "circuit.qasm", serialize_circuit(bench.circuit))
    if isinstance(bench.post, DominanceCheck):
        _write(out, "post-shape.json", _dominance_json(bench.post))
    else:
        _write(out, "post.ta", serialize_automaton(bench.post))
    return EXIT_OK


def cmd_bughunt(args) -> int:
    a, b = _load_circuit(args.circuit_a), _load_circuit(args.circuit_b)
    if a.num_qubits != b.num_qubits:
        raise UsageError(f"circuits have {a.num_qubits} and {b.num_qubits} qubits")
    res = bughunt(a, b, max_iters=args.max_iters, seed=args.seed, mode=args.mode)
    code = _report(res.verdict, args.json)
    if not args.json:
        print(f"iterations: {res.iterations}")
        if res.confirmed is not None:
            print(f"oracle confirmed: {'yes' if res.confirmed else 'no'}")
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="taqv", description="Tree-automata quantum circuit verifier.")
    p.add_argument("--version", action="version", version=f"taqv {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="decide {pre} circuit {post}")
    v.add_argument("--pre", required=True)
    v.add_argument("--circuit", required=True)
    v.add_argument("--post", required=True)
    v.add_argument("--check", choices=("eq", "incl"), default="eq")
    v.add_argument("--mode", choices=MODES, default="hybrid")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("run", help="apply a circuit to a precondition automaton")
    r.add_argument("--pre", required=True)
    r.add_argument("--circuit", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--mode", choices=MODES, default="hybrid")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser("gen", help="write a benchmark instance")
    fam = g.add_subparsers(dest="family", required=True)
    bv = fam.add_parser("bv")
    bv.add_argument("--hidden", required=True, help="hidden string s_{m-1}...s_0")
    mc = fam.add_parser("mctoffoli")
    mc.add_argument("--m", type=int, required=True, help="number of controls")
    for name in ("grover-single", "grover-all"):
        gr = fam.add_parser(name)
        gr.add_argument("--m", type=int, required=True, help="search register width")
        gr.add_argument("--iters", type=int, default=None)
    rnd = fam.add_parser("random")
    rnd.add_argument("--n", type=int, required=True)
    rnd.add_argument("--seed", type=int, default=0)
    rnd.add_argument("--bug-seed", type=int, default=None, help="also write buggy.qasm with one injected gate")
    for parser in fam.choices.values():
        parser.add_argument("--out-dir", required=True)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bughunt", help="search for inputs on which two circuits differ")
    b.add_argument("--circuit-a", required=True)
    b.add_argument("--circuit-b", required=True)
    b.add_argument("--max-iters", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--mode", choices=MODES, default="hybrid")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bughunt)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"taqv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"taqv: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
