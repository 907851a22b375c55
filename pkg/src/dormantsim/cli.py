"""Command line front end. Every subcommand emits one deterministic report:

    {"command": ..., "parameters": ..., "results": ..., "seed": ...}

as JSON (default) or a flattened one-row CSV. Identical arguments and seed
produce byte-identical output. Exit codes: 0 success, 1 a check failed,
2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys

import numpy as np

from . import channel, chsh, entanglement, states
from .core import (
    PermutationMap,
    Unitary1Q,
    apply_1q,
    apply_permutation,
    bitstring,
    new_basis_state,
    random_unitary_1q,
)

FAMILIES = ("psi3", "psiN", "psi3L")


def parse_basis(spec: str) -> Unitary1Q:
    """comp | hadamard | u:a1re,a1im,a2re,a2im,alpha"""
    if spec == "comp":
        return Unitary1Q.identity()
    if spec == "hadamard":
        return Unitary1Q.hadamard()
    if spec.startswith("u:"):
        parts = spec[2:].split(",")
        if len(parts) != 5:
            raise ValueError(f"basis spec {spec!r} needs 5 comma-separated numbers")
        vals = [float(p) for p in parts]
        return Unitary1Q(complex(vals[0], vals[1]), complex(vals[2], vals[3]), vals[4])
    raise ValueError(f"unknown basis spec {spec!r} (use comp, hadamard, or u:...)")


def parse_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"pair {text!r} must look like i,j")
    return int(parts[0]), int(parts[1])


def _make_family(name: str, n: int | None) -> states.DormantFamily:
    if name == "psi3":
        return states.build_psi3()
    if name == "psi3L":
        return states.build_psi3_lock()
    if n is None:
        raise ValueError("--n is required for family psiN")
    return states.build_psi_n(n)


def _jsonify(value):
    """Force plain python scalars so json output is stable."""
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _flatten(value, prefix: str, out: dict) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(v, f"{prefix}.{k}" if prefix else str(k), out)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(v, f"{prefix}.{i}", out)
    else:
        out[prefix] = value


def _render(report: dict, fmt: str) -> str:
    report = _jsonify(report)
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    flat: dict = {}
    _flatten(report, "", flat)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(flat.keys())
    writer.writerow("" if v is None else v for v in flat.values())
    return buf.getvalue()


def _emit(report: dict, args) -> None:
    text = _render(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_build(args) -> tuple[dict, dict, int]:
    family = _make_family(args.family, args.n)
    nonzero = [
        {"bitstring": bitstring(i, family.n_qubits), "re": a.real, "im": a.imag}
        for i, a in enumerate(family.state.amplitudes)
        if abs(a) > args.tolerance
    ]
    params = {"family": args.family, "n": family.n_qubits}
    results = {"kind": family.kind, "n_qubits": family.n_qubits, "nonzero": nonzero}
    return params, results, 0


def cmd_chsh(args) -> tuple[dict, dict, int]:
    family = _make_family(args.family, args.n)
    pair = parse_pair(args.pair)
    patterns = chsh.ALL_PATTERNS if args.all_patterns else chsh.ADMISSIBLE_PATTERNS
    result = chsh.evaluate(family.state, pair, chsh.default_setting(), patterns)
    results = {"default": result.to_json_dict(), "sweep": None}
    if args.rotations > 0:
        rng = np.random.default_rng(args.seed)
        summary = chsh.rotation_sweep(family.state, pair, args.rotations, rng, patterns)
        results["sweep"] = summary.to_json_dict()
    params = {
        "family": args.family,
        "n": family.n_qubits,
        "pair": list(pair),
        "rotations": args.rotations,
        "all_patterns": args.all_patterns,
    }
    return params, results, 0


def cmd_correlate(args) -> tuple[dict, dict, int]:
    family = _make_family(args.family, args.n)
    report = entanglement.conditional_report(
        family.state,
        args.measured,
        parse_basis(args.basis_m),
        args.target,
        parse_basis(args.basis_t),
    )
    params = {
        "family": args.family,
        "n": family.n_qubits,
        "measured": args.measured,
        "target": args.target,
        "basis_m": args.basis_m,
        "basis_t": args.basis_t,
    }
    return params, report.to_json_dict(), 0


def cmd_permtest(args) -> tuple[dict, dict, int]:
    family = states.build_psi_n(args.n)
    rng = np.random.default_rng(args.seed)
    if args.n <= 6:
        mode = "exhaustive"
        perms = _all_permutations(args.n)
    else:
        mode = "random"
        perms = [
            PermutationMap(tuple(int(x) + 1 for x in rng.permutation(args.n)))
            for _ in range(args.samples)
        ]
    max_dev = 0.0
    for perm in perms:
        permuted = apply_permutation(family.state, perm)
        dev = float(np.max(np.abs(permuted.amplitudes - family.state.amplitudes)))
        max_dev = max(max_dev, dev)
    passed = max_dev <= args.tolerance
    params = {"n": args.n, "samples": None if mode == "exhaustive" else args.samples}
    results = {"mode": mode, "count": len(perms), "max_deviation": max_dev, "passed": passed}
    return params, results, 0 if passed else 1


def _all_permutations(n: int) -> list[PermutationMap]:
    return [PermutationMap(p) for p in itertools.permutations(range(1, n + 1))]


def cmd_channel(args) -> tuple[dict, dict, int]:
    endpoints = parse_pair(args.endpoints)
    session = channel.setup_session(args.n, endpoints)
    if args.deviant is not None and args.deviant not in session.controllers:
        raise ValueError(f"deviant {args.deviant} is not a controller of this session")
    rng = np.random.default_rng(args.seed)
    for controller in session.controllers:
        basis = (
            Unitary1Q.hadamard()
            if controller == args.deviant
            else Unitary1Q.identity()
        )
        session.controller_measure(controller, basis, rng)
    status = session.deliver_and_resolve()
    fidelities = []
    if status == channel.STATUS_ACTIVATED:
        for _ in range(args.teleport_trials):
            payload = _random_payload(rng)
            fidelities.append(session.teleport_over(payload, rng))
    params = {
        "n": args.n,
        "endpoints": list(endpoints),
        "deviant": args.deviant,
        "teleport_trials": args.teleport_trials,
    }
    results = {
        "records": session.transcript_records(),
        "status": status,
        "teleport_fidelities": fidelities,
    }
    return params, results, 0


def _random_payload(rng):
    return apply_1q(new_basis_state(1, "0"), random_unitary_1q(rng), 1)


def cmd_classify(args) -> tuple[dict, dict, int]:
    family = _make_family(args.family, args.n)
    pair = parse_pair(args.pair)
    level = chsh.classify(family.state, pair)
    params = {"family": args.family, "n": family.n_qubits, "pair": list(pair)}
    return params, {"level": level}, 0


def cmd_resources(args) -> tuple[dict, dict, int]:
    plan = channel.plan_resources(args.n, args.k)
    return {"n": args.n, "k": args.k}, plan.to_json_dict(), 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dormantsim",
        description="Reports on dormant-entanglement states, CHSH values, and the collective channel.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="rng seed (default 0)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--tolerance", type=float, default=1e-10)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="dump the nonzero amplitudes of a family state")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--n", type=int, default=None, help="qubit count (psiN only)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("chsh", parents=[common], help="CHSH correlators, S values, optional rotation sweep")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--pair", required=True, help="endpoint pair, e.g. 1,2")
    p.add_argument("--rotations", type=int, default=0, help="random rotation trials")
    p.add_argument("--all-patterns", action="store_true", help="score all 8 sign patterns")
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("correlate", parents=[common], help="marginal and conditional outcome probabilities")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--measured", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--basis-m", default="comp")
    p.add_argument("--basis-t", default="comp")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("permtest", parents=[common], help="qubit-permutation invariance of the n-qubit family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=1000, help="random permutations when n > 6")
    p.set_defaults(func=cmd_permtest)

    p = sub.add_parser("channel", parents=[common], help="run one collective-channel session end to end")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--endpoints", required=True, help="endpoint party ids, e.g. 1,2")
    p.add_argument("--deviant", type=int, default=None, help="controller that measures in the Hadamard basis")
    p.add_argument("--teleport-trials", type=int, default=0)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("classify", parents=[common], help="entanglement level of a pair (Type1/2/3/Other)")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--pair", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("resources", parents=[common], help="point-to-point vs collective qubit counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_resources)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        params, results, code = args.func(args)
    except (ValueError, channel.ProtocolError) as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    report = {
        "command": args.command,
        "parameters": params,
        "results": results,
        "seed": args.seed,
    }
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
