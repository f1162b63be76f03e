"""Command-line entry point: ``schur-sampling <subcommand> ...``.

Exit codes: 0 success, 2 invalid input, 3 a size guard was hit.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .circuits import PermutationGate, PreparedState, ReversibleCircuit, load_circuit
from .errors import SchurSamplingError, TooLarge
from .estimation import EstimationParams, estimate_marginal, estimate_overlap, estimate_record
from .heavy_hitters import KMParams, km_report, km_search, resolve_heavy_probabilities
from .schur_states import SchurLabel, bits_to_str, exact_distribution
from .sparse_sampler import SparsityParams, build_approx_distribution, sample_many
from .spin_combinatorics import validate_path

RANDOMIZED = {"sample-state", "estimate-overlap", "estimate-marginal", "km", "sparse-sample", "sparsity-scan"}


def _parse_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",")]


def _input_label(args) -> SchurLabel:
    if args.in_path is None or args.in_2m is None:
        raise SchurSamplingError("--in-path and --in-2m are required")
    return SchurLabel(validate_path(args.in_path), args.in_2m)


def _circuit(args, n: int | None):
    if getattr(args, "circuit", None) and getattr(args, "perm", None):
        raise SchurSamplingError("give either --circuit or --perm, not both")
    if getattr(args, "circuit", None):
        try:
            text = Path(args.circuit).read_text()
            return load_circuit(text, budget=args.gate_budget)
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise SchurSamplingError(f"cannot read circuit {args.circuit}: {exc}") from exc
    if getattr(args, "perm", None):
        return PermutationGate.parse(args.perm, n)
    return None


def _state(args) -> PreparedState:
    label = _input_label(args)
    return PreparedState(_circuit(args, label.n), label)


def _rng(args) -> np.random.Generator:
    return np.random.default_rng(args.seed)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


# -- subcommands -----------------------------------------------------------

def cmd_amplitude(args) -> str:
    state = _state(args)
    return _dump({"x": args.x, "amplitude": state.amplitude(args.x)})


def cmd_sample_state(args) -> str:
    state = _state(args)
    bits = state.sample(_rng(args), args.samples)
    rows = [bits_to_str(b) for b in bits]
    if args.format == "csv":
        return "x\n" + "\n".join(rows)
    return "\n".join(_dump({"x": r}) for r in rows)


def cmd_estimate_overlap(args) -> str:
    psi = _state(args)
    if args.out_path is not None:
        out = SchurLabel(validate_path(args.out_path), args.out_2m if args.out_2m is not None else 0)
        phi = PreparedState(ReversibleCircuit(psi.n), out)
    else:
        phi = PreparedState(ReversibleCircuit(psi.n), psi.label)
    params = EstimationParams(args.epsilon, args.delta, args.seed)
    est = estimate_overlap(phi, psi, params)
    return _dump(
        {"estimate": est, "epsilon": args.epsilon, "delta": args.delta, "samples_used": params.samples}
    )


def cmd_estimate_marginal(args) -> str:
    state = _state(args)
    prefix = validate_path(args.prefix)
    params = EstimationParams(args.epsilon, args.delta, args.seed)
    est = estimate_marginal(prefix, state, params, method=args.method)
    return _dump(estimate_record(prefix, params, est, args.method))


def cmd_km(args) -> str:
    state = _state(args)
    heavy = km_search(state, KMParams(args.theta, args.gamma), args.seed, args.method)
    entries = sum(p.twice_j + 1 for p in heavy.paths)
    eps = args.epsilon if args.epsilon is not None else args.theta / 4
    delta = args.delta if args.delta is not None else args.gamma / max(1, entries)
    resolved = resolve_heavy_probabilities(
        state, heavy, eps, delta, np.random.SeedSequence(args.seed, spawn_key=(1,)), args.method
    )
    return _dump(km_report(heavy, resolved))


def cmd_sparse_sample(args) -> str:
    state = _state(args)
    params = SparsityParams(args.epsilon, args.t, args.samples, args.seed, args.gamma)
    dist = build_approx_distribution(state, params, args.method)
    if args.snapshot:
        Path(args.snapshot).write_text(_dump(dist.to_json()) + "\n")
    rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(2,)))
    draws = sample_many(dist, rng, args.samples, args.tail_sampler)
    if args.format == "csv":
        return "path,twice_m\n" + "\n".join(f"{p.word},{tm}" for p, tm in draws)
    return "\n".join(_dump({"path": p.word, "twice_m": tm}) for p, tm in draws)


def cmd_exact_dist(args) -> str:
    dist = exact_distribution(_state(args))
    rows = sorted(dist.items())
    if args.format == "json":
        return _dump(
            [{"path": lab.path.word, "twice_m": lab.twice_m, "probability": p} for lab, p in rows]
        )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["path", "twice_m", "probability"])
    for lab, p in rows:
        writer.writerow([lab.path.word, lab.twice_m, f"{p:.17g}"])
    return buf.getvalue().rstrip("\n")


def cmd_sparsity_scan(args) -> str:
    report = experiments.sparsity_scan(
        _parse_range(args.n), args.paths_per_n, args.perms_per_path, args.seed, args.C, args.D
    )
    return _dump(report.to_json(include_raw=args.raw))


def cmd_character_demo(args) -> str:
    if args.n is None:
        raise SchurSamplingError("--n is required")
    gate = PermutationGate.parse(args.perm, args.n)
    spins = [args.twice_j] if args.twice_j is not None else list(range(args.n % 2, args.n + 1, 2))
    out = []
    for tj in spins:
        demo = experiments.character_demo(args.n, gate, tj)
        row = demo.to_json()
        row["mn_character"] = experiments.mn_character(
            ((args.n + tj) // 2, (args.n - tj) // 2), gate.cycle_type()
        )
        out.append(row)
    return _dump(out)


def cmd_pqc_matrix(args) -> str:
    gate = PermutationGate.parse(args.perm, args.n)
    paths, mat = experiments.pqc_output_matrix(gate, args.twice_j)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["out\\in"] + [p.word for p in paths])
    for p, row in zip(paths, mat):
        writer.writerow([p.word] + [f"{v:.17g}" for v in row])
    return buf.getvalue().rstrip("\n")


# -- parser ----------------------------------------------------------------

def _add_state(p: argparse.ArgumentParser) -> None:
    p.add_argument("--in-path", help="Yamanouchi word of the input path")
    p.add_argument("--in-2m", type=int, help="doubled azimuthal number of the input")
    p.add_argument("--circuit", help="circuit or permutation JSON file")
    p.add_argument("--perm", help='permutation, cycle form "(1,2,3)(4,5)" or one-line "2,3,1,5,4"')
    p.add_argument("--gate-budget", type=int, default=10**6)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="schur-sampling", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, state=True):
        p = sub.add_parser(name)
        if state:
            _add_state(p)
        p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--out", help="write output here instead of stdout")
        p.set_defaults(func=fn)
        return p

    p = add("amplitude", cmd_amplitude)
    p.add_argument("--x", required=True, help="computational basis bit string")

    p = add("sample-state", cmd_sample_state)
    p.add_argument("--samples", type=int, default=1)

    p = add("estimate-overlap", cmd_estimate_overlap)
    p.add_argument("--out-path")
    p.add_argument("--out-2m", type=int)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.1)

    p = add("estimate-marginal", cmd_estimate_marginal)
    p.add_argument("--prefix", required=True)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--method", choices=["swaps", "fused"], default="swaps")

    p = add("km", cmd_km)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--method", choices=["swaps", "fused"], default="fused")

    p = add("sparse-sample", cmd_sparse_sample)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--tail-sampler", choices=["rejection", "gnw"], default="rejection")
    p.add_argument("--method", choices=["swaps", "fused"], default="fused")
    p.add_argument("--snapshot", help="write the distribution snapshot JSON here")

    p = add("exact-dist", cmd_exact_dist)
    p.set_defaults(format="csv")

    p = add("sparsity-scan", cmd_sparsity_scan, state=False)
    p.add_argument("--n", required=True, help='qubit counts, "4..10" or "4,6,8"')
    p.add_argument("--paths-per-n", type=int, default=5)
    p.add_argument("--perms-per-path", type=int, default=10)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--D", type=float, default=2.0)
    p.add_argument("--raw", action="store_true", help="include raw distributions")

    p = add("character-demo", cmd_character_demo, state=False)
    p.add_argument("--n", type=int)
    p.add_argument("--perm", required=True)
    p.add_argument("--twice-j", type=int)

    p = add("pqc-matrix", cmd_pqc_matrix, state=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--perm", required=True)
    p.add_argument("--twice-j", type=int, required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in RANDOMIZED and args.seed is None:
            raise SchurSamplingError(f"{args.command} is randomized and requires --seed")
        text = args.func(args)
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SchurSamplingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
