"""Score exact PQC output laws on random paths and permutations against the sparsity criteria.

    python3 scripts/sparsity_study.py --n 4..10 --seed 1 --out sparsity.json
"""
import argparse
import json
from pathlib import Path

from schur_sampling.experiments import sparsity_scan


def parse_range(text):
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",")]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", default="4..10")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--paths-per-n", type=int, default=5)
    ap.add_argument("--perms-per-path", type=int, default=10)
    ap.add_argument("--raw", action="store_true")
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    report = sparsity_scan(parse_range(args.n), args.paths_per_n, args.perms_per_path, args.seed)
    print(f"{'n':>3} {'inst':>5} {'A':>6} {'B':>6} {'B fail 95% CI':>16} {'C':>6}")
    for n, s in report.per_n.items():
        lo, hi = s["b_failure_wilson"]
        frac_c = "-" if s["frac_c"] is None else f"{s['frac_c']:.2f}"
        print(f"{n:>3} {s['instances']:>5} {s['frac_a']:>6.2f} {s['frac_b']:>6.2f} {f'[{lo:.2f}, {hi:.2f}]':>16} {frac_c:>6}")
    if args.out:
        args.out.write_text(json.dumps(report.to_json(include_raw=args.raw), indent=1))


if __name__ == "__main__":
    main()
