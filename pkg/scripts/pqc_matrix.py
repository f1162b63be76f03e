"""Write the squared block <J'|U_pi|J>^2 of a permutational circuit as a CSV heat map.

    python3 scripts/pqc_matrix.py --n 6 --perm "(1,4)(2,6,3)" --twice-j 2 --out block.csv
"""
import argparse
import csv
import sys

from schur_sampling.circuits import PermutationGate
from schur_sampling.experiments import pqc_output_matrix


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, required=True)
    ap.add_argument("--perm", required=True)
    ap.add_argument("--twice-j", type=int, required=True)
    ap.add_argument("--out")
    args = ap.parse_args()

    paths, mat = pqc_output_matrix(PermutationGate.parse(args.perm, args.n), args.twice_j)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["out\\in"] + [p.word for p in paths])
    for p, row in zip(paths, mat):
        writer.writerow([p.word] + [f"{v:.6g}" for v in row])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
