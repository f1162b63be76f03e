"""Two-row character table of S_n from circuit block traces, next to Murnaghan-Nakayama."""
import argparse

from schur_sampling.experiments import (
    character_demo,
    mn_character,
    partitions,
    permutation_of_cycle_type,
)
from schur_sampling.spin_combinatorics import valid_twice_js


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=6)
    args = ap.parse_args()
    n = args.n
    classes = list(partitions(n))
    shapes = [((n + tj) // 2, (n - tj) // 2) for tj in valid_twice_js(n)]
    print("shape      " + " ".join(f"{''.join(map(str, c)):>8}" for c in classes))
    bad = 0
    for shape in shapes:
        tj = shape[0] - shape[1]
        cells = []
        for cycles in classes:
            demo = character_demo(n, permutation_of_cycle_type(cycles), tj)
            chi = round(demo.character)
            bad += chi != mn_character(shape, cycles)
            cells.append(f"{chi:>8d}")
        print(f"{str(shape):<10} " + " ".join(cells))
    print(f"mismatches against Murnaghan-Nakayama: {bad}")


if __name__ == "__main__":
    main()
