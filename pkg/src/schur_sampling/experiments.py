"""Desk-scale experiments built on the dense oracle.

* output matrices of permutational circuits inside one ``(J, M)`` block,
* the sparsity study over random paths and permutations,
* the character demo: the trace of ``U_pi`` over a ``J`` block, checked
  against an independent Murnaghan-Nakayama character.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from .circuits import PermutationGate
from .errors import BadPartition, TooLarge
from .estimation import Seed, seed_sequence
from .schur_states import all_bitstrings, bits_to_index, check_dense, schur_basis
from .spin_combinatorics import SpinPath, YoungShape2, sample_uniform_path

MAX_SCAN_N = 12


def _permuted_rows(mat: np.ndarray, gate: PermutationGate) -> np.ndarray:
    """``U_pi`` applied to every column of a dense ``(2**n, cols)`` matrix."""
    xs = all_bitstrings(gate.n_wires)
    out = np.empty_like(mat)
    out[bits_to_index(gate.apply_bits(xs))] = mat
    return out


@lru_cache(maxsize=64)
def _block_basis(n: int, twice_j: int, twice_m: int):
    labels, mat = schur_basis(n, twice_j, twice_m)
    mat.setflags(write=False)
    return [lab.path for lab in labels], mat


def pqc_block(gate: PermutationGate, twice_j: int, twice_m: int | None = None):
    """``<J', M | U_pi | J, M>`` over all paths ending at ``twice_j``: ``(paths, matrix)``.

    Rows index the output path, columns the input path.
    """
    n = gate.n_wires
    check_dense(n)
    if twice_m is None:
        twice_m = twice_j
    paths, basis = _block_basis(n, twice_j, twice_m)
    return paths, basis.T @ _permuted_rows(basis, gate)


def pqc_output_matrix(gate: PermutationGate, twice_j: int) -> tuple[list[SpinPath], np.ndarray]:
    """Squared block: column ``b`` is the output law for input path ``b``."""
    paths, block = pqc_block(gate, twice_j)
    return paths, block**2


def random_permutation(n: int, rng: np.random.Generator) -> PermutationGate:
    return PermutationGate(tuple(int(v) for v in rng.permutation(n)))


# -- sparsity study --------------------------------------------------------

def criterion_a(p: np.ndarray, n: int) -> bool:
    """Some element exceeds ``1 / 2n``."""
    return bool(p.max() > 1 / (2 * n))


def criterion_b(p: np.ndarray, n: int) -> bool:
    """Elements below ``1 / 2n^2`` carry less than ``1 / 2n`` in total."""
    return bool(p[p < 1 / (2 * n * n)].sum() < 1 / (2 * n))


def criterion_c(p: np.ndarray, n: int, c: float = 1.0, d: float = 2.0) -> bool | None:
    """All but the largest ``C log2(d)^D`` elements sum below ``1 / log2 d``; ``None`` if ``d <= n``."""
    dim = p.shape[0]
    if dim <= n:
        return None
    log_d = math.log2(dim)
    keep = int(math.floor(c * log_d**d))
    rest = np.sort(p)[::-1][keep:].sum()
    return bool(rest < 1 / log_d)


def wilson_interval(failures: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    lo, hi = proportion_confint(failures, trials, alpha=alpha, method="wilson")
    return float(lo), float(hi)


@dataclass
class SparsityReport:
    n_values: list[int]
    paths_per_n: int
    perms_per_path: int
    seed: int
    c: float
    d: float
    per_n: dict[int, dict] = field(default_factory=dict)
    instances: list[dict] = field(default_factory=list)

    def summary(self, n: int) -> dict:
        return self.per_n[n]

    def to_json(self, include_raw: bool = False) -> dict:
        out = {
            "n_values": self.n_values,
            "paths_per_n": self.paths_per_n,
            "perms_per_path": self.perms_per_path,
            "seed": self.seed,
            "criterion_c_constants": {"C": self.c, "D": self.d},
            "per_n": {str(n): s for n, s in self.per_n.items()},
        }
        if include_raw:
            out["instances"] = self.instances
        else:
            out["instances"] = [
                {k: v for k, v in inst.items() if k != "distribution"} for inst in self.instances
            ]
        return out


def sparsity_scan(
    n_values: Sequence[int],
    paths_per_n: int = 5,
    perms_per_path: int = 10,
    seed: int = 0,
    c: float = 1.0,
    d: float = 2.0,
) -> SparsityReport:
    """Exact PQC output laws for random paths and permutations, scored by the three criteria.

    The permutational output law does not depend on ``M``, so each block is
    taken at ``M = J``.
    """
    n_values = list(n_values)
    if max(n_values) > MAX_SCAN_N:
        raise TooLarge(f"sparsity_scan is guarded at n <= {MAX_SCAN_N}")
    report = SparsityReport(n_values, paths_per_n, perms_per_path, seed, c, d)
    for n in n_values:
        rows = []
        for i in range(paths_per_n):
            rng = np.random.default_rng(seed_sequence(seed, n, i))
            path = sample_uniform_path(n, rng)
            for j in range(perms_per_path):
                gate = random_permutation(n, np.random.default_rng(seed_sequence(seed, n, i, j)))
                paths, block = pqc_block(gate, path.twice_j)
                p = block[:, paths.index(path)] ** 2
                row = {
                    "n": n,
                    "path": path.word,
                    "perm": gate.one_line(),
                    "dimension": int(p.shape[0]),
                    "max_probability": float(p.max()),
                    "criterion_a": criterion_a(p, n),
                    "criterion_b": criterion_b(p, n),
                    "criterion_c": criterion_c(p, n, c, d),
                    "distribution": [float(v) for v in p],
                }
                rows.append(row)
        report.instances.extend(rows)
        total = len(rows)
        b_fail = sum(not r["criterion_b"] for r in rows)
        c_rows = [r for r in rows if r["criterion_c"] is not None]
        c_fail = sum(not r["criterion_c"] for r in c_rows)
        report.per_n[n] = {
            "instances": total,
            "frac_a": sum(r["criterion_a"] for r in rows) / total,
            "frac_b": 1 - b_fail / total,
            "b_failures": b_fail,
            "b_failure_wilson": wilson_interval(b_fail, total),
            "c_applicable": len(c_rows),
            "frac_c": (1 - c_fail / len(c_rows)) if c_rows else None,
            "c_failures": c_fail,
            "c_failure_wilson": wilson_interval(c_fail, len(c_rows)),
        }
    return report


# -- characters ------------------------------------------------------------

def partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Integer partitions of ``n`` in reverse lexicographic order."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def permutation_of_cycle_type(cycles: Sequence[int]) -> PermutationGate:
    perm = []
    start = 0
    for length in cycles:
        block = list(range(start, start + length))
        perm.extend(block[1:] + block[:1])
        start += length
    return PermutationGate(tuple(perm))


def _to_partition(shape) -> tuple[int, ...]:
    if isinstance(shape, YoungShape2):
        return (shape.row1, shape.row2)
    return tuple(int(v) for v in shape)


@lru_cache(maxsize=None)
def _mn(beta: tuple[int, ...], cycles: tuple[int, ...]) -> int:
    if not cycles:
        return 1
    r, rest = cycles[0], cycles[1:]
    beads = set(beta)
    total = 0
    for b in beta:
        target = b - r
        if target < 0 or target in beads:
            continue
        between = sum(1 for x in beta if target < x < b)
        new_beta = tuple(sorted((beads - {b}) | {target}, reverse=True))
        total += (-1) ** between * _mn(new_beta, rest)
    return total


def mn_character(shape, cycles: Sequence[int]) -> int:
    """Character of the two-row irrep ``shape`` at cycle type ``cycles`` (Murnaghan-Nakayama).

    Rim hooks are removed on the two-bead abacus: moving a bead from ``b`` to
    a free position ``b - r`` removes a hook of length ``r`` with sign
    ``(-1)^(beads jumped)``.
    """
    lam = _to_partition(shape)
    cycles = tuple(int(c) for c in cycles)
    if len(lam) > 2 or any(v < 0 for v in lam) or list(lam) != sorted(lam, reverse=True):
        raise BadPartition(f"{lam} is not a two-row shape")
    if any(c < 1 for c in cycles) or sum(cycles) != sum(lam):
        raise BadPartition(f"cycle type {cycles} does not partition {sum(lam)}")
    lam = lam + (0,) * (2 - len(lam))
    beta = (lam[0] + 1, lam[1])
    return _mn(beta, tuple(sorted(cycles, reverse=True)))


@dataclass(frozen=True)
class CharacterDemo:
    n: int
    twice_j: int
    perm: tuple[int, ...]
    trace: float
    probability: float

    @property
    def character(self) -> float:
        return self.trace / (self.twice_j + 1)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "twice_j": self.twice_j,
            "perm": [p + 1 for p in self.perm],
            "trace": self.trace,
            "character": self.character,
            "probability_all_zero": self.probability,
        }


def block_trace(gate: PermutationGate, twice_j: int) -> float:
    """``sum_{J, M} <J, M| U_pi |J, M>`` over every path ending at ``twice_j``."""
    return float(
        sum(np.trace(pqc_block(gate, twice_j, tm)[1]) for tm in range(-twice_j, twice_j + 1, 2))
    )


def character_demo(n: int, gate: PermutationGate, twice_j: int) -> CharacterDemo:
    """All-zero outcome probability of the J-resolved permutational circuit, plus the block trace.

    The register is simulated densely: one column per coupled label at
    ``twice_j`` holds ``2**(-n/2) |J, M>``, ``U_pi`` acts on the physical
    index, and the inverse preparation contracts each column with its own
    label (the path register forces diagonal terms).
    """
    if gate.n_wires != n:
        raise BadPartition(f"permutation acts on {gate.n_wires} wires, expected n={n}")
    check_dense(n)
    YoungShape2.from_spin(n, twice_j)
    _, basis = schur_basis(n, twice_j)
    prepared = basis / math.sqrt(2**n)
    evolved = _permuted_rows(prepared, gate)
    amp = float(np.sum(prepared * evolved))
    return CharacterDemo(n, twice_j, gate.perm, block_trace(gate, twice_j), amp**2)
