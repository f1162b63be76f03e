"""Approximate sampling of nearly sparse output distributions.

The approximation keeps estimated probabilities for every azimuthal value of
the heavy paths found by :func:`km_search` and spreads the remaining mass
uniformly over all other labels.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import OracleRequired, SchurSamplingError
from .estimation import Seed, seed_sequence
from .heavy_hitters import HeavyList, KMParams, km_search, resolve_heavy_probabilities
from .schur_states import CTState, SchurLabel, all_labels
from .spin_combinatorics import (
    SpinPath,
    sample_uniform_jm_gnw,
    sample_uniform_jm_rejection,
)

TAIL_SAMPLERS = {"rejection": sample_uniform_jm_rejection, "gnw": sample_uniform_jm_gnw}


@dataclass(frozen=True)
class SparsityParams:
    epsilon: float
    t: int
    sample_count: int = 0
    seed: Seed = 0
    gamma: float = 0.1

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise SchurSamplingError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.t < 1:
            raise SchurSamplingError(f"t must be >= 1, got {self.t}")

    @property
    def theta(self) -> float:
        return self.epsilon / self.t


def resolution_precision(epsilon: float, t: int, n: int, n_heavy: int) -> float:
    """``min(eps / ((n+1)|L|), eps / 4t)``, the second term alone when ``L`` is empty."""
    tail_term = epsilon / (4 * t)
    if n_heavy == 0:
        return tail_term
    return min(epsilon / ((n + 1) * n_heavy), tail_term)


def tail_normalization(n: int, paths) -> Fraction | None:
    """``1 / (2**n - sum_{J in L} (2J + 1))``, or ``None`` when ``L`` covers every label."""
    remaining = (1 << n) - sum(p.twice_j + 1 for p in paths)
    return Fraction(1, remaining) if remaining > 0 else None


@dataclass
class ApproxDistribution:
    n: int
    heavy: HeavyList
    estimates: dict[tuple[SpinPath, int], float]
    alpha: Fraction | None
    tail_weight: float
    epsilon_prime: float = 0.0
    rescaled: bool = False
    heavy_paths: frozenset = field(init=False)

    def __post_init__(self):
        self.heavy_paths = frozenset(self.heavy.paths)

    @property
    def tail_count(self) -> int:
        return 0 if self.alpha is None else self.alpha.denominator // self.alpha.numerator

    @property
    def heavy_mass(self) -> float:
        return float(sum(self.estimates.values()))

    def total_mass(self) -> float:
        return self.heavy_mass + self.tail_weight * self.tail_count

    def probability(self, path: SpinPath, twice_m: int) -> float:
        if path in self.heavy_paths:
            return self.estimates.get((path, twice_m), 0.0)
        return self.tail_weight

    def as_dict(self) -> dict[SchurLabel, float]:
        """Every label's probability (enumerates all ``2**n`` labels)."""
        return {lab: self.probability(lab.path, lab.twice_m) for lab in all_labels(self.n)}

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha": None if self.alpha is None else str(self.alpha),
            "tail_weight": self.tail_weight,
            "epsilon_prime": self.epsilon_prime,
            "rescaled": self.rescaled,
            "heavy": self.heavy.to_json(),
            "estimates": [
                {"path": p.word, "twice_m": tm, "estimate": e}
                for (p, tm), e in sorted(self.estimates.items())
            ],
        }


def build_approx_distribution(
    phi: CTState, params: SparsityParams, method: str = "fused"
) -> ApproxDistribution:
    """Heavy paths at ``theta = eps / t``, their per-M estimates, and a uniform tail.

    The failure budget ``gamma`` is split evenly between the search and the
    per-entry resolution calls.  Should estimation noise push the heavy mass
    past 1, the tail is set to 0 and the heavy estimates are rescaled.
    """
    n = phi.n
    heavy = km_search(phi, KMParams(params.theta, params.gamma / 2), seed_sequence(params.seed, 0), method)
    paths = heavy.paths
    eps_prime = resolution_precision(params.epsilon, params.t, n, len(paths))
    entries = sum(p.twice_j + 1 for p in paths)
    delta = (params.gamma / 2) / max(1, entries)
    estimates = resolve_heavy_probabilities(
        phi, paths, eps_prime, delta, seed_sequence(params.seed, 1), method
    )
    alpha = tail_normalization(n, paths)
    mass = sum(estimates.values())
    rescaled = False
    if mass > 1 or (alpha is None and mass > 0):
        estimates = {key: v / mass for key, v in estimates.items()}
        tail = 0.0
        rescaled = True
    elif alpha is None:
        tail = 0.0
    else:
        tail = float(alpha * Fraction(1 - mass))
    return ApproxDistribution(n, heavy, estimates, alpha, tail, eps_prime, rescaled)


def _tail_draw(d: ApproxDistribution, rng, tail_sampler: str) -> tuple[SpinPath, int]:
    draw = TAIL_SAMPLERS[tail_sampler]
    while True:
        path, tm = draw(d.n, rng)
        if path not in d.heavy_paths:
            return path, tm


def sample(d: ApproxDistribution, rng: np.random.Generator, tail_sampler: str = "rejection"):
    """One ``(path, twice_m)`` draw from ``d``."""
    return sample_many(d, rng, 1, tail_sampler)[0]


def sample_many(
    d: ApproxDistribution, rng: np.random.Generator, size: int, tail_sampler: str = "rejection"
) -> list[tuple[SpinPath, int]]:
    if tail_sampler not in TAIL_SAMPLERS:
        raise SchurSamplingError(f"unknown tail sampler {tail_sampler!r}")
    keys = sorted(d.estimates)
    weights = np.array([d.estimates[k] for k in keys], dtype=float)
    bias = float(weights.sum()) if d.tail_count else 1.0
    heavy_flags = rng.random(size) < bias
    n_heavy = int(heavy_flags.sum())
    heavy_draws = iter(())
    if n_heavy:
        idx = rng.choice(len(keys), size=n_heavy, p=weights / weights.sum())
        heavy_draws = iter(keys[i] for i in idx)
    out = []
    for flag in heavy_flags:
        out.append(next(heavy_draws) if flag else _tail_draw(d, rng, tail_sampler))
    return out


def best_sparse_distance(p: dict, t: int) -> float:
    """l1 distance from ``p`` to the nearest distribution with at most ``t`` non-zeros."""
    values = np.sort(np.fromiter(p.values(), dtype=float))[::-1]
    return float(2 * values[t:].sum())


def minimal_sparsity(p: dict, epsilon: float) -> int:
    """Smallest ``t`` for which ``p`` is certified ``epsilon``-approximately ``t``-sparse."""
    values = np.sort(np.fromiter(p.values(), dtype=float))[::-1]
    tails = 2 * (values.sum() - np.cumsum(values))
    return int(np.argmax(tails <= epsilon + 1e-15)) + 1


def support_bound_check(p: dict | None, t: int, epsilon: float) -> float:
    """Mass of ``p`` outside ``S = {p > epsilon / t}``; at most ``2 epsilon`` for sparse ``p``."""
    if p is None:
        raise OracleRequired("support_bound_check needs the full output distribution")
    threshold = epsilon / t
    return float(sum(v for v in p.values() if v <= threshold))
