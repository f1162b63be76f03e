"""Monte Carlo overlap and marginal estimators for CT states.

Both estimators average a ratio statistic ``Z`` with ``E[Z^2] <= 1`` and
combine batches by median-of-means: ``ceil(8 / eps^2)`` draws per batch
(Chebyshev puts each batch mean within ``eps`` with probability >= 7/8) and
``ceil(18 ln(2 / delta))`` batches (Hoeffding on the count of bad batches).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .circuits import PermutedState, build_uswaps
from .errors import DimensionMismatch, PrefixTooLong, SchurSamplingError
from .schur_states import (
    CTState,
    SchurLabel,
    SchurState,
    cascade_amplitudes,
    split_counts,
    to_bits,
    twice_weight,
)
from .spin_combinatorics import SpinPath

Seed = Union[int, np.random.SeedSequence, None]

BATCH_CONSTANT = 8
MEDIAN_CONSTANT = 18


def seed_sequence(seed: Seed, *keys: int) -> np.random.SeedSequence:
    """Deterministic child stream ``keys`` of a master seed."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + keys)
    return np.random.SeedSequence(0 if seed is None else int(seed), spawn_key=keys)


@dataclass(frozen=True)
class EstimationParams:
    epsilon: float
    delta: float
    seed: Seed = 0

    def __post_init__(self):
        if not 0 < self.epsilon <= 2:
            raise SchurSamplingError(f"epsilon must lie in (0, 2], got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise SchurSamplingError(f"delta must lie in (0, 1), got {self.delta}")

    @property
    def batch_size(self) -> int:
        return math.ceil(BATCH_CONSTANT / self.epsilon**2)

    @property
    def n_batches(self) -> int:
        return math.ceil(MEDIAN_CONSTANT * math.log(2 / self.delta))

    @property
    def samples(self) -> int:
        return self.batch_size * self.n_batches

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(seed_sequence(self.seed))

    def split(self, parts: int, index: int) -> "EstimationParams":
        return EstimationParams(
            self.epsilon / parts, self.delta / parts, seed_sequence(self.seed, index)
        )


class ProductState(CTState):
    """``|left> (x) |right>``; left occupies the first ``left.n`` wires."""

    def __init__(self, left: CTState, right: CTState):
        self.left = left
        self.right = right
        self.n = left.n + right.n

    def amplitudes(self, bits):
        bits = to_bits(bits, self.n)
        return self.left.amplitudes(bits[:, : self.left.n]) * self.right.amplitudes(
            bits[:, self.left.n :]
        )

    def sample_counts(self, counts, rng):
        o1, b1, c1 = self.left.sample_counts(counts, rng)
        o2, b2, c2 = self.right.sample_counts(c1, rng)
        return o1[o2], np.concatenate([b1[o2], b2], axis=1), c2


def _median_of_means(origin, weights, params: EstimationParams) -> float:
    sums = np.bincount(origin, weights=weights, minlength=params.n_batches)
    return float(np.median(sums / params.batch_size))


def ratio_samples(phi: CTState, psi: CTState, counts, rng):
    """Histogram of ``Z = psi(x) / phi(x)`` with ``x ~ |phi(x)|^2``: ``(origin, z, counts)``."""
    origin, bits, cnt = phi.sample_counts(np.asarray(counts, dtype=np.int64), rng)
    z = psi.amplitudes(bits) / phi.amplitudes(bits)
    return origin, z, cnt


def estimate_overlap(phi: CTState, psi: CTState, params: EstimationParams) -> float:
    """Median-of-means estimate of the real overlap ``<phi|psi>``."""
    if phi.n != psi.n:
        raise DimensionMismatch(f"{phi.n} vs {psi.n} qubits")
    counts = np.full(params.n_batches, params.batch_size, dtype=np.int64)
    origin, z, cnt = ratio_samples(phi, psi, counts, params.rng())
    return _median_of_means(origin, cnt * z, params)


def swap_overlap_states(prefix_state: SchurState, phi: CTState):
    """The pair ``(A, B)`` with ``<A|B> = <phi| (|j,m><j,m| (x) I) |phi>``.

    ``A = |j,m> (x) |phi>`` and ``B = U_SWAPS A``, where the swap gate trades
    the k-qubit register with the first k qubits of ``phi``.
    """
    a = ProductState(prefix_state, phi)
    return a, PermutedState(build_uswaps(phi.n, prefix_state.n), a)


def _check_prefix(prefix: SpinPath, phi: CTState) -> None:
    if prefix.n > phi.n:
        raise PrefixTooLong(f"prefix on {prefix.n} qubits, state on {phi.n}")


def _azimuthal_values(prefix: SpinPath, twice_m: int | None) -> list[int]:
    if twice_m is not None:
        SchurLabel(prefix, twice_m)  # validates
        return [twice_m]
    return list(range(-prefix.twice_j, prefix.twice_j + 1, 2))


def estimate_marginal_swaps(
    prefix: SpinPath, phi: CTState, params: EstimationParams, twice_m: int | None = None
) -> float:
    """Sum of one swap-test overlap per azimuthal value, each to ``eps / (2j+1)``."""
    _check_prefix(prefix, phi)
    ms = _azimuthal_values(prefix, twice_m)
    total = 0.0
    for i, tm in enumerate(ms):
        a, b = swap_overlap_states(SchurState(SchurLabel(prefix, tm)), phi)
        total += estimate_overlap(a, b, params.split(len(ms), i))
    return min(1.0, max(0.0, total))


def estimate_marginal_fused(
    prefix: SpinPath, phi: CTState, params: EstimationParams, twice_m: int | None = None
) -> float:
    """All azimuthal terms of the swap estimator in one statistic.

    Draw ``(a, b) ~ |phi|^2`` with ``a`` the first k bits.  Only the term with
    ``m = m(a)`` (the weight of ``a``) can be non-zero, so draw
    ``c ~ |<c|j, m(a)>|^2`` and score
    ``Z = <a|j,m(a)> phi(c, b) / (<c|j,m(a)> phi(a, b))``.  Then
    ``E[Z] = p(j)`` and ``E[Z^2] <= 1``, so the full marginal gets the
    ``(eps, delta)`` budget instead of splitting it ``2j+1`` ways.
    """
    _check_prefix(prefix, phi)
    k = prefix.n
    rng = params.rng()
    counts = np.full(params.n_batches, params.batch_size, dtype=np.int64)
    origin, ab, cnt = phi.sample_counts(counts, rng)
    a = ab[:, :k]
    tm_a = twice_weight(a)
    valid = np.abs(tm_a) <= prefix.twice_j
    if twice_m is not None:
        _azimuthal_values(prefix, twice_m)
        valid &= tm_a == twice_m
    rows = np.flatnonzero(valid)
    psi_a = cascade_amplitudes(prefix, a[rows])
    keep = psi_a != 0
    rows, psi_a = rows[keep], psi_a[keep]
    if rows.size == 0:
        return 0.0
    o2, c_bits, c_cnt = split_counts(prefix, tm_a[rows], cnt[rows], rng)
    src = rows[o2]
    psi_c = cascade_amplitudes(prefix, c_bits)
    phi_ab = phi.amplitudes(ab[rows])
    swapped = np.concatenate([c_bits, ab[src, k:]], axis=1)
    z = psi_a[o2] * phi.amplitudes(swapped) / (psi_c * phi_ab[o2])
    estimate = _median_of_means(origin[src], c_cnt * z, params)
    return min(1.0, max(0.0, estimate))


MARGINAL_METHODS = {"swaps": estimate_marginal_swaps, "fused": estimate_marginal_fused}


def estimate_marginal(
    prefix: SpinPath,
    phi: CTState,
    params: EstimationParams,
    method: str = "swaps",
    twice_m: int | None = None,
) -> float:
    """Estimate ``p(j) = <phi| Pi(j) |phi>``, or ``|<j, m|phi>|^2`` when ``twice_m`` is given.

    ``twice_m`` is only meaningful when the prefix covers all of ``phi``'s
    qubits (otherwise it restricts the projector to a single ``m``).
    """
    try:
        fn = MARGINAL_METHODS[method]
    except KeyError:
        raise SchurSamplingError(f"unknown marginal method {method!r}") from None
    return fn(prefix, phi, params, twice_m)


def estimate_record(prefix: SpinPath, params: EstimationParams, estimate: float, method: str) -> dict:
    parts = 1 if method == "fused" else prefix.twice_j + 1
    per_part = EstimationParams(params.epsilon / parts, params.delta / parts)
    return {
        "prefix": prefix.word,
        "epsilon": params.epsilon,
        "delta": params.delta,
        "estimate": estimate,
        "samples_used": parts * per_part.samples,
        "method": method,
    }
