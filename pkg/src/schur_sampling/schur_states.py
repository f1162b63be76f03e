"""Sequentially coupled basis states and the dense verification oracle.

Bit convention: a computational-basis bit 0 is spin up (m = +1/2), bit 1 is
spin down.  Qubit 1 is the leftmost character of a bit string and the most
significant bit of a dense-vector index.

Batches of bit strings are ``(rows, n)`` ``uint8`` arrays.  Sampling works
on histograms: :meth:`CTState.sample_counts` takes a vector of draw counts
(one entry per independent group, e.g. one per median-of-means batch) and
returns the distinct outcomes of every group with their multiplicities.  A
group of ``c`` draws costs time proportional to its number of distinct
outcomes, not to ``c``, while the joint law of the counts is exactly that of
``c`` independent draws.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .clebsch_gordan import CGQuery, cg_half_squared, cg_sign
from .errors import LengthMismatch, OutOfRange, TooLarge
from .spin_combinatorics import SpinPath, enumerate_paths, validate_path

DEFAULT_MAX_DENSE_N = 14


def max_dense_n() -> int:
    return int(os.environ.get("SCHUR_MAX_DENSE_N", DEFAULT_MAX_DENSE_N))


def check_dense(n: int) -> None:
    limit = max_dense_n()
    if n > limit:
        raise TooLarge(f"dense oracle is guarded at n <= {limit} (SCHUR_MAX_DENSE_N), got {n}")


# -- bit strings -----------------------------------------------------------

def to_bits(x, n: int | None = None) -> np.ndarray:
    """Coerce a bit string, a 0/1 sequence or an array into a ``(rows, n)`` array."""
    if isinstance(x, str):
        if any(ch not in "01" for ch in x):
            raise LengthMismatch(f"not a bit string: {x!r}")
        arr = np.frombuffer(x.encode(), dtype=np.uint8).reshape(1, -1) - ord("0")
    else:
        arr = np.asarray(x, dtype=np.uint8)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
    if n is not None and arr.shape[1] != n:
        raise LengthMismatch(f"expected {n} bits, got {arr.shape[1]}")
    return arr.astype(np.uint8, copy=False)


def bits_to_str(row: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in row)


def all_bitstrings(n: int) -> np.ndarray:
    """Every n-bit string, row ``i`` being the binary expansion of ``i``."""
    idx = np.arange(1 << n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.uint8)


def bits_to_index(bits: np.ndarray) -> np.ndarray:
    n = bits.shape[1]
    weights = (1 << np.arange(n - 1, -1, -1, dtype=np.int64))
    return bits.astype(np.int64) @ weights


def twice_weight(bits: np.ndarray) -> np.ndarray:
    """Doubled total azimuthal number of each row."""
    return bits.shape[1] - 2 * bits.sum(axis=1, dtype=np.int64)


# -- labels and amplitudes -------------------------------------------------

@dataclass(frozen=True, order=True)
class SchurLabel:
    path: SpinPath
    twice_m: int

    def __post_init__(self):
        tj = self.path.twice_j
        if abs(self.twice_m) > tj or (tj - self.twice_m) % 2:
            raise OutOfRange(f"2M={self.twice_m} not allowed for 2J={tj}")

    @classmethod
    def parse(cls, word: str, twice_m: int) -> "SchurLabel":
        return cls(validate_path(word), int(twice_m))

    @property
    def n(self) -> int:
        return self.path.n

    @property
    def twice_j(self) -> int:
        return self.path.twice_j

    def to_json(self) -> dict:
        return {"path": self.path.word, "twice_m": self.twice_m}

    @classmethod
    def from_json(cls, obj: dict) -> "SchurLabel":
        return cls.parse(obj["path"], obj["twice_m"])


def amplitude(x, label: SchurLabel) -> float:
    """``<x | J, M>`` as a product of Clebsch-Gordan coefficients.

    The squared coefficients are multiplied as exact fractions and a single
    square root is taken at the end.
    """
    bits = to_bits(x)
    if bits.shape != (1, label.n):
        raise LengthMismatch(f"expected {label.n} bits, got {bits.shape[1]}")
    spins = [1 - 2 * int(b) for b in bits[0]]
    if sum(spins) != label.twice_m:
        return 0.0
    tjs = label.path.twice_js()
    sq = Fraction(1)
    sign = 1
    twice_m = spins[0]
    for k in range(1, label.n):
        q = CGQuery(tjs[k - 1], twice_m, spins[k], label.path.word[k - 1] == "1")
        try:
            sq *= cg_half_squared(q)
        except OutOfRange:
            return 0.0
        if sq == 0:
            return 0.0
        sign *= cg_sign(q)
        twice_m += spins[k]
    return sign * math.sqrt(sq)


def cascade_amplitudes(path: SpinPath, bits: np.ndarray) -> np.ndarray:
    """Vectorised ``<x | path, M(x)>`` where ``M(x)`` is fixed by the weight of ``x``.

    Rows whose running azimuthal number leaves the allowed range get 0.
    """
    n = path.n
    if bits.shape[1] != n:
        raise LengthMismatch(f"expected {n} bits, got {bits.shape[1]}")
    spins = 1 - 2 * bits.astype(np.int64)
    running = np.cumsum(spins, axis=1)
    tjs = path.twice_js()
    amp = np.ones(bits.shape[0])
    for k in range(1, n):
        tj = tjs[k - 1]
        s = spins[:, k]
        if path.word[k - 1] == "1":
            radicand = tj + s * running[:, k] + 1
            amp *= np.sqrt(np.clip(radicand, 0, None) / (2.0 * (tj + 1)))
        else:
            radicand = tj - s * running[:, k] + 1
            amp *= np.where(s == 1, -1.0, 1.0) * np.sqrt(
                np.clip(radicand, 0, None) / (2.0 * (tj + 1))
            )
    return amp


def label_amplitudes(label: SchurLabel, bits: np.ndarray) -> np.ndarray:
    amp = cascade_amplitudes(label.path, bits)
    return np.where(twice_weight(bits) == label.twice_m, amp, 0.0)


def split_counts(
    path: SpinPath,
    start_twice_m: np.ndarray,
    counts: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Histogram sampling from ``|<x|path, M_g>|^2`` for several groups ``g`` at once.

    Walks the coupling cascade backwards from qubit n to qubit 2; at each
    step the counts of every group are split binomially between the two
    values of the emitted qubit, with the squared Clebsch-Gordan
    coefficients as probabilities.  Returns ``(origin, bits, counts)`` where
    ``origin`` indexes the input group, rows sorted by origin.
    """
    n = path.n
    tm = np.asarray(start_twice_m, dtype=np.int64).copy()
    cnt = np.asarray(counts, dtype=np.int64).copy()
    if tm.shape != cnt.shape:
        raise LengthMismatch("start_twice_m and counts must have the same shape")
    tj_end = path.twice_j
    if np.any(np.abs(tm) > tj_end) or np.any((tj_end - tm) % 2):
        raise OutOfRange(f"azimuthal value outside 2J={tj_end}")
    origin = np.arange(tm.shape[0])
    keep = cnt > 0
    origin, tm, cnt = origin[keep], tm[keep], cnt[keep]
    bits = np.zeros((origin.shape[0], n), dtype=np.uint8)
    tjs = path.twice_js()
    for k in range(n - 1, 0, -1):
        tj = tjs[k - 1]
        if path.word[k - 1] == "1":
            p_up = (tj + tm + 1) / (2.0 * (tj + 1))
        else:
            p_up = (tj - tm + 1) / (2.0 * (tj + 1))
        n_up = rng.binomial(cnt, np.clip(p_up, 0.0, 1.0))
        n_down = cnt - n_up
        up_rows = n_up > 0
        down_rows = n_down > 0
        bits_up = bits[up_rows]
        bits_down = bits[down_rows].copy()
        bits_down[:, k] = 1
        origin = np.concatenate([origin[up_rows], origin[down_rows]])
        tm = np.concatenate([tm[up_rows] - 1, tm[down_rows] + 1])
        cnt = np.concatenate([n_up[up_rows], n_down[down_rows]])
        bits = np.concatenate([bits_up, bits_down])
    assert np.all(np.abs(tm) == 1)
    bits[:, 0] = (tm == -1)
    order = np.argsort(origin, kind="stable")
    return origin[order], bits[order], cnt[order]


# -- computationally tractable states --------------------------------------

class CTState:
    """A state with efficiently computable amplitudes and an exact sampler.

    Subclasses implement :meth:`amplitudes` and :meth:`sample_counts`.
    """

    n: int

    def amplitudes(self, bits: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample_counts(
        self, counts: np.ndarray, rng: np.random.Generator
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        raise NotImplementedError

    def amplitude(self, x) -> float:
        return float(self.amplitudes(to_bits(x, self.n))[0])

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """One bit string (``size=None``) or a ``(size, n)`` array of independent draws."""
        k = 1 if size is None else size
        _, bits, _ = self.sample_counts(np.ones(k, dtype=np.int64), rng)
        return bits_to_str(bits[0]) if size is None else bits


class SchurState(CTState):
    def __init__(self, label: SchurLabel):
        self.label = label
        self.n = label.n

    def amplitudes(self, bits: np.ndarray) -> np.ndarray:
        return label_amplitudes(self.label, to_bits(bits, self.n))

    def amplitude(self, x) -> float:
        return amplitude(x, self.label)

    def sample_counts(self, counts, rng):
        counts = np.asarray(counts, dtype=np.int64)
        start = np.full(counts.shape, self.label.twice_m, dtype=np.int64)
        return split_counts(self.label.path, start, counts, rng)

    def __repr__(self) -> str:
        return f"SchurState({self.label.path.word!r}, twice_m={self.label.twice_m})"


def sample_basis_state(label: SchurLabel, rng: np.random.Generator) -> str:
    return SchurState(label).sample(rng)


def sample_basis_states(label: SchurLabel, rng: np.random.Generator, size: int) -> np.ndarray:
    return SchurState(label).sample(rng, size)


# -- dense oracle ----------------------------------------------------------

@dataclass(frozen=True)
class DenseState:
    n: int
    amplitudes: np.ndarray

    def norm_sq(self) -> float:
        return float(self.amplitudes @ self.amplitudes)

    def to_json(self) -> dict:
        return {"n": self.n, "amplitudes": [float(a) for a in self.amplitudes]}


def all_labels(n: int, twice_j: int | None = None) -> list[SchurLabel]:
    """Labels ordered by path word, then ascending azimuthal number."""
    out = []
    for path in enumerate_paths(n, twice_j):
        for tm in range(-path.twice_j, path.twice_j + 1, 2):
            out.append(SchurLabel(path, tm))
    return out


def dense_schur_vector(label: SchurLabel) -> DenseState:
    check_dense(label.n)
    return DenseState(label.n, label_amplitudes(label, all_bitstrings(label.n)))


def schur_basis(
    n: int, twice_j: int | None = None, twice_m: int | None = None
) -> tuple[list[SchurLabel], np.ndarray]:
    """Dense basis vectors as the columns of a ``(2**n, len(labels))`` matrix."""
    check_dense(n)
    labels = [
        lab for lab in all_labels(n, twice_j) if twice_m is None or lab.twice_m == twice_m
    ]
    xs = all_bitstrings(n)
    weight = twice_weight(xs)
    cache: dict[str, np.ndarray] = {}
    mat = np.zeros((1 << n, len(labels)))
    for col, lab in enumerate(labels):
        amps = cache.get(lab.path.word)
        if amps is None:
            amps = cache[lab.path.word] = cascade_amplitudes(lab.path, xs)
        mat[:, col] = np.where(weight == lab.twice_m, amps, 0.0)
    return labels, mat


def dense_vector(state: CTState) -> np.ndarray:
    check_dense(state.n)
    return state.amplitudes(all_bitstrings(state.n))


def exact_distribution(state: CTState) -> dict[SchurLabel, float]:
    """``|<J, M | state>|^2`` for every label on ``state.n`` qubits."""
    n = state.n
    vec = dense_vector(state)
    xs = all_bitstrings(n)
    m_index = (twice_weight(xs) + n) // 2
    out: dict[SchurLabel, float] = {}
    for path in enumerate_paths(n):
        amps = cascade_amplitudes(path, xs)
        overlaps = np.bincount(m_index, weights=amps * vec, minlength=n + 1)
        for tm in range(-path.twice_j, path.twice_j + 1, 2):
            out[SchurLabel(path, tm)] = float(overlaps[(tm + n) // 2] ** 2)
    return out


def exact_output_distribution(circuit, label: SchurLabel) -> dict[SchurLabel, float]:
    """Output law of ``W |J, M> |0^k>`` in the coupled basis of all wires."""
    from .circuits import PreparedState

    return exact_distribution(PreparedState(circuit, label))


def path_marginals(dist: dict[SchurLabel, float]) -> dict[SpinPath, float]:
    """Sum an output law over azimuthal numbers."""
    out: dict[SpinPath, float] = {}
    for lab, p in dist.items():
        out[lab.path] = out.get(lab.path, 0.0) + p
    return out


def prefix_marginal(dist: dict[SchurLabel, float], prefix: SpinPath) -> float:
    return sum(p for lab, p in dist.items() if prefix.is_prefix_of(lab.path))


# -- dense spin operators --------------------------------------------------

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _single(n: int, qubit: int, op: np.ndarray) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for q in range(n):
        out = np.kron(out, op if q == qubit else np.eye(2))
    return out


def azimuthal_matrix(n: int, qubits: Iterable[int] | None = None) -> np.ndarray:
    """``Z_A = 1/2 sum_{k in A} Z_k`` (0-indexed qubits, default all)."""
    check_dense(n)
    qubits = range(n) if qubits is None else list(qubits)
    return 0.5 * sum(_single(n, q, _PAULI["z"]) for q in qubits).real


def total_spin_matrix(n: int, qubits: Iterable[int] | None = None) -> np.ndarray:
    """``S_A^2`` for the qubit subset ``A`` (0-indexed, default all)."""
    check_dense(n)
    qubits = range(n) if qubits is None else list(qubits)
    total = np.zeros((1 << n, 1 << n), dtype=complex)
    for axis in "xyz":
        s = 0.5 * sum(_single(n, q, _PAULI[axis]) for q in qubits)
        total += s @ s
    return total.real


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    """Dense ``U_pi`` with ``U_pi |x_1..x_n> = |x_pi(1)..x_pi(n)>`` (0-indexed one-line ``perm``)."""
    n = len(perm)
    check_dense(n)
    xs = all_bitstrings(n)
    out_idx = bits_to_index(xs[:, list(perm)])
    mat = np.zeros((1 << n, 1 << n))
    mat[out_idx, np.arange(1 << n)] = 1.0
    return mat
