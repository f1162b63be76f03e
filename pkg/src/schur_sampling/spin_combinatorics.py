"""Branching-diagram paths, two-row tableaux and uniform label samplers.

Spins are always stored doubled (``twice_j = 2j``, ``twice_m = 2m``) so that
half-integers stay exact and parity rules are plain congruences.

A path on ``n`` qubits is its Yamanouchi word: ``n - 1`` characters, the
leftmost being the earliest coupling step, ``'1'`` for j -> j + 1/2 and
``'0'`` for j -> j - 1/2.  The starting spin j = 1/2 of the first qubit is
implicit, so the single-qubit path is the empty word.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidYamanouchi, NotStandard, ParityMismatch, TooLarge

MAX_ENUMERATE_N = 20


def _first_violation(word: str) -> int | None:
    twice_j = 1
    for i, ch in enumerate(word):
        twice_j += 1 if ch == "1" else -1
        if twice_j < 0:
            return i + 1
    return None


@dataclass(frozen=True, order=True)
class SpinPath:
    """A path in the branching diagram, stored as its Yamanouchi word."""

    word: str

    def __post_init__(self):
        if any(ch not in "01" for ch in self.word):
            raise InvalidYamanouchi(0, self.word)
        bad = _first_violation(self.word)
        if bad is not None:
            raise InvalidYamanouchi(bad, self.word)

    @property
    def n(self) -> int:
        return len(self.word) + 1

    @property
    def twice_j(self) -> int:
        ones = self.word.count("1")
        return 1 + ones - (len(self.word) - ones)

    def twice_js(self) -> list[int]:
        """Doubled running spins ``[2 j_[1], 2 j_[2], ..., 2 j_[n]]``."""
        out = [1]
        for ch in self.word:
            out.append(out[-1] + (1 if ch == "1" else -1))
        return out

    def prefix(self, k: int) -> "SpinPath":
        """The sub-path on the first ``k`` qubits."""
        if not 1 <= k <= self.n:
            raise ValueError(f"prefix length {k} outside 1..{self.n}")
        return SpinPath(self.word[: k - 1])

    def children(self) -> list["SpinPath"]:
        """One-step extensions allowed by the branching diagram."""
        out = []
        if self.twice_j > 0:
            out.append(SpinPath(self.word + "0"))
        out.append(SpinPath(self.word + "1"))
        return out

    def is_prefix_of(self, other: "SpinPath") -> bool:
        return other.word.startswith(self.word)

    def __str__(self) -> str:
        return self.word


def validate_path(bits: str | Sequence[int]) -> SpinPath:
    """Parse a Yamanouchi word given as a string or a sequence of 0/1."""
    if not isinstance(bits, str):
        bits = "".join(str(int(b)) for b in bits)
    return SpinPath(bits)


def endpoint_spin(path: SpinPath) -> int:
    """Doubled total spin ``2J`` at the end of ``path``."""
    return path.twice_j


def _paths_rec(remaining: int, word: str, twice_j: int) -> Iterator[str]:
    if remaining == 0:
        yield word
        return
    if twice_j > 0:
        yield from _paths_rec(remaining - 1, word + "0", twice_j - 1)
    yield from _paths_rec(remaining - 1, word + "1", twice_j + 1)


def enumerate_paths(n: int, twice_j: int | None = None) -> list[SpinPath]:
    """All paths on ``n`` qubits in lexicographic order, optionally only those ending at ``twice_j``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_ENUMERATE_N:
        raise TooLarge(f"enumerate_paths is guarded at n <= {MAX_ENUMERATE_N}, got {n}")
    words = _paths_rec(n - 1, "", 1)
    paths = [SpinPath(w) for w in words]
    if twice_j is not None:
        paths = [p for p in paths if p.twice_j == twice_j]
    return paths


def valid_twice_js(n: int) -> list[int]:
    """Doubled total spins reachable on ``n`` qubits, ascending."""
    return list(range(n % 2, n + 1, 2))


def dim_d(n: int, twice_j: int) -> int:
    """Number of paths on ``n`` qubits ending at total spin ``twice_j / 2``."""
    if twice_j < 0 or twice_j > n or (n - twice_j) % 2:
        raise ParityMismatch(f"2J={twice_j} is not a valid total spin for n={n}")
    k = (n - twice_j) // 2
    return math.comb(n, k) - (math.comb(n, k - 1) if k >= 1 else 0)


@dataclass(frozen=True)
class YoungShape2:
    row1: int
    row2: int

    def __post_init__(self):
        if not (self.row1 >= self.row2 >= 0):
            raise ValueError(f"not a two-row shape: ({self.row1}, {self.row2})")

    @classmethod
    def from_spin(cls, n: int, twice_j: int) -> "YoungShape2":
        if twice_j < 0 or twice_j > n or (n - twice_j) % 2:
            raise ParityMismatch(f"2J={twice_j} is not a valid total spin for n={n}")
        return cls((n + twice_j) // 2, (n - twice_j) // 2)

    @property
    def n(self) -> int:
        return self.row1 + self.row2

    @property
    def twice_j(self) -> int:
        return self.row1 - self.row2

    def count(self) -> int:
        """Number of standard tableaux of this shape."""
        return dim_d(self.n, self.twice_j)


@dataclass(frozen=True)
class StdTableau2:
    rows: tuple[tuple[int, ...], tuple[int, ...]]

    def __post_init__(self):
        top, bottom = self.rows
        n = len(top) + len(bottom)
        if len(bottom) > len(top):
            raise NotStandard("second row is longer than the first")
        if sorted(top + bottom) != list(range(1, n + 1)):
            raise NotStandard(f"entries are not a permutation of 1..{n}")
        for row in (top, bottom):
            if any(a >= b for a, b in zip(row, row[1:])):
                raise NotStandard("rows must increase")
        if any(bottom[c] <= top[c] for c in range(len(bottom))):
            raise NotStandard("columns must increase")

    @property
    def shape(self) -> YoungShape2:
        return YoungShape2(len(self.rows[0]), len(self.rows[1]))


def path_to_tableau(path: SpinPath) -> StdTableau2:
    top, bottom = [1], []
    for i, ch in enumerate(path.word):
        (top if ch == "1" else bottom).append(i + 2)
    return StdTableau2((tuple(top), tuple(bottom)))


def tableau_to_path(t: StdTableau2) -> SpinPath:
    if not isinstance(t, StdTableau2):
        t = StdTableau2(tuple(tuple(r) for r in t))  # validates
    top = set(t.rows[0])
    n = t.shape.n
    return SpinPath("".join("1" if v in top else "0" for v in range(2, n + 1)))


def gnw_sample_tableau(shape: YoungShape2, rng: np.random.Generator) -> StdTableau2:
    """Uniform standard tableau of ``shape`` by the Greene-Nijenhuis-Wilf hook walk."""
    lengths = [shape.row1, shape.row2]
    cells: dict[tuple[int, int], int] = {}
    for value in range(shape.n, 0, -1):
        size = lengths[0] + lengths[1]
        idx = int(rng.integers(size))
        r, c = (0, idx) if idx < lengths[0] else (1, idx - lengths[0])
        while True:
            arm = lengths[r] - c - 1
            leg = 1 if (r == 0 and lengths[1] > c) else 0
            if arm + leg == 0:
                break
            step = int(rng.integers(arm + leg))
            if step < arm:
                c = c + 1 + step
            else:
                r = 1
        cells[(r, c)] = value
        lengths[r] -= 1
    top = tuple(cells[(0, c)] for c in range(shape.row1))
    bottom = tuple(cells[(1, c)] for c in range(shape.row2))
    return StdTableau2((top, bottom))


def _uniform_below_pow2(rng: np.random.Generator, bits: int) -> int:
    nbytes = (bits + 7) // 8
    return int.from_bytes(rng.bytes(nbytes), "little") & ((1 << bits) - 1)


def sample_uniform_jm_rejection(n: int, rng: np.random.Generator) -> tuple[SpinPath, int]:
    """Uniform ``(path, twice_m)`` over all ``2**n`` sequentially coupled labels.

    Draw n - 1 random bits until they form a Yamanouchi word, then an integer
    in 1..n+1 that must not exceed 2J + 1.
    """
    cap = 64 * n * n
    for _ in range(cap):
        word = format(_uniform_below_pow2(rng, n - 1), f"0{n - 1}b") if n > 1 else ""
        if _first_violation(word) is not None:
            continue
        twice_j = SpinPath(word).twice_j
        m_draw = int(rng.integers(1, n + 2))
        if m_draw <= twice_j + 1:
            return SpinPath(word), 2 * m_draw - twice_j - 2
    raise RuntimeError(f"rejection sampler exceeded {cap} trials")


def sample_spin_by_dimension(n: int, rng: np.random.Generator, weight_m: bool = True) -> int:
    """Draw ``twice_j`` with probability proportional to ``(2J+1) d(J)`` (or ``d(J)``)."""
    spins = valid_twice_js(n)
    weights = [(tj + 1 if weight_m else 1) * dim_d(n, tj) for tj in spins]
    total = sum(weights)
    if weight_m:
        u = _uniform_below_pow2(rng, n)
    else:
        # rejection from the next power of two keeps the draw exact
        bits = total.bit_length()
        while True:
            u = _uniform_below_pow2(rng, bits)
            if u < total:
                break
    acc = 0
    for tj, w in zip(spins, weights):
        acc += w
        if u < acc:
            return tj
    raise AssertionError("unreachable")


def sample_uniform_jm_gnw(n: int, rng: np.random.Generator) -> tuple[SpinPath, int]:
    """Same law as :func:`sample_uniform_jm_rejection`, without rejections."""
    twice_j = sample_spin_by_dimension(n, rng)
    tableau = gnw_sample_tableau(YoungShape2.from_spin(n, twice_j), rng)
    path = tableau_to_path(tableau)
    twice_m = -twice_j + 2 * int(rng.integers(twice_j + 1))
    return path, twice_m


def sample_uniform_path(n: int, rng: np.random.Generator) -> SpinPath:
    """A path drawn uniformly from all paths on ``n`` qubits."""
    twice_j = sample_spin_by_dimension(n, rng, weight_m=False)
    return tableau_to_path(gnw_sample_tableau(YoungShape2.from_spin(n, twice_j), rng))
