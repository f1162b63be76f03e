"""Clebsch-Gordan coefficients for coupling spin j with one spin 1/2.

Condon-Shortley phases: every coefficient is real, and the one with the
highest azimuthal value of the spin-j system is positive.  With ``J`` and
``M`` the coupled values,

    <J=j+1/2, M | j, M-1/2; 1/2, +1/2> =  sqrt((j+M+1/2)/(2j+1))
    <J=j+1/2, M | j, M+1/2; 1/2, -1/2> =  sqrt((j-M+1/2)/(2j+1))
    <J=j-1/2, M | j, M-1/2; 1/2, +1/2> = -sqrt((j-M+1/2)/(2j+1))
    <J=j-1/2, M | j, M+1/2; 1/2, -1/2> =  sqrt((j+M+1/2)/(2j+1))

In doubled units every radicand is ``(tj +- tM + 1) / (2 (tj + 1))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import OutOfRange


@dataclass(frozen=True)
class CGQuery:
    """Couple ``|j, m>`` (doubled) with a qubit of doubled azimuthal ``spin_bit``."""

    twice_j: int
    twice_m: int
    spin_bit: int
    up: bool

    @property
    def twice_big_j(self) -> int:
        return self.twice_j + (1 if self.up else -1)

    @property
    def twice_big_m(self) -> int:
        return self.twice_m + self.spin_bit


def _check(q: CGQuery) -> None:
    if q.spin_bit not in (1, -1):
        raise OutOfRange(f"spin_bit must be +1 or -1, got {q.spin_bit}")
    if q.twice_j < 0 or abs(q.twice_m) > q.twice_j or (q.twice_j - q.twice_m) % 2:
        raise OutOfRange(f"invalid prior state 2j={q.twice_j}, 2m={q.twice_m}")
    if not q.up and q.twice_j < 1:
        raise OutOfRange("cannot couple down from j = 0")
    if abs(q.twice_big_m) > q.twice_big_j:
        raise OutOfRange(f"|M| > J for 2J={q.twice_big_j}, 2M={q.twice_big_m}")


def cg_half_squared(q: CGQuery) -> Fraction:
    """Exact square of :func:`cg_half`."""
    _check(q)
    sigma = q.spin_bit if q.up else -q.spin_bit
    return Fraction(q.twice_j + sigma * q.twice_big_m + 1, 2 * (q.twice_j + 1))


def cg_sign(q: CGQuery) -> int:
    return -1 if (not q.up and q.spin_bit == 1) else 1


def cg_half(q: CGQuery) -> float:
    """The coefficient ``<J, M | j, m; 1/2, spin_bit/2>`` for the query."""
    sq = cg_half_squared(q)
    return cg_sign(q) * math.sqrt(sq.numerator / sq.denominator)


def _cg_or_zero(twice_j: int, twice_m: int, spin_bit: int, up: bool) -> float:
    try:
        return cg_half(CGQuery(twice_j, twice_m, spin_bit, up))
    except OutOfRange:
        return 0.0


def cg_orthogonality_check(
    twice_j: int,
    twice_m2: int,
    twice_m2prime: int,
    twice_m: int | None = None,
    twice_mprime: int | None = None,
) -> float:
    """Largest |sum_{J,M} C^{JM}_{j m, m2} C^{JM}_{j m', m2'} - delta delta|.

    With ``twice_m`` / ``twice_mprime`` omitted the residual is maximised over
    every valid pair of prior azimuthal values.
    """
    ms = list(range(-twice_j, twice_j + 1, 2))
    m_values = ms if twice_m is None else [twice_m]
    mp_values = ms if twice_mprime is None else [twice_mprime]
    worst = 0.0
    for m in m_values:
        for mp in mp_values:
            total = 0.0
            for up in (True, False):
                if not up and twice_j == 0:
                    continue
                # M is fixed by (m, m2); the (m', m2') term only contributes at the same M
                if m + twice_m2 != mp + twice_m2prime:
                    continue
                total += _cg_or_zero(twice_j, m, twice_m2, up) * _cg_or_zero(
                    twice_j, mp, twice_m2prime, up
                )
            expected = 1.0 if (m == mp and twice_m2 == twice_m2prime) else 0.0
            worst = max(worst, abs(total - expected))
    return worst


def cg_block(twice_j: int, twice_big_m: int) -> list[list[float]]:
    """Rows = coupled ``J`` (up, down), columns = qubit spin (+1, -1) at fixed ``M``.

    Entries outside the allowed range are zero, so at the boundary the block
    degenerates to a single non-zero coefficient.
    """
    rows = []
    for up in (True, False):
        row = []
        for s in (1, -1):
            if not up and twice_j == 0:
                row.append(0.0)
            else:
                row.append(_cg_or_zero(twice_j, twice_big_m - s, s, up))
        rows.append(row)
    return rows
