import math
from fractions import Fraction

import numpy as np
import pytest

from schur_sampling.clebsch_gordan import (
    CGQuery,
    cg_block,
    cg_half,
    cg_half_squared,
    cg_orthogonality_check,
)
from schur_sampling.errors import OutOfRange
from schur_sampling.schur_states import azimuthal_matrix, total_spin_matrix


@pytest.mark.parametrize("twice_j", range(0, 21))
def test_orthogonality(twice_j):
    for s in (1, -1):
        for sp in (1, -1):
            assert cg_orthogonality_check(twice_j, s, sp) <= 1e-12


@pytest.mark.parametrize("twice_j", range(0, 21))
def test_blocks_are_orthogonal(twice_j):
    for tm in range(-twice_j - 1, twice_j + 2, 2):
        b = np.array(cg_block(twice_j, tm))
        if abs(tm) == twice_j + 1:
            # stretched state: only the up coupling survives
            assert abs(b[0]).max() == pytest.approx(1.0)
            assert not b[1].any()
        else:
            assert np.allclose(b @ b.T, np.eye(2), atol=1e-12)


def test_textbook_values():
    # <1/2 1/2; 1/2 -1/2 | 0 0> = 1/sqrt2, <1/2 -1/2; 1/2 1/2 | 0 0> = -1/sqrt2
    assert cg_half(CGQuery(1, 1, -1, up=False)) == pytest.approx(1 / math.sqrt(2))
    assert cg_half(CGQuery(1, -1, 1, up=False)) == pytest.approx(-1 / math.sqrt(2))
    # <1 1; 1/2 -1/2 | 1/2 1/2> = sqrt(2/3), <1 0; 1/2 1/2 | 1/2 1/2> = -sqrt(1/3)
    assert cg_half_squared(CGQuery(2, 2, -1, up=False)) == Fraction(2, 3)
    assert cg_half(CGQuery(2, 0, 1, up=False)) == pytest.approx(-math.sqrt(1 / 3))
    # <1 0; 1/2 1/2 | 3/2 1/2> = sqrt(2/3)
    assert cg_half(CGQuery(2, 0, 1, up=True)) == pytest.approx(math.sqrt(2 / 3))


def test_out_of_range_query():
    with pytest.raises(OutOfRange):
        cg_half(CGQuery(2, 4, 1, up=True))


def _qubit_ops():
    sx = np.array([[0, 1], [1, 0]]) / 2
    sy = np.array([[0, -1j], [1j, 0]]) / 2
    sz = np.array([[1, 0], [0, -1]]) / 2
    return sx, sy, sz


def _spin_ops(twice_j):
    """Spin-j matrices in the |j, m> basis, m descending."""
    j = twice_j / 2
    ms = [j - k for k in range(twice_j + 1)]
    jz = np.diag(ms)
    jp = np.zeros((twice_j + 1, twice_j + 1))
    for k in range(1, twice_j + 1):
        m = ms[k]
        jp[k - 1, k] = math.sqrt(j * (j + 1) - m * (m + 1))
    jx = (jp + jp.T) / 2
    jy = (jp - jp.T) / 2j
    return jx, jy, jz


@pytest.mark.parametrize("twice_j", range(0, 9))
def test_coupled_vectors_diagonalize_total_spin(twice_j):
    """Build |J, M> from CG coefficients and check S^2, Z eigen-equations on spin-j (x) spin-1/2."""
    dim = 2 * (twice_j + 1)
    jops = _spin_ops(twice_j)
    qops = _qubit_ops()
    total = [np.kron(a, np.eye(2)) + np.kron(np.eye(twice_j + 1), b) for a, b in zip(jops, qops)]
    s2 = sum(t @ t for t in total).real
    z = total[2].real
    for up in (True, False):
        if not up and twice_j == 0:
            continue
        tJ = twice_j + 1 if up else twice_j - 1
        for tM in range(-tJ, tJ + 1, 2):
            vec = np.zeros(dim)
            for s in (1, -1):
                tm = tM - s
                if abs(tm) > twice_j:
                    continue
                row = (twice_j - tm) // 2
                col = 0 if s == 1 else 1
                vec[2 * row + col] = cg_half(CGQuery(twice_j, tm, s, up))
            assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-12)
            J = tJ / 2
            assert np.abs(s2 @ vec - J * (J + 1) * vec).max() <= 1e-10
            assert np.abs(z @ vec - tM / 2 * vec).max() <= 1e-10


def test_dense_operators_small():
    z = azimuthal_matrix(2)
    assert np.allclose(np.diag(z), [1, 0, 0, -1])
    s2 = total_spin_matrix(2)
    assert np.allclose(np.sort(np.linalg.eigvalsh(s2)), [0, 2, 2, 2])
