import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import chisquare

from schur_sampling.errors import OutOfRange, TooLarge
from schur_sampling.schur_states import (
    SchurLabel,
    SchurState,
    all_bitstrings,
    all_labels,
    amplitude,
    azimuthal_matrix,
    bits_to_index,
    cascade_amplitudes,
    check_dense,
    exact_distribution,
    label_amplitudes,
    path_marginals,
    prefix_marginal,
    sample_basis_state,
    sample_basis_states,
    schur_basis,
    total_spin_matrix,
)
from schur_sampling.spin_combinatorics import SpinPath, enumerate_paths


def test_hand_computed_amplitudes():
    s = 1 / math.sqrt(2)
    assert amplitude("01", SchurLabel.parse("0", 0)) == pytest.approx(s)
    assert amplitude("10", SchurLabel.parse("0", 0)) == pytest.approx(-s)
    assert amplitude("01", SchurLabel.parse("1", 0)) == pytest.approx(s)
    assert amplitude("000", SchurLabel.parse("11", 3)) == 1.0
    # |1/2,1/2> from |1,1>|down> and |1,0>|up>
    lab = SchurLabel.parse("10", 1)
    assert amplitude("001", lab) == pytest.approx(math.sqrt(2 / 3))
    assert amplitude("010", lab) == pytest.approx(-1 / math.sqrt(6))
    assert amplitude("100", lab) == pytest.approx(-1 / math.sqrt(6))
    # singlet on qubits 1,2 times an up spin
    lab = SchurLabel.parse("01", 1)
    assert amplitude("010", lab) == pytest.approx(s)
    assert amplitude("100", lab) == pytest.approx(-s)
    assert amplitude("001", lab) == 0.0


def test_label_validation():
    with pytest.raises(OutOfRange):
        SchurLabel.parse("0101", 0)
    lab = SchurLabel.parse("0101", -1)
    assert SchurLabel.from_json(lab.to_json()) == lab


@pytest.mark.parametrize("n", range(1, 9))
def test_orthonormal_eigenbasis(n):
    labels, mat = schur_basis(n)
    assert mat.shape == (2**n, 2**n)
    assert np.abs(mat.T @ mat - np.eye(2**n)).max() <= 1e-10
    z = azimuthal_matrix(n)
    assert np.abs(z @ mat - mat * np.array([lab.twice_m / 2 for lab in labels])).max() <= 1e-9
    for k in range(2, n + 1):
        s2 = total_spin_matrix(n, range(k))
        js = np.array([lab.path.twice_js()[k - 1] / 2 for lab in labels])
        assert np.abs(s2 @ mat - mat * (js * (js + 1))).max() <= 1e-9


@pytest.mark.parametrize("n", range(2, 7))
def test_prefix_projector_identity(n):
    """sum_m |j,m><j,m| (x) I equals the sum of full-path projectors extending j."""
    labels, full = schur_basis(n)
    for k in range(1, n + 1):
        for prefix in enumerate_paths(k):
            plabels, pmat = schur_basis(k, prefix.twice_j)
            cols = [i for i, lab in enumerate(plabels) if lab.path == prefix]
            small = pmat[:, cols] @ pmat[:, cols].T
            lhs = np.kron(small, np.eye(2 ** (n - k)))
            keep = [i for i, lab in enumerate(labels) if prefix.is_prefix_of(lab.path)]
            rhs = full[:, keep] @ full[:, keep].T
            assert np.abs(lhs - rhs).max() <= 1e-10


@given(st.integers(1, 7).flatmap(lambda n: st.sampled_from(all_labels(n))))
def test_exact_and_vectorised_amplitudes_agree(label):
    xs = all_bitstrings(label.n)
    vec = label_amplitudes(label, xs)
    for row in range(0, len(xs), max(1, len(xs) // 8)):
        x = "".join(map(str, xs[row]))
        assert amplitude(x, label) == pytest.approx(vec[row], abs=1e-14)


def test_basis_state_distribution_is_a_delta():
    lab = SchurLabel.parse("1010", 1)
    dist = exact_distribution(SchurState(lab))
    assert dist[lab] == pytest.approx(1.0)
    assert sum(dist.values()) == pytest.approx(1.0)
    marg = path_marginals(dist)
    assert marg[lab.path] == pytest.approx(1.0)
    assert prefix_marginal(dist, SpinPath("10")) == pytest.approx(1.0)


@pytest.mark.parametrize("word,twice_m", [("1010", 1), ("0101", -1), ("1111", 3), ("110", 0)])
def test_sampler_law(word, twice_m, rng):
    lab = SchurLabel.parse(word, twice_m)
    draws = sample_basis_states(lab, rng, 40000)
    probs = label_amplitudes(lab, all_bitstrings(lab.n)) ** 2
    support = np.flatnonzero(probs > 1e-15)
    idx = bits_to_index(draws)
    assert set(idx) <= set(support)
    counts = np.bincount(idx, minlength=len(probs))[support]
    assert chisquare(counts, probs[support] * 40000).pvalue > 0.01


def test_histogram_sampler_conserves_counts(rng):
    state = SchurState(SchurLabel.parse("1101", 1))
    counts = np.array([5, 0, 1000, 1])
    origin, bits, cnt = state.sample_counts(counts, rng)
    assert np.bincount(origin, weights=cnt, minlength=4).tolist() == [5, 0, 1000, 1]
    assert list(origin) == sorted(origin)
    assert (twice_weight_of(bits) == 1).all()


def twice_weight_of(bits):
    return bits.shape[1] - 2 * bits.sum(axis=1)


def test_single_draw_returns_string(rng):
    x = sample_basis_state(SchurLabel.parse("0", 0), rng)
    assert x in ("01", "10")


def test_dense_guard(monkeypatch):
    monkeypatch.setenv("SCHUR_MAX_DENSE_N", "4")
    with pytest.raises(TooLarge):
        check_dense(5)
    check_dense(4)
