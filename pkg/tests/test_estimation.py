import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schur_sampling.circuits import PermutationGate, PreparedState, ReversibleCircuit, random_reversible_circuit
from schur_sampling.errors import PrefixTooLong, SchurSamplingError
from schur_sampling.estimation import (
    EstimationParams,
    estimate_marginal,
    estimate_overlap,
    estimate_record,
)
from schur_sampling.schur_states import (
    SchurLabel,
    all_bitstrings,
    all_labels,
    dense_vector,
    exact_distribution,
    label_amplitudes,
    prefix_marginal,
)
from schur_sampling.spin_combinatorics import SpinPath, enumerate_paths


def _instance(seed, n=5):
    rng = np.random.default_rng(seed)
    labels = all_labels(n)
    lab = labels[int(rng.integers(len(labels)))]
    return PreparedState(PermutationGate(tuple(int(v) for v in rng.permutation(n))), lab)


def test_params_constants():
    p = EstimationParams(0.05, 0.1)
    assert p.batch_size == 3200
    assert p.n_batches == 54
    assert p.samples == 3200 * 54
    with pytest.raises(SchurSamplingError):
        EstimationParams(0.0, 0.1)
    with pytest.raises(SchurSamplingError):
        EstimationParams(0.1, 1.0)


@pytest.mark.parametrize("seed", range(6))
def test_ratio_statistic_moments(seed):
    """E[psi/phi] under |phi|^2 equals <phi|psi>, and the second moment is at most 1."""
    phi = PreparedState(ReversibleCircuit(5), SchurLabel.parse("1010", 1))
    psi = _instance(seed)
    a, b = dense_vector(phi), dense_vector(psi)
    nz = a != 0
    first = np.sum(a[nz] ** 2 * b[nz] / a[nz])
    second = np.sum(a[nz] ** 2 * (b[nz] / a[nz]) ** 2)
    assert first == pytest.approx(a @ b, abs=1e-12)
    assert second <= 1 + 1e-12


def test_fused_statistic_is_unbiased():
    """Enumerate (a, b, c) for the fused marginal statistic and compare with the projector."""
    phi = _instance(3, n=4)
    vec = dense_vector(phi)
    xs = all_bitstrings(4)
    dist = exact_distribution(phi)
    for prefix in [SpinPath("0"), SpinPath("1"), SpinPath("10"), SpinPath("11")]:
        k = prefix.n
        first = second = 0.0
        for row, ab in enumerate(xs):
            if vec[row] == 0:
                continue
            a = ab[:k]
            tm = k - 2 * int(a.sum())
            if abs(tm) > prefix.twice_j:
                continue
            psi = label_amplitudes(SchurLabel(prefix, tm), all_bitstrings(k))
            psi_a = psi[int("".join(map(str, a)), 2)]
            if psi_a == 0:
                continue
            for c_idx, c in enumerate(all_bitstrings(k)):
                if psi[c_idx] == 0:
                    continue
                cb = np.concatenate([c, ab[k:]])
                z = psi_a * vec[int("".join(map(str, cb)), 2)] / (psi[c_idx] * vec[row])
                w = vec[row] ** 2 * psi[c_idx] ** 2
                first += w * z
                second += w * z * z
        assert first == pytest.approx(prefix_marginal(dist, prefix), abs=1e-12)
        assert second <= 1 + 1e-12


@pytest.mark.parametrize("seed", range(4))
def test_overlap_estimate_close(seed):
    phi = PreparedState(ReversibleCircuit(5), SchurLabel.parse("1010", 1))
    psi = _instance(seed)
    est = estimate_overlap(phi, psi, EstimationParams(0.05, 0.05, seed))
    assert abs(est - dense_vector(phi) @ dense_vector(psi)) <= 0.05


@pytest.mark.parametrize("method", ["swaps", "fused"])
def test_marginals_match_oracle(method):
    rng = np.random.default_rng(11)
    phi = PreparedState(random_reversible_circuit(6, 15, rng), SchurLabel.parse("01101", 0))
    dist = exact_distribution(phi)
    for k in range(1, 6):
        for prefix in enumerate_paths(k):
            est = estimate_marginal(prefix, phi, EstimationParams(0.05, 0.05, k), method=method)
            assert abs(est - prefix_marginal(dist, prefix)) <= 0.05


def test_single_m_resolution():
    phi = _instance(5)
    dist = exact_distribution(phi)
    for lab, p in list(dist.items())[:8]:
        for method in ("swaps", "fused"):
            est = estimate_marginal(lab.path, phi, EstimationParams(0.03, 0.05, 1), method, lab.twice_m)
            assert abs(est - p) <= 0.03


def test_estimates_are_deterministic():
    phi = _instance(2)
    p = EstimationParams(0.1, 0.1, 99)
    assert estimate_marginal(SpinPath("1"), phi, p) == estimate_marginal(SpinPath("1"), phi, p)


def test_prefix_too_long():
    with pytest.raises(PrefixTooLong):
        estimate_marginal(SpinPath("101010"), _instance(0), EstimationParams(0.1, 0.1))


def test_record_counts_samples():
    rec = estimate_record(SpinPath("11"), EstimationParams(0.1, 0.1), 0.5, "swaps")
    assert rec["samples_used"] == 4 * EstimationParams(0.025, 0.025).samples
