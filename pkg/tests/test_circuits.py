import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schur_sampling.circuits import (
    CNOT,
    X,
    PermutationGate,
    PermutedState,
    PreparedState,
    ReversibleCircuit,
    Toffoli,
    apply,
    build_uswaps,
    invert_apply,
    load_circuit,
    prepared_amplitude,
    random_reversible_circuit,
)
from schur_sampling.errors import BadK, NotBijection
from schur_sampling.estimation import ProductState
from schur_sampling.schur_states import (
    SchurLabel,
    SchurState,
    all_bitstrings,
    dense_vector,
    exact_distribution,
    permutation_matrix,
    schur_basis,
)

perms = st.integers(1, 7).flatmap(lambda n: st.permutations(list(range(n))))


def test_toffoli_and_friends():
    c = ReversibleCircuit(3, (Toffoli(0, 1, 2),))
    assert apply(c, "110") == "111"
    assert apply(c, "100") == "100"
    c = ReversibleCircuit(3, (X(0), CNOT(0, 2)))
    assert apply(c, "000") == "101"
    assert invert_apply(c, "101") == "000"


def test_circuit_json_round_trip(rng):
    c = random_reversible_circuit(5, 30, rng)
    again = load_circuit(json.dumps(c.to_json()))
    xs = all_bitstrings(5)
    assert (again.apply_bits(xs) == c.apply_bits(xs)).all()
    assert (c.apply_inverse_bits(c.apply_bits(xs)) == xs).all()


def test_circuit_json_is_one_indexed():
    c = load_circuit({"wires": 3, "gates": [{"g": "ccx", "c": [1, 2], "t": 3}]})
    assert apply(c, "110") == "111"


@given(perms)
def test_permutation_round_trip(perm):
    g = PermutationGate(tuple(perm))
    xs = all_bitstrings(len(perm))
    assert (g.apply_inverse_bits(g.apply_bits(xs)) == xs).all()
    assert PermutationGate.from_one_line(g.one_line()) == g
    assert sum(g.cycle_type()) == len(perm)


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.permutations(list(range(n))), st.permutations(list(range(n))))))
def test_composition_law(pair):
    """Applying U_pi after U_sigma equals the gate of the composed permutation."""
    pi, sigma = (PermutationGate(tuple(p)) for p in pair)
    xs = all_bitstrings(len(pi.perm))
    composed = PermutationGate(tuple(sigma.perm[pi.perm[i]] for i in range(len(pi.perm))))
    assert (pi.apply_bits(sigma.apply_bits(xs)) == composed.apply_bits(xs)).all()
    mat = permutation_matrix(pi.perm) @ permutation_matrix(sigma.perm)
    assert np.array_equal(mat, permutation_matrix(composed.perm))


def test_cycle_notation():
    g = PermutationGate.parse("(1,2,3)(4,5)", 5)
    assert g.one_line() == [2, 3, 1, 5, 4]
    assert PermutationGate.parse("2,3,1,5,4") == g
    assert g.cycle_type() == (3, 2)
    # out bit i takes in bit pi(i)
    assert apply(g, "10000") == "00100"
    with pytest.raises(NotBijection):
        PermutationGate.from_one_line([1, 1, 2])


def test_uswaps_layout():
    assert build_uswaps(2, 1).one_line() == [2, 1, 3]
    assert build_uswaps(3, 2).one_line() == [3, 4, 1, 2, 5]
    for bad in (0, 4):
        with pytest.raises(BadK):
            build_uswaps(3, bad)


def _swap_overlap(gate, prefix_label, phi):
    a = ProductState(SchurState(prefix_label), phi)
    b = PermutedState(gate, a)
    return float(dense_vector(a) @ dense_vector(b))


def _projector_expectation(prefix_label, phi):
    k, n = prefix_label.n, phi.n
    labels, basis = schur_basis(k, prefix_label.twice_j, prefix_label.twice_m)
    col = basis[:, [lab.path for lab in labels].index(prefix_label.path)]
    proj = np.kron(np.outer(col, col), np.eye(2 ** (n - k)))
    v = dense_vector(phi)
    return float(v @ proj @ v)


@pytest.mark.parametrize("k_word,tm", [("", 1), ("0", 0), ("1", 2), ("10", 1)])
def test_uswaps_gives_projector_expectation(k_word, tm):
    phi = PreparedState(PermutationGate.parse("(1,3,4)(2,5)", 5), SchurLabel.parse("1010", 1))
    lab = SchurLabel.parse(k_word, tm)
    got = _swap_overlap(build_uswaps(phi.n, lab.n), lab, phi)
    assert got == pytest.approx(_projector_expectation(lab, phi), abs=1e-12)


def test_tail_swap_layout_breaks_identity():
    """Swapping the k-register with the last k qubits of phi measures the wrong projector."""
    phi = PreparedState(PermutationGate.parse("(1,3,4)(2,5)", 5), SchurLabel.parse("1010", 1))
    lab = SchurLabel.parse("0", 0)
    n, k = phi.n, lab.n
    perm = list(range(n + k))
    for i in range(k):
        perm[i], perm[n + i] = n + i, i
    got = _swap_overlap(PermutationGate(tuple(perm)), lab, phi)
    assert abs(got - _projector_expectation(lab, phi)) > 1e-3


def test_prepared_state_with_ancillas(rng):
    c = ReversibleCircuit(5, (CNOT(0, 3), Toffoli(1, 2, 4), X(3)))
    lab = SchurLabel.parse("01", 1)
    s = PreparedState(c, lab)
    vec = dense_vector(s)
    assert np.linalg.norm(vec) == pytest.approx(1.0)
    # x = W(y, 00) has amplitude <y|J,M>
    assert prepared_amplitude(s, apply(c, "01000")) == pytest.approx(1 / np.sqrt(2))
    assert sum(exact_distribution(s).values()) == pytest.approx(1.0)
    draws = [s.sample(rng) for _ in range(50)]
    assert all(abs(prepared_amplitude(s, x)) > 0 for x in draws)


def test_permuted_schur_state_stays_in_j_block():
    s = PreparedState(PermutationGate.parse("(1,2,3)(4,5)", 5), SchurLabel.parse("1010", 1))
    dist = exact_distribution(s)
    assert sum(dist.values()) == pytest.approx(1.0)
    for lab, p in dist.items():
        if p > 1e-12:
            assert lab.twice_j == 1 and lab.twice_m == 1
