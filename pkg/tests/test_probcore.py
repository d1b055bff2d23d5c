import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import h, hb, mi
from twc import channel as ch
from twc.probcore import (
    ProbabilityError,
    binary_entropy,
    check_dist,
    check_permutation,
    check_stochastic,
    column_permutation_between,
    entropy,
    functional_H,
    functional_Hbar,
    functional_Hperp,
    functional_I,
)

W_FWD = [[0.9, 0.1], [0.3, 0.7]]


def pmfs(n, min_value=0.0):
    weights = arrays(np.float64, n, elements=st.floats(min_value, 1.0))
    return weights.filter(lambda w: w.sum() > 1e-3).map(lambda w: w / w.sum())


def stochastic(n_in, n_out):
    rows = arrays(np.float64, (n_in, n_out), elements=st.floats(0.0, 1.0))
    return rows.filter(lambda w: np.all(w.sum(axis=1) > 1e-3)).map(lambda w: w / w.sum(axis=1, keepdims=True))


# -- entropy ----------------------------------------------------------------------

@pytest.mark.parametrize("d, expected", [([0.5, 0.5], 1.0), ([1, 0], 0.0), ([0.1, 0.9], hb(0.1))])
def test_entropy_values(d, expected):
    assert entropy(d) == pytest.approx(expected, abs=1e-12)


def test_binary_entropy_at_point_one():
    assert binary_entropy(0.1) == pytest.approx(0.4690, abs=1e-4)


@pytest.mark.parametrize("bad", [[0.5, 0.6], [-0.1, 1.1], [], [[0.5, 0.5]], [np.nan, 1.0]])
def test_entropy_rejects_invalid(bad):
    with pytest.raises(ProbabilityError):
        entropy(bad)


def test_tolerance_boundary():
    check_dist([0.5, 0.5 + 5e-10])
    with pytest.raises(ProbabilityError):
        check_dist([0.5, 0.5 + 5e-9])


@given(pmfs(5))
def test_entropy_matches_loop_and_bounds(d):
    val = entropy(d)
    assert val == pytest.approx(h(d), abs=1e-12)
    assert -1e-12 <= val <= math.log2(5) + 1e-12


# -- conditional entropy functionals ----------------------------------------------

def test_functional_H_deterministic_rows():
    cond = np.zeros((2, 3, 2))
    cond[..., 0] = 1.0
    assert functional_H(np.full((2, 3), 1 / 6), cond) == 0.0


def test_functional_H_mixture_of_rows():
    cond = np.array([[[0.9, 0.1]], [[0.3, 0.7]]])
    assert functional_H([[0.5], [0.5]], cond) == pytest.approx(0.5 * hb(0.1) + 0.5 * hb(0.3), abs=1e-12)
    assert functional_H([[0.5], [0.5]], cond) == pytest.approx(0.6751, abs=1e-4)


def test_functional_H_example1_cell(example1):
    cond = ch.output_marginal(example1, ch.Direction.FORWARD)
    assert functional_H([[1, 0], [0, 0]], cond) == pytest.approx(hb(0.1), abs=1e-12)


def test_functional_Hbar_mixture():
    cond = np.array([[[0.9, 0.1], [0.3, 0.7]], [[0.5, 0.5], [0.5, 0.5]]])
    assert functional_Hbar([1, 0], [[0.5, 0.5], [1, 0]], cond) == pytest.approx(hb(0.6), abs=1e-12)
    assert hb(0.6) == pytest.approx(0.9710, abs=1e-4)


@given(pmfs(3), st.data())
def test_functional_Hbar_point_mass_side_input_reduces_to_H(px, data):
    cond = data.draw(stochastic(6, 2)).reshape(3, 2, 2)
    z = data.draw(st.lists(st.integers(0, 1), min_size=3, max_size=3))
    pz_given_x = np.eye(2)[z]
    assert functional_Hbar(px, pz_given_x, cond) == pytest.approx(functional_H(px[:, None] * pz_given_x, cond), abs=1e-12)


def test_functional_Hbar_brute_force(example1):
    # backward output Y1 with X2 averaged out, conditioning on X1
    cond = ch.output_marginal(example1, ch.Direction.BACKWARD)
    px, pz = np.array([0.3, 0.7]), np.array([[0.2, 0.8], [0.6, 0.4]])
    expected = sum(px[a] * h([sum(pz[a, b] * cond[a, b, y] for b in range(2)) for y in range(2)]) for a in range(2))
    assert functional_Hbar(px, pz, cond) == pytest.approx(expected, abs=1e-12)


def test_functional_Hperp_example1(example1):
    cond = ch.output_marginal(example1, ch.Direction.BACKWARD)
    assert functional_Hperp([0.5, 0.5], [1, 0], cond) == pytest.approx(hb(0.13), abs=1e-12)


def test_functional_Hperp_uniform_rows():
    cond = np.full((2, 3, 4), 0.25)
    assert functional_Hperp([0.5, 0.5], [1 / 3] * 3, cond) == pytest.approx(2.0, abs=1e-12)


@given(pmfs(2), pmfs(3), st.data())
def test_functional_Hperp_is_Hbar_with_constant_rows(px, pz, data):
    cond = data.draw(stochastic(6, 3)).reshape(2, 3, 3)
    assert functional_Hperp(px, pz, cond) == pytest.approx(functional_Hbar(px, np.tile(pz, (2, 1)), cond), abs=1e-12)


# -- mutual information -----------------------------------------------------------

def test_functional_I_useless_channel():
    assert functional_I([0.2, 0.8], [[0.3, 0.7], [0.3, 0.7]]) == 0.0


def test_functional_I_identity():
    assert functional_I([0.5, 0.5], np.eye(2)) == pytest.approx(1.0, abs=1e-12)


def test_functional_I_example1_forward_matrix():
    expected = hb(0.6) - 0.5 * (hb(0.1) + hb(0.3))
    assert functional_I([0.5, 0.5], W_FWD) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.2958, abs=1e-4)


def test_functional_I_rejects_mismatched_input():
    with pytest.raises(ProbabilityError):
        functional_I([1 / 3] * 3, W_FWD)
    with pytest.raises(ProbabilityError):
        check_stochastic([[0.5, 0.4], [0.5, 0.5]])


def test_functional_I_zero_mass_rows_ignored():
    # a row the input never uses must not affect the value, even if it has disjoint support
    assert functional_I([1.0, 0.0], [[1.0, 0.0], [0.0, 1.0]]) == 0.0


@given(pmfs(3), stochastic(3, 4))
def test_functional_I_matches_loop(px, w):
    val = functional_I(px, w)
    assert val == pytest.approx(max(mi(px, w), 0.0), abs=1e-10)
    assert -1e-12 <= val <= math.log2(3) + 1e-9


@settings(max_examples=200)
@given(pmfs(3), pmfs(3), st.floats(0, 1), stochastic(3, 3))
def test_functional_I_concave_in_input(p, q, lam, w):
    mix = lam * p + (1 - lam) * q
    mix /= mix.sum()
    assert functional_I(mix, w) >= lam * functional_I(p, w) + (1 - lam) * functional_I(q, w) - 1e-9


# -- column permutations ----------------------------------------------------------

def test_column_permutation_identity():
    a = np.array(W_FWD)
    assert column_permutation_between(a, a).tolist() == [0, 1]


def test_column_permutation_swap():
    perm = column_permutation_between(W_FWD, [[0.1, 0.9], [0.7, 0.3]])
    assert perm.tolist() == [1, 0]


def test_column_permutation_absent():
    assert column_permutation_between(W_FWD, [[0.87, 0.13], [0.417, 0.583]]) is None


def test_column_permutation_repeated_columns_lexicographic():
    a = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0]])
    assert column_permutation_between(a, a).tolist() == [0, 1, 2]


def test_column_permutation_shape_mismatch():
    with pytest.raises(ProbabilityError):
        column_permutation_between(np.eye(2), np.eye(3))


@given(stochastic(3, 4), st.permutations(range(4)))
def test_column_permutation_recovers_shuffle(a, perm):
    b = a[:, perm]
    found = column_permutation_between(a, b)
    assert found is not None
    np.testing.assert_allclose(a[:, found], b, atol=1e-12)
    assert functional_I([0.2, 0.3, 0.5], a) == pytest.approx(functional_I([0.2, 0.3, 0.5], b), abs=1e-12)


def test_check_permutation():
    assert check_permutation([2, 0, 1], 3).tolist() == [2, 0, 1]
    with pytest.raises(ProbabilityError):
        check_permutation([0, 0, 1])
    with pytest.raises(ProbabilityError):
        check_permutation([0, 1], 3)
