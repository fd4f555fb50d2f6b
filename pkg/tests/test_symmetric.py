import math

import numpy as np
import pytest

from symext.linalg import DimensionError, partial_trace
from symext.symmetric import (
    SizeCapError,
    lift,
    occupations,
    swap_copies,
    sym_dim,
    sym_isometry,
    symmetrizer,
    transposition_unitary,
)


def test_sym_dim_examples():
    assert sym_dim(2, 3) == 4
    assert sym_dim(3, 2) == 6
    assert sym_dim(4, 5) <= 6**3
    assert sym_dim(5, 0) == 1


@pytest.mark.parametrize("d", range(1, 7))
def test_sym_dim_counts_occupations(d):
    for k in range(0, 9):
        n = sym_dim(d, k)
        assert n == len(occupations(d, k)) == math.comb(k + d - 1, d - 1)
        assert n <= (k + 1) ** (d - 1)


def test_occupation_order_starts_at_ground_state():
    assert occupations(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert occupations(3, 1) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_isometry_small_cases():
    assert np.array_equal(sym_isometry(2, 1).isometry, np.eye(2))
    v = sym_isometry(2, 2).isometry
    s = 1 / np.sqrt(2)
    expected = np.array([[1, 0, 0], [0, s, 0], [0, s, 0], [0, 0, 1]])
    assert np.allclose(v, expected, atol=1e-15)


@pytest.mark.parametrize("d,k", [(2, 3), (3, 2), (3, 3), (4, 2)])
def test_isometry_invariants(d, k):
    sp = sym_isometry(d, k)
    v = sp.isometry
    assert sp.dim == sym_dim(d, k) and v.shape == (d**k, sp.dim)
    assert np.isrealobj(v)
    assert np.max(np.abs(v.T @ v - np.eye(sp.dim))) < 1e-12
    for i in range(k - 1):
        u = transposition_unitary(d, k, i, i + 1)
        assert np.max(np.abs(u @ v - v)) < 1e-12


@pytest.mark.parametrize("d,k", [(d, k) for d in (1, 2, 3) for k in (1, 2, 3)])
def test_projector_matches_symmetrizer(d, k):
    v = sym_isometry(d, k).isometry
    assert np.max(np.abs(v @ v.T - symmetrizer(d, k))) < 1e-12


def test_isometry_is_read_only():
    with pytest.raises(ValueError):
        sym_isometry(2, 2).isometry[0, 0] = 2.0


def test_size_cap():
    with pytest.raises(SizeCapError):
        sym_isometry(2, 21)
    with pytest.raises(SizeCapError):
        sym_isometry(3, 3, max_amplitudes=10)


def test_lift_ground_column_is_product():
    x = np.zeros((6, 6))
    x[0, 0] = 1.0
    out = lift(x, (2, 2), (2, 1))
    expected = np.zeros((8, 8))
    expected[0, 0] = 1.0
    assert np.allclose(out, expected)


def test_lift_preserves_trace(rng):
    g = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    x = g @ g.conj().T
    x /= np.trace(x)
    out = lift(x, (2, 3), (3, 1))
    assert abs(np.trace(out) - 1) < 1e-12
    assert np.min(np.linalg.eigvalsh(out)) > -1e-12


def test_lift_commutes_with_copy_swap(rng):
    x = np.eye(6) / 6
    out = lift(x, (2, 2), (2, 1))
    assert np.max(np.abs(swap_copies(out, (2, 2), (2, 1), 0, 0, 1) - out)) < 1e-14
    g = rng.standard_normal((18, 18))
    y = g @ g.T
    out = lift(y, (2, 3), (2, 2))
    for f in (0, 1):
        assert np.max(np.abs(swap_copies(out, (2, 3), (2, 2), f, 0, 1) - out)) < 1e-12


def test_lift_marginal_of_product_column():
    # |1><1| on S^2(C^2) is |01>+|10> normalized; one-copy marginal is I/2
    x = np.zeros((3, 3))
    x[1, 1] = 1.0
    out = lift(x, (2,), (2,))
    assert np.allclose(partial_trace(out, (2, 2), [0]), np.eye(2) / 2)


def test_lift_dimension_errors():
    with pytest.raises(DimensionError):
        lift(np.eye(5), (2, 2), (2, 1))
    with pytest.raises(DimensionError):
        lift(np.eye(6), (2, 2), (2,))
