"""Eigendecomposition against the LAPACK oracle plus contract checks."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stepbias.errors import DegenerateSpectrum, NotPositiveDefinite, NotSymmetric
from stepbias.spectral import Spectrum, condition_number, diagonal_spectrum, eig_sym


def random_symmetric(rng, n):
    A = rng.normal(size=(n, n))
    return 0.5 * (A + A.T)


def test_matches_lapack_eigenvalues():
    rng = np.random.default_rng(7)
    for n in (2, 3, 5, 10, 25):
        A = random_symmetric(rng, n)
        spec = eig_sym(A)
        oracle = np.sort(np.linalg.eigvalsh(A))[::-1]
        assert np.allclose(spec.eigenvalues, oracle, rtol=0, atol=1e-12 * n)


def test_eigenvectors_orthonormal_and_reconstruct():
    rng = np.random.default_rng(8)
    A = random_symmetric(rng, 12)
    spec = eig_sym(A)
    v = spec.eigenvectors
    assert np.allclose(v.T @ v, np.eye(12), atol=1e-12)
    assert np.allclose(spec.matrix(), A, atol=1e-12)
    x = rng.normal(size=12)
    assert np.allclose(spec.apply(x), A @ x, atol=1e-12)


def test_descending_order_and_sign_convention():
    rng = np.random.default_rng(9)
    spec = eig_sym(random_symmetric(rng, 9))
    assert np.all(np.diff(spec.eigenvalues) <= 0)
    for i in range(9):
        col = spec.eigenvectors[:, i]
        assert col[np.argmax(np.abs(col))] > 0


def test_deterministic_across_calls():
    rng = np.random.default_rng(10)
    A = random_symmetric(rng, 8)
    a = eig_sym(A)
    b = eig_sym(A)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_rejects_asymmetric_and_nonsquare():
    with pytest.raises(NotSymmetric):
        eig_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotSymmetric):
        eig_sym(np.zeros((2, 3)))


def test_positive_definite_gate():
    A = np.diag([1.0, -0.5])
    with pytest.raises(NotPositiveDefinite):
        eig_sym(A, require_positive_definite=True)
    spec = eig_sym(A)  # allowed without the flag
    assert spec.bottom == -0.5


def test_degenerate_spectrum_warns():
    with pytest.warns(DegenerateSpectrum):
        spec = eig_sym(np.eye(3))
    assert spec.degenerate


def test_distinct_spectrum_does_not_warn():
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error", DegenerateSpectrum)
        spec = eig_sym(np.diag([3.0, 2.0, 1.0]))
    assert not spec.degenerate


def test_diagonal_spectrum_and_condition_number():
    spec = diagonal_spectrum([4.0, 2.0, 1.0])
    assert spec.top == 4.0 and spec.bottom == 1.0
    assert condition_number(spec) == 4.0
    assert np.array_equal(spec.matrix(), np.diag([4.0, 2.0, 1.0]))


def test_spectrum_accessors():
    spec = Spectrum(np.array([2.0, 1.0]), np.eye(2))
    assert spec.n == 2


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=12), st.integers(min_value=0, max_value=10_000))
def test_property_reconstruction(n, seed):
    rng = np.random.default_rng(seed)
    A = random_symmetric(rng, n)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpectrum)
        spec = eig_sym(A)
    scale = max(np.max(np.abs(A)), 1.0)
    assert np.allclose(spec.matrix(), A, atol=1e-11 * scale * n)
