"""Symmetric eigendecomposition and spectrum utilities.

A Spectrum holds the ordered eigenvalues and orthonormal eigenbasis of a
symmetric operator restricted to an n-dimensional subspace. It is the
foundation every other module builds on: quadratic objectives store one,
learning-rate regimes are classified against one, and kernel problems
bridge to one through K/n.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import accel
from .errors import DegenerateSpectrum, NotPositiveDefinite, NotSymmetric

SYMMETRY_RTOL = 1e-12
JACOBI_RTOL = 1e-12
DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (descending) and matching orthonormal eigenvectors.

    eigenvalues[i] pairs with eigenvectors[:, i]. ``degenerate`` records
    whether two eigenvalues sit within 1e-10 relative of each other;
    simulation code tolerates that, certification code refuses it.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "eigenvalues", np.asarray(self.eigenvalues, dtype=float)
        )
        object.__setattr__(
            self, "eigenvectors", np.asarray(self.eigenvectors, dtype=float)
        )

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    @property
    def top(self):
        return float(self.eigenvalues[0])

    @property
    def bottom(self):
        return float(self.eigenvalues[-1])

    def matrix(self):
        """Reconstruct the operator Q diag(sigma) Q^T."""
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T

    def apply(self, vec):
        """Apply the operator to a vector without forming the matrix."""
        q = self.eigenvectors
        return q @ (self.eigenvalues * (q.T @ vec))


def diagonal_spectrum(values, degenerate=False):
    """Spectrum of diag(values) in the canonical basis (values descending)."""
    values = np.asarray(values, dtype=float)
    return Spectrum(values, np.eye(values.shape[0]), degenerate=degenerate)


def _check_degenerate(w):
    gaps = w[:-1] - w[1:]
    return bool(np.any(gaps <= DEGENERACY_RTOL * abs(w[0])))


def eig_sym(A, require_positive_definite=False):
    """Eigendecompose a symmetric matrix via cyclic Jacobi rotations.

    Eigenvalues come back sorted descending; each eigenvector is signed
    so its largest-magnitude entry is positive, keeping runs
    byte-reproducible. Emits a DegenerateSpectrum warning when two
    eigenvalues are within 1e-10 relative.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {A.shape}")
    scale = float(np.max(np.abs(A))) or 1.0
    if np.max(np.abs(A - A.T)) > SYMMETRY_RTOL * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-12 relative")
    A = 0.5 * (A + A.T)
    w, v, _ = accel.jacobi_eigh(A, JACOBI_RTOL)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    # Sign convention: largest-magnitude entry of each eigenvector positive.
    for i in range(v.shape[1]):
        j = int(np.argmax(np.abs(v[:, i])))
        if v[j, i] < 0:
            v[:, i] = -v[:, i]
    if require_positive_definite and w[-1] <= 0.0:
        raise NotPositiveDefinite(
            f"smallest eigenvalue {w[-1]:.3e} is not positive"
        )
    degenerate = _check_degenerate(w)
    if degenerate:
        warnings.warn(
            "spectrum has eigenvalues within 1e-10 relative of each other",
            DegenerateSpectrum,
        )
    return Spectrum(w, v, degenerate=degenerate)


def condition_number(s):
    """Ratio of the largest to the smallest eigenvalue."""
    return s.top / s.bottom
