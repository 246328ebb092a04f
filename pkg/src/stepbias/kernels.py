"""Kernel ridge instantiation: Gaussian kernels and dual-space GD.

A function theta in the RKHS restricted to the span of the training
features is carried by dual coefficients alpha, theta(x) =
sum_i alpha_i k(x_i, x), with theta = sqrt(n) S* alpha. The i-th
eigen-coefficient of theta on the eigenbasis of K/n is
sqrt(n sigma_i) <alpha, u_i>, which is how kernel problems talk to the
quadratic/GD machinery. Hilbert-norm functionals are always computed
through K, never through K^{-1}.
"""

import csv
import enum
from dataclasses import dataclass

import numpy as np

from . import accel
from .errors import (
    DimensionMismatch,
    EmptyTestSet,
    IoError,
    ParseError,
    SingularSystem,
)
from .quadratic import QuadraticObjective, from_kernel
from .spectral import Spectrum, eig_sym

CHOLESKY_PIVOT_RTOL = 1e-12
GAUSSIAN_C_K = 1.0


@dataclass(frozen=True)
class Dataset:
    """Sample matrix X (n x d) with binary labels in {-1, +1}."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=float))
        if self.points.ndim != 2 or self.points.shape[0] < 1:
            raise ValueError("points must be a nonempty n x d matrix")
        if self.labels.shape != (self.points.shape[0],):
            raise DimensionMismatch("labels must match the number of points")
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]


class GDMode(enum.Enum):
    TRAIN_LOSS = "TrainLoss"
    HILBERT_NORM = "HilbertNorm"


@dataclass(frozen=True)
class DualState:
    alpha: np.ndarray
    mode: GDMode

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=float))


def gaussian_kernel_matrix(X, s):
    """K_ij = exp(-||x_i - x_j||^2 / (2 s^2)); symmetric, unit diagonal."""
    if s <= 0:
        raise ValueError("kernel scale must be positive")
    X = np.ascontiguousarray(np.asarray(X, dtype=float))
    d2 = accel.pairwise_sq_dists(X)
    return np.exp(-d2 / (2.0 * s * s))


def gaussian_cross_kernel(X_train, X_query, s):
    """Kernel evaluations k(x_i, x) for training rows against query rows."""
    X_train = np.asarray(X_train, dtype=float)
    X_query = np.atleast_2d(np.asarray(X_query, dtype=float))
    d2 = (
        np.sum(X_train**2, axis=1)[:, None]
        + np.sum(X_query**2, axis=1)[None, :]
        - 2.0 * X_train @ X_query.T
    )
    return np.exp(-np.maximum(d2, 0.0) / (2.0 * s * s))


@dataclass(frozen=True)
class KernelProblem:
    dataset: Dataset
    scale: float
    lam: float
    K: np.ndarray
    spectrum_of_Kn: Spectrum
    C_K: float = GAUSSIAN_C_K

    @property
    def n(self):
        return self.dataset.n

    @property
    def y(self):
        return self.dataset.labels


def kernel_problem(dataset, scale, lam=0.0):
    """Assemble the kernel matrix and the spectrum of K/n once."""
    if lam < 0:
        raise ValueError("regularization must be nonnegative")
    K = gaussian_kernel_matrix(dataset.points, scale)
    spec = eig_sym(K / dataset.n)
    return KernelProblem(
        dataset=dataset, scale=scale, lam=lam, K=K, spectrum_of_Kn=spec
    )


def ridge_alpha(K, y, lam):
    """Solve (K + n lam I) alpha* = y via Cholesky.

    Raises SingularSystem when the factorization fails or a pivot drops
    below 1e-12 times the largest diagonal entry.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    n = K.shape[0]
    M = K + n * lam * np.eye(n)
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"Cholesky factorization failed: {exc}") from exc
    pivots = np.diag(L) ** 2
    if np.min(pivots) < CHOLESKY_PIVOT_RTOL * np.max(np.diag(M)):
        raise SingularSystem("pivot below 1e-12 of the largest diagonal entry")
    z = np.linalg.solve(L, y)
    return np.linalg.solve(L.T, z)


def to_eigen_coords(prob, alpha):
    """Eigen-coefficients sqrt(n sigma_i) <alpha, u_i> of theta = sqrt(n) S* alpha."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape[0] != prob.n:
        raise DimensionMismatch("alpha length does not match the training size")
    sig = np.maximum(prob.spectrum_of_Kn.eigenvalues, 0.0)
    u = prob.spectrum_of_Kn.eigenvectors
    return np.sqrt(prob.n * sig) * (u.T @ alpha)


def from_eigen_coords(prob, coeffs):
    """Dual increment whose eigen-coefficients are ``coeffs``.

    Inverse of to_eigen_coords on directions with sigma_i > 0; zero
    coefficients are required on (numerically) null directions.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    sig = np.maximum(prob.spectrum_of_Kn.eigenvalues, 0.0)
    scale = np.sqrt(prob.n * sig)
    safe = np.where(scale > 0, scale, 1.0)
    return prob.spectrum_of_Kn.eigenvectors @ (coeffs / safe)


def train_objective(prob):
    """The theta-space ridge objective of this problem (see from_kernel)."""
    return from_kernel(prob.K, prob.y, prob.lam)


def dual_objective(prob, mode):
    """Quadratic objective governing alpha-space GD in eigen-coordinates.

    The TrainLoss update attenuates eigen-coefficient i by
    1 - eta n sigma_i (sigma_i + lam) per step, the HilbertNorm update by
    1 - eta n (sigma_i + lam); so the dual flows are plain GD on
    quadratics with spectra n sigma (sigma + lam) and n (sigma + lam).
    """
    sig = np.maximum(prob.spectrum_of_Kn.eigenvalues, 0.0)
    if GDMode(mode) is GDMode.TRAIN_LOSS:
        values = prob.n * sig * (sig + prob.lam)
    else:
        values = prob.n * (sig + prob.lam)
    alpha_star = ridge_alpha(prob.K, prob.y, prob.lam)
    optimum = to_eigen_coords(prob, alpha_star)
    spec = Spectrum(
        values, np.eye(prob.n), degenerate=prob.spectrum_of_Kn.degenerate
    )
    return QuadraticObjective(spec, optimum)


def gd_alpha(prob, state, eta):
    """One dual-space GD update.

    TrainLoss: alpha - eta (K/n)((K + n lam) alpha - y).
    HilbertNorm: alpha - eta ((K + n lam) alpha - y).
    Both fix alpha* solving (K + n lam) alpha* = y; at lam = 0 they are
    the plain train-loss and Hilbert-norm recursions.
    """
    if eta <= 0:
        raise ValueError("step size must be positive")
    alpha = state.alpha
    if alpha.shape[0] != prob.n:
        raise DimensionMismatch("alpha length does not match the training size")
    residual = prob.K @ alpha + prob.n * prob.lam * alpha - prob.y
    if state.mode is GDMode.TRAIN_LOSS:
        update = (prob.K @ residual) / prob.n
    else:
        update = residual
    return DualState(alpha=alpha - eta * update, mode=state.mode)


def run_gd_alpha(prob, alpha0, eta, mode, steps):
    """Apply gd_alpha ``steps`` times from alpha0."""
    state = DualState(alpha=np.asarray(alpha0, dtype=float), mode=GDMode(mode))
    for _ in range(steps):
        state = gd_alpha(prob, state, eta)
    return state


def hilbert_distance2(prob, alpha_a, alpha_b):
    """Squared Hilbert distance (a-b)^T K (a-b) of the carried functions."""
    diff = np.asarray(alpha_a, dtype=float) - np.asarray(alpha_b, dtype=float)
    if diff.shape[0] != prob.n:
        raise DimensionMismatch("alpha length does not match the training size")
    return float(diff @ (prob.K @ diff))


def predict(prob, alpha, x):
    """Score theta(x) = sum_i alpha_i k(x_i, x)."""
    scores = predict_many(prob, alpha, np.atleast_2d(np.asarray(x, dtype=float)))
    return float(scores[0])


def predict_many(prob, alpha, X):
    """Scores for every row of X."""
    cross = gaussian_cross_kernel(prob.dataset.points, X, prob.scale)
    return cross.T @ np.asarray(alpha, dtype=float)


def binary_error(prob, alpha, test):
    """Misclassification rate on a dataset; zero scores count as errors."""
    if test.n == 0:
        raise EmptyTestSet("test dataset is empty")
    scores = predict_many(prob, alpha, test.points)
    return float(np.mean(scores * test.labels <= 0.0))


def margin_certificate(prob, alpha, alpha_ref, delta):
    """True iff alpha is within delta/(2 C_K) of alpha_ref in Hilbert norm.

    Under the strong-margin and reference-optimality assumptions of the
    synthetic task, a true verdict forces zero excess binary error.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("margin delta must lie in (0, 1)")
    dist = np.sqrt(hilbert_distance2(prob, alpha, alpha_ref))
    return bool(dist <= delta / (2.0 * prob.C_K))


def two_cluster_dataset(n, rng):
    """Two d=2 Gaussian clusters at (+-1, 0), std 0.2, labels by cluster."""
    rng = np.random.default_rng(rng)
    cluster = rng.integers(0, 2, size=n)
    centers = np.where(cluster[:, None] == 0, 1.0, -1.0) * np.array([1.0, 0.0])
    points = centers + 0.2 * rng.standard_normal((n, 2))
    labels = np.where(cluster == 0, 1.0, -1.0)
    return Dataset(points=points, labels=labels)


def load_dataset(path):
    """Read a dataset CSV with header x_1..x_d,label and labels in {-1, 1}."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError(f"{path}: empty file, header required") from None
            rows = list(reader)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    d = len(header) - 1
    if d < 1 or header[-1] != "label" or header[:-1] != [f"x_{i+1}" for i in range(d)]:
        raise ParseError(f"{path}: header must be x_1..x_d,label, got {header}")
    points = np.empty((len(rows), d))
    labels = np.empty(len(rows))
    for i, row in enumerate(rows):
        if len(row) != d + 1:
            raise ParseError(f"{path}: row {i + 2} has {len(row)} fields, expected {d + 1}")
        try:
            points[i] = [float(v) for v in row[:-1]]
            labels[i] = float(row[-1])
        except ValueError as exc:
            raise ParseError(f"{path}: row {i + 2}: {exc}") from exc
    return Dataset(points=points, labels=labels)


def save_dataset(dataset, path):
    """Write a dataset in the load_dataset CSV schema."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([f"x_{i+1}" for i in range(dataset.d)] + ["label"])
            for row, label in zip(dataset.points, dataset.labels):
                writer.writerow([repr(float(v)) for v in row] + [int(label)])
    except OSError as exc:
        raise IoError(str(exc)) from exc
