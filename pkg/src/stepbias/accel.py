"""Numerical hot loops with optional numba acceleration.

Every kernel below is written in a form that is valid both as plain
numpy code and under ``numba.njit``. At import time we pick the backend:
numba when it is installed and the environment variable
``STEPBIAS_NO_NUMBA`` is unset (or "0"), the pure-numpy fallback
otherwise. Both paths compute bit-identical results; ``bench/compare_backends.py``
times them against each other.
"""

import os

import numpy as np

_DISABLED = os.environ.get("STEPBIAS_NO_NUMBA", "0") not in ("", "0")

try:
    if _DISABLED:
        raise ImportError("numba disabled via STEPBIAS_NO_NUMBA")
    from numba import njit

    USING_NUMBA = True
except ImportError:
    USING_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


BACKEND = "numba" if USING_NUMBA else "numpy"

# Statuses shared with gd.run_to_level_set.
STATUS_HIT = 0
STATUS_MAX_STEPS = 1
STATUS_DIVERGED = 2


@njit(cache=True)
def jacobi_eigh(A, rel_tol):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps over all (p, q) pairs, rotating each nonzero off-diagonal
    entry to zero, until the off-diagonal Frobenius norm drops below
    ``rel_tol`` times the Frobenius norm of ``A``. Returns unsorted
    eigenvalues, the accumulated rotation matrix (eigenvectors in
    columns) and the number of sweeps performed.
    """
    n = A.shape[0]
    a = A.copy()
    v = np.eye(n)
    norm_a = np.sqrt(np.sum(A * A))
    tol = rel_tol * norm_a
    sweeps = 0
    for _ in range(60):
        off2 = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off2 += 2.0 * a[p, q] * a[p, q]
        if np.sqrt(off2) <= tol:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i]
    return w, v, sweeps


@njit(cache=True)
def level_set_run(sigma, mu0, eta, alpha, t_max, divergence_limit):
    """Iterate GD in eigen-coordinates until the excess loss reaches alpha.

    mu0 holds the initial eigen-coefficients of theta0 - optimum. The
    per-step update multiplies coefficient i by (1 - eta * sigma_i);
    the excess loss is 0.5 * sum(sigma * mu**2). Returns
    (steps, final mu, per-step loss trace, status).
    """
    mu = mu0.copy()
    factors = 1.0 - eta * sigma
    trace = np.empty(t_max)
    for t in range(1, t_max + 1):
        mu = mu * factors
        loss = 0.5 * np.sum(sigma * mu * mu)
        trace[t - 1] = loss
        if loss <= alpha:
            return t, mu, trace[:t], STATUS_HIT
        if loss > divergence_limit:
            return t, mu, trace[:t], STATUS_DIVERGED
    return t_max, mu, trace[:t_max], STATUS_MAX_STEPS


@njit(cache=True)
def pairwise_sq_dists(X):
    """All pairwise squared Euclidean distances between rows of X."""
    n = X.shape[0]
    d = X.shape[1]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(d):
                diff = X[i, k] - X[j, k]
                acc += diff * diff
            out[i, j] = acc
            out[j, i] = acc
    return out
