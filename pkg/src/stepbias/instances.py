"""Randomized problem-pair generator for certification runs.

Instances are sampled so the standing assumptions hold by construction:
spectra with comfortable gaps around sigma_1, sigma_{n-1} and sigma_n
(keeping the log-gap denominators of the step windows away from 0, and
with them the level-set target alpha away from underflow), random
orthogonal bases composed from Givens rotations, and a model error
either zero or scaled to a small fraction of its allowed cap.
"""

import math
from dataclasses import dataclass

import numpy as np

from .quadratic import ProblemPair, QuadraticObjective
from .regimes import RegimeKind, alpha_one, step_window
from .spectral import Spectrum


@dataclass(frozen=True)
class CertifyInstance:
    pair: ProblemPair
    theta0: np.ndarray
    eta_s: float
    eta_b: float
    alpha: float
    t_max: int


def random_orthogonal(rng, n):
    """Orthogonal matrix built by composing random Givens rotations."""
    q = np.eye(n)
    for p in range(n - 1):
        for r in range(p + 1, n):
            angle = rng.uniform(0.0, 2.0 * math.pi)
            c, s = math.cos(angle), math.sin(angle)
            col_p = q[:, p].copy()
            col_r = q[:, r].copy()
            q[:, p] = c * col_p - s * col_r
            q[:, r] = s * col_p + c * col_r
    return q


def _spaced_descending(rng, count, low, high, min_gap=1e-3):
    while True:
        vals = np.sort(rng.uniform(low, high, size=count))[::-1]
        if count < 2 or np.min(vals[:-1] - vals[1:]) >= min_gap:
            return vals


def _train_eigenvalues(rng, n):
    sig_n = rng.uniform(0.10, 0.15)
    sig_n1 = rng.uniform(0.30, 0.40)
    sig_2 = rng.uniform(0.55, 0.70)
    middles = _spaced_descending(rng, n - 4, 0.42, 0.52)
    return np.concatenate([[1.0, sig_2], middles, [sig_n1, sig_n]])


def _test_spectrum(rng, n):
    kappa_R = rng.uniform(1.2, 3.0)
    bottom = 1.0 / kappa_R
    interior = _spaced_descending(rng, n - 2, bottom + 0.02, 0.98)
    values = np.concatenate([[1.0], interior, [bottom]])
    return Spectrum(values, random_orthogonal(rng, n))


def random_instance(rng, n=None, model_error_fraction=None):
    """Sample a CertifyInstance satisfying the certification assumptions.

    model_error_fraction positions R(theta_hat) at that fraction of its
    allowed cap (None draws 0 or 0.1 at random). alpha is set to half
    the smaller alpha_1 reading, which orders every step window.
    """
    rng = np.random.default_rng(rng)
    if n is None:
        n = int(rng.integers(4, 9))
    if n < 4:
        raise ValueError("generator needs n >= 4")
    train_vals = _train_eigenvalues(rng, n)
    train_basis = random_orthogonal(rng, n)
    train_spec = Spectrum(train_vals, train_basis)
    test_spec = _test_spectrum(rng, n)

    sig1, sign = train_vals[0], train_vals[-1]
    eta_s = 1.0 / (sig1 + sign)
    eta_b = 1.9 / sig1

    opt_train = rng.normal(size=n)
    while True:
        iota = rng.uniform(-1.0, 1.0, size=n)
        if abs(iota[0]) >= 1e-3 and abs(iota[-1]) >= 1e-3:
            break
    theta0 = opt_train + train_basis @ iota

    kappa_R = test_spec.top / test_spec.bottom
    kappa_F = sig1 / sign
    a_one = min(
        alpha_one(train_spec, iota, eta_s, eta_b, kappa_R),
        alpha_one(train_spec, iota, eta_s, eta_b, kappa_R, reading="split"),
    )
    alpha = 0.5 * a_one
    if alpha < 1e-280:
        # Extremely unbalanced draw; resample from the same stream.
        return random_instance(rng, n=n, model_error_fraction=model_error_fraction)

    fraction = model_error_fraction
    if fraction is None:
        fraction = 0.1 if rng.uniform() < 0.5 else 0.0
    if fraction > 0:
        cap = min(0.25, kappa_F / (72.0 * kappa_R))
        direction = rng.normal(size=n)
        quad = 0.5 * float(direction @ test_spec.apply(direction))
        scale = math.sqrt(fraction * cap * alpha / quad)
        opt_test = opt_train + scale * direction
    else:
        opt_test = opt_train.copy()

    pair = ProblemPair(
        train=QuadraticObjective(train_spec, opt_train),
        test=QuadraticObjective(test_spec, opt_test),
    )
    win_s = step_window(train_spec, iota, eta_s, alpha, kappa_R, RegimeKind.SMALL)
    win_b = step_window(train_spec, iota, eta_b, alpha, kappa_R, RegimeKind.BIG)
    t_max = int(10 + 4 * max(win_s.t3, win_b.t3))
    return CertifyInstance(
        pair=pair,
        theta0=theta0,
        eta_s=eta_s,
        eta_b=eta_b,
        alpha=alpha,
        t_max=t_max,
    )
