"""Residual profiles r(sigma) = |1 - sigma g(sigma)| of spectral filters.

Used to contrast big-step gradient descent, whose residual over a
spectrum peaks at the largest eigenvalue, with admissible filters
(cut-off, Tikhonov, iterated Tikhonov) whose residuals decrease in
sigma.
"""

import enum
from dataclasses import dataclass

import numpy as np


class FilterKind(enum.Enum):
    CUT_OFF = "CutOff"
    GD = "GD"
    TIKHONOV = "Tikhonov"
    ITERATED_TIKHONOV = "IteratedTikhonov"


@dataclass(frozen=True)
class FilterSpec:
    kind: FilterKind
    lam: float | None = None
    eta: float | None = None
    t: int | None = None

    def __post_init__(self):
        kind = FilterKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in (FilterKind.CUT_OFF, FilterKind.TIKHONOV):
            if self.lam is None or self.lam <= 0:
                raise ValueError(f"{kind.value} filter needs lam > 0")
        else:
            if self.eta is None or self.eta <= 0:
                raise ValueError(f"{kind.value} filter needs eta > 0")
            if self.t is None or self.t < 0:
                raise ValueError(f"{kind.value} filter needs t >= 0")


def cut_off(lam):
    return FilterSpec(FilterKind.CUT_OFF, lam=lam)


def gd_filter(eta, t):
    return FilterSpec(FilterKind.GD, eta=eta, t=t)


def tikhonov(lam):
    return FilterSpec(FilterKind.TIKHONOV, lam=lam)


def iterated_tikhonov(eta, t):
    return FilterSpec(FilterKind.ITERATED_TIKHONOV, eta=eta, t=t)


def residual(f, sigma):
    """Unlearned fraction of the sigma-eigendirection after filtering.

    CutOff keeps components at or above lam (residual 0 at the boundary
    sigma = lam); GD leaves |1 - eta sigma|^t; Tikhonov leaves
    lam/(sigma + lam); iterated Tikhonov (1/(1 + eta sigma))^t.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if f.kind is FilterKind.CUT_OFF:
        return 1.0 if sigma < f.lam else 0.0
    if f.kind is FilterKind.GD:
        return abs(1.0 - f.eta * sigma) ** f.t
    if f.kind is FilterKind.TIKHONOV:
        return f.lam / (sigma + f.lam)
    return (1.0 / (1.0 + f.eta * sigma)) ** f.t


def residual_argmax(f, spectrum):
    """Index (0-based) of the eigenvalue with the largest residual.

    Ties break toward the smaller index, i.e. the larger eigenvalue.
    """
    values = np.array([residual(f, s) for s in spectrum.eigenvalues])
    return int(np.argmax(values))
