"""Learning-rate regimes, epsilon ratios, step windows and the bound certificate.

This module holds everything quantitative about the small-rate /
big-rate dichotomy: the attenuation coefficient |1 - eta sigma|, the
regime partition at 2/(sigma_1+sigma_n) and 2/sigma_1, the technical
level-set ceiling alpha_1, the step windows (t1, t2, t3) inside which a
level-set run concentrates on its distinguished eigendirection, and the
final certificate comparing the test losses of the two regimes against
the 34 (kappa_R / kappa_F) bound.

Attenuation comparisons use magnitudes |1 - eta sigma_i| throughout:
for big rates the raw coefficient of sigma_2 can be negative and a
signed max would pick the wrong direction.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidRegime,
    LevelSetMismatch,
    RegimeMismatch,
    WrongRegime,
    ZeroDenominator,
    ZeroInitialization,
)
from .gd import StopStatus
from .quadratic import evaluate
from .spectral import condition_number

BOUNDARY_RTOL = 1e-12
UNDERFLOW_GUARD = 1e-300


class RegimeKind(enum.Enum):
    SMALL = "Small"
    BIG = "Big"
    DIVERGENT = "Divergent"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class RateRegime:
    kind: RegimeKind
    eta: float
    thresholds: tuple[float, float]


def attenuation(eta, sigma):
    """Per-step multiplier |1 - eta sigma| on an eigendirection."""
    if eta <= 0 or sigma <= 0:
        raise ValueError("eta and sigma must be positive")
    return abs(1.0 - eta * sigma)


def classify_rate(eta, spectrum):
    """Partition (0, inf) into Small / Big / Divergent rate regimes.

    Small: eta < 2/(sigma_1+sigma_n); Big: up to 2/sigma_1; Divergent
    beyond. Rates within 1e-12 relative of either threshold are
    Boundary.
    """
    if eta <= 0:
        raise ValueError("step size must be positive")
    low = 2.0 / (spectrum.top + spectrum.bottom)
    high = 2.0 / spectrum.top
    thresholds = (low, high)
    if abs(eta - low) <= BOUNDARY_RTOL * low or abs(eta - high) <= BOUNDARY_RTOL * high:
        kind = RegimeKind.BOUNDARY
    elif eta < low:
        kind = RegimeKind.SMALL
    elif eta < high:
        kind = RegimeKind.BIG
    else:
        kind = RegimeKind.DIVERGENT
    return RateRegime(kind=kind, eta=eta, thresholds=thresholds)


def _kind_of(regime):
    return regime.kind if isinstance(regime, RateRegime) else RegimeKind(regime)


def leading_attenuation(eta, spectrum, regime):
    """|1 - eta sigma| on the regime's distinguished direction."""
    kind = _kind_of(regime)
    if kind is RegimeKind.SMALL:
        return attenuation(eta, spectrum.bottom)
    if kind is RegimeKind.BIG:
        return attenuation(eta, spectrum.top)
    raise WrongRegime(f"no distinguished direction for {kind.value} regime")


def second_attenuation(eta, spectrum, regime):
    """Second-biggest attenuation coefficient for a Small or Big rate.

    Small: |1 - eta sigma_{n-1}|. Big: max(|1 - eta sigma_2|,
    |1 - eta sigma_n|). Strictly below the leading attenuation in both
    valid regimes.
    """
    kind = _kind_of(regime)
    if spectrum.n < 2:
        raise WrongRegime("second attenuation needs at least two eigenvalues")
    sig = spectrum.eigenvalues
    if kind is RegimeKind.SMALL:
        return attenuation(eta, sig[-2])
    if kind is RegimeKind.BIG:
        return max(attenuation(eta, sig[1]), attenuation(eta, sig[-1]))
    raise WrongRegime(f"second attenuation undefined for {kind.value} regime")


def epsilon_ratio(run, regime):
    """Squared mass ratio off the distinguished direction.

    Big: sum_{i>1} mu_i^2 / mu_1^2. Small: sum_{i<n} mu_i^2 / mu_n^2.
    """
    kind = _kind_of(regime)
    mu = np.asarray(run.mu, dtype=float)
    if kind is RegimeKind.BIG:
        lead = mu[0]
        rest = mu[1:]
    elif kind is RegimeKind.SMALL:
        lead = mu[-1]
        rest = mu[:-1]
    else:
        raise WrongRegime(f"epsilon ratio undefined for {kind.value} regime")
    if abs(lead) < UNDERFLOW_GUARD:
        raise ZeroDenominator(
            "distinguished coefficient underflowed below 1e-300"
        )
    return float(np.sum((rest / lead) ** 2))


def _validate_rates(spectrum, eta_s, eta_b):
    rs = classify_rate(eta_s, spectrum)
    rb = classify_rate(eta_b, spectrum)
    if rs.kind is not RegimeKind.SMALL:
        raise InvalidRegime(f"eta_s={eta_s} is {rs.kind.value}, expected Small")
    if rb.kind is not RegimeKind.BIG:
        raise InvalidRegime(f"eta_b={eta_b} is {rb.kind.value}, expected Big")
    return rs, rb


def _boundary_iota(iota):
    i1, inn = float(iota[0]), float(iota[-1])
    if abs(i1) < UNDERFLOW_GUARD or abs(inn) < UNDERFLOW_GUARD:
        raise ZeroInitialization(
            "initialization has a zero coefficient on sigma_1 or sigma_n"
        )
    return i1, inn


def alpha_one(spectrum, iota, eta_s, eta_b, kappa_R, reading="displayed"):
    """Level-set ceiling alpha_1 under which the step windows are ordered.

    The displayed reading evaluates the single formula with the combined
    numerator; the split reading takes the minimum of its two per-regime
    specializations. Certificates record both.
    """
    _validate_rates(spectrum, eta_s, eta_b)
    iota = np.asarray(iota, dtype=float)
    i1, inn = _boundary_iota(iota)
    sig = spectrum.eigenvalues
    n = spectrum.n
    kappa_F = condition_number(spectrum)
    norm_sq = float(np.sum(iota * iota))
    a_lead_s = leading_attenuation(eta_s, spectrum, RegimeKind.SMALL)
    a_second_s = second_attenuation(eta_s, spectrum, RegimeKind.SMALL)
    a1 = leading_attenuation(eta_b, spectrum, RegimeKind.BIG)
    ab_bar = second_attenuation(eta_b, spectrum, RegimeKind.BIG)
    den_small = math.log(a_lead_s / a_second_s)
    den_big = math.log(a1 / ab_bar)
    small_tail = 1.0 / (1.0 - eta_s * sig[-1])
    big_tail = 1.0 / (eta_b * sig[0] - 1.0)
    if reading == "displayed":
        num = math.log(
            norm_sq
            * max(16 * n * kappa_R, 4 * kappa_F)
            * max(1.0 / i1**2, 1.0 / inn**2)
            + small_tail
            + big_tail
        )
        return 0.5 * sig[-1] * inn**2 * math.exp(-num / min(den_small, den_big))
    if reading == "split":
        num_big = math.log(norm_sq / i1**2 * 4 * n * kappa_R + big_tail)
        num_small = math.log(
            norm_sq / inn**2 * max(16 * n * kappa_R, 4 * kappa_F) + small_tail
        )
        return min(
            0.5 * sig[0] * i1**2 * math.exp(-num_big / den_big),
            0.5 * sig[-1] * inn**2 * math.exp(-num_small / den_small),
        )
    raise ValueError(f"unknown reading {reading!r}")


@dataclass(frozen=True)
class StepWindow:
    """Real-valued step thresholds for a level-set run.

    t >= t1 forces the epsilon bound; the level-set condition forces
    t2 < t < t3. feasible requires t2 > t1; window_empty flags the case
    where (t2, t3) contains no integer.
    """

    t1: float
    t2: float
    t3: float

    @property
    def feasible(self):
        return self.t2 > self.t1

    @property
    def window_empty(self):
        return math.ceil(self.t2) > math.floor(self.t3)


def step_window(spectrum, iota, eta, alpha, kappa_R, regime):
    """Step thresholds (t1, t2, t3) for a Small or Big level-set run."""
    kind = _kind_of(regime)
    if kind not in (RegimeKind.SMALL, RegimeKind.BIG):
        raise InvalidRegime(f"no step window for {kind.value} regime")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    iota = np.asarray(iota, dtype=float)
    i1, inn = _boundary_iota(iota)
    sig = spectrum.eigenvalues
    n = spectrum.n
    kappa_F = condition_number(spectrum)
    norm_sq = float(np.sum(iota * iota))
    lead = leading_attenuation(eta, spectrum, kind)
    second = second_attenuation(eta, spectrum, kind)
    gap = math.log(lead / second)
    if kind is RegimeKind.BIG:
        t1 = 0.5 * math.log(4 * n * kappa_R * norm_sq / i1**2) / gap
        scale = sig[0] * i1**2
    else:
        t1 = (
            0.5
            * math.log(max(16 * n * kappa_R, 4 * kappa_F) * norm_sq / inn**2)
            / gap
        )
        scale = sig[-1] * inn**2
    decay = math.log(1.0 / lead)
    t2 = 0.5 * math.log(0.5 * scale / alpha) / decay
    t3 = 0.5 * math.log(1.25 * scale / alpha) / decay
    return StepWindow(t1=t1, t2=t2, t3=t3)


def complexity_bounds(spectrum, eta_s, eta_b):
    """Log-gap denominators driving the t1 lower bounds of both regimes.

    Returns (small, big) = (log((1-eta_s sigma_n)/(1-eta_s sigma_{n-1})),
    log(A_1 / A_bar_b)); as the relevant spectral gap closes either
    denominator tends to 0+ and the required step count diverges.
    """
    _validate_rates(spectrum, eta_s, eta_b)
    small = math.log(
        leading_attenuation(eta_s, spectrum, RegimeKind.SMALL)
        / second_attenuation(eta_s, spectrum, RegimeKind.SMALL)
    )
    big = math.log(
        leading_attenuation(eta_b, spectrum, RegimeKind.BIG)
        / second_attenuation(eta_b, spectrum, RegimeKind.BIG)
    )
    return small, big


@dataclass(frozen=True)
class AssumptionVerdict:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)


def check_assumptions(pair, theta0, eta_s, eta_b, alpha):
    """Evaluate the four standing assumptions on a problem instance.

    A1 distinct positive eigenvalues, A2 rate ordering, A3 nonzero
    initialization on the boundary directions, A4 the level-set target
    alpha below alpha_1 with small enough model error. Returns verdicts
    with the computed numbers; never raises on failure.
    """
    train = pair.train
    spec = train.spectrum
    verdicts = []

    def distinct(s):
        w = s.eigenvalues
        return bool(w[-1] > 0 and not s.degenerate and np.all(np.diff(w) < 0))

    a1 = distinct(spec) and distinct(pair.test.spectrum)
    verdicts.append(
        AssumptionVerdict(
            "A1_distinct_eigenvalues",
            a1,
            {
                "train_degenerate": spec.degenerate,
                "test_degenerate": pair.test.spectrum.degenerate,
            },
        )
    )

    rs = classify_rate(eta_s, spec)
    rb = classify_rate(eta_b, spec)
    a2 = rs.kind is RegimeKind.SMALL and rb.kind is RegimeKind.BIG
    verdicts.append(
        AssumptionVerdict(
            "A2_rate_ordering",
            a2,
            {
                "eta_s_kind": rs.kind.value,
                "eta_b_kind": rb.kind.value,
                "threshold_low": rs.thresholds[0],
                "threshold_high": rs.thresholds[1],
            },
        )
    )

    iota = spec.eigenvectors.T @ (np.asarray(theta0, dtype=float) - train.optimum)
    a3 = bool(
        abs(iota[0]) >= UNDERFLOW_GUARD and abs(iota[-1]) >= UNDERFLOW_GUARD
    )
    verdicts.append(
        AssumptionVerdict(
            "A3_nonzero_initialization",
            a3,
            {"iota_1": float(iota[0]), "iota_n": float(iota[-1])},
        )
    )

    kappa_R = condition_number(pair.test.spectrum)
    kappa_F = condition_number(spec)
    r_opt = evaluate(pair.test, train.optimum)
    ratio_cap = min(0.25, kappa_F / (72 * kappa_R))
    # alpha_1 is undefined without distinct eigenvalues, valid rates and
    # nonzero boundary coefficients.
    if a1 and a2 and a3:
        a_one = alpha_one(spec, iota, eta_s, eta_b, kappa_R)
        a4 = bool(alpha <= a_one and r_opt / alpha <= ratio_cap)
    else:
        a_one = math.nan
        a4 = False
    verdicts.append(
        AssumptionVerdict(
            "A4_level_set_target",
            a4,
            {
                "alpha": float(alpha),
                "alpha_1": float(a_one),
                "model_error": float(r_opt),
                "model_error_ratio_cap": float(ratio_cap),
            },
        )
    )
    return verdicts


@dataclass(frozen=True)
class Certificate:
    """Every evaluated quantity of the big-vs-small rate bound.

    bound_rhs is the specialized right-hand side 34 (kappa_R/kappa_F)
    R(theta_s); bound_general the 17 c_alpha (kappa_R/kappa_F) R(theta_s)
    form that does not need the model-error assumption. verdict_final is
    the measured specialized inequality (false with reason
    ModelErrorTooLarge when c_alpha is undefined).
    """

    alpha: float
    eta_s: float
    eta_b: float
    kappa_F: float
    kappa_R: float
    r_opt: float
    epsilon_b2: float
    epsilon_s2: float
    alpha_1: float
    alpha_1_split: float
    c_alpha: float
    r_small: float
    r_big: float
    bound_general: float
    bound_rhs: float
    window_small: StepWindow
    window_big: StepWindow
    t_small: int
    t_big: int
    verdicts: dict
    verdict_final: bool
    reason: str

    def to_record(self):
        """Flatten to a key-value record for CSV emission."""
        rec = {
            "alpha": self.alpha,
            "eta_s": self.eta_s,
            "eta_b": self.eta_b,
            "kappa_F": self.kappa_F,
            "kappa_R": self.kappa_R,
            "r_opt": self.r_opt,
            "epsilon_b2": self.epsilon_b2,
            "epsilon_s2": self.epsilon_s2,
            "alpha_1": self.alpha_1,
            "alpha_1_split": self.alpha_1_split,
            "c_alpha": self.c_alpha,
            "r_small": self.r_small,
            "r_big": self.r_big,
            "bound_general": self.bound_general,
            "bound_rhs": self.bound_rhs,
            "t_small": self.t_small,
            "t_big": self.t_big,
            "window_small_t1": self.window_small.t1,
            "window_small_t2": self.window_small.t2,
            "window_small_t3": self.window_small.t3,
            "window_big_t1": self.window_big.t1,
            "window_big_t2": self.window_big.t2,
            "window_big_t3": self.window_big.t3,
            "verdict_final": self.verdict_final,
            "reason": self.reason,
        }
        for name, value in self.verdicts.items():
            rec[f"verdict_{name}"] = value
        return rec


def _test_loss(pair, run):
    """Test loss of a run, evaluated from its error coordinates.

    At small level-set targets the error theta - theta_hat_* sits many
    orders of magnitude below theta itself, so evaluating the test loss
    from run.theta cancels catastrophically. Reassembling the error from
    mu (exact in relative terms) avoids the O(1) subtraction.
    """
    offset = pair.train.optimum - pair.test.optimum
    err = pair.train.spectrum.eigenvectors @ run.mu + offset
    return 0.5 * float(err @ pair.test.spectrum.apply(err))


def certify(pair, run_s, run_b, alpha):
    """Evaluate the big-rate benefit bound on two finished level-set runs.

    Both runs must have hit the same alpha level set of pair.train, one
    with a Small rate and one with a Big rate. The certificate stores
    the measured test losses, the epsilon ratios, the step windows, the
    intermediate per-regime loss bounds, and the final inequality
    R(theta_b) <= 34 (kappa_R/kappa_F) R(theta_s).
    """
    spec = pair.train.spectrum
    for run, want in ((run_s, RegimeKind.SMALL), (run_b, RegimeKind.BIG)):
        got = classify_rate(run.eta, spec).kind
        if got is not want:
            raise RegimeMismatch(
                f"run with eta={run.eta} is {got.value}, expected {want.value}"
            )
        if run.stop_status is not StopStatus.HIT_LEVEL_SET:
            raise LevelSetMismatch(
                f"run with eta={run.eta} stopped with {run.stop_status.value}"
            )
        if run.alpha is None or not math.isclose(run.alpha, alpha, rel_tol=1e-12):
            raise LevelSetMismatch(
                f"run targeted alpha={run.alpha}, certificate wants {alpha}"
            )
    if not np.allclose(run_s.iota, run_b.iota, rtol=1e-12, atol=0.0):
        raise LevelSetMismatch("runs started from different initializations")

    sig = spec.eigenvalues
    tspec = pair.test.spectrum
    kappa_F = condition_number(spec)
    kappa_R = condition_number(tspec)
    varsig1, varsign = tspec.top, tspec.bottom
    r_opt = evaluate(pair.test, pair.train.optimum)
    eps_b2 = epsilon_ratio(run_b, RegimeKind.BIG)
    eps_s2 = epsilon_ratio(run_s, RegimeKind.SMALL)
    r_big = _test_loss(pair, run_b)
    r_small = _test_loss(pair, run_s)
    iota = run_s.iota
    a_one = alpha_one(spec, iota, run_s.eta, run_b.eta, kappa_R)
    a_one_split = alpha_one(
        spec, iota, run_s.eta, run_b.eta, kappa_R, reading="split"
    )
    win_s = step_window(spec, iota, run_s.eta, alpha, kappa_R, RegimeKind.SMALL)
    win_b = step_window(spec, iota, run_b.eta, alpha, kappa_R, RegimeKind.BIG)

    c_alpha_den = 1.0 - math.sqrt(18.0 * (sig[-1] / varsign) * r_opt / alpha)
    if c_alpha_den > 0:
        c_alpha = (1.0 + 2.0 * (sig[0] / varsig1) * r_opt / alpha) / c_alpha_den
    else:
        c_alpha = math.inf
    ratio = kappa_R / kappa_F
    bound_general = 17.0 * c_alpha * ratio * r_small if math.isfinite(c_alpha) else math.inf
    bound_rhs = 34.0 * ratio * r_small

    n = spec.n
    mu_b1 = float(run_b.mu[0])
    mu_sn = float(run_s.mu[-1])
    lower_arg = 18.0 * r_opt * sig[-1] / (varsign * alpha)
    r_small_floor = (
        0.3 * alpha * (varsign / sig[-1]) * (1.0 - math.sqrt(lower_arg))
        if lower_arg <= 1.0
        else -math.inf
    )
    verdicts = {
        "epsilon_b_bound": bool(eps_b2 <= 1.0 / (4 * n * kappa_R)),
        "epsilon_s_bound": bool(
            eps_s2 <= min(1.0 / (16 * n * kappa_R), 1.0 / (4 * kappa_F))
        ),
        "mu_big_window": bool(
            0.4 * alpha <= 0.5 * sig[0] * mu_b1**2 <= alpha
        ),
        "mu_small_window": bool(
            0.4 * alpha <= 0.5 * sig[-1] * mu_sn**2 <= alpha
        ),
        "r_big_upper": bool(r_big <= 5.0 * alpha * varsig1 / sig[0] + 2.0 * r_opt),
        "r_small_lower": bool(r_small >= r_small_floor),
        "half_level_small": bool(run_s.half_level_ok),
        "half_level_big": bool(run_b.half_level_ok),
        "window_small_feasible": win_s.feasible and not win_s.window_empty,
        "window_big_feasible": win_b.feasible and not win_b.window_empty,
    }
    if not math.isfinite(c_alpha):
        verdict_final = False
        reason = "ModelErrorTooLarge"
    elif r_big <= bound_rhs:
        verdict_final = True
        reason = ""
    else:
        verdict_final = False
        reason = "BoundViolated"

    return Certificate(
        alpha=float(alpha),
        eta_s=float(run_s.eta),
        eta_b=float(run_b.eta),
        kappa_F=kappa_F,
        kappa_R=kappa_R,
        r_opt=float(r_opt),
        epsilon_b2=eps_b2,
        epsilon_s2=eps_s2,
        alpha_1=a_one,
        alpha_1_split=a_one_split,
        c_alpha=c_alpha,
        r_small=float(r_small),
        r_big=float(r_big),
        bound_general=bound_general,
        bound_rhs=bound_rhs,
        window_small=win_s,
        window_big=win_b,
        t_small=int(run_s.steps),
        t_big=int(run_b.steps),
        verdicts=verdicts,
        verdict_final=verdict_final,
        reason=reason,
    )
