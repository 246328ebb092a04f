"""Experiment implementations behind the CLI.

Every experiment is a pure function of (config, seed): randomness flows
from the config seed through named streams (one per consumer), outputs
are CSV tables plus SVG figures, and the returned manifest lists each
written file with its content hash.
"""

import hashlib
import json
import warnings
import zlib
from pathlib import Path

import numpy as np

from . import gd, kernels, toy2d
from .config import TAU, canonical_config
from .errors import CertificationFailed, DegenerateSpectrum
from .filters import (
    cut_off,
    gd_filter,
    iterated_tikhonov,
    residual,
    tikhonov,
)
from .instances import random_instance
from .quadratic import from_kernel
from .regimes import attenuation, certify, check_assumptions
from .reporting import AxesSpec, Series, render_svg, write_csv
from .spectral import condition_number, eig_sym

T_MAX_SWEEP = 500_000


def stream(seed, name):
    """Independent RNG per consumer name; adding names never shifts others."""
    return np.random.default_rng([seed, zlib.crc32(name.encode("utf-8"))])


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class _Outputs:
    def __init__(self, out_dir):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files = []

    def csv(self, name, rows, schema):
        path = self.dir / name
        write_csv(rows, schema, path)
        self.files.append(path)
        return path

    def svg(self, name, series, axes):
        path = self.dir / name
        render_svg(series, axes, path)
        self.files.append(path)
        return path

    def manifest(self, cfg):
        entries = [
            {"path": p.name, "sha256": _sha256(p)} for p in self.files
        ]
        manifest = {
            "experiment": cfg.experiment,
            "seed": cfg.seed,
            "config": canonical_config(cfg),
            "files": entries,
        }
        path = self.dir / "manifest.json"
        with open(path, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return manifest


def run_experiment(cfg):
    """Dispatch a validated config and return the output manifest."""
    out = _Outputs(cfg.output_dir)
    runner = _RUNNERS[cfg.experiment]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateSpectrum)
        runner(cfg, out)
    return out.manifest(cfg)


def _run_toy2d(cfg, out):
    inst = toy2d.ToyInstance(cfg.sigma1, cfg.sigma2)
    eta_s = (cfg.eta_small if cfg.eta_small is not None else 1.0) / cfg.sigma1
    eta_b = (cfg.eta_big if cfg.eta_big is not None else TAU * 2.0) / cfg.sigma1
    alpha = (
        cfg.alpha
        if cfg.alpha is not None
        else toy2d.feasible_alpha(inst, eta_s, eta_b, target=1e-8, margin=1.0 + 1e-9)
    )
    ratio, passes = toy2d.ratio_check(inst, eta_s, eta_b, alpha, t_max=10**7)
    out.csv(
        "toy2d_ratio.csv",
        [
            (
                cfg.sigma1,
                cfg.sigma2,
                inst.kappa,
                eta_s,
                eta_b,
                float(alpha),
                float(ratio),
                passes,
            )
        ],
        (
            "sigma1",
            "sigma2",
            "kappa",
            "eta_small",
            "eta_big",
            "alpha",
            "ratio",
            "passes",
        ),
    )
    ts = np.arange(0, 41)
    series = []
    for name, eta in (("small rate", eta_s), ("big rate", eta_b)):
        losses = [toy2d.excess_loss(inst, eta, int(t)) for t in ts]
        series.append(Series(name, tuple(ts), tuple(losses)))
    out.svg(
        "toy2d_loss.svg",
        series,
        AxesSpec(
            title="Excess train loss on the 2-D toy",
            xlabel="step",
            ylabel="log10 excess loss",
            log_y=True,
        ),
    )


def _run_quadratic_certify(cfg, out):
    rows = []
    schema = None
    for i in range(cfg.instances):
        inst = random_instance(stream(cfg.seed, f"certify-{i}"))
        verdicts = check_assumptions(
            inst.pair, inst.theta0, inst.eta_s, inst.eta_b, inst.alpha
        )
        failed = [v.name for v in verdicts if not v.passed]
        if failed:
            raise CertificationFailed(
                f"instance {i} fails assumptions: {', '.join(failed)}"
            )
        run_s = gd.run_to_level_set(
            inst.pair.train, inst.theta0, inst.eta_s, inst.alpha, inst.t_max
        )
        run_b = gd.run_to_level_set(
            inst.pair.train, inst.theta0, inst.eta_b, inst.alpha, inst.t_max
        )
        cert = certify(inst.pair, run_s, run_b, inst.alpha)
        record = {"instance": i, **cert.to_record()}
        if schema is None:
            schema = tuple(record)
        rows.append(tuple(record[k] for k in schema))
    out.csv("certificates.csv", rows, schema)
    spec = random_instance(stream(cfg.seed, "certify-0")).pair.train.spectrum
    etas = np.linspace(0.01, 2.1 / spec.top, 200)
    series = [
        Series(
            f"sigma_{i + 1}",
            tuple(etas),
            tuple(attenuation(float(e), float(s)) for e in etas),
        )
        for i, s in enumerate(spec.eigenvalues)
    ]
    out.svg(
        "attenuation.svg",
        series,
        AxesSpec(
            title="Attenuation coefficients of the first instance",
            xlabel="step size",
            ylabel="|1 - eta sigma|",
            vlines=(
                2.0 / (spec.top + spec.bottom),
                2.0 / spec.top,
            ),
        ),
    )


def _sweep_problem(cfg):
    if cfg.dataset_path:
        full = kernels.load_dataset(cfg.dataset_path)
        train = kernels.Dataset(full.points[0::2], full.labels[0::2])
        test = kernels.Dataset(full.points[1::2], full.labels[1::2])
    else:
        train = kernels.two_cluster_dataset(cfg.n, stream(cfg.seed, "train-data"))
        test = kernels.two_cluster_dataset(cfg.n_test, stream(cfg.seed, "test-data"))
    prob = kernels.kernel_problem(train, cfg.scale, cfg.lam)
    obj = from_kernel(prob.K, prob.y, prob.lam)
    return prob, obj, test


def _level_run_row(prob, obj, test, eta_mult, alpha):
    """Run theta-space GD to the alpha level set; report the sweep metrics."""
    sigma1 = obj.spectrum.top
    eta = eta_mult / sigma1
    beta0 = np.zeros(obj.n)
    run = gd.run_to_level_set(obj, beta0, eta, alpha, T_MAX_SWEEP)
    mu = run.mu
    proj_e1 = abs(float(mu[0]))
    hilbert_norm = float(np.sqrt(np.sum(mu * mu)))
    alpha_star = kernels.ridge_alpha(prob.K, prob.y, prob.lam)
    alpha_hat = alpha_star + kernels.from_eigen_coords(prob, mu)
    accuracy = 1.0 - kernels.binary_error(prob, alpha_hat, test)
    return run, proj_e1, hilbert_norm, accuracy


def _run_eta_sweep(cfg, out):
    prob, obj, test = _sweep_problem(cfg)
    excess0 = 0.5 * float(
        np.sum(obj.spectrum.eigenvalues * obj.optimum**2)
    )
    alpha = cfg.alpha if cfg.alpha is not None else 0.05 * excess0
    rows = []
    for eta_mult in cfg.eta_grid:
        run, proj_e1, hilbert_norm, accuracy = _level_run_row(
            prob, obj, test, float(eta_mult), alpha
        )
        rows.append(
            (
                float(eta_mult),
                run.eta,
                run.steps,
                run.stop_status.value,
                proj_e1,
                hilbert_norm,
                accuracy,
            )
        )
    schema = (
        "eta_mult",
        "eta",
        "steps",
        "stop_status",
        "proj_e1",
        "hilbert_norm",
        "accuracy",
    )
    out.csv("eta_sweep.csv", rows, schema)
    xs = tuple(r[0] for r in rows)
    out.svg(
        "eta_sweep.svg",
        [
            Series("|<theta - theta_hat, e_1>|", xs, tuple(r[4] for r in rows)),
            Series("Hilbert norm", xs, tuple(r[5] for r in rows)),
            Series("accuracy", xs, tuple(r[6] for r in rows)),
        ],
        AxesSpec(
            title="Level-set estimators across step sizes",
            xlabel="eta * sigma_1",
            ylabel="value",
        ),
    )


def _run_alpha_sweep(cfg, out):
    prob, obj, test = _sweep_problem(cfg)
    excess0 = 0.5 * float(
        np.sum(obj.spectrum.eigenvalues * obj.optimum**2)
    )
    eta_s = cfg.eta_small if cfg.eta_small is not None else 1.0
    eta_b = cfg.eta_big if cfg.eta_big is not None else TAU * 2.0
    rows = []
    for frac in cfg.alpha_grid:
        alpha = float(frac) * excess0
        _, _, _, acc_s = _level_run_row(prob, obj, test, eta_s, alpha)
        _, _, _, acc_b = _level_run_row(prob, obj, test, eta_b, alpha)
        rows.append((float(frac), alpha, acc_s, acc_b))
    schema = ("alpha_fraction", "alpha", "accuracy_small", "accuracy_big")
    out.csv("alpha_sweep.csv", rows, schema)
    xs = tuple(r[0] for r in rows)
    out.svg(
        "alpha_sweep.svg",
        [
            Series("small rate", xs, tuple(r[2] for r in rows)),
            Series("big rate", xs, tuple(r[3] for r in rows)),
        ],
        AxesSpec(
            title="Test accuracy across level-set targets",
            xlabel="alpha / initial excess loss",
            ylabel="accuracy",
        ),
    )


def _run_scale_sweep(cfg, out):
    if cfg.dataset_path:
        data = kernels.load_dataset(cfg.dataset_path)
    else:
        data = kernels.two_cluster_dataset(cfg.n, stream(cfg.seed, "train-data"))
    rows = []
    for s in cfg.scale_grid:
        K = kernels.gaussian_kernel_matrix(data.points, float(s))
        spec = eig_sym(K / data.n)
        shifted_kappa = (spec.top + cfg.lam) / (spec.bottom + cfg.lam)
        rows.append((float(s), condition_number(spec), shifted_kappa))
    schema = ("scale", "kappa", "kappa_regularized")
    out.csv("scale_sweep.csv", rows, schema)
    out.svg(
        "scale_sweep.svg",
        [
            Series(
                "log10 kappa",
                tuple(r[0] for r in rows),
                tuple(r[1] for r in rows),
            )
        ],
        AxesSpec(
            title="Condition number of K/n across kernel scales",
            xlabel="scale",
            ylabel="log10 kappa",
            log_y=True,
        ),
    )


FIG5_FILTERS = (
    ("cutoff", cut_off(0.25)),
    ("gd_small", gd_filter(1.0, 4)),
    ("gd_big", gd_filter(2.0, 4)),
    ("tikhonov", tikhonov(0.25)),
    ("iterated_tikhonov", iterated_tikhonov(0.8, 5)),
)


def _run_filter_profiles(cfg, out):
    sigmas = np.linspace(0.01, 1.0, 100)
    rows = []
    for s in sigmas:
        rows.append(
            (float(s), *(residual(f, float(s)) for _, f in FIG5_FILTERS))
        )
    schema = ("sigma", *(name for name, _ in FIG5_FILTERS))
    out.csv("filter_profiles.csv", rows, schema)
    xs = tuple(r[0] for r in rows)
    out.svg(
        "filter_profiles.svg",
        [
            Series(name, xs, tuple(r[i + 1] for r in rows))
            for i, (name, _) in enumerate(FIG5_FILTERS)
        ],
        AxesSpec(
            title="Residual of spectral filters",
            xlabel="sigma",
            ylabel="residual",
        ),
    )


_RUNNERS = {
    "toy2d": _run_toy2d,
    "quadratic_certify": _run_quadratic_certify,
    "eta_sweep": _run_eta_sweep,
    "alpha_sweep": _run_alpha_sweep,
    "scale_sweep": _run_scale_sweep,
    "filter_profiles": _run_filter_profiles,
}
