"""Invariant battery behind the `verify` CLI subcommand.

Each check runs at a pinned seed and returns a pass/fail line; the battery
is the run-anywhere smoke version of the full pytest suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exactdensity import density_rho
from .montecarlo import (EnsembleSpec, estimate_expected_real,
                         sample_haar_orthogonal, trial_rng)
from .quadrature import QuadratureSpec, Rule
from .series import SeriesParams
from .weakregime import a_lm_closed, a_lm_mc, g_j_contour, g_j_mc
from .weights import log_weight_mass, weight_table
from .quadrature import tanh_sinh_adaptive


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_gaussian_bound(seed, threads):
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, 10 ** 5)
    v = rng.uniform(0.0, 1.0, 10 ** 5)
    lhs = (1 - u ** 2) * (1 - v ** 2) / (1 - u * v) ** 2
    rhs = np.exp(-(u - v) ** 2)
    bad = int((lhs > rhs * (1 + 1e-12)).sum())
    return CheckResult("gaussian-bound", bad == 0,
                       f"violations {bad}/100000")


def _check_mass(seed, threads):
    worst = 0.0
    for (L, m) in ((1, 2), (2, 2), (3, 2), (2, 3)):
        table = weight_table(L, m)
        target = log_weight_mass(L, m)

        def f(x):
            return np.exp(table.log_weight(x) - target + math.log(2.0))

        v, _, _ = tanh_sinh_adaptive(f, 0.0, 1.0, QuadratureSpec(
            rel_tol=1e-9, rule=Rule.TANH_SINH))
        worst = max(worst, abs(v - 1.0))
    return CheckResult("mass", worst <= 1e-6, f"max relative mass gap {worst:.2e}")


def _check_alm(seed, threads):
    rng = np.random.default_rng(seed)
    mean, se = a_lm_mc(2, 1, 10 ** 6, rng)
    target = a_lm_closed(2, 1)
    z = abs(mean - target) / se
    return CheckResult("alm", z <= 3.0,
                       f"|mc - {target}| = {abs(mean - target):.2e} ({z:.2f} sigma)")


def _check_gj(seed, threads):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for (j, L, m) in ((0, 2, 1), (3, 1, 2), (4, 2, 2), (2, 4, 1)):
        mc, se = g_j_mc(j, L, m, 300000, rng)
        ct = g_j_contour(j, L, m).value
        worst = max(worst, abs(ct - mc) / se)
    return CheckResult("gj", worst <= 3.0, f"max deviation {worst:.2f} sigma")


def _check_parity(seed, threads):
    spec = EnsembleSpec(5, 2, 1)
    bad = 0
    for t in range(20000):
        rng = trial_rng(seed, t)
        from .montecarlo import count_real_eigs, sample_product
        c = count_real_eigs(sample_product(spec, rng))
        if c % 2 != spec.N % 2 or not 0 <= c <= spec.N:
            bad += 1
    return CheckResult("parity", bad == 0, f"violations {bad}/20000")


def _check_haar(seed, threads):
    worst = 0.0
    worst_det = 0.0
    for t in range(100):
        rng = trial_rng(seed, t)
        q = sample_haar_orthogonal(30, rng)
        worst = max(worst, float(np.abs(q.T @ q - np.eye(30)).max()))
        worst_det = max(worst_det, abs(abs(np.linalg.det(q)) - 1.0))
    ok = worst <= 1e-12 and worst_det <= 1e-10
    return CheckResult("haar", ok,
                       f"orthogonality residual {worst:.2e}, |det|-1 {worst_det:.2e}")


def _check_evenness(seed, threads):
    p = SeriesParams(6, 2, 1)
    worst = 0.0
    for x in (0.15, 0.4, 0.75):
        a = density_rho(x, p)
        b = density_rho(-x, p)
        worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return CheckResult("evenness", worst <= 1e-8, f"max relative gap {worst:.2e}")


def _check_determinism(seed, threads):
    spec = EnsembleSpec(3, 2, 1)
    runs = [estimate_expected_real(spec, 500, seed, threads=k).to_json()
            for k in (1, max(threads, 4))]
    ok = runs[0] == runs[1]
    return CheckResult("determinism", ok,
                       "bit-identical across thread counts" if ok
                       else "thread count changed the output")


_CHECKS = {
    "gaussian-bound": _check_gaussian_bound,
    "mass": _check_mass,
    "alm": _check_alm,
    "gj": _check_gj,
    "parity": _check_parity,
    "haar": _check_haar,
    "evenness": _check_evenness,
    "determinism": _check_determinism,
}


def available_checks():
    return list(_CHECKS)


def run_verify(only=None, seed: int = 20260808, threads: int = 1):
    names = available_checks() if not only else list(only)
    results = []
    for name in names:
        if name not in _CHECKS:
            raise KeyError(f"unknown check {name!r}; available: {available_checks()}")
        results.append(_CHECKS[name](seed, threads))
    return results
