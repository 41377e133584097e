"""Sampling of the random matrix models and real-eigenvalue counting.

Real eigenvalues are classified structurally from the real Schur form:
1x1 diagonal blocks are real eigenvalues, 2x2 blocks are complex pairs.
LAPACK standardizes 2x2 blocks so that they always carry a conjugate pair,
which makes the classification exact with no imaginary-part threshold.

Reproducibility: trial t of a run draws from a Philox stream keyed by
(seed, t), so results are bit-identical for any thread count or schedule.
"""
from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs

from .errors import DomainError, SchurNoConvergenceError

_GEES, = get_lapack_funcs(("gees",), (np.empty((2, 2), dtype=float),))
_MAX_SCHUR_FAILURE_FRACTION = 1e-3


class EnsembleKind(enum.Enum):
    TRUNCATED_ORTHOGONAL = "truncated-orthogonal"
    REAL_GINIBRE = "real-ginibre"


@dataclass(frozen=True)
class EnsembleSpec:
    """Product-matrix model: m factors of size N (truncation depth L)."""

    N: int
    L: int
    m: int
    kind: EnsembleKind = EnsembleKind.TRUNCATED_ORTHOGONAL

    def __post_init__(self):
        if self.N < 1:
            raise DomainError("N must be a positive integer")
        if self.m < 1:
            raise DomainError("m must be a positive integer")
        if self.kind is EnsembleKind.TRUNCATED_ORTHOGONAL and self.L < 1:
            raise DomainError("truncated-orthogonal ensembles require L >= 1")
        if self.L < 0:
            raise DomainError("L must be non-negative")

    def to_dict(self):
        return {"N": self.N, "L": self.L, "m": self.m, "kind": self.kind.value}


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray

    def to_dict(self):
        return {"bin_edges": [float(e) for e in self.bin_edges],
                "counts": [int(c) for c in self.counts]}


@dataclass
class SimulationEstimate:
    """Monte Carlo mean with uncertainty and provenance."""

    mean: float
    stderr: float
    trials: int
    seed: int
    spec: EnsembleSpec
    histogram: Histogram | None = None
    schur_failures: int = 0

    def to_json(self) -> str:
        payload = {
            "mean": repr(float(self.mean)),
            "stderr": repr(float(self.stderr)),
            "trials": self.trials,
            "seed": self.seed,
            "spec": self.spec.to_dict(),
            "schur_failures": self.schur_failures,
        }
        if self.histogram is not None:
            payload["histogram"] = self.histogram.to_dict()
        return json.dumps(payload, indent=2, sort_keys=True)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based substream for one trial; depends only on (seed, trial)."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n orthogonal matrix.

    QR of a Gaussian matrix alone is not Haar; the R-diagonal sign
    correction makes the distribution right-invariant.
    """
    if n < 1:
        raise DomainError("n must be a positive integer")
    a = rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    d = np.sign(np.diag(r))
    d[d == 0.0] = 1.0
    return q * d[None, :]


def sample_product(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    """One draw of the m-factor product matrix.

    Ginibre factors are scaled by N^(-1/2) so products stay in double range
    for large N*m; real-eigenvalue counts are scale-invariant and the scaled
    eigenvalues are the natural density variable.
    """
    out = None
    for _ in range(spec.m):
        if spec.kind is EnsembleKind.TRUNCATED_ORTHOGONAL:
            big = sample_haar_orthogonal(spec.N + spec.L, rng)
            factor = big[:spec.N, :spec.N]
        else:
            factor = rng.standard_normal((spec.N, spec.N)) / math.sqrt(spec.N)
        out = factor if out is None else out @ factor
    return np.ascontiguousarray(out)


def _schur_eigvals(M: np.ndarray):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError("need a square real matrix")
    if not np.isfinite(M).all():
        raise DomainError("matrix entries must be finite")
    res = _GEES(lambda *args: None, M, compute_v=0)
    info = res[-1]
    if info > 0:
        raise SchurNoConvergenceError(
            f"QR iteration failed to converge (info={info})")
    wr, wi = res[2], res[3]
    return wr, wi


def count_real_eigs(M: np.ndarray) -> int:
    """Number of 1x1 blocks in the real Schur form of M."""
    wr, wi = _schur_eigvals(M)
    return int((wi == 0.0).sum())


def real_eigs(M: np.ndarray) -> np.ndarray:
    """The 1x1 Schur block values (real eigenvalues), unordered."""
    wr, wi = _schur_eigvals(M)
    return wr[wi == 0.0]


def _run_trials(spec, seed, t0, t1, edges):
    counts = np.empty(t1 - t0, dtype=np.int64)
    hist = np.zeros(len(edges) - 1, dtype=np.int64) if edges is not None else None
    failures = []
    for t in range(t0, t1):
        rng = trial_rng(seed, t)
        M = sample_product(spec, rng)
        try:
            if edges is not None:
                ev = real_eigs(M)
                c = len(ev)
                hist += np.histogram(ev, bins=edges)[0]
            else:
                c = count_real_eigs(M)
        except SchurNoConvergenceError:
            counts[t - t0] = -1
            failures.append(t)
            continue
        if (c - spec.N) % 2 != 0 or not 0 <= c <= spec.N:
            raise AssertionError(
                f"parity invariant violated: {c} real eigenvalues at N={spec.N}")
        counts[t - t0] = c
    return counts, hist, failures


def _welford(values) -> tuple[float, float]:
    """Single-pass stable mean/variance in fixed element order."""
    mean = 0.0
    m2 = 0.0
    k = 0
    for v in values:
        v = float(v)
        k += 1
        d = v - mean
        mean += d / k
        m2 += d * (v - mean)
    if k < 2:
        return mean, 0.0
    return mean, math.sqrt(m2 / (k - 1)) / math.sqrt(k)


def estimate_expected_real(spec: EnsembleSpec, trials: int, seed: int,
                           threads: int = 1, bins=None) -> SimulationEstimate:
    """Monte Carlo estimate of the expected number of real eigenvalues.

    Optionally accumulates a histogram of real-eigenvalue positions over
    the given bin edges.  Output is bit-identical for any thread count.
    """
    if trials < 100:
        raise DomainError("trials must be at least 100")
    if threads < 1:
        raise DomainError("threads must be a positive integer")
    edges = np.asarray(bins, dtype=float) if bins is not None else None
    chunk = max(64, math.ceil(trials / (threads * 8)))
    ranges = [(t0, min(t0 + chunk, trials)) for t0 in range(0, trials, chunk)]
    if threads == 1:
        parts = [_run_trials(spec, seed, t0, t1, edges) for t0, t1 in ranges]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [pool.submit(_run_trials, spec, seed, t0, t1, edges)
                    for t0, t1 in ranges]
            parts = [f.result() for f in futs]
    counts = np.concatenate([p[0] for p in parts])
    failures = sum(len(p[2]) for p in parts)
    if failures > _MAX_SCHUR_FAILURE_FRACTION * trials:
        raise SchurNoConvergenceError(
            f"{failures} of {trials} trials failed the Schur factorization")
    good = counts[counts >= 0]
    mean, stderr = _welford(good)
    hist = None
    if edges is not None:
        total = np.zeros(len(edges) - 1, dtype=np.int64)
        for p in parts:
            total += p[1]
        hist = Histogram(bin_edges=edges, counts=total)
    return SimulationEstimate(mean=mean, stderr=stderr, trials=trials,
                              seed=seed, spec=spec, histogram=hist,
                              schur_failures=failures)


def histogram_csv_lines(est: SimulationEstimate) -> list[str]:
    """CSV rows (bin_left, bin_right, count, normalized_value).

    normalized_value integrates to one over the binned range: counts are
    divided by (total real eigenvalues collected x bin width).
    """
    if est.histogram is None:
        raise DomainError("estimate carries no histogram")
    edges = est.histogram.bin_edges
    counts = est.histogram.counts
    total = counts.sum()
    lines = ["bin_left,bin_right,count,normalized_value"]
    for i, c in enumerate(counts):
        width = edges[i + 1] - edges[i]
        norm = float(c / (total * width)) if total > 0 else 0.0
        lines.append(f"{float(edges[i])!r},{float(edges[i + 1])!r},{int(c)},{norm!r}")
    return lines
