"""Random block-structured signature matrices and the scaling benchmark.

Instances follow a simple recipe: one dense ``N x N`` diagonal template is
repeated on every diagonal block, one mostly-empty template is repeated on
every superdiagonal block, and everything else is absent.  Cells are drawn
row-major from a ``numpy`` PCG64 stream, one uniform per cell, mapped
through the inverse CDF of the listed probabilities.
"""

from __future__ import annotations

import csv
import gc
import io
import math
import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InsufficientPoints, NonPositiveTime
from .offsets import analyze, analyze_unblocked
from .sigma import SignatureMatrix

__all__ = [
    "GenConfig",
    "BenchResult",
    "RNG_ALGORITHM",
    "generate_sigma",
    "fit_power_law",
    "run_bench",
    "bench_csv",
]

RNG_ALGORITHM = "numpy.PCG64"

METHODS = {"esmm": analyze, "smm": analyze_unblocked}


@dataclass(frozen=True)
class GenConfig:
    """Generator settings; ``None`` in ``offdiag_values`` means an absent entry."""

    N: int
    p: int
    seed: int = 0
    diag_values: tuple[int, ...] = (0, 1, 2, 3)
    diag_probs: tuple[float, ...] = (0.7, 0.1, 0.1, 0.1)
    offdiag_values: tuple[int | None, ...] = (None, 0, 1, 2)
    offdiag_probs: tuple[float, ...] = (0.925, 0.025, 0.025, 0.025)

    def __post_init__(self):
        if self.N < 1 or self.p < 1:
            raise ValueError("N and p must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        for vals, probs, name in (
            (self.diag_values, self.diag_probs, "diag"),
            (self.offdiag_values, self.offdiag_probs, "offdiag"),
        ):
            if len(vals) != len(probs) or not vals:
                raise ValueError(f"{name}: values and probabilities differ in length")
            if any(pr < 0 for pr in probs) or abs(math.fsum(probs) - 1.0) > 1e-12:
                raise ValueError(f"{name}: probabilities must be nonnegative and sum to 1")
        if any(v is None or v < 0 for v in self.diag_values):
            raise ValueError("diagonal values must be finite nonnegative orders")
        if any(v is not None and v < 0 for v in self.offdiag_values):
            raise ValueError("off-diagonal values must be nonnegative or None")

    @property
    def n(self) -> int:
        return self.N * self.p


def _sample(uniforms, values, probs):
    cum = np.cumsum(probs)
    idx = np.searchsorted(cum, uniforms, side="right")
    idx = np.minimum(idx, len(values) - 1)
    return [values[k] for k in idx]


def generate_sigma(cfg: GenConfig) -> SignatureMatrix:
    """Block upper bidiagonal signature matrix of size ``N * p``."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    N = cfg.N
    diag = _sample(rng.random(N * N), cfg.diag_values, cfg.diag_probs)
    upper = _sample(rng.random(N * N), cfg.offdiag_values, cfg.offdiag_probs)
    ents: dict[tuple[int, int], int] = {}
    for b in range(cfg.p):
        off = b * N
        for k, s in enumerate(diag):
            ents[(off + k // N + 1, off + k % N + 1)] = int(s)
        if b + 1 < cfg.p:
            for k, s in enumerate(upper):
                if s is not None:
                    ents[(off + k // N + 1, off + N + k % N + 1)] = int(s)
    return SignatureMatrix(cfg.n, ents)


def fit_power_law(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares fit of ``t = mu * n**nu`` on log-log axes; returns ``(mu, nu)``."""
    if len(points) < 3:
        raise InsufficientPoints(f"need at least 3 points, got {len(points)}")
    ns = np.array([p[0] for p in points], dtype=float)
    ts = np.array([p[1] for p in points], dtype=float)
    if np.any(ts <= 0):
        raise NonPositiveTime("all times must be positive")
    if np.any(ns <= 0):
        raise ValueError("all sizes must be positive")
    A = np.column_stack([np.ones_like(ns), np.log(ns)])
    (intercept, slope), *_ = np.linalg.lstsq(A, np.log(ts), rcond=None)
    return float(np.exp(intercept)), float(slope)


@dataclass
class BenchResult:
    method: str
    N: int
    points: list[tuple[int, float]]
    fitted_mu: float
    fitted_nu: float
    records: list[tuple[int, int, float]] = field(default_factory=list)
    seed: int = 0
    rng: str = RNG_ALGORITHM


def _trial_seed(seed: int, n: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, n, trial]).generate_state(1, np.uint64)[0])


def run_bench(
    method: str,
    N: int,
    sizes: Sequence[int],
    trials: int = 3,
    seed: int = 0,
    clock: Callable[[], float] = time.perf_counter,
    progress: Callable[[int, int, float], None] | None = None,
) -> BenchResult:
    """Time ``analyze`` (esmm) or ``analyze_unblocked`` (smm) over sizes.

    Each trial analyses a freshly generated instance; generation is not
    timed and the garbage collector is paused while timing.  Instance seeds
    derive from ``(seed, n, trial)`` only, so both methods see the same
    matrices.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {sorted(METHODS)}")
    if trials < 1:
        raise ValueError("trials must be positive")
    fn = METHODS[method]
    records = []
    points = []
    for n in sorted(sizes):
        if n % N:
            raise ValueError(f"size {n} is not a multiple of N={N}")
        times = []
        for trial in range(trials):
            m = generate_sigma(GenConfig(N=N, p=n // N, seed=_trial_seed(seed, n, trial)))
            gc_was_on = gc.isenabled()
            gc.disable()
            try:
                t0 = clock()
                rep = fn(m)
                dt = clock() - t0
            finally:
                if gc_was_on:
                    gc.enable()
            if not rep.wellposed:
                raise RuntimeError(f"generated instance n={n} trial={trial} is ill-posed")
            times.append(dt)
            records.append((n, trial, dt))
            if progress:
                progress(n, trial, dt)
        points.append((n, statistics.median(times)))
    mu, nu = fit_power_law(points)
    return BenchResult(method, N, points, mu, nu, records, seed)


def bench_csv(results: Sequence[BenchResult]) -> str:
    """CSV with header ``method,N,n,trial,seconds`` and one fit comment per result."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "N", "n", "trial", "seconds"])
    for r in results:
        for n, trial, dt in r.records:
            w.writerow([r.method, r.N, n, trial, f"{dt:.6f}"])
    for r in results:
        buf.write(
            f"# fit method={r.method} N={r.N} mu={r.fitted_mu:.6g} nu={r.fitted_nu:.4f}"
            f" rng={r.rng} seed={r.seed}\n"
        )
    return buf.getvalue()
