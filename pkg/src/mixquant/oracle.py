"""Lloyd-Max fixed-point iteration on a step density, used as an independent check.

All restarts advance together as rows of one array; each row stops updating
once its own sup-norm step falls below ``tol``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .density import StepDensity, distortion
from .mixed import MIXTURE, QuantizationResult
from .selector import solve

__all__ = ["OracleReport", "Verification", "lloyd", "lloyd_iterate", "batch_distortion", "verify", "PRNG"]

PRNG = "PCG64"
DEFAULT_RESTARTS = 64
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERS = 100_000


@dataclass(frozen=True)
class OracleReport:
    n: int
    codebook: tuple[float, ...]
    error: float
    iterations: int
    restart_index: int
    converged: bool
    seed: int
    prng: str = PRNG


def _rng(seed: int, restart: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & (2**64 - 1), restart])))


def _random_start(d: StepDensity, n: int, rng: np.random.Generator) -> np.ndarray:
    lo, hi = d.support
    while True:
        pts = np.sort(rng.uniform(lo, hi, n))
        if n == 1 or np.all(np.diff(pts) > 0):
            return pts


def _quantile_start(d: StepDensity, n: int) -> np.ndarray:
    return np.array([d.quantile((2 * j - 1) / (2 * n)) for j in range(1, n + 1)])


def _centroids(d: StepDensity, x: np.ndarray) -> np.ndarray:
    lo, hi = d.support
    mids = (x[:, 1:] + x[:, :-1]) / 2
    rows = x.shape[0]
    left = np.hstack([np.full((rows, 1), lo), mids])
    right = np.hstack([mids, np.full((rows, 1), hi)])
    mass = np.zeros_like(x)
    mom = np.zeros_like(x)
    for t, a, b in d.pieces():
        cl, cr = np.clip(left, a, b), np.clip(right, a, b)
        w = t * (cr - cl)
        mass += w
        mom += w * (cr + cl) / 2
    return mom / mass


def batch_distortion(d: StepDensity, x: np.ndarray) -> np.ndarray:
    """Row-wise distortion of sorted codebooks ``x`` (shape ``(rows, n)``)."""
    lo, hi = d.support
    mids = (x[:, 1:] + x[:, :-1]) / 2
    rows = x.shape[0]
    left = np.hstack([np.full((rows, 1), lo), mids])
    right = np.hstack([mids, np.full((rows, 1), hi)])
    total = np.zeros(x.shape[0])
    for t, a, b in d.pieces():
        cl, cr = np.clip(left, a, b), np.clip(right, a, b)
        total += t * (((cr - x) ** 3 - (cl - x) ** 3) / 3).sum(axis=1)
    return total


def lloyd_iterate(
    d: StepDensity,
    start: np.ndarray,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    record_every: int = 0,
):
    """Run Lloyd-Max from each row of ``start``.

    Returns ``(points, iterations, converged, history)``; ``history`` holds the
    row-wise distortion every ``record_every`` iterations (empty when 0).
    """
    x = np.array(start, dtype=float, ndmin=2)
    rows = x.shape[0]
    iters = np.zeros(rows, dtype=int)
    done = np.zeros(rows, dtype=bool)
    history = []
    if record_every:
        history.append(batch_distortion(d, x))
    active = np.arange(rows)
    for it in range(1, max_iters + 1):
        new = _centroids(d, x[active])
        step = np.abs(new - x[active]).max(axis=1)
        x[active] = new
        iters[active] = it
        finished = step < tol
        done[active[finished]] = True
        active = active[~finished]
        if record_every and it % record_every == 0:
            history.append(batch_distortion(d, x))
        if active.size == 0:
            break
    return x, iters, done, history


def lloyd(
    d: StepDensity,
    n: int,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> OracleReport:
    """Best-of-restarts Lloyd-Max quantizer with ``n`` points.

    Restart 0 starts from the equal-mass quantiles; restart ``r > 0`` from
    ``n`` sorted uniform draws over the support, using PCG64 seeded with
    ``(seed, r)``.  The winner is chosen by exact distortion, earliest restart
    on ties.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if restarts < 1:
        raise ValueError(f"restarts must be positive, got {restarts}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    starts = [_quantile_start(d, n)]
    starts += [_random_start(d, n, _rng(seed, r)) for r in range(1, restarts)]
    x, iters, done, _ = lloyd_iterate(d, np.vstack(starts), max_iters, tol)

    best: Optional[tuple[float, int]] = None
    for r in range(restarts):
        err = distortion(d, x[r])
        if best is None or err < best[0]:
            best = (err, r)
    err, r = best
    return OracleReport(
        n=n,
        codebook=tuple(float(v) for v in x[r]),
        error=err,
        iterations=int(iters[r]),
        restart_index=r,
        converged=bool(done[r]),
        seed=seed,
    )


class Verification(NamedTuple):
    closed_form: QuantizationResult
    oracle: OracleReport
    max_point_gap: float
    error_gap: float


def verify(
    n: int,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> Verification:
    """Compare the structural solution for ``n`` against Lloyd-Max."""
    result = solve(n)
    report = lloyd(MIXTURE, n, restarts=restarts, max_iters=max_iters, tol=tol, seed=seed)
    gap = max(abs(a - b) for a, b in zip(result.codebook, report.codebook))
    return Verification(result, report, gap, abs(result.error - report.error))
