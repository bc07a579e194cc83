"""Piecewise-constant densities on the line.

Every integral here (mass, first moment, squared-error distortion) is evaluated
in closed form on each intersection of an interval with a constant piece, so
results are exact up to floating-point rounding.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

__all__ = [
    "StepDensity",
    "ZeroMassError",
    "mixture_density",
    "measure",
    "conditional_mean",
    "moments",
    "distortion",
    "check_codebook",
    "reflect",
]

ZERO_MASS = 1e-14


class ZeroMassError(ValueError):
    """Raised when a conditional expectation is requested on a null interval."""


@dataclass(frozen=True)
class StepDensity:
    """Density equal to ``levels[i]`` on ``[breakpoints[i], breakpoints[i+1]]``."""

    breakpoints: tuple[float, ...]
    levels: tuple[float, ...]
    mixture_weight: Optional[float] = None

    def __post_init__(self):
        xs, ts = self.breakpoints, self.levels
        if len(xs) != len(ts) + 1 or not ts:
            raise ValueError("need len(breakpoints) == len(levels) + 1 >= 2")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(t < 0 for t in ts):
            raise ValueError("levels must be nonnegative")
        total = math.fsum(t * (b - a) for t, a, b in self.pieces())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"density integrates to {total!r}, not 1")

    @property
    def support(self) -> tuple[float, float]:
        return self.breakpoints[0], self.breakpoints[-1]

    def pieces(self) -> Iterator[tuple[float, float, float]]:
        """Yield ``(level, left, right)`` for each constant piece."""
        xs = self.breakpoints
        for i, t in enumerate(self.levels):
            yield t, xs[i], xs[i + 1]

    def pdf(self, x: float) -> float:
        lo, hi = self.support
        if x < lo or x > hi:
            return 0.0
        i = bisect.bisect_right(self.breakpoints, x) - 1
        return self.levels[min(i, len(self.levels) - 1)]

    def cdf(self, x: float) -> float:
        return measure(self, self.breakpoints[0], x) if x > self.breakpoints[0] else 0.0

    def quantile(self, q: float) -> float:
        """Smallest x with ``cdf(x) >= q`` for ``0 <= q <= 1``."""
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"quantile level {q!r} outside [0, 1]")
        acc = 0.0
        for t, a, b in self.pieces():
            mass = t * (b - a)
            if t > 0 and acc + mass >= q:
                return min(b, a + (q - acc) / t)
            acc += mass
        return self.breakpoints[-1]


def mixture_density(p: float) -> StepDensity:
    """Density of ``p*U[0,1] + (1-p)*U[1/2,3/2]``.

    The two uniform supports overlap on ``[1/2, 1]`` where the density is 1;
    it is ``p`` on ``[0, 1/2]`` and ``1-p`` on ``[1, 3/2]``.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"mixture weight must lie in the open interval (0, 1), got {p!r}")
    return StepDensity((0.0, 0.5, 1.0, 1.5), (p, 1.0, 1.0 - p), mixture_weight=p)


def _overlaps(d: StepDensity, c: float, e: float) -> Iterator[tuple[float, float, float]]:
    for t, a, b in d.pieces():
        lo, hi = max(a, c), min(b, e)
        if hi > lo and t > 0:
            yield t, lo, hi


def measure(d: StepDensity, c: float, e: float) -> float:
    """P([c, e]); portions outside the support contribute nothing."""
    if c > e:
        raise ValueError(f"empty interval [{c!r}, {e!r}]")
    return math.fsum(t * (hi - lo) for t, lo, hi in _overlaps(d, c, e))


def conditional_mean(d: StepDensity, c: float, e: float) -> float:
    """E[X | X in [c, e]]."""
    if c > e:
        raise ValueError(f"empty interval [{c!r}, {e!r}]")
    mass = 0.0
    moment = 0.0
    for t, lo, hi in _overlaps(d, c, e):
        w = t * (hi - lo)
        mass += w
        moment += w * (lo + hi) / 2
    if mass < ZERO_MASS:
        raise ZeroMassError(f"interval [{c!r}, {e!r}] carries no probability mass")
    # the ratio may drift past an endpoint by an ulp
    return min(max(moment / mass, c), e)


def moments(d: StepDensity) -> tuple[float, float]:
    """Return ``(mean, variance)``."""
    mean = math.fsum(t * (b * b - a * a) / 2 for t, a, b in d.pieces())
    var = math.fsum(t * ((b - mean) ** 3 - (a - mean) ** 3) / 3 for t, a, b in d.pieces())
    return mean, var


def check_codebook(points: Sequence[float]) -> tuple[float, ...]:
    pts = tuple(float(x) for x in points)
    if not pts:
        raise ValueError("codebook is empty")
    if any(not math.isfinite(x) for x in pts):
        raise ValueError("codebook has non-finite entries")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise ValueError("codebook must be strictly increasing without duplicates")
    return pts


def reflect(points: Sequence[float], center: float = 0.75) -> tuple[float, ...]:
    """Mirror a codebook about ``center`` (kept in increasing order)."""
    return tuple(2 * center - x for x in reversed(points))


def _sq_integral(lo: float, hi: float, a: float) -> float:
    # int_lo^hi (x - a)^2 dx
    return ((hi - a) ** 3 - (lo - a) ** 3) / 3


def distortion(d: StepDensity, codebook: Sequence[float]) -> float:
    """Expected squared distance from X to the nearest codepoint."""
    pts = check_codebook(codebook)
    lo, hi = d.support
    bounds = [lo] + [(a + b) / 2 for a, b in zip(pts, pts[1:])] + [hi]
    terms = []
    for a, c, e in zip(pts, bounds, bounds[1:]):
        c, e = max(c, lo), min(e, hi)
        if e <= c:
            continue
        for t, x0, x1 in _overlaps(d, c, e):
            terms.append(t * _sq_integral(x0, x1, a))
    return math.fsum(terms)
