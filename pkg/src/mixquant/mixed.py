"""Optimal quantization of the equal-weight overlap mixture.

For ``p = 1/2`` the density is 1/2 on ``[0, 1/2]``, 1 on ``[1/2, 1]`` and 1/2
on ``[1, 3/2]``, symmetric about 3/4.  Optimal codebooks are symmetric about
3/4 (with 3/4 itself a codepoint when n is odd), so only the left half is
solved for.  For n >= 6 the left half holds ``k`` points in ``[0, 1/2]`` and
``m`` points in ``(1/2, 3/4)``; which cell straddles 1/2 gives two cases:

* ``V1``: the boundary ``c = (a_k + b_1)/2`` between the last ``a`` and the
  first ``b`` lies at or left of 1/2, so ``b_1``'s cell straddles 1/2;
* ``V2``: ``c >= 1/2``, so ``a_k``'s cell straddles 1/2.

In both cases the points on either side of the straddling cell are uniform
blocks (equal spacing on a constant piece), so the whole configuration is a
function of the straddling point alone, and the centroid condition for that
point is a single scalar equation.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional

import numpy as np
from scipy.optimize import brentq

from .density import conditional_mean, distortion, mixture_density, reflect
from .uniform import UniformPiece, endpoint_constrained, uniform_optimal

__all__ = [
    "CENTER",
    "HALF",
    "SplitConfig",
    "QuantizationResult",
    "InfeasibleSplitError",
    "SolverError",
    "small_n",
    "solve_split",
    "best_split",
    "split_error",
    "SMALL_N_CASES",
]

HALF = 0.5
CENTER = 0.75
MIXTURE = mixture_density(0.5)

ROOT_XTOL = 1e-15
FEASIBILITY_TOL = 1e-12
TIE_TOL = 1e-12
_SCAN = 16
# lets a root sitting exactly on the case boundary be bracketed
_BRACKET_PAD = 1e-9


class InfeasibleSplitError(ArithmeticError):
    """Neither case of a (k, m) split admits a stationary configuration."""


class SolverError(RuntimeError):
    """The scalar root finder failed to converge."""


@dataclass(frozen=True)
class SplitConfig:
    k: int
    m: int
    parity: Literal["even", "odd"]
    case: Literal["V1", "V2"]

    def __post_init__(self):
        if self.k < 1 or self.m < 1:
            raise ValueError(f"k and m must be positive, got ({self.k}, {self.m})")
        if (self.k, self.m) == (1, 1):
            raise ValueError("(k, m) = (1, 1) lies outside the split domain")
        if self.parity not in ("even", "odd"):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if self.case not in ("V1", "V2"):
            raise ValueError(f"case must be 'V1' or 'V2', got {self.case!r}")

    @property
    def odd(self) -> bool:
        return self.parity == "odd"

    @property
    def n(self) -> int:
        return 2 * (self.k + self.m) + self.odd


@dataclass(frozen=True)
class QuantizationResult:
    n: int
    codebook: tuple[float, ...]
    error: float
    split: Optional[SplitConfig] = None

    @property
    def case(self) -> str:
        return self.split.case if self.split else "explicit"

    @property
    def k(self) -> int:
        """Codepoints in ``[0, 1/2]``."""
        return sum(1 for x in self.codebook if x <= HALF)

    @property
    def m(self) -> int:
        """Codepoints in ``(1/2, 3/4)``."""
        return sum(1 for x in self.codebook if HALF < x < CENTER)

    @property
    def left_half(self) -> tuple[float, ...]:
        """Codepoints up to and including the centre point when n is odd."""
        return self.codebook[: (self.n + 1) // 2]


def _sq(lo: float, hi: float, a: float) -> float:
    return ((hi - a) ** 3 - (lo - a) ** 3) / 3


def _symmetric(left: tuple[float, ...], odd: bool) -> tuple[float, ...]:
    if odd:
        return left + reflect(left[:-1])
    return left + reflect(left)


# -- small n -----------------------------------------------------------------

class _Cubic:
    """Bivariate polynomial ``sum c[i,j] x**i y**j`` with value/gradient/Hessian."""

    def __init__(self, coeffs: dict[tuple[int, int], float], scale: float = 1.0):
        self.c = {key: v / scale for key, v in coeffs.items()}

    def __call__(self, x: float, y: float) -> float:
        return sum(v * x ** i * y ** j for (i, j), v in self.c.items())

    def grad(self, x: float, y: float) -> np.ndarray:
        gx = sum(v * i * x ** (i - 1) * y ** j for (i, j), v in self.c.items() if i)
        gy = sum(v * j * x ** i * y ** (j - 1) for (i, j), v in self.c.items() if j)
        return np.array([gx, gy])

    def hess(self, x: float, y: float) -> np.ndarray:
        c = self.c.items()
        hxx = sum(v * i * (i - 1) * x ** (i - 2) * y ** j for (i, j), v in c if i > 1)
        hyy = sum(v * j * (j - 1) * x ** i * y ** (j - 2) for (i, j), v in c if j > 1)
        hxy = sum(v * i * j * x ** (i - 1) * y ** (j - 1) for (i, j), v in c if i and j)
        return np.array([[hxx, hxy], [hxy, hyy]])


# Distortion polynomials for the two free left-half points (a1, a2) when n = 4
# (codebook a1, a2, 3/2-a2, 3/2-a1) and n = 5 (a1, a2, 3/4, 3/2-a2, 3/2-a1),
# one per case region.  Regions are lists of (w1, w2, w0): w1*a1 + w2*a2 + w0 <= 0.
_P4_A = _Cubic({(3, 0): 24, (2, 1): 24, (1, 2): -24, (0, 3): -24, (0, 2): 96, (0, 1): -84, (0, 0): 23}, 96)
_P4_B = _Cubic({(3, 0): 48, (2, 1): 48, (2, 0): -48, (1, 0): 24, (1, 2): -48, (0, 3): -48,
                (0, 2): 144, (0, 1): -108, (0, 0): 23}, 96)
_P5_A = _Cubic({(3, 0): 192, (2, 1): 192, (1, 2): -192, (0, 2): 144, (0, 1): -108, (0, 0): 31}, 768)
_P5_B = _Cubic({(3, 0): 96, (2, 1): 96, (1, 2): -96, (0, 3): 96, (0, 2): -48, (0, 1): -12, (0, 0): 11}, 384)
_P5_C = _Cubic({(3, 0): 192, (2, 1): 192, (2, 0): -192, (1, 2): -192, (1, 0): 96, (0, 2): 144,
                (0, 1): -108, (0, 0): 11}, 384)

_POS = (-1.0, 0.0, 0.0)            # a1 >= 0
_ORDER = (1.0, -1.0, 0.0)          # a1 <= a2
_A1_LEFT = (1.0, 0.0, -HALF)       # a1 <= 1/2
_A2_LEFT = (0.0, 1.0, -HALF)       # a2 <= 1/2
_A2_RIGHT = (0.0, -1.0, HALF)      # a2 >= 1/2
_A2_MAX = (0.0, 1.0, -CENTER)      # a2 <= 3/4
_MID_LEFT = (1.0, 1.0, -1.0)       # (a1 + a2)/2 <= 1/2
_MID_RIGHT = (-1.0, -1.0, 1.0)     # (a1 + a2)/2 >= 1/2

SMALL_N_CASES: dict[int, dict[str, tuple[_Cubic, list[tuple[float, float, float]]]]] = {
    4: {
        "a2<=1/2": (_P4_A, [_POS, _ORDER, _A2_LEFT]),
        "a1<=1/2<a2, mid<=1/2": (_P4_A, [_POS, _A1_LEFT, _A2_RIGHT, _A2_MAX, _MID_LEFT]),
        "a1<=1/2<a2, mid>=1/2": (_P4_B, [_POS, _A1_LEFT, _A2_RIGHT, _A2_MAX, _MID_RIGHT]),
    },
    5: {
        "a2<=1/4": (_P5_A, [_POS, _ORDER, (0.0, 1.0, -0.25)]),
        "1/4<=a2<=1/2": (_P5_B, [_POS, _ORDER, (0.0, -1.0, 0.25), _A2_LEFT]),
        "a1<=1/2<a2, mid<=1/2": (_P5_B, [_POS, _A1_LEFT, _A2_RIGHT, _A2_MAX, _MID_LEFT]),
        "a1<=1/2<a2, mid>=1/2": (_P5_C, [_POS, _A1_LEFT, _A2_RIGHT, _A2_MAX, _MID_RIGHT]),
    },
}
# both points in (1/2, 3/4): the left piece alone then costs at least this much
_BOTH_RIGHT_BOUND = 1 / 24


def _inside(pt, region, tol=1e-12) -> bool:
    return all(w1 * pt[0] + w2 * pt[1] + w0 <= tol for w1, w2, w0 in region)


def _newton(poly: _Cubic, x0: np.ndarray, iters: int = 60) -> Optional[np.ndarray]:
    """Safeguarded Newton on grad = 0: backtracks until the gradient norm drops."""
    x = np.array(x0, dtype=float)
    g = poly.grad(*x)
    for _ in range(iters):
        gn = np.linalg.norm(g)
        if gn < 1e-15:
            return x
        try:
            step = np.linalg.solve(poly.hess(*x), g)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        while lam > 1e-6:
            trial = x - lam * step
            gt = poly.grad(*trial)
            if np.linalg.norm(gt) < gn:
                break
            lam /= 2
        else:
            return x if gn < 1e-12 else None
        x, g = trial, gt
        if np.abs(lam * step).max() < 1e-16:
            break
    return x if np.linalg.norm(g) < 1e-12 else None


def _edge_minimum(poly, region, i):
    """Minimum of ``poly`` along constraint ``i``'s line, within the region."""
    w1, w2, w0 = region[i]
    norm2 = w1 * w1 + w2 * w2
    p0 = np.array([-w0 * w1 / norm2, -w0 * w2 / norm2])
    u = np.array([-w2, w1])
    tlo, thi = -math.inf, math.inf
    for j, (v1, v2, v0) in enumerate(region):
        if j == i:
            continue
        slope = v1 * u[0] + v2 * u[1]
        offset = v1 * p0[0] + v2 * p0[1] + v0
        if abs(slope) < 1e-15:
            if offset > 1e-12:
                return None
            continue
        bound = -offset / slope
        if slope > 0:
            thi = min(thi, bound)
        else:
            tlo = max(tlo, bound)
    if tlo > thi:
        return None
    if thi - tlo < 1e-14:
        pt = p0 + tlo * u
        return poly(*pt), pt
    # exact cubic in t through four samples
    ts = np.linspace(tlo, thi, 4)
    coef = np.polyfit(ts - tlo, [poly(*(p0 + t * u)) for t in ts], 3)
    cands = [tlo, thi]
    for r in np.roots(np.polyder(coef)):
        if abs(r.imag) < 1e-12 and 0 <= r.real <= thi - tlo:
            cands.append(tlo + r.real)
    best = min(cands, key=lambda t: poly(*(p0 + t * u)))
    pt = p0 + best * u
    return poly(*pt), pt


def _minimize_on_region(poly: _Cubic, region) -> tuple[float, np.ndarray]:
    """Global minimum of a bivariate cubic over a bounded convex polygon."""
    cands = []
    for x0 in np.linspace(0.02, 0.73, 8):
        for y0 in np.linspace(0.02, 0.73, 8):
            pt = _newton(poly, (x0, y0))
            if pt is not None and _inside(pt, region):
                cands.append((poly(*pt), pt))
    for i in range(len(region)):
        hit = _edge_minimum(poly, region, i)
        if hit is not None:
            cands.append(hit)
    if not cands:
        raise ValueError("empty case region")
    return min(cands, key=lambda c: c[0])


@functools.lru_cache(maxsize=None)
def _small_n_cases(n: int) -> dict[str, tuple[float, tuple[float, float]]]:
    out = {}
    for name, (poly, region) in SMALL_N_CASES[n].items():
        val, pt = _minimize_on_region(poly, region)
        out[name] = (float(val), (float(pt[0]), float(pt[1])))
    return out


def small_n(n: int) -> QuantizationResult:
    """Optimal codebook for ``1 <= n <= 6``.

    n = 4 and n = 5 minimize the case-wise distortion polynomials of the two
    free left-half points over their case regions and keep the best case.
    """
    if n == 1:
        return QuantizationResult(1, (CENTER,), 7 / 48)
    if n == 2:
        return QuantizationResult(2, (7 / 16, 17 / 16), 37 / 768)
    if n == 3:
        return QuantizationResult(3, (0.25, CENTER, 1.25), 1 / 48)
    if n == 6:
        return QuantizationResult(6, (0.125, 0.375, 0.625, 0.875, 1.125, 1.375), 1 / 192)
    if n not in (4, 5):
        raise ValueError(f"small_n covers 1 <= n <= 6, got {n}")
    val, (a1, a2) = min(_small_n_cases(n).values())
    assert val < _BOTH_RIGHT_BOUND
    left = (a1, a2, CENTER) if n == 5 else (a1, a2)
    return QuantizationResult(n, _symmetric(left, n == 5), val)


# -- general (k, m) splits ---------------------------------------------------

def _v1_bounds(b1: float, k: int, m: int, odd: bool) -> tuple[float, float]:
    """Cell ``[c, d]`` of ``b_1`` when ``b_1``'s cell straddles 1/2."""
    c = 2 * k * b1 / (2 * k + 1)
    if odd:
        d = (CENTER + (2 * m - 1) * b1) / (2 * m)
    else:
        d = (CENTER + 2 * (m - 1) * b1) / (2 * m - 1)
    return c, d


def _v2_bounds(ak: float, k: int, m: int, odd: bool) -> tuple[float, float]:
    """Cell ``[e, c]`` of ``a_k`` when ``a_k``'s cell straddles 1/2."""
    e = ak * (2 * k - 2) / (2 * k - 1)
    if odd:
        c = (CENTER + (2 * m + 1) * ak) / (2 * m + 2)
    else:
        c = (CENTER + 2 * m * ak) / (2 * m + 1)
    return e, c


def _roots(g: Callable[[float], float], lo: float, hi: float) -> list[float]:
    xs = np.linspace(lo, hi, _SCAN + 1)
    gs = [g(x) for x in xs]
    roots = []
    for x0, x1, g0, g1 in zip(xs, xs[1:], gs, gs[1:]):
        if g0 == 0:
            roots.append(float(x0))
        elif g0 * g1 < 0:
            try:
                roots.append(brentq(g, x0, x1, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500))
            except RuntimeError as exc:
                raise SolverError(str(exc)) from exc
    if gs[-1] == 0:
        roots.append(float(xs[-1]))
    return roots


def _solve_v1(k: int, m: int, odd: bool, b1: float):
    c, d = _v1_bounds(b1, k, m, odd)
    if c > HALF + FEASIBILITY_TOL or b1 <= HALF or d > CENTER:
        return None
    left, _ = uniform_optimal(UniformPiece(0.0, c, 0.5), k)
    ak = left[-1]
    if odd:
        block = endpoint_constrained(UniformPiece(d, CENTER, 1.0), m - 1)[0] if m > 1 else (CENTER,)
    else:
        block = uniform_optimal(UniformPiece(d, CENTER, 1.0), m - 1)[0] if m > 1 else ()
    pts = left + (b1,) + block
    if m == 1:
        if odd:
            tail = _sq(HALF, (b1 + CENTER) / 2, b1) + _sq((b1 + CENTER) / 2, CENTER, CENTER)
        else:
            tail = _sq(HALF, CENTER, b1)
    else:
        b2 = block[0]
        tail = _sq(HALF, (b1 + b2) / 2, b1)
        if odd:
            tail += (3 - 4 * b2) ** 3 / (768 * (m - 1) ** 2) + (b2 - b1) ** 3 / 24
        else:
            tail += (3 - 2 * (b1 + b2)) ** 3 / (768 * (m - 1) ** 2)
    err = 2 * ((ak + b1) ** 3 / (192 * k * k) + 0.5 * _sq((ak + b1) / 2, HALF, b1) + tail)
    return pts, err


def _solve_v2(k: int, m: int, odd: bool, ak: float):
    e, c = _v2_bounds(ak, k, m, odd)
    if c < HALF - FEASIBILITY_TOL or ak > HALF or ak <= 0:
        return None
    left = uniform_optimal(UniformPiece(0.0, e, 0.5), k - 1)[0] if k > 1 else ()
    if odd:
        block = endpoint_constrained(UniformPiece(c, CENTER, 1.0), m)[0]
    else:
        block = uniform_optimal(UniformPiece(c, CENTER, 1.0), m)[0]
    b1 = block[0]
    pts = left + (ak,) + block
    head = (left[-1] + ak) ** 3 / (192 * (k - 1) ** 2) if k > 1 else 0.0
    mid = 0.5 * _sq(e, HALF, ak) + _sq(HALF, (ak + b1) / 2, ak)
    if odd:
        tail = (3 - 4 * b1) ** 3 / (768 * m * m) + (b1 - ak) ** 3 / 24
    else:
        tail = (3 - 2 * (ak + b1)) ** 3 / (768 * m * m)
    return pts, 2 * (head + mid + tail)


@functools.lru_cache(maxsize=4096)
def solve_split(config: SplitConfig) -> Optional[QuantizationResult]:
    """Stationary configuration for one (k, m, parity, case) branch.

    Returns ``None`` when the branch has no solution consistent with its own
    hypotheses (boundary on the wrong side of 1/2, points leaving their
    intervals).  Among several admissible roots the lowest error wins.
    """
    k, m, odd = config.k, config.m, config.odd
    if config.case == "V1":
        def g(b1):
            return conditional_mean(MIXTURE, *_v1_bounds(b1, k, m, odd)) - b1
        hi = min((2 * k + 1) / (4 * k) + _BRACKET_PAD, CENTER - _BRACKET_PAD)
        roots = _roots(g, HALF + _BRACKET_PAD, hi)
        build = _solve_v1
    else:
        def g(ak):
            return conditional_mean(MIXTURE, *_v2_bounds(ak, k, m, odd)) - ak
        lo = HALF - (1 / (4 * (2 * m + 1)) if odd else 1 / (8 * m)) - _BRACKET_PAD
        roots = _roots(g, lo, HALF)
        build = _solve_v2

    best = None
    for x in roots:
        sol = build(k, m, odd, x)
        if sol is None:
            continue
        left, err = sol
        if any(b <= a for a, b in zip(left, left[1:])) or left[0] <= 0:
            continue
        if best is None or err < best[1]:
            best = (left, err)
    if best is None:
        return None
    return QuantizationResult(config.n, _symmetric(best[0], odd), best[1], config)


def best_split(k: int, m: int, parity: str) -> QuantizationResult:
    """The lower-error case of a (k, m) split; V1 wins ties."""
    v1 = solve_split(SplitConfig(k, m, parity, "V1"))
    v2 = solve_split(SplitConfig(k, m, parity, "V2"))
    if v1 is None and v2 is None:
        raise InfeasibleSplitError(f"no admissible configuration for (k, m) = ({k}, {m}), {parity} n")
    if v2 is None or (v1 is not None and v1.error <= v2.error + TIE_TOL):
        return v1
    return v2


def split_error(k: int, m: int, parity: str) -> float:
    """min(V1(k, m), V2(k, m)), with an infeasible case counting as +inf."""
    return best_split(k, m, parity).error
