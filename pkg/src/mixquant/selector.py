"""Choosing how many left-half codepoints fall in ``[0, 1/2]``.

For n >= 5 the left half of an optimal codebook holds ``k`` points in
``[0, 1/2]`` and ``m = n//2 - k`` in ``(1/2, 3/4)``.  A closed-form seed
``a(n)`` lands near the right ``k``; a neighbour descent on the split error
finishes the job.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .mixed import InfeasibleSplitError, QuantizationResult, best_split, small_n

__all__ = ["SelectorTrace", "seed_sequence", "select_k", "solve", "split_value"]

# ratios closer than this to an integer are re-evaluated in exact arithmetic
_FLOOR_GUARD = 1e-9


def seed_sequence(n: int) -> int:
    """``a(1) = 0`` and ``a(n) = floor(h / sum_{j<=h} 1/j**2)`` with ``h = n // 2``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n == 1:
        return 0
    h = n // 2
    ratio = h / math.fsum(1.0 / (j * j) for j in range(1, h + 1))
    guess = math.floor(ratio)
    if ratio - guess < _FLOOR_GUARD or guess + 1 - ratio < _FLOOR_GUARD:
        exact = Fraction(h) / sum(Fraction(1, j * j) for j in range(1, h + 1))
        return math.floor(exact)
    return guess


@dataclass
class SelectorTrace:
    n: int
    a_n: int
    visited: list[tuple[int, float]] = field(default_factory=list)
    chosen_k: int = 0


def _parity(n: int) -> str:
    return "odd" if n % 2 else "even"


def split_value(n: int, k: int) -> float:
    """Split error for ``k`` points in ``[0, 1/2]``; +inf when no case is admissible."""
    try:
        return best_split(k, n // 2 - k, _parity(n)).error
    except InfeasibleSplitError:
        return math.inf


def select_k(n: int) -> tuple[int, SelectorTrace]:
    """Descend from ``a(n)`` to a ``k`` whose neighbours both have larger split error.

    Each accepted move restarts the neighbour comparison (downward first), so
    the walk can travel several steps.  Splits without an admissible solution
    count as +inf.
    """
    if n < 5:
        raise ValueError(f"select_k needs n >= 5, got {n}")
    h = n // 2
    trace = SelectorTrace(n=n, a_n=seed_sequence(n))
    if h == 2:
        # only (1, 1): the explicit five-point solution
        trace.visited.append((1, small_n(5).error))
        trace.chosen_k = 1
        return 1, trace

    cache: dict[int, float] = {}

    def value(k: int) -> float:
        if k not in cache:
            cache[k] = split_value(n, k)
            trace.visited.append((k, cache[k]))
        return cache[k]

    k = min(max(trace.a_n, 1), h - 1)
    while True:
        here = value(k)
        if k - 1 >= 1 and value(k - 1) < here:
            k -= 1
        elif k + 1 <= h - 1 and value(k + 1) < here:
            k += 1
        else:
            break
    if math.isinf(cache[k]):
        raise InfeasibleSplitError(f"no admissible split found for n = {n} near k = {k}")
    trace.chosen_k = k
    return k, trace


@functools.lru_cache(maxsize=1024)
def solve(n: int) -> QuantizationResult:
    """Optimal codebook and quantization error for ``n`` points."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n <= 5:
        return small_n(n)
    k, _ = select_k(n)
    return best_split(k, n // 2 - k, _parity(n))
