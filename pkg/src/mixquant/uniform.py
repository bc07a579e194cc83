"""Optimal quantizers for a constant density on a closed interval."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["UniformPiece", "uniform_optimal", "endpoint_constrained"]


@dataclass(frozen=True)
class UniformPiece:
    """Density level ``t`` on ``[a, b]``. ``t`` need not make the piece a probability."""

    a: float
    b: float
    t: float = 1.0

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"degenerate piece [{self.a!r}, {self.b!r}]")
        if self.t < 0:
            raise ValueError("density level must be nonnegative")

    @property
    def length(self) -> float:
        return self.b - self.a


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"number of codepoints must be positive, got {n}")


def uniform_optimal(piece: UniformPiece, n: int) -> tuple[tuple[float, ...], float]:
    """Optimal n-point codebook and its error on a constant piece.

    Codepoints sit at the centres of n equal cells; the error is
    ``t * L**3 / (12 n**2)`` with ``L`` the piece length.
    """
    _check_n(n)
    a, length = piece.a, piece.length
    points = tuple(a + (2 * j - 1) * length / (2 * n) for j in range(1, n + 1))
    return points, length ** 3 * piece.t / (12 * n * n)


def endpoint_constrained(
    piece: UniformPiece, n: int, side: str = "right"
) -> tuple[tuple[float, ...], float, float]:
    """Best ``n + 1`` points on a constant piece when one of them is pinned to an end.

    With the right end ``b`` pinned, the ``n`` free points are equally spaced at
    ``a + (2j-1)(b - a1)/(2n)`` and the gap before ``b`` is twice the gap
    ``a1 - a``; together these force ``a1 = a + (b - a)/(2n + 1)``.

    Returns ``(codebook, a1, error)`` where ``a1`` is the free point nearest
    the unpinned end. ``side="left"`` pins ``a`` instead (mirror image).
    """
    _check_n(n)
    if side == "left":
        mirrored = UniformPiece(-piece.b, -piece.a, piece.t)
        points, first, err = endpoint_constrained(mirrored, n, "right")
        return tuple(-x for x in reversed(points)), -first, err
    if side != "right":
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")

    a, b, t = piece.a, piece.b, piece.t
    first = a + piece.length / (2 * n + 1)
    span = b - first
    free = tuple(a + (2 * j - 1) * span / (2 * n) for j in range(1, n + 1))
    err = t / (12 * n * n) * span ** 3 + t / 3 * (first - a) ** 3
    return free + (b,), first, err
