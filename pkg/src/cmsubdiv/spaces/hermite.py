"""Hermite pairs (point, unit tangent) in R^n x S^{n-1}.

The Bezier average is not known to be intrinsic for any metric, so the space
is registered non-intrinsic; distances use the mixed l2 metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import Space
from ..errors import DegenerateTangentError, DomainError
from .sphere import ANTIPODAL_TOL, sphere_average, sphere_distance, unit


@dataclass(frozen=True, eq=False)
class HermitePair:
    p: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if not np.all(np.isfinite(p)):
            raise DomainError("non-finite Hermite point")
        v = unit(self.v)
        if p.shape != v.shape:
            raise DomainError("point and tangent dimensions differ", shapes=(p.shape, v.shape))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "v", v)

    @property
    def dim(self) -> int:
        return self.p.shape[0]

    def reversed(self) -> "HermitePair":
        return HermitePair(self.p, -self.v)

    def __repr__(self) -> str:
        return f"HermitePair(p={self.p.tolist()}, v={self.v.tolist()})"


def hermite_distance(a: HermitePair, b: HermitePair) -> float:
    if a.dim != b.dim:
        raise DomainError("dimension mismatch", dims=(a.dim, b.dim))
    return math.hypot(float(np.linalg.norm(a.p - b.p)), sphere_distance(a.v, b.v))


def alpha(a: HermitePair, b: HermitePair) -> float:
    """|p1 - p0| / cos^2(theta / 4), the scale of the circle-preserving correction."""
    theta = sphere_distance(a.v, b.v)
    return float(np.linalg.norm(b.p - a.p)) / math.cos(theta / 4.0) ** 2


def bezier_controls(a: HermitePair, b: HermitePair, c: float):
    return a.p, a.p + c * a.v, b.p - c * b.v, b.p


def hermite_average(w: float, a: HermitePair, b: HermitePair,
                    c: float | None = None) -> HermitePair:
    """Value and unit tangent of the cubic Bezier through the two pairs, at t = w.

    ``c`` defaults to alpha/3, the choice that makes the midpoint coincide
    with the circle-preserving refinement rule.
    """
    if a.dim != b.dim:
        raise DomainError("dimension mismatch", dims=(a.dim, b.dim))
    if np.array_equal(a.p, b.p) and np.array_equal(a.v, b.v):
        return a
    if c is None:
        c = alpha(a, b) / 3.0
    if c <= 0:
        raise DomainError("Bezier parameter c must be positive", c=c)
    P0, P1, P2, P3 = bezier_controls(a, b, c)
    s = 1.0 - w
    point = s**3 * P0 + 3 * s * s * w * P1 + 3 * s * w * w * P2 + w**3 * P3
    deriv = 3 * s * s * (P1 - P0) + 6 * s * w * (P2 - P1) + 3 * w * w * (P3 - P2)
    norm = np.linalg.norm(deriv)
    scale = max(np.abs(np.stack([P0, P1, P2, P3])).max(), 1.0)
    if norm <= 1e-14 * scale:
        raise DegenerateTangentError("Bezier derivative vanishes", w=w)
    return HermitePair(point, deriv / norm)


def product_average(w: float, a: HermitePair, b: HermitePair,
                    antipodal_tol: float = ANTIPODAL_TOL) -> HermitePair:
    """Arithmetic average of points, slerp of tangents; intrinsic for the mixed metric."""
    if w == 0.0:
        return a
    if w == 1.0:
        return b
    return HermitePair((1.0 - w) * a.p + w * b.p, sphere_average(w, a.v, b.v, antipodal_tol))


class HermiteSpace(Space):
    """Bezier average; ``c=None`` selects the data-driven alpha/3."""

    name = "hermite"
    intrinsic = False

    def __init__(self, c: float | None = None, tol: float = 1e-9):
        self.c = c
        self.tol = tol

    def distance(self, x, y) -> float:
        return hermite_distance(x, y)

    def average(self, w, x, y):
        return hermite_average(w, x, y, self.c)

    def reverse(self, x: HermitePair) -> HermitePair:
        return x.reversed()

    def __repr__(self) -> str:
        return f"HermiteSpace(c={self.c})"


class HermiteProductSpace(HermiteSpace):
    """Same metric, product (point-wise arithmetic, tangent-wise geodesic) average."""

    name = "hermite-product"
    intrinsic = True

    def __init__(self, tol: float = 1e-9):
        super().__init__(None, tol)

    def average(self, w, x, y):
        return product_average(w, x, y)

    def reverse(self, x):
        return x

    def __repr__(self) -> str:
        return "HermiteProductSpace()"
