"""Unit sphere S^{n-1} with the great-circle distance and slerp."""

from __future__ import annotations

import math

import numpy as np

from ..core import Space
from ..errors import DomainError, GeodesicError

ANTIPODAL_TOL = 1e-8


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0.0:
        raise DomainError("cannot normalize a zero or non-finite vector")
    # leave already-unit vectors untouched so parse/serialize round-trips are exact
    if abs(n - 1.0) <= 4 * np.finfo(float).eps:
        return v.copy()
    return v / n


def sphere_distance(v, u) -> float:
    """Great-circle angle, via 2*atan2(|v-u|, |v+u|) (stable near 0 and pi)."""
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    if v.shape != u.shape:
        raise DomainError("dimension mismatch", shapes=(v.shape, u.shape))
    return 2.0 * math.atan2(np.linalg.norm(v - u), np.linalg.norm(v + u))


def sphere_average(w: float, v, u, antipodal_tol: float = ANTIPODAL_TOL) -> np.ndarray:
    """Spherical linear interpolation s_w(v, u); A_0 = v, A_1 = u."""
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    theta = sphere_distance(v, u)
    if theta > math.pi - antipodal_tol:
        raise GeodesicError("antipodal points have no unique geodesic", theta=theta)
    if w == 0.0 or theta == 0.0:
        return v.copy()
    if w == 1.0:
        return u.copy()
    s = math.sin(theta)
    out = (math.sin((1.0 - w) * theta) / s) * v + (math.sin(w * theta) / s) * u
    return out / np.linalg.norm(out)


class SphereSpace(Space):
    name = "sphere"
    intrinsic = True
    euclidean_embedded = True

    def __init__(self, tol: float = 1e-9, antipodal_tol: float = ANTIPODAL_TOL):
        self.tol = tol
        self.antipodal_tol = antipodal_tol

    def distance(self, x, y) -> float:
        return sphere_distance(x, y)

    def average(self, w, x, y):
        return sphere_average(w, x, y, self.antipodal_tol)

    def embed(self, x):
        return np.asarray(x, dtype=float)
