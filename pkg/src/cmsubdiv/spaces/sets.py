"""Finite nonempty subsets of R^n with the Hausdorff metric and the metric average."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Space
from ..errors import DomainError

TIE_RTOL = 1e-12


def _dedupe(points: np.ndarray, tol: float) -> np.ndarray:
    order = np.lexsort(points.T[::-1])
    pts = points[order]
    if len(pts) < 2:
        return pts
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    keep = np.ones(len(pts), dtype=bool)
    for i in range(len(pts)):
        if keep[i]:
            dup = d[i] <= tol
            dup[: i + 1] = False
            keep &= ~dup
    return pts[keep]


@dataclass(frozen=True, eq=False)
class FiniteCompactSet:
    """Point cloud in canonical form: lexicographically sorted, duplicates removed."""

    points: np.ndarray
    tol: float = 1e-9

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or len(pts) == 0:
            raise DomainError("a compact set needs at least one point", shape=pts.shape)
        if not np.all(np.isfinite(pts)):
            raise DomainError("non-finite point in set")
        pts = _dedupe(pts, self.tol)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __repr__(self) -> str:
        return f"FiniteCompactSet({self.points.tolist()})"


@dataclass(frozen=True)
class MetricPairSet:
    """Index pairs into (A, B) together with the corresponding points."""

    index_pairs: tuple[tuple[int, int], ...]
    a: np.ndarray
    b: np.ndarray

    def __len__(self) -> int:
        return len(self.index_pairs)

    def as_points(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return list(zip(self.a, self.b))

    def lengths(self) -> np.ndarray:
        diff = self.a - self.b
        return np.sqrt(np.sum(diff * diff, axis=1))


def _distance_matrix(A: FiniteCompactSet, B: FiniteCompactSet) -> np.ndarray:
    if A.dim != B.dim:
        raise DomainError("dimension mismatch", dims=(A.dim, B.dim))
    diff = A.points[:, None, :] - B.points[None, :, :]
    # plain sqrt of the coordinate-ordered sum of squares, reproducible by scalar code
    return np.sqrt(np.sum(diff * diff, axis=-1))


def set_metric_pairs(A: FiniteCompactSet, B: FiniteCompactSet,
                     rtol: float = TIE_RTOL) -> MetricPairSet:
    """All (a, b) with b nearest to a in B, or a nearest to b in A; ties kept."""
    D = _distance_matrix(A, B)
    near_b = D <= D.min(axis=1, keepdims=True) * (1 + rtol)
    near_a = D <= D.min(axis=0, keepdims=True) * (1 + rtol)
    ii, jj = np.nonzero(near_a | near_b)
    return MetricPairSet(tuple(zip(ii.tolist(), jj.tolist())), A.points[ii], B.points[jj])


def hausdorff_distance(A: FiniteCompactSet, B: FiniteCompactSet) -> float:
    pairs = set_metric_pairs(A, B)
    return float(pairs.lengths().max())


def set_metric_average(w: float, A: FiniteCompactSet, B: FiniteCompactSet,
                       tol: float = 1e-9) -> FiniteCompactSet:
    """{(1-w) a + w b : (a, b) metric pair}; oriented so that A_0 = A and A_1 = B."""
    pairs = set_metric_pairs(A, B)
    return FiniteCompactSet((1.0 - w) * pairs.a + w * pairs.b, tol)


class SetSpace(Space):
    name = "sets"
    intrinsic = True

    def __init__(self, tol: float = 1e-9):
        self.tol = tol

    def distance(self, x, y) -> float:
        return hausdorff_distance(x, y)

    def average(self, w, x, y):
        return set_metric_average(w, x, y, self.tol)
