"""Finitely supported probability measures on R with W_p and displacement interpolation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Space
from ..errors import DomainError

MERGE_TOL = 1e-12
MASS_TOL = 1e-12
LEVEL_TOL = 1e-14


def _merge(x: np.ndarray, w: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(x, kind="stable")
    x, w = x[order], w[order]
    starts = np.flatnonzero(np.r_[True, np.diff(x) > tol])
    sizes = np.diff(np.append(starts, len(x)))
    masses = np.add.reduceat(w, starts)
    locs = np.where(sizes == 1, x[starts], np.add.reduceat(x * w, starts) / masses)
    return locs, masses


@dataclass(frozen=True, eq=False)
class DiscreteMeasure1D:
    """Atoms sorted by location, locations closer than ``MERGE_TOL`` merged."""

    locations: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.locations, dtype=float))
        w = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if x.shape != w.shape or x.ndim != 1 or len(x) == 0:
            raise DomainError("locations and masses must be equal-length nonempty vectors")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise DomainError("non-finite atom")
        if np.any(w <= 0):
            raise DomainError("atom masses must be positive")
        x, w = _merge(x, w, MERGE_TOL)
        x.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "locations", x)
        object.__setattr__(self, "masses", w)

    @classmethod
    def from_atoms(cls, atoms, normalize: bool = False) -> "DiscreteMeasure1D":
        x, w = zip(*atoms)
        w = np.asarray(w, dtype=float)
        if normalize:
            w = w / w.sum()
        return cls(np.asarray(x, dtype=float), w)

    @classmethod
    def dirac(cls, x: float) -> "DiscreteMeasure1D":
        return cls(np.array([x]), np.array([1.0]))

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def is_normalized(self) -> bool:
        return abs(self.total_mass - 1.0) <= MASS_TOL

    def __len__(self) -> int:
        return len(self.locations)

    def __repr__(self) -> str:
        return f"DiscreteMeasure1D({list(zip(self.locations.tolist(), self.masses.tolist()))})"


@dataclass(frozen=True)
class MonotoneCoupling:
    """Chunks (x, y, mass) of the quantile coupling; x and y both nondecreasing."""

    x: np.ndarray
    y: np.ndarray
    mass: np.ndarray

    def chunks(self) -> list[tuple[float, float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist(), self.mass.tolist()))

    def __len__(self) -> int:
        return len(self.mass)


def _require_normalized(*measures: DiscreteMeasure1D):
    for m in measures:
        if not m.is_normalized:
            raise DomainError("measure is not normalized", total_mass=m.total_mass)


def quantile_coupling(mu: DiscreteMeasure1D, nu: DiscreteMeasure1D) -> MonotoneCoupling:
    """Monotone rearrangement: match mass in CDF order."""
    _require_normalized(mu, nu)
    ca = np.cumsum(mu.masses)
    cb = np.cumsum(nu.masses)
    ca[-1] = cb[-1] = 1.0
    levels = np.unique(np.concatenate([ca, cb]))
    kept = []
    prev = 0.0
    for lv in levels:
        if lv - prev > LEVEL_TOL:
            kept.append(lv)
            prev = lv
    kept[-1] = 1.0
    levels = np.asarray(kept)
    lower = np.concatenate([[0.0], levels[:-1]])
    mid = 0.5 * (lower + levels)
    ia = np.minimum(np.searchsorted(ca, mid, side="left"), len(ca) - 1)
    ib = np.minimum(np.searchsorted(cb, mid, side="left"), len(cb) - 1)
    return MonotoneCoupling(mu.locations[ia], nu.locations[ib], levels - lower)


def wasserstein_distance(mu: DiscreteMeasure1D, nu: DiscreteMeasure1D, p: float = 2.0) -> float:
    if p < 1:
        raise DomainError("Wasserstein order must be >= 1", p=p)
    g = quantile_coupling(mu, nu)
    cost = float(np.sum(g.mass * np.abs(g.x - g.y) ** p))
    return cost ** (1.0 / p)


def wasserstein_average(w: float, mu: DiscreteMeasure1D,
                        nu: DiscreteMeasure1D) -> DiscreteMeasure1D:
    """Push the optimal coupling through (a, b) -> (1-w) a + w b."""
    g = quantile_coupling(mu, nu)
    return DiscreteMeasure1D((1.0 - w) * g.x + w * g.y, g.mass)


class WassersteinSpace(Space):
    name = "wasserstein"
    intrinsic = True

    def __init__(self, p: float = 2.0, tol: float = 1e-9):
        if p < 1:
            raise DomainError("Wasserstein order must be >= 1", p=p)
        self.p = p
        self.tol = tol

    def distance(self, x, y) -> float:
        return wasserstein_distance(x, y, self.p)

    def average(self, w, x, y):
        return wasserstein_average(w, x, y)

    def __repr__(self) -> str:
        return f"WassersteinSpace(p={self.p})"
