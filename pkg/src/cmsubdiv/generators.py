"""Deterministic synthetic data and curve samplers.

Every generator takes a seed and returns ``(document, metadata)``; curve
samplers record their Lipschitz constant in the metadata.
"""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ElementSequence
from .errors import DomainError
from .io import encode
from .spaces import DiscreteMeasure1D, FiniteCompactSet, HermitePair, unit


@dataclass(frozen=True)
class Curve:
    """Parameterized curve with its Lipschitz constant in the target space's metric."""

    name: str
    space: str
    fn: Callable[[float], object]
    lipschitz: float
    t_range: tuple[float, float]
    closed: bool

    def __call__(self, t: float):
        return self.fn(t)

    def sample(self, n: int) -> ElementSequence:
        a, b = self.t_range
        ts = (a + (b - a) * np.arange(n) / n if self.closed else np.linspace(a, b, n))
        return ElementSequence([self.fn(float(t)) for t in ts], self.closed)


def great_circle(phase: float = 0.0) -> Curve:
    """Unit-speed great circle in the xy-plane of S^2."""
    return Curve("great-circle", "sphere",
                 lambda t: np.array([math.cos(t + phase), math.sin(t + phase), 0.0]),
                 1.0, (0.0, 2 * math.pi), True)


def small_circle(colatitude: float = math.pi / 6) -> Curve:
    """Unit-speed circle of latitude on S^2; length 2 pi sin(colatitude)."""
    r, z = math.sin(colatitude), math.cos(colatitude)
    return Curve("small-circle", "sphere",
                 lambda t: np.array([r * math.cos(t / r), r * math.sin(t / r), z]),
                 1.0, (0.0, 2 * math.pi * r), True)


def line(direction=(1.0, 0.0), origin=None, length: float = 1.0) -> Curve:
    d = np.asarray(direction, dtype=float)
    o = np.zeros_like(d) if origin is None else np.asarray(origin, dtype=float)
    return Curve("line", "euclidean", lambda t: o + t * d, float(np.linalg.norm(d)),
                 (0.0, length), False)


def helix(radius: float = 1.0, pitch: float = 0.5, turns: float = 1.0) -> Curve:
    c = math.hypot(radius, pitch)

    def fn(t):
        s = t / c
        return np.array([radius * math.cos(s), radius * math.sin(s), pitch * s])

    return Curve("helix", "euclidean", fn, 1.0, (0.0, 2 * math.pi * turns * c), False)


def dirac_path(length: float = 1.0) -> Curve:
    """t -> point mass at t; a unit-speed geodesic for every W_p."""
    return Curve("dirac-path", "wasserstein", DiscreteMeasure1D.dirac, 1.0, (0.0, length), False)


CURVES: dict[str, Callable[..., Curve]] = {
    "great-circle": great_circle,
    "small-circle": small_circle,
    "line": line,
    "helix": helix,
    "dirac-path": dirac_path,
}


def make_curve(curve_id: str, **params) -> Curve:
    try:
        return CURVES[curve_id](**params)
    except KeyError:
        raise DomainError(f"unknown curve id {curve_id!r}", curve=curve_id) from None
    except TypeError as exc:
        raise DomainError(f"bad parameters for curve {curve_id!r}: {exc}") from None


# --- data generators -----------------------------------------------------------------------

def circle_hermite(rng, n: int = 8, radius: float = 1.0, phase: float | None = None,
                   closed: bool = True):
    """Samples of a circle with exact unit tangents, counterclockwise."""
    phase = float(rng.uniform(0, 2 * math.pi)) if phase is None else phase
    ang = phase + 2 * math.pi * np.arange(n) / n
    pairs = [HermitePair(radius * np.array([math.cos(a), math.sin(a)]),
                         np.array([-math.sin(a), math.cos(a)])) for a in ang]
    return encode("hermite", ElementSequence(pairs, closed)), {"lipschitz": 1.0,
                                                                "radius": radius}


def helix_hermite(rng, n: int = 16, radius: float = 1.0, pitch: float = 0.5,
                  turns: float = 1.0):
    c = math.hypot(radius, pitch)
    s = np.linspace(0.0, 2 * math.pi * turns, n)
    pairs = [HermitePair(np.array([radius * math.cos(u), radius * math.sin(u), pitch * u]),
                         np.array([-radius * math.sin(u), radius * math.cos(u), pitch]) / c)
             for u in s]
    return encode("hermite", ElementSequence(pairs)), {"lipschitz": 1.0}


def _rotate_in_plane(v: np.ndarray, w: np.ndarray, angle: float) -> np.ndarray:
    """Rotate unit v by angle toward the component of w orthogonal to v."""
    u = w - np.dot(w, v) * v
    u = u / np.linalg.norm(u)
    return math.cos(angle) * v + math.sin(angle) * u


def hermite_random(rng, n: int = 10, dim: int = 2, delta: float = 0.1):
    """Random Hermite data whose delta (mixed metric) equals ``delta``.

    Gap lengths and turning angles are drawn on a unit scale and multiplied by
    ``delta``, so families indexed by ``delta`` share a shape and delta scales
    linearly.
    """
    if n < 2:
        raise DomainError("need at least two pairs", n=n)
    a = rng.uniform(0.2, 1.0, n - 1)
    b = rng.uniform(0.2, 1.0, n - 1)
    norm = np.hypot(a, b).max()
    gaps, turns = delta * a / norm, delta * b / norm
    p = np.zeros(dim)
    v = unit(rng.normal(size=dim))
    pairs = [HermitePair(p, v)]
    for g, th in zip(gaps, turns):
        step = unit(rng.normal(size=dim))
        p = p + g * step
        v = _rotate_in_plane(v, rng.normal(size=dim), th)
        pairs.append(HermitePair(p, v))
    return encode("hermite", ElementSequence(pairs)), {"delta": delta}


def hermite_domain(rng, n: int = 8, dim: int = 2, bound: float = 1.0):
    """Random Hermite data with every point gap and every tangent angle below ``bound``."""
    p = np.zeros(dim)
    v = unit(rng.normal(size=dim))
    pairs = [HermitePair(p, v)]
    for _ in range(n - 1):
        p = p + rng.uniform(0, bound) * unit(rng.normal(size=dim))
        v = _rotate_in_plane(v, rng.normal(size=dim), rng.uniform(0, bound))
        pairs.append(HermitePair(p, v))
    return encode("hermite", ElementSequence(pairs)), {"bound": bound}


def random_walk(rng, n: int = 10, dim: int = 2, step: float = 1.0, closed: bool = False):
    pts = np.cumsum(step * rng.normal(size=(n, dim)), axis=0)
    doc = encode("euclidean", ElementSequence(list(pts), closed))
    return doc, {}


def sphere_points(rng, n: int = 8, spread: float = 0.5, closed: bool = False):
    """Random points in a cap of angular radius about ``spread`` around the north pole."""
    pts = [unit(np.array([*(spread * rng.normal(size=2)), 1.0])) for _ in range(n)]
    return encode("sphere", ElementSequence(pts, closed)), {}


def great_circle_points(rng, n: int = 8, tilt: bool = True):
    """Equispaced samples of a (randomly rotated) great circle."""
    Q = np.linalg.qr(rng.normal(size=(3, 3)))[0] if tilt else np.eye(3)
    ang = 2 * math.pi * np.arange(n) / n
    pts = [unit(Q @ np.array([math.cos(a), math.sin(a), 0.0])) for a in ang]
    return encode("sphere", ElementSequence(pts, True)), {"lipschitz": 1.0}


def point_cloud_tube(rng, n: int = 6, m: int = 5, radius: float = 0.2, dim: int = 2,
                     step: float = 1.0):
    """Finite clouds scattered around consecutive points of a straight path."""
    sets = []
    for j in range(n):
        center = np.zeros(dim)
        center[0] = j * step
        sets.append(FiniteCompactSet(center + radius * rng.uniform(-1, 1, size=(m, dim))))
    return encode("sets", ElementSequence(sets)), {}


def gaussian_mixture(rng, n: int = 6, atoms: int = 5, components: int = 2,
                     drift: float = 0.5, width: float = 0.3):
    """Quantized Gaussian mixtures whose component means drift along the sequence."""
    base = rng.normal(size=components)
    weights = rng.dirichlet(np.ones(components))
    measures = []
    for j in range(n):
        comp = rng.choice(components, size=atoms, p=weights)
        x = base[comp] + j * drift + width * rng.normal(size=atoms)
        w = rng.uniform(0.5, 1.5, size=atoms)
        measures.append(DiscreteMeasure1D(x, w / w.sum()))
    return encode("wasserstein", ElementSequence(measures)), {}


GENERATORS: dict[str, Callable] = {
    "circle-hermite": circle_hermite,
    "helix-hermite": helix_hermite,
    "hermite-random": hermite_random,
    "hermite-domain": hermite_domain,
    "random-walk": random_walk,
    "sphere-points": sphere_points,
    "great-circle": great_circle_points,
    "point-cloud-tube": point_cloud_tube,
    "gaussian-mixture": gaussian_mixture,
}


def generate(generator_id: str, seed: int, **params) -> tuple[dict, dict]:
    """Run a generator with ``np.random.default_rng(seed)``."""
    try:
        fn = GENERATORS[generator_id]
    except KeyError:
        raise DomainError(f"unknown generator id {generator_id!r}",
                          generator=generator_id) from None
    allowed = set(inspect.signature(fn).parameters) - {"rng"}
    extra = set(params) - allowed
    if extra:
        raise DomainError(f"unknown parameters for generator {generator_id!r}",
                          parameters=sorted(extra))
    doc, meta = fn(np.random.default_rng(seed), **params)
    meta = {"generator": generator_id, "seed": seed, "params": params, **meta}
    return doc, meta
