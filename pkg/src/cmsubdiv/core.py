"""Space-agnostic foundations: the average contract, sequences, parameter grids,
the piecewise average interpolant, delta and the sampled sup metric."""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field
from itertools import cycle
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .errors import ContractError, DomainError, UndefinedDeltaError

TOL = 1e-9

PARAM_OFFSETS = {"primal": 0.0, "dual": 0.25}


class Space(abc.ABC):
    """A metric space with a binary average ``A_w``.

    Subclasses must keep ``average(0, x, y) == x`` and ``average(1, x, y) == y``.
    """

    name: str = "abstract"
    intrinsic: bool = False
    euclidean_embedded: bool = False
    tol: float = TOL

    @abc.abstractmethod
    def distance(self, x, y) -> float: ...

    @abc.abstractmethod
    def average(self, w: float, x, y): ...

    def equal(self, x, y) -> bool:
        return self.distance(x, y) <= self.tol

    def reverse(self, x):
        """Orientation reversal of an element; identity unless elements are oriented."""
        return x

    def embed(self, x) -> np.ndarray:
        """Coordinates in R^n, for spaces that live inside a Euclidean space."""
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


@dataclass(frozen=True, eq=False)
class ElementSequence:
    elements: tuple
    closed: bool = False

    def __post_init__(self):
        if not isinstance(self.elements, tuple):
            object.__setattr__(self, "elements", tuple(self.elements))
        if len(self.elements) == 0:
            raise ContractError("empty sequence")

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, j):
        if self.closed and isinstance(j, (int, np.integer)):
            return self.elements[j % len(self.elements)]
        return self.elements[j]

    def __iter__(self):
        return iter(self.elements)

    def consecutive(self) -> list[tuple[Any, Any]]:
        """Consecutive pairs, wrapping around for closed sequences."""
        el = self.elements
        pairs = list(zip(el[:-1], el[1:]))
        if self.closed and len(el) > 1:
            pairs.append((el[-1], el[0]))
        return pairs

    def replace(self, j: int, value) -> "ElementSequence":
        el = list(self.elements)
        el[j] = value
        return ElementSequence(tuple(el), self.closed)


@dataclass(frozen=True, eq=False)
class ParamGrid:
    """Knots of one refinement level.

    ``first_index`` is the global (Z-indexed) index of ``knots[0]``; open
    sequences lose boundary points under refinement, and the global index keeps
    alignment with the bi-infinite formulas.  Closed grids carry a ``period``.
    """

    knots: tuple
    level: int = 0
    rule: str = "primal"
    zeta: float = 0.5
    first_index: int = 0
    period: float | None = None

    def __post_init__(self):
        k = tuple(float(t) for t in self.knots)
        object.__setattr__(self, "knots", k)
        if len(k) == 0:
            raise ContractError("empty parameter grid")
        if any(b <= a for a, b in zip(k[:-1], k[1:])):
            raise ContractError("knots must be strictly increasing")
        if self.period is not None and self.period <= k[-1] - k[0]:
            raise ContractError("period must exceed the knot span")
        if not 0.0 < self.zeta < 1.0:
            raise ContractError("zeta must lie in (0, 1)")

    @classmethod
    def uniform(cls, n: int, h: float = 1.0, t0: float = 0.0, closed: bool = False,
                rule: str = "primal") -> "ParamGrid":
        knots = t0 + h * np.arange(n)
        return cls(tuple(knots), rule=rule, period=n * h if closed else None)

    @property
    def closed(self) -> bool:
        return self.period is not None

    def __len__(self) -> int:
        return len(self.knots)

    def knot(self, g: int) -> float:
        """Knot at global index ``g`` (periodically extended for closed grids)."""
        i = g - self.first_index
        n = len(self.knots)
        if self.closed:
            q, r = divmod(i, n)
            return self.knots[r] + q * self.period
        if not 0 <= i < n:
            raise DomainError("global knot index outside grid", index=g)
        return self.knots[i]

    @property
    def mesh(self) -> float:
        gaps = np.diff(self.knots)
        if self.closed:
            gaps = np.append(gaps, self.knots[0] + self.period - self.knots[-1])
        return float(gaps.max()) if len(gaps) else 0.0

    @property
    def domain(self) -> tuple[float, float]:
        if self.closed:
            return self.knots[0], self.knots[0] + self.period
        return self.knots[0], self.knots[-1]

    def refine(self, count: int | None = None, skip: int = 0, offset: float | None = None,
               rule: str | None = None) -> "ParamGrid":
        """Apply the refinement rule R.

        New global knot ``g`` lies in parent interval ``g // 2`` at fraction
        ``(g % 2) / 2 + offset``; ``offset`` is 0 (primal) or 1/4 (dual) unless
        overridden.  ``skip`` drops leading knots (open-boundary trimming).
        """
        rule = rule or self.rule
        off = PARAM_OFFSETS[rule] if offset is None else offset
        if count is None:
            n = len(self.knots)
            count = 2 * n if self.closed else 2 * n - (1 if off == 0 else 2) - skip
        first = 2 * self.first_index + skip
        new = []
        for g in range(first, first + count):
            j, r = divmod(g, 2)
            frac = r / 2 + off
            t = self.knot(j)
            if frac > 0:
                t = t + frac * (self.knot(j + 1) - t)
            new.append(t)
        return ParamGrid(tuple(new), self.level + 1, rule, self.zeta, first, self.period)


def refine_parameters(grid: ParamGrid) -> ParamGrid:
    """One application of the grid's own refinement rule."""
    return grid.refine()


@dataclass(frozen=True, eq=False)
class LabeledSequence:
    """Points tagged with parameters; also usable as its piecewise average curve."""

    grid: ParamGrid
    points: ElementSequence
    space: Space | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.grid) != len(self.points):
            raise ContractError("grid and points differ in length",
                                knots=len(self.grid), points=len(self.points))
        if self.grid.closed != self.points.closed:
            raise ContractError("grid and points disagree on boundary policy")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def domain(self) -> tuple[float, float]:
        return self.grid.domain

    def __call__(self, t: float):
        if self.space is None:
            raise ContractError("labeled sequence has no space attached")
        return piecewise_average(self, self.space, t)

    def global_index(self, i: int) -> int:
        return self.grid.first_index + i


def delta(P: ElementSequence, space: Space) -> float:
    """Largest distance between consecutive elements (wrapping if closed)."""
    if len(P) < 2:
        raise UndefinedDeltaError("delta needs at least two elements", length=len(P))
    return max(space.distance(a, b) for a, b in P.consecutive())


def piecewise_average(Q: LabeledSequence, space: Space, t: float):
    """Evaluate the piecewise average interpolant of ``Q`` at ``t``."""
    knots = Q.grid.knots
    pts = Q.points
    n = len(knots)
    if Q.grid.closed:
        t0, period = knots[0], Q.grid.period
        t = t0 + math.fmod(t - t0, period)
        if t < t0:
            t += period
        ext = knots + (t0 + period,)
    else:
        lo, hi = knots[0], knots[-1]
        if not lo - 1e-12 <= t <= hi + 1e-12:
            raise DomainError("parameter outside interpolant domain", t=t, domain=(lo, hi))
        if n == 1:
            return pts[0]
        ext = knots
    j = int(np.searchsorted(ext, t, side="right")) - 1
    j = min(max(j, 0), len(ext) - 2)
    a, b = ext[j], ext[j + 1]
    if t == a:
        return pts[j]
    if t == b:
        return pts[(j + 1) % n]
    w = min(max((t - a) / (b - a), 0.0), 1.0)
    return space.average(w, pts[j], pts[(j + 1) % n])


@dataclass(frozen=True)
class FunctionCurve:
    """A curve given by a callable on a closed interval."""

    fn: Callable[[float], Any]
    domain: tuple[float, float]

    def __call__(self, t: float):
        return self.fn(t)


def sample_grid(a: float, b: float, samples: int) -> np.ndarray:
    if samples < 1:
        raise DomainError("samples must be positive", samples=samples)
    if samples == 1:
        return np.array([a])
    return np.linspace(a, b, samples)


def sup_distance(f, g, space: Space, samples: int = 2**10 + 1,
                 interval: tuple[float, float] | None = None) -> float:
    """Sampled approximation of the sup metric between two curves.

    Without ``interval`` both curves must share their domain.
    """
    da, db = f.domain, g.domain
    if interval is None:
        if abs(da[0] - db[0]) > 1e-9 or abs(da[1] - db[1]) > 1e-9:
            raise DomainError("curves have different domains", f=da, g=db)
        interval = da
    a, b = interval
    for lo, hi in (da, db):
        if a < lo - 1e-9 or b > hi + 1e-9:
            raise DomainError("interval not inside curve domain", interval=interval,
                              domain=(lo, hi))
    return max(space.distance(f(t), g(t)) for t in sample_grid(a, b, samples))


@dataclass
class AxiomReport:
    """Maximum violation per average axiom over the sampled inputs."""

    endpoint0: float
    endpoint1: float
    diagonal: float
    symmetry: float
    boundedness: float
    continuity: float
    symmetry_oriented: float
    samples: int

    AXIOMS = ("endpoint0", "endpoint1", "diagonal", "symmetry", "boundedness")

    @property
    def max_violation(self) -> float:
        return max(getattr(self, a) for a in self.AXIOMS)

    def failing(self, tol: float) -> list[str]:
        return [a for a in self.AXIOMS if getattr(self, a) > tol]

    def to_dict(self) -> dict:
        return {a: getattr(self, a) for a in (*self.AXIOMS, "continuity",
                                               "symmetry_oriented", "samples")}


def _cycle_omegas(pairs: Sequence, omegas: Iterable[float]):
    return zip(pairs, cycle(list(omegas)))


def check_average_axioms(space: Space, pairs: Sequence[tuple[Any, Any]],
                         omegas: Iterable[float], h: float = 1e-4) -> AxiomReport:
    """Measure violations of the five average axioms; never raises on violations.

    ω samples are cycled over the pairs.  The continuity entry is the largest
    difference quotient d(A_ω, A_{ω±h}) / (h · d(x, y)), reported, not bounded.
    ``symmetry_oriented`` compares A_ω(x, y) with rev(A_{1-ω}(rev y, rev x)); it
    coincides with ``symmetry`` for unoriented spaces.
    """
    e0 = e1 = diag = sym = symo = cont = 0.0
    bound = -math.inf
    n = 0
    d = space.distance
    for (x, y), w in _cycle_omegas(pairs, omegas):
        n += 1
        dxy = d(x, y)
        e0 = max(e0, d(space.average(0.0, x, y), x))
        e1 = max(e1, d(space.average(1.0, x, y), y))
        diag = max(diag, d(space.average(w, x, x), x))
        a = space.average(w, x, y)
        sym = max(sym, d(a, space.average(1.0 - w, y, x)))
        rev = space.reverse
        symo = max(symo, d(a, rev(space.average(1.0 - w, rev(y), rev(x)))))
        bound = max(bound, max(d(x, a), d(y, a)) - dxy)
        w2 = w + h if w + h <= 1.0 else w - h
        cont = max(cont, d(a, space.average(w2, x, y)) / (h * max(dxy, space.tol)))
    return AxiomReport(e0, e1, diag, sym, bound if n else 0.0, cont, symo, n)


@dataclass
class MetricPropertyReport:
    metric: float
    intermediate_value: float
    samples: int

    @property
    def max_violation(self) -> float:
        return max(self.metric, self.intermediate_value)

    def to_dict(self) -> dict:
        return {"metric": self.metric, "intermediate_value": self.intermediate_value,
                "samples": self.samples}


def check_metric_property(space: Space, pairs: Sequence[tuple[Any, Any]],
                          omegas: Iterable[float]) -> MetricPropertyReport:
    """Relative residuals of d(x, A_ω) = ω d(x, y) and of the intermediate-value identity."""
    if not space.intrinsic:
        raise ContractError("metric property check requires an intrinsic average",
                            space=space.name)
    m = iv = 0.0
    n = 0
    d = space.distance
    for (x, y), w in _cycle_omegas(pairs, omegas):
        n += 1
        dxy = d(x, y)
        a = space.average(w, x, y)
        scale = max(dxy, space.tol)
        dxa = d(x, a)
        m = max(m, abs(dxa - w * dxy) / scale)
        iv = max(iv, abs(dxa + d(a, y) - dxy) / scale)
    return MetricPropertyReport(m, iv, n)
