"""Refinement operators and the subdivision driver.

Finite sequences stand in for bi-infinite ones.  Closed sequences wrap;
open sequences only emit outputs whose whole stencil exists, and the grid's
``first_index`` records where the surviving outputs sit in Z-indexing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import ElementSequence, LabeledSequence, ParamGrid, Space
from .errors import (CapabilityError, ContractError, DomainError, InsufficientDataError,
                     NumericalError)
from .spaces.euclidean import EuclideanSpace
from .spaces.hermite import HermiteSpace, alpha, product_average
from .spaces.sphere import sphere_average


def _avg(space: Space, w: float, x, y, index: int, op: str):
    try:
        return space.average(w, x, y)
    except NumericalError as exc:
        exc.context.setdefault("operation", op)
        exc.context.setdefault("index", index)
        raise


def _pairs(P: ElementSequence):
    n = len(P)
    m = n if P.closed else n - 1
    return [(j, P[j], P[(j + 1) % n]) for j in range(m)]


def elementary_refine(P: ElementSequence, space: Space) -> ElementSequence:
    """Keep every point, insert the midpoint average between neighbours."""
    out = []
    for j, a, b in _pairs(P):
        out += [a, _avg(space, 0.5, a, b, j, "elementary_refine")]
    if not P.closed:
        out.append(P[len(P) - 1])
    return ElementSequence(out, P.closed)


def averaged_refine(P: ElementSequence, space: Space, omega: float = 0.5) -> ElementSequence:
    """Elementary step followed by one extra round of omega-averaging (corner cutting)."""
    if not 0.0 < omega < 1.0:
        raise DomainError("omega must lie in (0, 1)", omega=omega)
    out = []
    for j, a, b in _pairs(P):
        m = _avg(space, 0.5, a, b, j, "averaged_refine")
        out += [_avg(space, omega, a, m, j, "averaged_refine"),
                _avg(space, omega, m, b, j, "averaged_refine")]
    return ElementSequence(out, P.closed)


def midpoint_round(Q: ElementSequence, space: Space) -> ElementSequence:
    return ElementSequence([_avg(space, 0.5, a, b, j, "midpoint_round")
                            for j, a, b in _pairs(Q)], Q.closed)


def lane_riesenfeld_refine(P: ElementSequence, space: Space, rounds: int = 1) -> ElementSequence:
    """Elementary step followed by ``rounds`` midpoint smoothing rounds."""
    if rounds < 0:
        raise DomainError("rounds must be nonnegative", rounds=rounds)
    Q = elementary_refine(P, space)
    for _ in range(rounds):
        if len(Q) < 2:
            raise InsufficientDataError("sequence too short for another smoothing round",
                                        length=len(Q))
        Q = midpoint_round(Q, space)
    return Q


def _require_hermite(space: Space | None, op: str):
    if space is not None and not isinstance(space, HermiteSpace):
        raise CapabilityError(f"{op} needs Hermite data", space=space.name)


def hermite_naive_refine(P: ElementSequence, space: Space | None = None) -> ElementSequence:
    """Midpoint of points, geodesic midpoint of tangents."""
    _require_hermite(space, "hermite_naive_refine")
    out = []
    for j, a, b in _pairs(P):
        try:
            mid = product_average(0.5, a, b)
        except NumericalError as exc:
            exc.context.update(operation="hermite_naive_refine", index=j)
            raise
        out += [a, mid]
    if not P.closed:
        out.append(P[len(P) - 1])
    return ElementSequence(out, P.closed)


def hermite_bezier_odd(a, b):
    """Odd rule of the circle-preserving Hermite scheme."""
    from .spaces.hermite import HermitePair

    al = alpha(a, b)
    p = 0.5 * (a.p + b.p) - (al / 8.0) * (b.v - a.v)
    return HermitePair(p, sphere_average(0.5, a.v, b.v))


def hermite_bezier_refine(P: ElementSequence, space: Space | None = None) -> ElementSequence:
    """Interpolatory Hermite scheme whose odd points come from a cubic Bezier midpoint."""
    _require_hermite(space, "hermite_bezier_refine")
    out = []
    for j, a, b in _pairs(P):
        try:
            mid = hermite_bezier_odd(a, b)
        except NumericalError as exc:
            exc.context.update(operation="hermite_bezier_refine", index=j)
            raise
        out += [a, mid]
    if not P.closed:
        out.append(P[len(P) - 1])
    return ElementSequence(out, P.closed)


def _lr_locality(rounds: int) -> int:
    lo = math.floor(-(rounds // 2) / 2)
    hi = math.ceil((1 + rounds - rounds // 2) / 2)
    return max(-lo, hi)


@dataclass(frozen=True)
class Scheme:
    """A refinement operator with its parameter rule.

    ``offset`` is the fraction of the parent interval at which the first child
    knot sits (0 primal, 1/4 dual); ``skip`` counts leading children that a
    smoothing round consumes.
    """

    name: str
    rule: Callable[[ElementSequence, Space], ElementSequence]
    locality: int
    offset: float = 0.0
    skip: int = 0
    interpolatory: bool = False
    requires: str | None = None
    params: dict = field(default_factory=dict)

    @property
    def param_rule(self) -> str:
        if self.offset == 0.0:
            return "primal"
        if self.offset == 0.25:
            return "dual"
        return "shifted"

    def check_space(self, space: Space):
        if self.requires == "hermite" and not isinstance(space, HermiteSpace):
            raise CapabilityError(f"scheme {self.name!r} needs a Hermite space", space=space.name)

    def refine(self, P: ElementSequence, space: Space) -> ElementSequence:
        return self.rule(P, space)

    def refine_grid(self, grid: ParamGrid, count: int) -> ParamGrid:
        return grid.refine(count=count, skip=self.skip, offset=self.offset, rule=self.param_rule)

    def refine_labeled(self, Q: LabeledSequence, space: Space) -> LabeledSequence:
        P = self.refine(Q.points, space)
        return LabeledSequence(self.refine_grid(Q.grid, len(P)), P, space)

    def describe(self) -> dict:
        return {"name": self.name, "locality": self.locality, "param_rule": self.param_rule,
                "offset": self.offset, "skip": self.skip, "interpolatory": self.interpolatory,
                **self.params}


def elementary() -> Scheme:
    return Scheme("elementary", elementary_refine, 1, interpolatory=True)


def averaged(omega: float = 0.5) -> Scheme:
    if not 0.0 < omega < 1.0:
        raise DomainError("omega must lie in (0, 1)", omega=omega)
    return Scheme("averaged", lambda P, s: averaged_refine(P, s, omega), 1,
                  offset=omega / 2.0, params={"omega": omega})


def chaikin() -> Scheme:
    return averaged(0.5)


def lane_riesenfeld(rounds: int = 1) -> Scheme:
    if rounds < 0:
        raise DomainError("rounds must be nonnegative", rounds=rounds)
    return Scheme("lane-riesenfeld", lambda P, s: lane_riesenfeld_refine(P, s, rounds),
                  _lr_locality(rounds), offset=(rounds % 2) / 4.0, skip=rounds // 2,
                  interpolatory=rounds == 0, params={"rounds": rounds})


def hermite_naive() -> Scheme:
    return Scheme("hermite-naive", hermite_naive_refine, 1, interpolatory=True, requires="hermite")


def hermite_bezier() -> Scheme:
    return Scheme("hermite-bezier", hermite_bezier_refine, 1, interpolatory=True,
                  requires="hermite")


SCHEMES: dict[str, Callable[..., Scheme]] = {
    "elementary": elementary,
    "averaged": averaged,
    "chaikin": chaikin,
    "lane-riesenfeld": lane_riesenfeld,
    "hermite-naive": hermite_naive,
    "hermite-bezier": hermite_bezier,
}


def make_scheme(scheme_id: str, **params) -> Scheme:
    try:
        factory = SCHEMES[scheme_id]
    except KeyError:
        raise DomainError(f"unknown scheme id {scheme_id!r}", scheme=scheme_id) from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise DomainError(f"bad parameters for scheme {scheme_id!r}: {exc}",
                          scheme=scheme_id) from None


@dataclass
class SubdivisionRun:
    levels: list[LabeledSequence]
    scheme: Scheme
    space: Space
    trims: list[dict] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.levels)

    def __getitem__(self, k: int) -> LabeledSequence:
        return self.levels[k]

    def points(self, k: int) -> ElementSequence:
        return self.levels[k].points

    @property
    def final(self) -> LabeledSequence:
        return self.levels[-1]


def subdivide(P0: ElementSequence, scheme: Scheme, space: Space, K: int,
              T0: ParamGrid | None = None) -> SubdivisionRun:
    """Apply ``scheme`` K times, refining parameters alongside."""
    if K < 0:
        raise DomainError("number of levels must be nonnegative", levels=K)
    scheme.check_space(space)
    if T0 is None:
        T0 = ParamGrid.uniform(len(P0), closed=P0.closed)
    Q = LabeledSequence(T0, P0, space)
    run = SubdivisionRun([Q], scheme, space)
    for k in range(1, K + 1):
        P = Q.points
        if len(P) < 2:
            raise InsufficientDataError(f"level {k - 1} has too few points for the stencil",
                                        level=k - 1, length=len(P))
        try:
            Q = scheme.refine_labeled(Q, space)
        except InsufficientDataError as exc:
            exc.context.setdefault("level", k)
            raise
        except NumericalError as exc:
            exc.context.setdefault("level", k)
            raise
        full = 2 * len(P)
        run.trims.append({"level": k, "length": len(Q), "dropped": full - len(Q),
                          "first_index": Q.grid.first_index})
        run.levels.append(Q)
    return run


def linear_mask(scheme: Scheme, length: int = 16) -> dict:
    """Recover the mask of a scheme on scalars from its impulse response.

    Returns the full mask ``{k: a_k}`` plus the even and odd rules as weights
    over the offset ``l - j`` of the coarse point ``p_l`` feeding ``S(P)_{2j+r}``.
    """
    if length < 4 * (scheme.locality + 1):
        raise ContractError("impulse sequence too short for the stencil", length=length)
    space = EuclideanSpace()
    m = length // 2
    impulse = ElementSequence([np.array([1.0 if i == m else 0.0]) for i in range(length)],
                              closed=True)
    out = scheme.refine(impulse, space)
    n = len(out)
    mask = {}
    for i in range(n):
        g = scheme.skip + i
        val = float(out[i][0])
        if val != 0.0:
            k = g - 2 * m
            # wrap to the representative nearest zero
            k = (k + n // 2) % n - n // 2
            mask[k] = val
    even = {-k // 2: w for k, w in mask.items() if k % 2 == 0}
    odd = {(1 - k) // 2: w for k, w in mask.items() if k % 2 == 1}
    order = sorted(mask)
    return {"mask": [mask[k] for k in order], "mask_support": [order[0], order[-1]],
            "even": dict(sorted(even.items())), "odd": dict(sorted(odd.items()))}
