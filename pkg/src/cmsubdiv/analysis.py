"""Empirical measurement of the convergence and proximity quantities.

Every function returns an immutable-by-convention report dataclass with a
``to_dict`` used by the CLI serializer.  Ratios whose denominator falls below
the space tolerance are excluded rather than turned into infinities.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .core import (ElementSequence, LabeledSequence, ParamGrid, Space, delta,
                   sample_grid)
from .errors import CapabilityError, ContractError, DomainError
from .schemes import Scheme, SubdivisionRun, subdivide
from .spaces.hermite import HermitePair
from .spaces.sphere import sphere_distance

HERMITE_PROXIMITY_CONSTANT = 1.0 / (8.0 * math.cos(0.25) ** 2)


def _f(x):
    return None if x is None or (isinstance(x, float) and not math.isfinite(x)) else float(x)


class _Report:
    def to_dict(self) -> dict:
        return _plain(asdict(self))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return _f(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def delta_trace(run: SubdivisionRun) -> list[float]:
    return [delta(Q.points, run.space) for Q in run.levels]


def _ratio(num: float, den: float, tol: float) -> float | None:
    return num / den if den > tol else None


def loglog_fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Least squares fit of log y = log C + s log x; returns (s, C, rms residual)."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    (s, c), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (s * lx + c)
    return float(s), float(math.exp(c)), float(np.sqrt(np.mean(resid**2)))


# --- contractivity -------------------------------------------------------------------------

@dataclass
class ContractivityReport(_Report):
    mu: dict[int, float | None]
    best_L: int | None
    best_mu: float | None
    deltas: list[float]
    C_P: float | None
    degenerate: bool

    def rate(self, L: int | None = None) -> float | None:
        L = L or self.best_L
        m = self.mu.get(L) if L else None
        return None if m is None else m ** (1.0 / L)


def contractivity_from_deltas(deltas: Sequence[float], L_max: int, tol: float,
                              start: int = 0) -> ContractivityReport:
    deltas = [float(d) for d in deltas]
    K = len(deltas) - 1
    mu: dict[int, float | None] = {}
    for L in range(1, L_max + 1):
        ratios = [_ratio(deltas[k + L], deltas[k], tol) for k in range(start, K - L + 1, L)]
        ratios = [r for r in ratios if r is not None]
        mu[L] = max(ratios) if ratios else None
    # rates equal up to rounding favour the shorter block
    scored = [(round(m ** (1.0 / L), 9), L) for L, m in mu.items() if m is not None]
    best_L = min(scored)[1] if scored else None
    degenerate = deltas[0] <= tol
    C_P = max(deltas[: best_L]) if best_L else None
    return ContractivityReport(mu, best_L, mu.get(best_L) if best_L else None, deltas, C_P,
                               degenerate)


def estimate_contractivity(scheme: Scheme, space: Space, P: ElementSequence, L_max: int = 4,
                           K: int | None = None, T0: ParamGrid | None = None,
                           start: int = 0) -> ContractivityReport:
    """mu(L) = max over measured blocks of delta(S^{L(k+1)} P) / delta(S^{Lk} P)."""
    K = 2 * L_max if K is None else K
    if K < 2 * L_max:
        raise DomainError("need K >= 2 * L_max levels", K=K, L_max=L_max)
    run = subdivide(P, scheme, space, K, T0)
    return contractivity_from_deltas(delta_trace(run), L_max, space.tol, start)


# --- displacement --------------------------------------------------------------------------

@dataclass
class DisplacementReport(_Report):
    C_S: float
    per_level: list[float | None]


def displacement_from_run(run: SubdivisionRun) -> DisplacementReport:
    space = run.space
    per_level = []
    for k in range(len(run) - 1):
        Qk, Qn = run[k], run[k + 1]
        dk = delta(Qk.points, space)
        n = len(Qk)
        worst = 0.0
        for i, x in enumerate(Qn.points):
            g = Qn.grid.first_index + i
            if g % 2:
                continue
            j = g // 2 - Qk.grid.first_index
            if Qk.points.closed:
                j %= n
            elif not 0 <= j < n:
                continue
            worst = max(worst, space.distance(x, Qk.points[j]))
        if worst > 0:
            per_level.append(_ratio(worst, dk, space.tol))
        else:
            per_level.append(0.0 if dk > space.tol else None)
    vals = [v for v in per_level if v is not None]
    return DisplacementReport(max(vals) if vals else 0.0, per_level)


def estimate_displacement(scheme: Scheme, space: Space, P: ElementSequence, K: int = 4,
                          T0: ParamGrid | None = None) -> DisplacementReport:
    """C_S = max d(S^{k+1}(P)_{2j}, S^k(P)_j) / delta(S^k P)."""
    return displacement_from_run(subdivide(P, scheme, space, K, T0))


# --- proximity of the first type -----------------------------------------------------------

def _same_parameter_rule(s1: Scheme, s2: Scheme):
    if (s1.offset, s1.skip) != (s2.offset, s2.skip):
        raise ContractError("schemes use different parameter rules",
                            schemes=(s1.name, s2.name))


def sup_difference(A: ElementSequence, B: ElementSequence, space: Space) -> float:
    if len(A) != len(B):
        raise ContractError("refined sequences differ in length", lengths=(len(A), len(B)))
    return max(space.distance(a, b) for a, b in zip(A, B))


def default_bound(s1: Scheme, s2: Scheme) -> tuple[float, float] | None:
    if {s1.name, s2.name} == {"hermite-naive", "hermite-bezier"}:
        return HERMITE_PROXIMITY_CONSTANT, 2.0
    return None


@dataclass
class ProximityType1Report(_Report):
    scales: list[float]
    deltas: list[float]
    sups: list[float]
    exponent: float | None
    constant: float | None
    residual: float | None
    identical: bool
    mu: float
    admissible_delta: float | None
    mu_W: float | None
    bound_constant: float | None = None
    bound_exponent: float | None = None
    bound_ok: list[bool] = field(default_factory=list)

    @property
    def epsilon(self) -> float | None:
        return None if self.exponent is None else self.exponent - 1.0

    @property
    def all_within_bound(self) -> bool:
        return all(self.bound_ok)


def check_proximity_type1(s1: Scheme, s2: Scheme, space: Space,
                          family: Callable[[float], ElementSequence], scales: Sequence[float],
                          mu: float = 0.5, space1: Space | None = None,
                          space2: Space | None = None,
                          bound: tuple[float, float] | None = None) -> ProximityType1Report:
    """Sweep sup_j d(S1(P)_j, S2(P)_j) against delta(P) over a scaled data family.

    ``family(s)`` must return data whose delta scales with ``s``.  The exponent
    1+eps and constant C come from a log-log least squares fit over at least
    four scales.  ``bound`` = (C, p) additionally checks sup <= C delta^p at
    every sweep point; it defaults to the Hermite proximity constant for the
    naive/Bezier Hermite pair.
    """
    _same_parameter_rule(s1, s2)
    if len(scales) < 4:
        raise DomainError("proximity fit needs at least four scales", scales=list(scales))
    space1 = space1 or space
    space2 = space2 or space
    rows = []
    for s in scales:
        P = family(s)
        d = delta(P, space)
        sup = sup_difference(s1.refine(P, space1), s2.refine(P, space2), space)
        rows.append((d, sup, s))
    rows.sort(key=lambda r: -r[0])
    deltas = [r[0] for r in rows]
    if any(b >= a for a, b in zip(deltas[:-1], deltas[1:])):
        raise DomainError("data family does not give strictly decreasing delta", deltas=deltas)
    if deltas[-1] < 1e3 * np.finfo(float).eps:
        raise DomainError("smallest delta too close to machine precision", delta=deltas[-1])
    sups = [r[1] for r in rows]
    identical = all(x <= space.tol for x in sups)
    exponent = constant = residual = adm = mu_w = None
    if not identical:
        pos = [(d, x) for d, x in zip(deltas, sups) if x > 0]
        if len(pos) >= 2:
            exponent, constant, residual = loglog_fit(*zip(*pos))
            eps = exponent - 1.0
            if eps > 0 and constant > 0:
                adm = ((1.0 - mu) / (2.0 * constant)) ** (1.0 / eps)
                nu = 0.5 * adm
                mu_w = mu + 2.0 * constant * nu**eps
    bound = bound or default_bound(s1, s2)
    bc = be = None
    ok = []
    if bound is not None:
        bc, be = bound
        ok = [x <= bc * d**be for d, x in zip(deltas, sups)]
    return ProximityType1Report([r[2] for r in rows], deltas, sups, exponent, constant, residual,
                                identical, mu, adm, mu_w, bc, be, ok)


# --- proximity of the second type ----------------------------------------------------------

@dataclass
class ProximityType2Report(_Report):
    errors: list[float]
    ratios: list[float | None]
    eta: float | None
    order: int | None
    E: float | None
    burn_in: int
    L: int
    identical: bool

    def satisfies_order(self, m: int) -> bool:
        """Whether the measured trace obeys e_j <= E eta^{j+1} with eta < 2^-m for j >= J."""
        if self.eta is None or self.E is None or not self.eta < 2.0 ** (-m):
            return False
        return all(e <= self.E * self.eta ** (j + 1) * (1 + 1e-12)
                   for j, e in enumerate(self.errors) if j >= self.burn_in)


def check_proximity_type2(s1: Scheme, s2: Scheme, space: Space, P: ElementSequence, L: int = 1,
                          K: int = 8, burn_in: int = 2, space1: Space | None = None,
                          space2: Space | None = None, tol: float | None = None
                          ) -> ProximityType2Report:
    """e_j = sup_i d(S1^L(P^j)_i, S2^L(P^j)_i) along P^j = S1^{jL}(P), j = 0..K-1."""
    _same_parameter_rule(s1, s2)
    space1 = space1 or space
    space2 = space2 or space
    tol = space.tol if tol is None else tol
    errors = []
    Pj = P
    for _ in range(K):
        A = B = Pj
        for _ in range(L):
            A = s1.refine(A, space1)
            B = s2.refine(B, space2)
        errors.append(sup_difference(A, B, space))
        Pj = A
    ratios = [_ratio(errors[j + 1], errors[j], tol) for j in range(K - 1)]
    identical = all(e <= tol for e in errors)
    tail = [(j, e) for j, e in enumerate(errors) if j >= burn_in and e > tol]
    eta = order = E = None
    if len(tail) >= 2:
        (j0, e0), (j1, e1) = tail[0], tail[-1]
        eta = (e1 / e0) ** (1.0 / (j1 - j0))
        if eta > 0:
            E = max(e / eta ** (j + 1) for j, e in tail)
            if eta < 1:
                order = math.floor(-math.log2(eta) - 1e-9)
    return ProximityType2Report(errors, ratios, eta, order, E, burn_in, L, identical)


# --- divided differences and C1 -------------------------------------------------------------

@dataclass
class DividedDiffTrace(_Report):
    differences: list[list[list[float]]]
    deltas: list[float]
    level_distances: list[float]


def _require_embedded(space: Space):
    if not space.euclidean_embedded:
        raise CapabilityError("divided differences need a Euclidean-embedded space",
                              space=space.name)


def _dd_level(Q: LabeledSequence, space: Space) -> tuple[np.ndarray, np.ndarray]:
    X = np.stack([np.atleast_1d(space.embed(p)) for p in Q.points])
    t = np.asarray(Q.grid.knots)
    if Q.points.closed:
        X = np.vstack([X, X[:1]])
        t = np.append(t, t[0] + Q.grid.period)
    dd = np.diff(X, axis=0) / np.diff(t)[:, None]
    mids = 0.5 * (t[:-1] + t[1:])
    return dd, mids


def _dd_delta(dd: np.ndarray, closed: bool) -> float:
    if len(dd) < 2:
        return 0.0
    steps = np.diff(dd, axis=0)
    if closed:
        steps = np.vstack([steps, dd[:1] - dd[-1:]])
    return float(np.linalg.norm(steps, axis=1).max())


def divided_differences(run: SubdivisionRun, samples: int = 257) -> DividedDiffTrace:
    """Per-level divided differences Delta(P^k) / (knot spacing) and their deltas."""
    _require_embedded(run.space)
    dds, mids, deltas = [], [], []
    for Q in run.levels:
        dd, m = _dd_level(Q, run.space)
        dds.append(dd)
        mids.append(m)
        deltas.append(_dd_delta(dd, Q.points.closed))
    dists = []
    for k in range(len(dds) - 1):
        lo = max(mids[k][0], mids[k + 1][0])
        hi = min(mids[k][-1], mids[k + 1][-1])
        if hi <= lo:
            dists.append(0.0)
            continue
        ts = sample_grid(lo, hi, samples)
        fa = np.stack([np.interp(ts, mids[k], dds[k][:, c]) for c in range(dds[k].shape[1])], 1)
        fb = np.stack([np.interp(ts, mids[k + 1], dds[k + 1][:, c])
                       for c in range(dds[k + 1].shape[1])], 1)
        dists.append(float(np.linalg.norm(fa - fb, axis=1).max()))
    return DividedDiffTrace([d.tolist() for d in dds], deltas, dists)


@dataclass
class C1Report(_Report):
    mu_delta: dict[int, float | None]
    deltas: list[float]
    start: int
    degenerate: bool


def c1_diagnostic(run: SubdivisionRun, L1_max: int = 2, start: int = 0,
                  tol: float | None = None) -> C1Report:
    """First-order contractivity: mu_Delta(L1) = max delta(dd_{k+L1}) / delta(dd_k), k >= start."""
    trace = divided_differences(run)
    tol = run.space.tol if tol is None else tol
    d = trace.deltas
    K = len(d) - 1
    table: dict[int, float | None] = {}
    for L1 in range(1, L1_max + 1):
        ratios = [_ratio(d[k + L1], d[k], tol) for k in range(start, K - L1 + 1)]
        ratios = [r for r in ratios if r is not None]
        table[L1] = max(ratios) if ratios else None
    degenerate = all(x <= tol for x in d[start:])
    return C1Report(table, d, start, degenerate)


# --- Cauchy decay --------------------------------------------------------------------------

@dataclass
class CauchyReport(_Report):
    distances: list[float]
    ratios: list[float | None]
    rate: float | None


def _common_interval(Qa: LabeledSequence, Qb: LabeledSequence) -> tuple[float, float]:
    if Qa.points.closed:
        return Qb.domain
    (a0, a1), (b0, b1) = Qa.domain, Qb.domain
    return max(a0, b0), min(a1, b1)


def _knots_in(Q: LabeledSequence, lo: float, hi: float) -> np.ndarray:
    t = np.asarray(Q.grid.knots)
    if Q.points.closed:
        t = lo + np.mod(t - lo, Q.grid.period)
    return t[(t >= lo) & (t <= hi)]


def level_distance(Qa: LabeledSequence, Qb: LabeledSequence, space: Space,
                   samples: int = 2**10 + 1) -> float:
    """Sup distance over a uniform grid joined with the knots of both levels.

    The difference of two piecewise interpolants peaks at a knot of one of
    them, so the knots keep fine levels from hiding between uniform samples.
    """
    lo, hi = _common_interval(Qa, Qb)
    if hi < lo:
        raise DomainError("interpolants have disjoint domains", domains=(Qa.domain, Qb.domain))
    ts = np.unique(np.concatenate([sample_grid(lo, hi, samples), _knots_in(Qa, lo, hi),
                                   _knots_in(Qb, lo, hi)]))
    return max(space.distance(Qa(t), Qb(t)) for t in ts)


def cauchy_trace(run: SubdivisionRun, samples: int = 2**10 + 1) -> CauchyReport:
    """d_k = sampled sup distance between the level k and level k+1 interpolants."""
    if len(run) < 2:
        raise DomainError("Cauchy trace needs at least two levels", levels=len(run))
    tol = run.space.tol
    dist = [level_distance(run[k], run[k + 1], run.space, samples) for k in range(len(run) - 1)]
    ratios = [_ratio(dist[k + 1], dist[k], tol) for k in range(len(dist) - 1)]
    pos = [(k, x) for k, x in enumerate(dist) if x > tol]
    rate = None
    if len(pos) >= 2:
        ks, xs = zip(*pos)
        slope = np.polyfit(ks, np.log(xs), 1)[0]
        rate = float(math.exp(slope))
    return CauchyReport(dist, ratios, rate)


# --- approximation order -------------------------------------------------------------------

@dataclass
class ApproxOrderReport(_Report):
    hs: list[float]
    errors: list[float]
    bounds: list[float | None]
    violations: list[int]
    ratios: list[float | None]
    slope: float | None
    lipschitz_checked: bool


def approximation_experiment(curve: Callable[[float], Any], lipschitz: float | None,
                             space: Space, scheme: Scheme, hs: Sequence[float],
                             t_range: tuple[float, float], closed: bool = False, K: int = 8,
                             samples: int = 2**10 + 1) -> ApproxOrderReport:
    """Sample the curve on h-grids, subdivide K levels and compare with the curve.

    The level-K interpolant stands in for the limit.  With ``lipschitz`` given,
    every sample t is checked against 2 * L * h.
    """
    hs = [float(h) for h in hs]
    if any(b >= a for a, b in zip(hs[:-1], hs[1:])):
        raise DomainError("h values must be strictly decreasing", hs=hs)
    a, b = t_range
    errors, bounds, violations = [], [], []
    for h in hs:
        if closed:
            n = int(round((b - a) / h))
            grid = ParamGrid.uniform(n, h, a, closed=True)
        else:
            n = int(math.floor((b - a) / h + 1e-9)) + 1
            grid = ParamGrid.uniform(n, h, a)
        P = ElementSequence([curve(t) for t in grid.knots], closed)
        fK = subdivide(P, scheme, space, K, grid).final
        lo, hi = fK.domain
        ts = sample_grid(lo, hi, samples)
        errs = np.array([space.distance(curve(t), fK(t)) for t in ts])
        errors.append(float(errs.max()))
        if lipschitz is None:
            bounds.append(None)
            violations.append(0)
        else:
            bd = 2.0 * lipschitz * h
            bounds.append(bd)
            violations.append(int(np.sum(errs > bd)))
    tol = space.tol
    ratios = [_ratio(errors[i + 1], errors[i], tol) for i in range(len(hs) - 1)]
    pos = [(h, e) for h, e in zip(hs, errors) if e > tol]
    slope = loglog_fit(*zip(*pos))[0] if len(pos) >= 2 else None
    return ApproxOrderReport(hs, errors, bounds, violations, ratios, slope, lipschitz is not None)


# --- locality ------------------------------------------------------------------------------

@dataclass
class LocalityReport(_Report):
    spread: int
    differing: int
    bound: int


def locality_check(scheme: Scheme, space: Space, P: ElementSequence, j: int, replacement,
                   K: int = 4) -> LocalityReport:
    """Perturb P_j, refine K times, and report how many coarse cells away outputs change.

    An output at global index 2^K c + r belongs to coarse cell c; the spread is
    the largest |c - j| over outputs that differ.
    """
    base = subdivide(P, scheme, space, K).final
    pert = subdivide(P.replace(j, replacement), scheme, space, K).final
    n0 = len(P)
    spread = differing = 0
    for i, (x, y) in enumerate(zip(base.points, pert.points)):
        if space.distance(x, y) > space.tol:
            differing += 1
            c = (base.grid.first_index + i) // 2**K
            gap = abs(c - j)
            if P.closed:
                gap = min(gap % n0, (-gap) % n0)
            spread = max(spread, gap)
    return LocalityReport(spread, differing, 2 * scheme.locality)


# --- Hermite-specific and geometric diagnostics --------------------------------------------

@dataclass
class HermiteGaps(_Report):
    max_gap: float
    max_angle: float


def hermite_gaps(P: ElementSequence) -> HermiteGaps:
    g = a = 0.0
    for x, y in P.consecutive():
        g = max(g, float(np.linalg.norm(y.p - x.p)))
        a = max(a, sphere_distance(x.v, y.v))
    return HermiteGaps(g, a)


def hermite_closure(P: ElementSequence, scheme: Scheme) -> tuple[HermiteGaps, HermiteGaps]:
    """Point gaps and tangent angles before and after one refinement step."""
    if not all(isinstance(x, HermitePair) for x in P):
        raise CapabilityError("closure check needs Hermite data")
    return hermite_gaps(P), hermite_gaps(scheme.refine(P, None))


def chord_deviation(space: Space, pairs, omegas) -> float:
    """max ||A_w(p0,p1) - ((1-w) p0 + w p1)|| / ((w + w^2) ||p0 - p1||^2) over samples."""
    _require_embedded(space)
    worst = 0.0
    for (x, y), w in zip(pairs, omegas):
        x, y = space.embed(x), space.embed(y)
        chord = float(np.linalg.norm(x - y))
        if chord == 0.0 or w == 0.0:
            continue
        dev = float(np.linalg.norm(space.embed(space.average(w, x, y)) - ((1 - w) * x + w * y)))
        worst = max(worst, dev / ((w + w * w) * chord**2))
    return worst
