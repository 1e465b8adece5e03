import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cmsubdiv import (ContractError, DegenerateTangentError, DomainError, GeodesicError,
                      check_average_axioms, check_metric_property)
from cmsubdiv.spaces import (DiscreteMeasure1D, FiniteCompactSet, HermitePair,
                             HermiteProductSpace, HermiteSpace, SetSpace, SphereSpace,
                             WassersteinSpace, alpha, euclid_average, euclid_distance,
                             hausdorff_distance, hermite_average, hermite_distance, make_space,
                             product_average, quantile_coupling, set_metric_average,
                             set_metric_pairs, sphere_average, sphere_distance, unit,
                             wasserstein_average, wasserstein_distance)

import samplers
from oracles import brute_hausdorff, brute_metric_pairs, permutation_w, transport_lp

R2 = math.sqrt(0.5)


# --- Euclidean -----------------------------------------------------------------------------

class TestEuclidean:
    def test_examples(self):
        x, y = np.array([0.0]), np.array([2.0])
        assert euclid_average(0.0, x, y) == x
        assert euclid_average(0.5, x, y)[0] == 1.0
        assert euclid_distance(np.array([0.0, 0.0]), np.array([3.0, 4.0])) == 5.0

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            euclid_average(0.5, np.zeros(2), np.zeros(3))

    @given(st.lists(st.floats(-100, 100), min_size=3, max_size=3),
           st.lists(st.floats(-100, 100), min_size=3, max_size=3), st.floats(0, 1))
    def test_metric_property(self, x, y, w):
        x, y = np.array(x), np.array(y)
        d = euclid_distance(x, y)
        assert euclid_distance(x, euclid_average(w, x, y)) == pytest.approx(w * d, abs=1e-9)


# --- sphere --------------------------------------------------------------------------------

class TestSphere:
    def test_examples(self):
        v = np.array([0.0, 1.0])
        assert np.array_equal(sphere_average(0.3, v, v), v)
        m = sphere_average(0.5, v, np.array([-1.0, 0.0]))
        assert np.allclose(m, [-R2, R2], atol=1e-15)
        assert sphere_distance(np.array([1.0, 0.0]), v) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_midpoint_matches_normalized_chord(self, rng):
        for v, u in samplers.sphere_pairs(rng, 100):
            assert np.allclose(sphere_average(0.5, v, u), unit(v + u), atol=1e-12)

    def test_antipodal(self):
        v = np.array([1.0, 0.0, 0.0])
        with pytest.raises(GeodesicError):
            sphere_average(0.5, v, -v)

    def test_stays_on_sphere(self, rng):
        for (v, u), w in zip(samplers.sphere_pairs(rng, 200), rng.uniform(0, 1, 200)):
            assert abs(np.linalg.norm(sphere_average(w, v, u)) - 1) < 1e-12

    def test_small_angle_precision(self):
        v = np.array([1.0, 0.0, 0.0])
        u = unit(np.array([1.0, 1e-9, 0.0]))
        assert sphere_distance(v, u) == pytest.approx(1e-9, rel=1e-9)

    def test_axioms_and_metric(self, rng):
        S = SphereSpace()
        pairs = samplers.sphere_pairs(rng, 500)
        w = samplers.omegas(rng, 500)
        assert check_average_axioms(S, pairs, w).max_violation <= 1e-9
        assert check_metric_property(S, pairs, w).max_violation <= 1e-8


# --- Hermite -------------------------------------------------------------------------------

def circle_pair(a, b):
    return (HermitePair([math.cos(a), math.sin(a)], [-math.sin(a), math.cos(a)]),
            HermitePair([math.cos(b), math.sin(b)], [-math.sin(b), math.cos(b)]))


class TestHermite:
    def test_pair_normalizes(self):
        x = HermitePair([0.0, 0.0], [3.0, 4.0])
        assert np.allclose(x.v, [0.6, 0.8])

    def test_distance_examples(self):
        a = HermitePair([0.0, 0.0], [1.0, 0.0])
        assert hermite_distance(a, a) == 0.0
        assert hermite_distance(a, HermitePair([0.0, 0.0], [0.0, 1.0])) == pytest.approx(
            math.pi / 2)
        assert hermite_distance(a, HermitePair([3.0, 4.0], [1.0, 0.0])) == 5.0

    def test_identical_pairs_short_circuit(self):
        a = HermitePair([1.0, 2.0], [0.0, 1.0])
        assert hermite_average(0.3, a, a) is a

    def test_quarter_circle_midpoint(self):
        a, b = circle_pair(0.0, math.pi / 2)
        assert alpha(a, b) == pytest.approx(math.sqrt(2) / math.cos(math.pi / 8) ** 2)
        m = hermite_average(0.5, a, b)
        assert np.allclose(m.p, [R2, R2], atol=1e-14)
        assert np.allclose(m.v, [-R2, R2], atol=1e-14)

    def test_explicit_c(self):
        a, b = circle_pair(0.0, math.pi / 2)
        c = 0.3
        m = hermite_average(0.5, a, b, c)
        P0, P1, P2, P3 = a.p, a.p + c * a.v, b.p - c * b.v, b.p
        assert np.allclose(m.p, (P0 + 3 * P1 + 3 * P2 + P3) / 8, atol=1e-15)
        # B'(1/2) is proportional to (c - 2, 2 - c)
        assert np.allclose(m.v, unit(np.array([c - 2, 2 - c])), atol=1e-15)

    def test_endpoint_tangency(self, rng):
        for a, b in samplers.hermite_domain_pairs(rng, 300, dim=3):
            assert np.allclose(hermite_average(0.0, a, b).v, a.v, atol=1e-9)
            assert np.allclose(hermite_average(1.0, a, b).v, b.v, atol=1e-9)

    def test_degenerate_tangent(self):
        # same point, opposite tangents: the control polygon folds onto itself
        a = HermitePair([0.0, 0.0], [1.0, 0.0])
        b = HermitePair([0.0, 0.0], [-1.0, 0.0])
        with pytest.raises(DegenerateTangentError):
            hermite_average(0.5, a, b, c=1.0)

    def test_non_intrinsic(self):
        with pytest.raises(ContractError):
            check_metric_property(HermiteSpace(), samplers.hermite_arc_pairs(
                np.random.default_rng(0), 3), [0.5])

    def test_axioms_on_circular_arcs(self, rng):
        H = HermiteSpace()
        pairs = samplers.hermite_arc_pairs(rng, 1000)
        r = check_average_axioms(H, pairs, samplers.omegas(rng, 1000))
        assert r.endpoint0 <= 1e-9 and r.endpoint1 <= 1e-9 and r.diagonal <= 1e-9
        assert r.boundedness <= 1e-9
        assert r.symmetry_oriented <= 1e-9

    def test_literal_symmetry_needs_orientation(self):
        a, b = circle_pair(0.0, 0.5)
        lhs = hermite_average(0.3, a, b)
        swapped = hermite_average(0.7, b, a)
        oriented = hermite_average(0.7, b.reversed(), a.reversed()).reversed()
        assert hermite_distance(lhs, swapped) > 0.1
        assert hermite_distance(lhs, oriented) < 1e-12

    def test_product_average_intrinsic(self, rng):
        Hp = HermiteProductSpace()
        pairs = samplers.hermite_domain_pairs(rng, 300)
        assert check_metric_property(Hp, pairs, samplers.omegas(rng, 300)).max_violation < 1e-8

    def test_product_average_example(self):
        a, b = circle_pair(0.0, math.pi / 2)
        m = product_average(0.5, a, b)
        assert np.allclose(m.p, [0.5, 0.5]) and np.allclose(m.v, [-R2, R2])


# --- finite sets ---------------------------------------------------------------------------

def S1(*xs):
    return FiniteCompactSet(np.array(xs, dtype=float)[:, None])


class TestSets:
    def test_examples(self):
        A, B = S1(0), S1(1, 2)
        assert set(set_metric_pairs(A, B).index_pairs) == {(0, 0), (0, 1)}
        assert hausdorff_distance(A, B) == 2.0
        C = set_metric_average(0.5, A, B)
        assert C.points[:, 0].tolist() == [0.5, 1.0]
        assert hausdorff_distance(A, C) == 1.0

    def test_separated_pairs(self):
        A, B = S1(0, 10), S1(1, 9)
        pairs = set_metric_pairs(A, B)
        assert {(float(a[0]), float(b[0])) for a, b in pairs.as_points()} == {(0, 1), (10, 9)}
        assert hausdorff_distance(A, B) == 1.0

    def test_identical_sets(self, rng):
        A = samplers.random_set(rng)
        pairs = set_metric_pairs(A, A)
        assert set(pairs.index_pairs) == {(i, i) for i in range(len(A))}
        assert hausdorff_distance(A, A) == 0.0

    def test_endpoints(self, rng):
        for A, B in samplers.set_pairs(rng, 50):
            assert np.array_equal(set_metric_average(0.0, A, B).points, A.points)
            assert np.array_equal(set_metric_average(1.0, A, B).points, B.points)

    def test_canonical_dedupe(self):
        A = FiniteCompactSet([[1.0, 0.0], [0.0, 1.0], [1.0, 1e-12]])
        assert A.points.tolist() == [[0.0, 1.0], [1.0, 0.0]]

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            FiniteCompactSet(np.zeros((0, 2)))

    def test_brute_force_random(self, rng):
        for A, B in samplers.set_pairs(rng, 200):
            assert set(set_metric_pairs(A, B).index_pairs) == brute_metric_pairs(A, B)
            assert hausdorff_distance(A, B) == brute_hausdorff(A, B)

    def test_brute_force_integer_ties(self, rng):
        for _ in range(200):
            A = FiniteCompactSet(rng.integers(-3, 4, size=(rng.integers(1, 7), 2)))
            B = FiniteCompactSet(rng.integers(-3, 4, size=(rng.integers(1, 7), 2)))
            assert set(set_metric_pairs(A, B).index_pairs) == brute_metric_pairs(A, B)

    def test_pairs_cover_both_sets(self, rng):
        for A, B in samplers.set_pairs(rng, 100):
            pairs = set_metric_pairs(A, B).index_pairs
            assert {i for i, _ in pairs} == set(range(len(A)))
            assert {j for _, j in pairs} == set(range(len(B)))

    def test_metric_property(self, rng):
        Ss = SetSpace()
        pairs = samplers.set_pairs(rng, 300)
        assert check_metric_property(Ss, pairs, samplers.omegas(rng, 300)).max_violation <= 1e-8


# --- Wasserstein ---------------------------------------------------------------------------

def M(*atoms):
    return DiscreteMeasure1D.from_atoms(atoms)


class TestWasserstein:
    def test_coupling_examples(self):
        mu, nu = M((0, 0.5), (1, 0.5)), M((2, 0.5), (4, 0.5))
        assert quantile_coupling(mu, nu).chunks() == [(0, 2, 0.5), (1, 4, 0.5)]
        assert quantile_coupling(M((0, 1)), nu).chunks() == [(0, 2, 0.5), (0, 4, 0.5)]
        g = quantile_coupling(mu, mu)
        assert np.array_equal(g.x, g.y)

    def test_distance_examples(self):
        mu, nu = M((0, 0.5), (1, 0.5)), M((2, 0.5), (4, 0.5))
        assert wasserstein_distance(mu, mu) == 0.0
        for p in (1, 2, 3):
            assert wasserstein_distance(M((0, 1)), M((2, 1)), p) == pytest.approx(2.0)
        assert wasserstein_distance(mu, nu) == pytest.approx(math.sqrt(6.5))

    def test_average_examples(self):
        mu, nu = M((0, 0.5), (1, 0.5)), M((2, 0.5), (4, 0.5))
        a = wasserstein_average(0.0, mu, nu)
        assert np.array_equal(a.locations, mu.locations)
        d = wasserstein_average(0.5, M((0, 1)), M((2, 1)))
        assert d.locations.tolist() == [1.0] and d.masses.tolist() == [1.0]
        m = wasserstein_average(0.5, mu, nu)
        assert m.locations.tolist() == [1.0, 2.5] and m.masses.tolist() == [0.5, 0.5]
        assert wasserstein_distance(M((0, 1)), wasserstein_average(0.25, M((0, 1)),
                                                                   M((2, 1)))) == 0.5

    def test_errors(self):
        with pytest.raises(DomainError):
            wasserstein_distance(M((0, 1)), M((1, 1)), p=0.5)
        with pytest.raises(DomainError):
            quantile_coupling(M((0, 0.5)), M((1, 1)))
        with pytest.raises(DomainError):
            DiscreteMeasure1D([0.0], [-1.0])

    def test_merge_close_atoms(self):
        mu = DiscreteMeasure1D([0.0, 1e-13, 1.0], [0.25, 0.25, 0.5])
        assert len(mu) == 2 and mu.masses.tolist() == [0.5, 0.5]

    def test_marginals(self, rng):
        for mu, nu in samplers.measure_pairs(rng, 100):
            g = quantile_coupling(mu, nu)
            assert np.all(np.diff(g.x) >= 0) and np.all(np.diff(g.y) >= 0)
            assert g.mass.sum() == pytest.approx(1.0, abs=1e-12)
            for m, xs in ((mu, g.x), (nu, g.y)):
                rebuilt = DiscreteMeasure1D(xs, g.mass)
                assert np.allclose(rebuilt.locations, m.locations, atol=0)
                assert np.allclose(rebuilt.masses, m.masses, atol=1e-12)

    def test_lp_oracle(self, rng):
        for mu, nu in samplers.measure_pairs(rng, 150):
            for p in (1, 2):
                assert wasserstein_distance(mu, nu, p) == pytest.approx(
                    transport_lp(mu, nu, p), abs=1e-9)

    def test_permutation_oracle(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 6))
            x, y = rng.normal(size=n), rng.normal(size=n)
            mu = DiscreteMeasure1D(x, np.full(n, 1 / n))
            nu = DiscreteMeasure1D(y, np.full(n, 1 / n))
            assert wasserstein_distance(mu, nu) == pytest.approx(permutation_w(x, y), abs=1e-9)

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_geodesic_property(self, rng, p):
        W = WassersteinSpace(p)
        pairs = samplers.measure_pairs(rng, 200)
        assert check_metric_property(W, pairs, samplers.omegas(rng, 200)).max_violation <= 1e-8

    def test_triangle_inequality(self, rng):
        for _ in range(100):
            a, b, c = (samplers.random_measure(rng) for _ in range(3))
            assert wasserstein_distance(a, c) <= (wasserstein_distance(a, b)
                                                  + wasserstein_distance(b, c) + 1e-12)


# --- cross-backend properties --------------------------------------------------------------

def test_registry():
    assert isinstance(make_space("sphere"), SphereSpace)
    assert make_space("wasserstein", p=3).p == 3
    with pytest.raises(DomainError):
        make_space("torus")


@given(st.integers(0, 2**32 - 1), st.sampled_from(["euclidean", "sphere", "sets", "wasserstein"]))
def test_distance_symmetric_and_triangle(seed, kind):
    rng = np.random.default_rng(seed)
    space = make_space(kind)
    draw = {
        "euclidean": lambda: rng.normal(size=3),
        "sphere": lambda: unit(rng.normal(size=3)),
        "sets": lambda: samplers.random_set(rng),
        "wasserstein": lambda: samplers.random_measure(rng),
    }[kind]
    x, y, z = draw(), draw(), draw()
    d = space.distance
    assert d(x, y) == pytest.approx(d(y, x), abs=1e-12)
    assert d(x, x) <= 1e-12
    assert d(x, z) <= d(x, y) + d(y, z) + 1e-9


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_sphere_metric_property_hypothesis(seed, w):
    rng = np.random.default_rng(seed)
    v, u = unit(rng.normal(size=3)), unit(rng.normal(size=3))
    assume(sphere_distance(v, u) < math.pi - 1e-3)
    a = sphere_average(w, v, u)
    assert sphere_distance(v, a) == pytest.approx(w * sphere_distance(v, u), abs=1e-12)
