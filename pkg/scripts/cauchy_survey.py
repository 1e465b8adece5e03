"""Contractivity, displacement and Cauchy decay across schemes and spaces."""

import argparse

import numpy as np

from cmsubdiv import ElementSequence, subdivide
from cmsubdiv.analysis import cauchy_trace, estimate_contractivity, estimate_displacement
from cmsubdiv.generators import generate
from cmsubdiv.io import decode
from cmsubdiv.schemes import averaged, chaikin, elementary, hermite_bezier, lane_riesenfeld
from cmsubdiv.spaces import make_space, unit


def datasets(seed):
    rng = np.random.default_rng(seed)
    walk = ElementSequence(list(np.cumsum(rng.normal(size=(12, 2)), axis=0)))
    cap = ElementSequence([unit(np.array([*(0.4 * rng.normal(size=2)), 1.0]))
                           for _ in range(10)], True)
    sets = decode(generate("point-cloud-tube", seed, n=5, m=4)[0])[1]
    measures = decode(generate("gaussian-mixture", seed, n=5, atoms=4)[0])[1]
    hermite = decode(generate("hermite-domain", seed, n=8, bound=0.5)[0])[1]
    return {"euclidean": walk, "sphere": cap, "sets": sets, "wasserstein": measures,
            "hermite-product": hermite}


RUNS = [
    ("elementary", elementary, "euclidean", 7),
    ("elementary", elementary, "sphere", 7),
    ("elementary", elementary, "sets", 4),
    ("elementary", elementary, "wasserstein", 4),
    ("chaikin", chaikin, "euclidean", 7),
    ("chaikin", chaikin, "sphere", 7),
    ("averaged(0.3)", lambda: averaged(0.3), "sphere", 7),
    ("lane-riesenfeld(3)", lambda: lane_riesenfeld(3), "euclidean", 6),
    ("hermite-bezier", hermite_bezier, "hermite-product", 6),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    data = datasets(args.seed)
    print(f"{'scheme':<20} {'space':<16} {'mu(1)':>8} {'rate':>8} {'C_S':>8}  d_k ratios")
    for name, make, space_id, K in RUNS:
        space, P, scheme = make_space(space_id), data[space_id], make()
        L_max = 1 if space_id in ("sets", "wasserstein") else 2
        con = estimate_contractivity(scheme, space, P, L_max, max(K, 2 * L_max))
        disp = estimate_displacement(scheme, space, P, min(K, 4))
        ct = cauchy_trace(subdivide(P, scheme, space, K), 257)
        ratios = " ".join("-" if r is None else f"{r:.3f}" for r in ct.ratios)
        print(f"{name:<20} {space_id:<16} {con.mu[1]:8.4f} {con.rate():8.4f} "
              f"{disp.C_S:8.4f}  {ratios}")


if __name__ == "__main__":
    main()
