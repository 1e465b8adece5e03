"""Approximation error of the elementary sphere scheme on arc-length circle samples."""

import argparse
import math

from cmsubdiv.analysis import approximation_experiment
from cmsubdiv.generators import great_circle, small_circle
from cmsubdiv.schemes import elementary
from cmsubdiv.spaces import SphereSpace


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--halvings", type=int, default=5)
    ap.add_argument("--levels", type=int, default=8)
    ap.add_argument("--colatitude", type=float, default=math.pi / 6)
    args = ap.parse_args(argv)

    hs = [math.pi / 8 / 2**i for i in range(args.halvings)]
    for curve in (small_circle(args.colatitude), great_circle()):
        rep = approximation_experiment(curve, curve.lipschitz, SphereSpace(), elementary(), hs,
                                       curve.t_range, closed=True, K=args.levels)
        print(f"{curve.name}: fitted slope {rep.slope}")
        print(f"{'h':>10} {'error':>12} {'2Lh':>10} {'ratio':>8} violations")
        for i, (h, e, b, v) in enumerate(zip(rep.hs, rep.errors, rep.bounds, rep.violations)):
            r = rep.ratios[i - 1] if i else None
            print(f"{h:10.5f} {e:12.4e} {b:10.5f} {'' if r is None else f'{r:8.4f}':>8} {v}")


if __name__ == "__main__":
    main()
