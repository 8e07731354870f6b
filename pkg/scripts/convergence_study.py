"""Dynamical Chern error on the 1.735 MHz sphere as a function of ramp time.

Prints one row per tau for both start states, so the oscillating transient
left by the abrupt ramp start can be read off directly.
"""

import argparse

import numpy as np

from curvtrack.manifold import Kind, ManifoldSpec
from curvtrack.response import convergence_study


def main(argv=None):
    parser = argparse.ArgumentParser(description="sphere dynamical Chern convergence")
    parser.add_argument("--taus", type=float, nargs="*", default=[0.5, 1, 2, 4, 8, 16])
    parser.add_argument("--dense", type=int, default=0, help="add a log-spaced grid of this many taus")
    parser.add_argument("--ratio", type=float, default=0.0, help="delta2/delta1")
    args = parser.parse_args(argv)

    taus = list(args.taus)
    if args.dense:
        taus = sorted(set(taus) | set(np.geomspace(0.05, 16, args.dense).round(4)))
    spec = ManifoldSpec.from_mhz(Kind.SPHERE, 1.735, args.ratio, 1.735)
    inst = dict(convergence_study(spec, taus))
    bare = dict(convergence_study(spec, taus, start_state="bare"))
    print(f"{'tau_us':>8} {'err_instantaneous':>18} {'err_bare':>12}")
    for tau in taus:
        print(f"{tau:8.4g} {inst[tau]:18.3e} {bare[tau]:12.3e}")


if __name__ == "__main__":
    main()
