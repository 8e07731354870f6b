"""Run the cross-route oracle suite and print one line per report."""

import argparse
import sys
import time

from curvtrack.oracles import run_all_oracles


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--budget", type=int, default=10)
    args = parser.parse_args(argv)
    start = time.perf_counter()
    reports = run_all_oracles(args.budget)
    for r in reports:
        mark = "ok  " if r.passed else "FAIL"
        print(f"{mark} {r.name:<40} max|err| = {r.max_abs_error:.2e}  tol {r.tolerance:.0e}  n = {r.samples}")
    print(f"{sum(r.passed for r in reports)}/{len(reports)} passed in {time.perf_counter() - start:.1f}s")
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
