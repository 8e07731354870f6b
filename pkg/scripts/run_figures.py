"""Regenerate every figure table (CSV) and map rendering (SVG) into one directory.

    python scripts/run_figures.py --out results --threads 4
"""

import argparse
import dataclasses
import os
import sys
import time

from curvtrack import cli, figures
from curvtrack.config import parse_config


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--only", nargs="*", help="subset of run names")
    args = parser.parse_args(argv)

    names = args.only or list(figures.ACCEPTANCE_RUNS)
    status = 0
    for name in names:
        config = parse_config(figures.ACCEPTANCE_RUNS[name])
        start = time.perf_counter()
        code = cli.run(config, args.out, args.threads)
        if config.command == "map" and code == 0:
            svg = dataclasses.replace(
                config,
                output=dataclasses.replace(config.output, path=os.path.splitext(config.output_name)[0] + ".svg", format="svg"),
            )
            code = cli.run(svg, args.out, args.threads)
        print(f"{name}: exit {code} in {time.perf_counter() - start:.1f}s")
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(main())
