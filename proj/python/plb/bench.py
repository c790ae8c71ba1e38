"""In-process benchmark entry point: ``python -m plb.bench --suite micro``."""

from __future__ import annotations

import argparse
import sys

from . import _core


def main(argv=None):
    ap = argparse.ArgumentParser(prog="plb-bench", description="Run a benchmark suite and print its tables.")
    ap.add_argument("--suite", choices=("micro", "larger", "nc"), default="micro")
    ap.add_argument("--variant", action="append", default=[], help="host, prolog, cross or cross-nc")
    ap.add_argument("--scale", type=int)
    ap.add_argument("--iterations", type=int, default=30)
    ap.add_argument("--warmups", type=int, default=3)
    ap.add_argument("--format", choices=("plain", "latex"), default="plain")
    ap.add_argument("--no-index", action="store_true")
    a = ap.parse_args(argv)
    sys.stdout.write(
        _core.bench(a.suite, a.variant, a.scale, a.iterations, a.warmups, not a.no_index, a.format)
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
