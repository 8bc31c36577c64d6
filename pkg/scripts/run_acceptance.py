"""Run the acceptance criteria and print one PASS/FAIL line each.

    python3 scripts/run_acceptance.py [--scale quick|full] [--seed 1] [--only 2 4]
"""
from __future__ import annotations

import argparse
import sys

from haarlab.verify import verify_all


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", choices=["quick", "full"], default="full")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--only", type=int, nargs="*", default=None)
    args = ap.parse_args()
    results = verify_all(args.seed, args.scale, args.only, echo=print)
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
