"""Where the simplified complexity bound falls below the unsimplified one.

For each group and n, prints the largest delta on a grid at which
log(simplified) < log(unsimplified), i.e. where the simplified closed form
stops being an upper bound on the preceding expression.

    python3 scripts/simplification_sweep.py
"""
from __future__ import annotations

import numpy as np

from haarlab.complexity import ComplexityParams, low_complexity_prob_bound


def main() -> None:
    deltas = np.linspace(0.001, 0.999, 999)
    print(f"{'group':>5} {'n':>3} {'max failing delta':>18}")
    for kind in ("SO", "SU", "Sp"):
        for n in (4, 6, 10, 16):
            bad = [d for d in deltas
                   if low_complexity_prob_bound(kind, ComplexityParams(n, 1, d)).log_value
                   < low_complexity_prob_bound(kind, ComplexityParams(n, 1, d), simplified=False).log_value]
            print(f"{kind:>5} {n:>3} {max(bad) if bad else float('nan'):>18.3f}")


if __name__ == "__main__":
    main()
