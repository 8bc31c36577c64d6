"""Compare the three readings of the SQ lower bound over n.

    python3 scripts/sq_modes.py --tau 0.1 --epsilon 0.1 --beta 0.9
"""
from __future__ import annotations

import argparse

from haarlab.born import SQ_MODES, SqParams, sq_lower_bound
from haarlab.errors import DomainError


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tau", type=float, default=0.1)
    ap.add_argument("--epsilon", type=float, default=0.1)
    ap.add_argument("--beta", type=float, default=0.9)
    ap.add_argument("--qubits", type=int, nargs="+", default=[6, 8, 10, 12, 14, 16])
    args = ap.parse_args()
    print(f"{'group':>5} {'n':>3} " + " ".join(f"{m + ' log10|q|':>22}" for m in SQ_MODES))
    for kind in ("SO", "SU", "Sp"):
        for n in args.qubits:
            cells = []
            for mode in SQ_MODES:
                try:
                    rep = sq_lower_bound(kind, SqParams(n, args.tau, args.epsilon, args.beta), mode)
                except DomainError as exc:
                    cells.append(f"{'domain: ' + str(exc)[:12]:>22}")
                    continue
                tag = "" if rep.sign > 0 else " (none)"
                cells.append(f"{rep.log10_value:>15.4f}{tag:>7}")
            print(f"{kind:>5} {n:>3} " + " ".join(cells))


if __name__ == "__main__":
    main()
