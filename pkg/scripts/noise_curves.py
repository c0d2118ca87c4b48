"""C_E versus noise strength for every catalog family, one CSV per family.

    python scripts/noise_curves.py --points 21 --outdir curves/

Depolarizing and erasure curves are checked against their closed forms.
"""
import argparse
import math
from pathlib import Path

from caplab.capacity import OptimizerConfig, capacity_sweep
from caplab.cli import write_sweep_csv


def depolarizing_closed_form(p):
    eig = [1 - 3 * p / 4] + [p / 4] * 3
    return 2 + sum(x * math.log2(x) for x in eig if x > 0)


CLOSED_FORMS = {
    "depolarizing": depolarizing_closed_form,
    "erasure": lambda p: 2 * (1 - p),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--outdir", default="curves")
    ap.add_argument("--restarts", type=int, default=4)
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    grid = [i / (args.points - 1) for i in range(args.points)]
    cfg = OptimizerConfig(restarts=args.restarts)
    for family in ("depolarizing", "dephasing", "amplitude_damping", "erasure"):
        rows = capacity_sweep(family, grid, cfg)
        write_sweep_csv(rows, str(out / f"{family}.csv"))
        line = f"{family:18s} C_E(0)={rows[0][1]:.6f} C_E(1)={rows[-1][1]:.6f}"
        if family in CLOSED_FORMS:
            err = max(abs(v - CLOSED_FORMS[family](p)) for p, v in rows)
            line += f"  max dev from closed form {err:.2e}"
        print(line)


if __name__ == "__main__":
    main()
