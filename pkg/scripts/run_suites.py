"""Run every inequality suite and print a one-line summary per suite.

    python scripts/run_suites.py --trials 100 --seed 0
"""
import argparse

from caplab.verify import SUITES, run_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--suite", action="append", help="restrict to these suite ids")
    args = ap.parse_args()

    failed = 0
    for sid in args.suite or SUITES:
        r = run_suite(sid, args.trials, args.seed)
        failed += r.failures
        print(f"{sid:15s} trials={r.trials:5d} failures={r.failures:3d} "
              f"worst_slack={r.worst_slack_bits: .3e} ({r.elapsed_seconds:.1f}s)")
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
