"""Command-line front end.

    caplab compute --channel FILE | --builtin NAME --params K=V,... --quantity ce|c1|mi|ci
    caplab sweep   --builtin NAME --param KEY --range START,END,COUNT --out FILE.csv
    caplab verify  --suite ID|all --trials N --seed N [--report FILE.json]
    caplab info    --channel FILE

Exit status: 0 on success, 1 when a verification suite reports failures,
2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from caplab.capacity import OptimizerConfig, capacity_sweep, compute_ce, compute_one_shot_c1
from caplab.channels import (
    ChannelError,
    QuantumChannel,
    choi_of,
    standard_channel,
    validate_cptp,
)
from caplab.entropy import coherent_information, mutual_information
from caplab.qmat import DensityMatrix
from caplab.verify import SUITES, run_suite


class SpecError(ValueError):
    """Malformed channel or state document."""


def _complex(pair, where: str) -> complex:
    if (not isinstance(pair, list) or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)):
        raise SpecError(f"{where}: expected a [re, im] pair of numbers, got {pair!r}")
    return complex(pair[0], pair[1])


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{what}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _positive_int(doc: dict, key: str) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise SpecError(f"field {key!r}: expected a positive integer, got {v!r}")
    return v


def parse_channel_spec(text: str) -> QuantumChannel:
    """Build a validated channel from a builtin or explicit JSON channel document."""
    doc = _load_json(text, "channel spec")
    if not isinstance(doc, dict):
        raise SpecError("channel spec must be a JSON object")
    if "builtin" in doc:
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise SpecError("field 'params': expected an object")
        return standard_channel(doc["builtin"], **params)

    dim_in = _positive_int(doc, "dim_in")
    dim_out = _positive_int(doc, "dim_out")
    kraus = doc.get("kraus")
    if not isinstance(kraus, list) or not kraus:
        raise SpecError("field 'kraus': expected a nonempty list of matrices")
    ops = np.zeros((len(kraus), dim_out, dim_in), dtype=complex)
    for k, op in enumerate(kraus):
        if not isinstance(op, list) or len(op) != dim_out:
            raise SpecError(f"kraus[{k}]: expected {dim_out} rows")
        for i, row in enumerate(op):
            if not isinstance(row, list) or len(row) != dim_in:
                raise SpecError(f"kraus[{k}][{i}]: expected {dim_in} entries")
            for j, pair in enumerate(row):
                ops[k, i, j] = _complex(pair, f"kraus[{k}][{i}][{j}]")
    return QuantumChannel.from_kraus(ops)


def parse_state_spec(text: str) -> DensityMatrix:
    """Density-matrix document ``{"dim": d, "matrix": [[re, im], ...]}`` (row-major)."""
    doc = _load_json(text, "state spec")
    if not isinstance(doc, dict):
        raise SpecError("state spec must be a JSON object")
    d = _positive_int(doc, "dim")
    entries = doc.get("matrix")
    if not isinstance(entries, list) or len(entries) != d * d:
        raise SpecError(f"field 'matrix': expected {d * d} [re, im] pairs")
    m = np.array([_complex(p, f"matrix[{i}]") for i, p in enumerate(entries)]).reshape(d, d)
    return DensityMatrix(m)


def _parse_params(raw: str | None) -> dict:
    out: dict = {}
    if not raw:
        return out
    for item in raw.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise SpecError(f"--params: expected KEY=VALUE, got {item!r}")
        try:
            num = float(value)
        except ValueError:
            raise SpecError(f"--params: {key.strip()} is not a number: {value!r}") from None
        out[key.strip()] = int(num) if key.strip() == "d" else num
    return out


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None


def _channel_from_args(args) -> QuantumChannel:
    if args.channel and args.builtin:
        raise SpecError("give either --channel or --builtin, not both")
    if args.channel:
        return parse_channel_spec(_read(args.channel))
    if args.builtin:
        return standard_channel(args.builtin, **_parse_params(args.params))
    raise SpecError("one of --channel or --builtin is required")


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, seed=args.seed)


def cmd_compute(args) -> int:
    ch = _channel_from_args(args)
    q = args.quantity
    if q == "ce":
        r = compute_ce(ch, _config(args))
        print(f"C_E = {r.value_bits:.6f} bits")
        if not r.converged:
            print("warning: restarts did not agree; value may be under-converged", file=sys.stderr)
    elif q == "c1":
        r = compute_one_shot_c1(ch, _config(args))
        print(f"C_1 = {r.value_bits:.6f} bits (lower bound)")
    else:
        if not args.input_state:
            raise SpecError(f"--quantity {q} requires --input-state")
        rho = parse_state_spec(_read(args.input_state))
        if q == "mi":
            print(f"I = {mutual_information(ch, rho):.6f} bits")
        else:
            print(f"I_c = {coherent_information(ch, rho):.6f} bits")
    return 0


def _parse_range(raw: str) -> np.ndarray:
    parts = raw.split(",")
    if len(parts) != 3:
        raise SpecError(f"--range: expected START,END,COUNT, got {raw!r}")
    try:
        start, end, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise SpecError(f"--range: expected START,END,COUNT, got {raw!r}") from None
    if count < 1:
        raise SpecError("--range: COUNT must be positive")
    return np.linspace(start, end, count)


def write_sweep_csv(rows, path: str) -> None:
    lines = ["param,ce_bits"] + [f"{p:.6f},{v:.6f}" for p, v in rows]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_sweep(args) -> int:
    grid = _parse_range(args.range)
    fixed = _parse_params(args.params)
    rows = capacity_sweep(args.builtin, grid, _config(args), param=args.param, **fixed)
    write_sweep_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_verify(args) -> int:
    ids = list(SUITES) if args.suite == "all" else [args.suite]
    if args.suite != "all" and args.suite not in SUITES:
        raise SpecError(f"unknown suite {args.suite!r}; known: all, {', '.join(SUITES)}")
    reports = []
    for sid in ids:
        rep = run_suite(sid, args.trials, args.seed)
        status = "PASS" if rep.failures == 0 else "FAIL"
        print(f"{status} {sid}: {rep.failures}/{rep.trials} failures, "
              f"worst slack {rep.worst_slack_bits:.6f} bits", file=sys.stderr)
        reports.append(rep.to_dict(timing=args.timing))
    payload = reports[0] if len(reports) == 1 else reports
    text = json.dumps(payload, indent=2) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r["failures"] == 0 for r in reports) else 1


def cmd_info(args) -> int:
    ch = parse_channel_spec(_read(args.channel)) if args.channel else _channel_from_args(args)
    report = validate_cptp(ch)
    print(f"dim_in = {ch.dim_in}")
    print(f"dim_out = {ch.dim_out}")
    print(f"kraus_rank = {ch.rank}")
    print(f"cptp_deviation = {report.deviation:.6e}")
    spectrum = np.clip(np.linalg.eigvalsh(choi_of(ch).state.matrix)[::-1], 0.0, None)
    print("choi_spectrum = " + " ".join(f"{x:.6f}" for x in spectrum))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="caplab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def channel_args(p):
        p.add_argument("--channel", help="channel-spec JSON file")
        p.add_argument("--builtin", choices=sorted(
            ["identity", "depolarizing", "dephasing", "amplitude_damping", "erasure"]))
        p.add_argument("--params", help="K=V,... parameters for --builtin")

    def optimizer_args(p):
        p.add_argument("--restarts", type=int, default=OptimizerConfig.restarts)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("compute", help="compute a capacity or information quantity")
    channel_args(p)
    optimizer_args(p)
    p.add_argument("--quantity", choices=["ce", "c1", "mi", "ci"], required=True)
    p.add_argument("--input-state", help="density-matrix JSON file (for mi and ci)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", help="C_E along one parameter of a builtin family, to CSV")
    p.add_argument("--builtin", required=True)
    p.add_argument("--param", required=True)
    p.add_argument("--range", required=True, help="START,END,COUNT")
    p.add_argument("--params", help="other fixed K=V,... parameters")
    p.add_argument("--out", required=True)
    optimizer_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run inequality suites and emit a JSON report")
    p.add_argument("--suite", required=True, help="suite id or 'all'")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--timing", action="store_true",
                   help="record measured elapsed_seconds (output is then not reproducible)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("info", help="print dimensions, Kraus rank, CPTP deviation, Choi spectrum")
    channel_args(p)
    p.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (ValueError, KeyError, ArithmeticError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
