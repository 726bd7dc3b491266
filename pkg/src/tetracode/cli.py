"""Command-line entry point: ``tetracode <command> [options]``.

Exit codes: 0 success, 1 usage or configuration error, 2 heralded decode failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from . import __version__
from .code import CodeConstructionError, TetrahedralCode, boundary_bulk_ratio, carve_tetrahedral_code
from .gf2 import PauliType, min_logical_weight, stabilizer_membership
from .lattice import Color
from .noise_sim import (CSV_COLUMNS, NoiseModel, estimate_crossing, probability_grid, read_csv,
                        run_trials, sweep_probabilities, write_csv)
from .xdecoder import LiftConfig, decode_x, extract_x_syndrome
from .zdecoder import decode_z, extract_z_syndrome

EXIT_OK, EXIT_USAGE, EXIT_HERALDED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@lru_cache(maxsize=None)
def get_code(d: int) -> TetrahedralCode:
    return carve_tetrahedral_code(d)


def _default_seed() -> int:
    raw = os.environ.get("TETRACODE_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"TETRACODE_SEED must be an integer, got {raw!r}") from None


def _distance(text: str) -> int:
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if d < 3 or d % 2 == 0:
        raise argparse.ArgumentTypeError(f"distance must be odd and >= 3, got {d}")
    return d


def _distances(text: str) -> list[int]:
    return [_distance(t) for t in text.split(",") if t.strip()]


def _probability(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {p}")
    return p


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {n}")
    return n


def _decoder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lift-color", default="r", choices=["r", "g", "b", "y"])
    p.add_argument("--sweep-mode", default="sweep", choices=["sweep", "gf2"],
                   help="cellular-automaton sweep or local GF(2) fill")
    p.add_argument("--sweep-schedule", default="-r,-g,-b,-y",
                   help="comma-separated directions, e.g. --sweep-schedule=-g,+b or 'away'")
    p.add_argument("--max-sweep-rounds", type=_positive, default=None)
    p.add_argument("--three-pairs", action="store_true",
                   help="Z decoder: match only on the 3 color pairs containing the lift color")


def _sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--type", dest="error_type", required=True, choices=["x", "z"])
    p.add_argument("--trials", type=_positive, default=10_000)
    p.add_argument("--seed", type=int, default=None, help="default: $TETRACODE_SEED or 0")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--out", type=Path, default=None, help="CSV path (metadata goes to <out>.meta.json)")
    _decoder_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tetracode", description="Tetrahedral color code toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="carve a code and write lattice + code JSON")
    p.add_argument("--distance", type=_distance, required=True)
    p.add_argument("--out", type=Path, required=True, help="code JSON path; lattice goes to <stem>.lattice.json")

    p = sub.add_parser("validate", help="print n, k, ranks and a distance report")
    p.add_argument("--distance", type=_distance, required=True)
    p.add_argument("--w-max", type=int, default=None,
                   help="exhaustive logical search bound (default 3 at d=3, else 2)")

    p = sub.add_parser("decode", help="decode one error or syndrome read from a file")
    p.add_argument("--distance", type=_distance, required=True)
    p.add_argument("--type", dest="error_type", required=True, choices=["x", "z"])
    p.add_argument("--input", type=Path, required=True, help="ids, one per line ('-' for stdin)")
    p.add_argument("--syndrome", action="store_true",
                   help="input lists syndrome ids (edges for x, vertices for z) instead of qubits")
    _decoder_flags(p)

    p = sub.add_parser("simulate", help="Monte Carlo at one or more p for one distance")
    p.add_argument("--distance", type=_distance, required=True)
    p.add_argument("--p", type=_probability, nargs="+", required=True)
    _sim_flags(p)

    p = sub.add_parser("sweep", help="Monte Carlo over a probability grid for several distances")
    p.add_argument("--distances", type=_distances, required=True)
    p.add_argument("--p-min", type=_probability, required=True)
    p.add_argument("--p-max", type=_probability, required=True)
    p.add_argument("--steps", type=_positive, default=8)
    p.add_argument("--linear", action="store_true", help="linear instead of log spacing")
    _sim_flags(p)

    p = sub.add_parser("beta", help="boundary-to-bulk qubit ratio per distance")
    p.add_argument("--distances", type=_distances, required=True)

    p = sub.add_parser("crossing", help="crossing of two curves in a results CSV")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--pair", type=_distances, required=True, help="two distances, e.g. 5,7")
    p.add_argument("--type", dest="error_type", default=None, choices=["x", "z"])
    return parser


def _config(args: argparse.Namespace) -> LiftConfig:
    schedule = tuple(s.strip() for s in args.sweep_schedule.split(",") if s.strip())
    try:
        return LiftConfig(lift_color=Color.parse(args.lift_color), sweep_schedule=schedule,
                          max_sweep_rounds=args.max_sweep_rounds, sweep_mode=args.sweep_mode)
    except ValueError as err:
        raise UsageError(str(err)) from None


def _metadata(args: argparse.Namespace, **extra) -> dict:
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())}
    return {"tool": "tetracode", "version": __version__, "config": config, **extra}


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _read_ids(path: Path) -> list[int]:
    text = sys.stdin.read() if str(path) == "-" else path.read_text(encoding="utf-8")
    ids = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            try:
                ids.append(int(line))
            except ValueError:
                raise UsageError(f"{path}: not an integer id: {line!r}") from None
    return ids


# commands ----------------------------------------------------------------------


def cmd_build(args) -> int:
    code = get_code(args.distance)
    lattice_path = args.out.with_name(args.out.stem + ".lattice.json")
    lattice_path.write_text(code.lattice.to_json(), encoding="utf-8")
    payload = code.to_dict()
    payload["lattice_file"] = lattice_path.name
    payload["metadata"] = _metadata(args)
    _write_json(args.out, payload)
    print(code.summary())
    return EXIT_OK


def cmd_validate(args) -> int:
    code = get_code(args.distance)
    w_max = args.w_max if args.w_max is not None else (3 if code.d == 3 else 2)
    print(f"d={code.d} n={code.n_qubits} k={code.k} rank_hx={code.rank_hx} rank_hz={code.rank_hz}")
    for kind in PauliType:
        w = min_logical_weight(code, kind, w_max)
        report = f"{w}" if w is not None else f">={w_max + 1} (no logical up to weight {w_max})"
        print(f"min_{kind.value}_logical_weight={report}")
    return EXIT_OK


def cmd_decode(args) -> int:
    code = get_code(args.distance)
    cfg = _config(args)
    kind = PauliType.parse(args.error_type)
    ids = _read_ids(args.input)
    limit = (code.lattice.count(1) if kind is PauliType.X else code.lattice.count(0)) if args.syndrome else code.n_qubits
    bad = [i for i in ids if not 0 <= i < limit]
    if bad:
        raise UsageError(f"ids out of range: {bad[:5]}")
    error = None if args.syndrome else frozenset(ids)
    if kind is PauliType.X:
        syndrome = frozenset(ids) if args.syndrome else extract_x_syndrome(code, error).members
        unchecked = [e for e in syndrome if not code.is_z_check_edge[e]]
        if unchecked:
            raise UsageError(f"edges carry no Z check: {unchecked[:5]}")
        outcome = decode_x(code, syndrome, cfg)
    else:
        syndrome = frozenset(ids) if args.syndrome else extract_z_syndrome(code, error)
        quasi = [v for v in syndrome if code.lattice.is_quasi(v)]
        if quasi:
            raise UsageError(f"quasivertices carry no X check: {quasi}")
        outcome = decode_z(code, syndrome, cfg, all_pairs=not args.three_pairs)
    if outcome.heralded_failure:
        print(f"outcome=heralded-failure stage={outcome.failure_stage.value} detail={outcome.detail}")
        return EXIT_HERALDED
    print("correction=" + ",".join(map(str, sorted(outcome.correction.members))))
    if error is not None:
        residual = error ^ outcome.correction.members
        print(f"residual={stabilizer_membership(code, residual, kind).value}")
    else:
        print("outcome=decoded")
    return EXIT_OK


def _emit_rows(args, rows, codes) -> None:
    meta = _metadata(args, seed=rows[0].seed if rows else None, columns=list(CSV_COLUMNS),
                     codes=[{"d": c.d, "n": c.n_qubits, "offsets": list(c.offsets)} for c in codes],
                     wall_time=sum(r.wall_time for r in rows))
    if args.out is None:
        write_csv(rows, sys.stdout)
        print(json.dumps(meta, sort_keys=True), file=sys.stderr)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
        _write_json(args.out.with_name(args.out.name + ".meta.json"), meta)


def _progress(row) -> None:
    print(f"d={row.d} p={row.p:.4g} failures={row.failures}/{row.trials} ({row.wall_time:.1f}s)", file=sys.stderr)


def cmd_simulate(args) -> int:
    args.seed = _default_seed() if args.seed is None else args.seed
    cfg = _config(args)
    code = get_code(args.distance)
    rows = [run_trials(code, NoiseModel(args.error_type, p), args.trials, args.seed, args.workers, cfg)
            for p in args.p]
    _emit_rows(args, rows, [code])
    return EXIT_OK


def cmd_sweep(args) -> int:
    args.seed = _default_seed() if args.seed is None else args.seed
    cfg = _config(args)
    if args.p_min > args.p_max:
        raise UsageError("--p-min exceeds --p-max")
    try:
        grid = probability_grid(args.p_min, args.p_max, args.steps, log=not args.linear)
    except ValueError as err:
        raise UsageError(str(err)) from None
    codes = [get_code(d) for d in args.distances]
    rows = sweep_probabilities(codes, args.error_type, grid, args.trials, args.seed, args.workers, cfg,
                               progress=_progress if args.out is not None else None)
    _emit_rows(args, rows, codes)
    return EXIT_OK


def cmd_beta(args) -> int:
    print("d,n_qubits,boundary,bulk,beta,side")
    for d in args.distances:
        code = get_code(d)
        beta = boundary_bulk_ratio(code)
        boundary = len(code.boundary_qubits)
        side = "inf" if math.isinf(beta) else (">1" if beta > 1 else ("<1" if beta < 1 else "=1"))
        shown = "inf" if math.isinf(beta) else f"{float(beta):.10g}"
        print(f"{d},{code.n_qubits},{boundary},{code.n_qubits - boundary},{shown},{side}")
    return EXIT_OK


def cmd_crossing(args) -> int:
    if len(args.pair) != 2:
        raise UsageError("--pair needs exactly two distances")
    with open(args.input, encoding="utf-8") as fh:
        rows = read_csv(fh)
    if args.error_type:
        rows = [r for r in rows if r.error_type == args.error_type]
    types = {r.error_type for r in rows}
    if len(types) > 1:
        raise UsageError("CSV mixes error types; pass --type")
    a, b = ([r for r in rows if r.d == d] for d in args.pair)
    if not a or not b:
        raise UsageError(f"CSV lacks rows for distances {args.pair}")
    try:
        crossing = estimate_crossing(sorted(a, key=lambda r: r.p), sorted(b, key=lambda r: r.p))
    except ValueError as err:
        raise UsageError(str(err)) from None
    if crossing is None:
        print("no crossing in range")
    else:
        print(f"crossing p={crossing.p:.6g} interval=[{crossing.low:.6g}, {crossing.high:.6g}]")
    return EXIT_OK


COMMANDS = {
    "build": cmd_build, "validate": cmd_validate, "decode": cmd_decode, "simulate": cmd_simulate,
    "sweep": cmd_sweep, "beta": cmd_beta, "crossing": cmd_crossing,
}


def run_command(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    except (OSError, CodeConstructionError) as err:
        print(f"tetracode: error: {err}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
