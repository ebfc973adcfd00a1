"""Command-line harness: run orbits, drive verification campaigns, export CSV.

Three subcommands:

* run       -- execute one configuration (YAML file, flags override fields)
               and emit the orbit record as YAML
* campaign  -- seeded randomized exact-arithmetic verification campaign;
               property failures are report content, not errors
* convert   -- turn a stored orbit record into an RFC-4180 CSV table

Exit status is nonzero exactly when an error occurs (bad configuration,
violated precondition, unreadable file); a campaign that finds property
failures still exits 0.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from .campaign import campaign
from .config import ConfigError, RunConfig, record_csv_rows, record_dumps, record_loads
from .numerics import BackendMismatchError, DigitBudgetExceededError, DomainError
from .runner import run as run_config
from .xsystem import NotAPerfectSquareError
from .zsystem import ShiftExhaustedError

_USER_ERRORS = (
    ConfigError,
    DomainError,
    BackendMismatchError,
    DigitBudgetExceededError,
    NotAPerfectSquareError,
    ShiftExhaustedError,
    ValueError,
    OSError,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solvmaps",
        description="Solvable two-variable quadratic recursions in discrete time.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one orbit configuration")
    run_p.add_argument("--config", required=True, help="YAML run configuration file")
    run_p.add_argument("--system", choices=["y", "x", "z", "w"])
    run_p.add_argument("--backend", choices=["exact", "float"])
    run_p.add_argument("--precision", type=int, help="float-backend precision in bits")
    run_p.add_argument("--method", choices=["iterated", "closed", "both"])
    run_p.add_argument("--horizon", type=int, help="number of steps (orbit has horizon+1 states)")
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--digit-budget", type=int, help="decimal-digit cap for exact results")
    run_p.add_argument("--rel-tol", type=float, help="relative tolerance for float comparisons")
    run_p.add_argument("--abs-tol", type=float, help="absolute tolerance for float comparisons")
    run_p.add_argument("--out", help="write the orbit record here instead of stdout")

    camp_p = sub.add_parser("campaign", help="seeded randomized verification campaign")
    camp_p.add_argument("--seed", type=int, default=0)
    camp_p.add_argument("--trials", type=int, default=200)
    camp_p.add_argument("--horizon", type=int, default=6, help="largest time index exercised")
    camp_p.add_argument("--out", help="write the report here instead of stdout")

    conv_p = sub.add_parser("convert", help="export an orbit record to CSV")
    conv_p.add_argument("record", help="orbit record YAML produced by `run --out`")
    conv_p.add_argument("--precision", type=int, default=53)
    conv_p.add_argument("--out", help="write the CSV here instead of stdout")

    return parser


_OVERRIDES = (
    ("system", "system"),
    ("backend", "backend"),
    ("precision", "precision"),
    ("method", "method"),
    ("horizon", "horizon"),
    ("seed", "seed"),
    ("digit_budget", "digit_budget"),
    ("rel_tol", "rel_tol"),
    ("abs_tol", "abs_tol"),
)


def _cmd_run(args) -> int:
    import yaml

    with open(args.config, "r", encoding="utf-8") as handle:
        try:
            mapping = yaml.safe_load(handle)
        except yaml.YAMLError as exc:
            raise ConfigError(f"configuration is not valid YAML: {exc}") from exc
    if not isinstance(mapping, dict):
        raise ConfigError("run configuration must be a YAML mapping")
    for attr, key in _OVERRIDES:
        value = getattr(args, attr)
        if value is not None:
            mapping[key] = value
    config = RunConfig.from_mapping(mapping)
    record = run_config(config)
    _emit(record_dumps(record), args.out)
    return 0


def _cmd_campaign(args) -> int:
    report = campaign(seed=args.seed, trials=args.trials, ell_max=args.horizon)
    _emit(report.to_text(), args.out)
    return 0


def _cmd_convert(args) -> int:
    with open(args.record, "r", encoding="utf-8") as handle:
        record = record_loads(handle.read(), precision=args.precision)
    header, rows = record_csv_rows(record)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    _emit(buffer.getvalue(), args.out)
    return 0


def _emit(text: str, out_path) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {"run": _cmd_run, "campaign": _cmd_campaign, "convert": _cmd_convert}[args.command]
    try:
        return handler(args)
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
