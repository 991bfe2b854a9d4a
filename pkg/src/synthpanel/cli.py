"""Command line entry point: ``synthpanel {estimate,bootstrap,diagnose,simulate,oracle}``.

Exit codes: 0 success, 1 validation failure, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from dataclasses import replace

import numpy as np

from . import pipeline, report
from .ingest import emit_counts_csv, load_panel, parse_config
from .panel import ValidationError
from .scm import solve_weights
from .synthgen import GeneratorConfig, generate_factor_panel, grid_oracle_weights

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


def _load_config(path: str, args: argparse.Namespace):
    with open(path, encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    overrides = {}
    if getattr(args, "workers", None):
        overrides["workers"] = args.workers
    if getattr(args, "out", None):
        overrides["output_dir"] = args.out
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


def _cmd_run(args: argparse.Namespace, with_bootstrap: bool) -> int:
    cfg = _load_config(args.config, args)
    res = pipeline.run(cfg, with_bootstrap=with_bootstrap)
    print(report.summarize(res))
    if cfg.output_dir:
        for path in report.export_run(res, cfg.output_dir):
            print(f"wrote {path}")
    return EXIT_OK


def _cmd_diagnose(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, args)
    if not cfg.input_path:
        raise FileNotFoundError("config has no 'input' path")
    res = pipeline.diagnose(load_panel(cfg.input_path), cfg)
    print("# hull check (residualized yearly means)")
    print(res.hull.to_csv(), end="")
    print("# trend screen")
    print(res.screen.to_csv(), end="")
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    t0 = args.t0 if args.t0 is not None else args.first_year + (4 * args.years) // 7 - 1
    cfg = GeneratorConfig(
        n_units=args.units, first_year=args.first_year, last_year=args.first_year + args.years - 1,
        t0_year=t0, n_factors=args.factors, loading_scale=args.loading, noise_sd=args.noise,
        tau=args.tau, seed=args.seed,
    )
    panel, _ = generate_factor_panel(cfg)
    text = emit_counts_csv(panel.records())
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"wrote {args.out} ({panel.n_units} units, {panel.n_periods} periods, "
              f"treated={cfg.treated_unit}, t0={t0})")
    return EXIT_OK


def read_instance_csv(text: str) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Parse an oracle instance: header ``treated,<donor>,...``, one row per pre period."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise ValidationError("instance needs a header and at least one row")
    header = [h.strip() for h in rows[0]]
    if header[0] != "treated" or len(header) < 2:
        raise ValidationError("instance header must be 'treated,<donor>,...'")
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:]])
    except ValueError as exc:
        raise ValidationError(f"instance: {exc}") from None
    if data.shape[1] != len(header):
        raise ValidationError("ragged instance rows")
    return data[:, 0], data[:, 1:], header[1:]


def _cmd_oracle(args: argparse.Namespace) -> int:
    if args.input == "-":
        text = sys.stdin.read()
    else:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    b, A, ids = read_instance_csv(text)
    w_grid, obj_grid = grid_oracle_weights(b, A, args.step)
    sol = solve_weights(b, A, donor_ids=ids)
    print("donor,grid_weight,solver_weight")
    for d, g, s in zip(ids, w_grid, sol.weights):
        print(f"{d},{float(g)!r},{float(s)!r}")
    print(f"# grid objective {float(obj_grid)!r}; solver objective {float(sol.objective)!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="synthpanel", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, hlp in (("estimate", "SCM/SDID estimates with reports"),
                      ("bootstrap", "estimates plus donor-bootstrap intervals"),
                      ("diagnose", "hull and trend-screen reports only")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--config", required=True)
        p.add_argument("--out", help="output directory (overrides output_dir)")
        if name == "bootstrap":
            p.add_argument("--workers", type=int, help="worker processes (results do not change)")

    p = sub.add_parser("simulate", help="write a generated panel as counts CSV")
    p.add_argument("--units", type=int, default=8)
    p.add_argument("--years", type=int, default=7)
    p.add_argument("--first-year", type=int, default=2013)
    p.add_argument("--t0", type=int, help="last pre-treatment year (default: 4/7 of the span)")
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--noise", type=float, default=50.0)
    p.add_argument("--factors", type=int, default=2)
    p.add_argument("--loading", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")

    p = sub.add_parser("oracle", help="grid-certified weights for a small instance CSV")
    p.add_argument("--step", type=float, default=0.001)
    p.add_argument("--input", default="-", help="instance CSV (default: stdin)")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "estimate":
            return _cmd_run(args, with_bootstrap=False)
        if args.command == "bootstrap":
            return _cmd_run(args, with_bootstrap=True)
        if args.command == "diagnose":
            return _cmd_diagnose(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_oracle(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
