"""Command-line entry point.

Exit codes: 0 success, 1 validation failure (bad config/spec or a failed
selftest comparison), 2 numerical convergence failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import selftest, sweep
from .config import NetworkConfig, dump_config, load_config
from .errors import ConfigError, ConvergenceError, NomaError

EXIT_OK, EXIT_INVALID, EXIT_CONVERGENCE = 0, 1, 2


def _estimators(text: str | None):
    if text is None:
        return None
    return tuple(e for e in text.replace(",", " ").split() if e)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=int, help="Monte Carlo trials")
    p.add_argument("--seed", type=int, help="Monte Carlo seed")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--workers", type=int, default=1, help="parallel workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nomaiot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one configuration")
    p.add_argument("--config", help="key = value config file (defaults if omitted)")
    p.add_argument("--estimators", default="exact",
                   help=f"comma-separated subset of {', '.join(sweep.ESTIMATORS)}")
    p.add_argument("--tiers", default="terrestrial,aerial")
    p.add_argument("--quantity", choices=sweep.QUANTITIES, default="coverage")
    p.add_argument("--N-f", dest="N_f", default="inf", help="packet length for throughput")
    p.add_argument("--sinr-mode", choices=("threshold", "instantaneous"), default="threshold")
    _add_common(p)

    p = sub.add_parser("sweep", help="run a YAML sweep spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--estimators", help="override the spec's estimators")
    _add_common(p)

    p = sub.add_parser("validate", help="check a config file or sweep spec")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--config")
    g.add_argument("--spec")

    p = sub.add_parser("selftest", help="analytic vs Monte Carlo regression grid")
    _add_common(p)
    p.add_argument("--quiet", action="store_true")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_eval(args) -> int:
    cfg = load_config(args.config) if args.config else NetworkConfig()
    tiers = tuple(t for t in args.tiers.replace(",", " ").split() if t)
    spec = sweep.SweepSpec(
        scenario=cfg, variable=None, grid=(None,), estimators=_estimators(args.estimators),
        trials=args.trials if args.trials is not None else 100_000,
        seed=args.seed if args.seed is not None else 0, tiers=tiers,
        quantity=args.quantity, N_f=sweep._number(args.N_f), sinr_mode=args.sinr_mode,
        workers=args.workers,
    )
    rows, _ = sweep.run_sweep(spec)
    _emit(sweep.render_csv(spec, rows), args.out)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = sweep.load_sweep_spec(args.spec)
    changes = {}
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.estimators:
        changes["estimators"] = _estimators(args.estimators)
    if args.workers > 1:
        changes["workers"] = args.workers
    if changes:
        spec = sweep.SweepSpec(**{**spec.__dict__, **changes})
    rows, timing = sweep.run_sweep(spec)
    out = args.out or spec.output_path
    if out:
        path = sweep.write_sweep(spec, rows, timing, out)
        print(f"wrote {path} ({len(rows)} rows)", file=sys.stderr)
    else:
        sys.stdout.write(sweep.render_csv(spec, rows))
    return EXIT_OK


def _cmd_validate(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        sys.stdout.write(dump_config(cfg))
    else:
        spec = sweep.load_sweep_spec(args.spec)
        sys.stdout.write(sweep.header(spec))
    return EXIT_OK


def _cmd_selftest(args) -> int:
    trials = args.trials if args.trials is not None else 1_000_000
    seed = args.seed if args.seed is not None else 20240601

    def progress(point, rows):
        if not args.quiet:
            bad = sum(not r.passed for r in rows)
            worst = max((r.z for r in rows), default=math.nan)
            print(f"{point.name:26s} {len(rows):3d} comparisons  max z {worst:8.2f}  "
                  f"{'PASS' if not bad else f'FAIL ({bad})'}", file=sys.stderr)

    results = selftest.run_selftest(trials=trials, seed=seed, workers=args.workers,
                                    progress=progress)
    _emit(selftest.render(results), args.out)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} comparisons within 3 SE", file=sys.stderr)
    return EXIT_INVALID if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"eval": _cmd_eval, "sweep": _cmd_sweep, "validate": _cmd_validate,
               "selftest": _cmd_selftest}[args.command]
    try:
        return handler(args)
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ConfigError, NomaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
