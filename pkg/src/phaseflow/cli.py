"""Command-line interface.

Subcommands:

* ``simulate <config>``            -- run a configured simulation
* ``verify <suite> [--flags]``     -- lemma | potential_inequalities | invariants
* ``probe-counterexample ...``     -- sharpness probe of the product estimate
* ``report <run_dir>``             -- digest a finished run directory

Exit codes: 0 ok, 2 configuration error, 3 numerical failure (including
failed verification checks).  ``PHASEFLOW_THREADS`` caps kernel parallelism;
``PHASEFLOW_NUMBA`` selects the kernel backend.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, parse_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="phaseflow", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a simulation from a config file")
    sim.add_argument("config")
    sim.add_argument("--out", default=None, help="override output directory")

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=["lemma", "potential_inequalities", "invariants"])
    ver.add_argument("--p", action="append", type=float, default=None)
    ver.add_argument("--samples", type=int, default=100)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--grid-n", type=int, default=128)
    ver.add_argument("--c-cap", type=float, default=10.0)
    ver.add_argument("--theta", action="append", type=float, default=None)
    ver.add_argument("--model", default="nsac",
                     choices=["transport", "nsac", "nsac_matched", "euler_ac"])
    ver.add_argument("--steps", type=int, default=200)
    ver.add_argument("--dt", type=float, default=1e-3)
    ver.add_argument("--csv", default=None,
                     help="write per-sample lemma rows (p,seed,lhs,rhs_core,ratio)")

    probe = sub.add_parser("probe-counterexample",
                           help="divergence trends of the sharpness counterexample")
    probe.add_argument("--alpha", type=float, default=0.75)
    probe.add_argument("--beta", type=float, default=0.49)
    probe.add_argument("--r0-ladder", nargs="+", type=float,
                       default=[1e-2, 1e-3, 1e-4])
    probe.add_argument("--p", type=float, default=4.0)
    probe.add_argument("--outer", type=float, default=0.9)

    rep = sub.add_parser("report", help="summarize a run directory")
    rep.add_argument("run_dir")
    return ap


def _cmd_simulate(args) -> int:
    from .runner import run

    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    result = run(cfg, out_dir=args.out)
    print(f"{result.reason}; {result.steps_done} steps, output in {result.out_dir}")
    for k, v in result.summary.items():
        print(f"  {k} = {v}")
    if result.checkpoint_path is not None:
        print(f"  last good checkpoint: {result.checkpoint_path}")
    return result.exit_code


def _cmd_verify(args) -> int:
    from .runner import verify_suite

    options = {
        "p": args.p, "samples": args.samples, "seed": args.seed,
        "grid_n": args.grid_n, "c_cap": args.c_cap, "theta": args.theta,
        "model": args.model, "steps": args.steps, "dt": args.dt,
        "csv": args.csv,
    }
    ok, lines = verify_suite(args.suite, options)
    for line in lines:
        print(line)
    return EXIT_OK if ok else EXIT_NUMERICAL


def _cmd_probe(args) -> int:
    from .product_estimate import counterexample_probe

    try:
        rep = counterexample_probe(args.alpha, args.beta, args.r0_ladder,
                                   p=args.p, outer_radius=args.outer)
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"alpha={rep.alpha:g} beta={rep.beta:g} p={rep.p:g} "
          f"outer_radius={rep.outer_radius:g}")
    print("r0,g_l2,g_lp,f_h1,fg_l2")
    for row in rep.rows:
        print(f"{row.r0:.17g},{row.g_l2:.17g},{row.g_lp:.17g},"
              f"{row.f_h1:.17g},{row.fg_l2:.17g}")
    return EXIT_OK


def _cmd_report(args) -> int:
    from .runner import report_run

    try:
        print(report_run(args.run_dir))
    except (OSError, ValueError) as exc:
        print(f"cannot report on {args.run_dir}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "simulate":
        code = _cmd_simulate(args)
    elif args.command == "verify":
        code = _cmd_verify(args)
    elif args.command == "probe-counterexample":
        code = _cmd_probe(args)
    else:
        code = _cmd_report(args)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
