"""Command line front end.

Subcommands: simulate, verify-lemmas, sweep, norms.  Exit codes: 0 success,
2 constraint-invalid configuration, 3 numerical guard tripped, 4 verification
failure.  Flags mirror the configuration keys; --override-constraints runs
an invalid configuration anyway and marks the output as unsupported.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys

from .besov import BesovIndex, besov_norm_heat, besov_norm_lp
from .config import CONFIG_KEYS, ExperimentConfig, _parse_value, load_config
from .experiment import (
    ConstraintError,
    run_simulation,
    run_sweep,
    sweep_slopes,
    write_series_csv,
    write_sweep_csv,
)
from .solver import BlowUpError

EXIT_OK = 0
EXIT_INVALID_CONFIG = 2
EXIT_NUMERICAL_GUARD = 3
EXIT_CHECK_FAILURE = 4


def _add_config_flags(parser):
    parser.add_argument("config", nargs="?", help="key=value configuration file")
    for key in CONFIG_KEYS:
        parser.add_argument(f"--{key}", dest=f"opt_{key}", default=None,
                            metavar="V")
    parser.add_argument("--override-constraints", action="store_true",
                        help="run anyway; output is marked unsupported")


def _config_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    updates = {}
    for key in CONFIG_KEYS:
        raw = getattr(args, f"opt_{key}")
        if raw is not None:
            updates[key] = _parse_value(key, raw)
    return dataclasses.replace(cfg, **updates)


def _print_reports(reports, file=sys.stdout):
    for rep in reports:
        mark = "ok" if rep.satisfied else "VIOLATED"
        kind = "" if rep.hard else " (soft)"
        detail = f"  {rep.detail}" if rep.detail else ""
        print(f"  [{mark}] {rep.name}{kind}  margin={rep.margin:+.4g}{detail}",
              file=file)


def cmd_simulate(args):
    cfg = _config_from_args(args)
    os.makedirs(cfg.outdir, exist_ok=True)
    dump = os.path.join(cfg.outdir, "fields") if args.dump_fields else None
    try:
        result = run_simulation(cfg, override_constraints=args.override_constraints,
                                dump_dir=dump)
    except ConstraintError as exc:
        print(f"configuration rejected: {exc}", file=sys.stderr)
        _print_reports(exc.reports, file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except BlowUpError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_GUARD
    path = os.path.join(cfg.outdir, f"series_r{cfg.r}.csv")
    write_series_csv(path, result)
    s = result.summary
    print("constraint report:")
    _print_reports(result.reports)
    if result.overridden:
        print("WARNING: constraints overridden; results unsupported")
    print(f"wrote {path}")
    print(f"r={s['r']} K={s['K']} T={s['T']:.6g} grid={s['N1']}x{s['N2']}x{s['N3']} "
          f"steps={s['n_steps']}")
    print(f"initial norm (index -alpha): {s['u0_besov_shell']:.6g}")
    print(f"peak norm (index -s) at t*={s['t_star']:.6g}: "
          f"{s['peak_besov_shell']:.6g}")
    print(f"inflation ratio: {s['ratio']:.6g}   reported floor: {s['floor']:.6g}")
    return EXIT_OK


def cmd_sweep(args):
    cfg = _config_from_args(args)
    r_list = [int(x) for x in args.r_list.split(",") if x]
    os.makedirs(cfg.outdir, exist_ok=True)
    try:
        results = run_sweep(cfg, r_list, workers=args.workers,
                            override_constraints=args.override_constraints)
    except ConstraintError as exc:
        print(f"sweep member rejected: {exc}", file=sys.stderr)
        _print_reports(exc.reports, file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except BlowUpError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_GUARD
    for res in results:
        write_series_csv(
            os.path.join(cfg.outdir, f"series_r{res.summary['r']}.csv"), res
        )
    path = os.path.join(cfg.outdir, "sweep_summary.csv")
    write_sweep_csv(path, results)
    slopes = sweep_slopes(results)
    print(f"wrote {path}")
    print(f"{'r':>4} {'ratio':>12} {'peak':>12} {'initial':>12}")
    for res in results:
        s = res.summary
        print(f"{s['r']:>4} {s['ratio']:>12.6g} {s['peak_besov_shell']:>12.6g} "
              f"{s['u0_besov_shell']:>12.6g}")
    beta = cfg.beta
    print(f"fitted slopes: initial {slopes['u0_besov_shell']:+.3f} "
          f"(target {-beta:+.3f}), ratio {slopes['ratio']:+.3f} "
          f"(target {1.0 - beta:+.3f})")
    return EXIT_OK


def cmd_verify(args):
    from .checks import run_suite

    results = run_suite(alpha=args.alpha, quick=args.quick)
    failed = 0
    for res in results:
        print(res)
        failed += not res.passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILURE


def cmd_norms(args):
    from .snapshots import read_snapshot

    field, params, t = read_snapshot(args.snapshot)
    from .spectral import linf_norm

    idx = BesovIndex(s=args.s, p=math.inf, alpha=params.alpha)
    print(f"snapshot t={t:.6g} alpha={params.alpha} nu={params.nu} "
          f"dims={field.lattice.dims}")
    print(f"sup norm:            {linf_norm(field):.12g}")
    print(f"shell norm (-{args.s:g}):   {besov_norm_lp(field, idx):.12g}")
    print(f"heat norm  (-{args.s:g}):   {besov_norm_heat(field, idx):.12g}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fnslab",
        description="Spectral laboratory for norm growth in fractionally "
                    "dissipative incompressible flow",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one configuration")
    _add_config_flags(p_sim)
    p_sim.add_argument("--dump-fields", action="store_true",
                       help="write one binary snapshot file per output time")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run a family of r values")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--r-list", default="2,3,4,5",
                         help="comma separated r values")
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_ver = sub.add_parser("verify-lemmas",
                           help="run the verification battery")
    p_ver.add_argument("--alpha", type=float, default=1.0)
    p_ver.add_argument("--quick", action="store_true",
                       help="smaller corpora, trimmed r range")
    p_ver.set_defaults(func=cmd_verify)

    p_norms = sub.add_parser("norms", help="print norms of a snapshot file")
    p_norms.add_argument("snapshot")
    p_norms.add_argument("--s", type=float, default=1.0)
    p_norms.set_defaults(func=cmd_norms)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
