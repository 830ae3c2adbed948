"""Experiment driver: evolve, decompose, measure, and emit CSV tables.

Output schemas are versioned and the writers are deterministic: the same
configuration and seed produce byte-identical files.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .besov import BesovIndex, besov_norm_heat, besov_norm_lp
from .closed_forms import ensemble_linf, first_iterate
from .config import ExperimentConfig
from .construction import (
    build_u0,
    constraints_ok,
    predicted_bounds,
    validate_parameters,
)
from .snapshots import write_snapshot
from .solver import TimeGrid, decompose, mild_solve
from .spectral import linf_norm

SERIES_SCHEMA = "normseries/v1"
SWEEP_SCHEMA = "sweepsummary/v1"
SERIES_COLUMNS = (
    "t", "u_linf", "u_besov_shell", "u_besov_heat", "free_linf",
    "low_mode_linf", "low_mode_besov_shell", "low_mode_besov_heat",
    "cross_diff_linf", "cross_sum_linf", "remainder_linf", "floor",
)
SWEEP_COLUMNS = (
    "r", "K", "T", "N1", "N2", "N3", "u0_besov_shell", "u0_besov_heat",
    "u0_besov_shell_p", "t_star", "peak_besov_shell", "peak_besov_heat",
    "ratio", "remainder_linf_max", "floor",
)


class ConstraintError(ValueError):
    """Configuration rejected by the admissibility constraints."""

    def __init__(self, reports):
        failed = [r.name for r in reports if r.hard and not r.satisfied]
        super().__init__("constraints failed: " + ", ".join(failed))
        self.reports = reports


@dataclass
class SimulationResult:
    cfg: ExperimentConfig
    reports: list
    rows: list          # list of dicts keyed by SERIES_COLUMNS
    summary: dict
    overridden: bool = False


def snapshot_schedule(t_final, knee, n=50):
    """~n times in (0, T], log-spaced plus linear, dense near the knee."""
    n_log = max(n // 2, 2)
    n_lin = max(n - n_log, 2)
    lo = min(knee, t_final) / 16.0
    lo = max(lo, t_final * 1e-5)
    log_part = np.geomspace(lo, t_final, n_log)
    lin_part = np.linspace(t_final / n_lin, t_final, n_lin)
    times = np.unique(np.concatenate([[0.0], log_part, lin_part]))
    times[-1] = t_final
    return times


def run_simulation(cfg: ExperimentConfig, override_constraints=False,
                   dump_dir=None, initial_field=None) -> SimulationResult:
    """Evolve the configured data and tabulate all norms per snapshot.

    initial_field replaces the constructed initial data while keeping every
    measurement identical; fault-injection experiments use it to verify the
    suite detects construction errors.
    """
    icfg = cfg.inflation()
    reports = validate_parameters(icfg)
    ok = constraints_ok(reports)
    if not ok and not override_constraints:
        raise ConstraintError(reports)

    params = cfg.params()
    lattice = cfg.lattice()
    u0 = build_u0(icfg, lattice) if initial_field is None else initial_field
    times = snapshot_schedule(
        icfg.t_final, icfg.K ** (-2.0 * icfg.alpha), n=cfg.snapshots
    )
    grid = TimeGrid(times, dt=cfg.dt)
    traj = mild_solve(u0, params, grid)
    dec = decompose(traj, icfg)
    iterate = first_iterate(icfg)

    idx_s = BesovIndex(s=icfg.s, p=math.inf, alpha=icfg.alpha)
    idx_a = BesovIndex(s=icfg.alpha, p=math.inf, alpha=icfg.alpha)
    idx_a_p = BesovIndex(s=icfg.alpha, p=icfg.p, alpha=icfg.alpha)
    floor = predicted_bounds(icfg)["inflation_floor"]

    rows = []
    for i, t in enumerate(traj.times):
        t = float(t)
        u = traj.fields[i]
        low_coef = sum(term.coefficient(t) for term in iterate.low_mode)
        low_linf = abs(float(low_coef))
        # |eta| = 1: the shell norm of the single unit-frequency wave is its
        # amplitude; the heat route maximizes t^(s/2a) e^(-t) exactly.
        low_shell = low_linf
        low_heat = low_linf * (icfg.s / (2.0 * icfg.alpha * math.e)) ** (
            icfg.s / (2.0 * icfg.alpha)
        )
        rows.append({
            "t": t,
            "u_linf": linf_norm(u),
            "u_besov_shell": besov_norm_lp(u, idx_s),
            "u_besov_heat": besov_norm_heat(u, idx_s),
            "free_linf": linf_norm(dec.free[i]),
            "low_mode_linf": low_linf,
            "low_mode_besov_shell": low_shell,
            "low_mode_besov_heat": low_heat,
            "cross_diff_linf": ensemble_linf(iterate.cross_diff, t),
            "cross_sum_linf": ensemble_linf(iterate.cross_sum, t),
            "remainder_linf": linf_norm(dec.remainder[i]),
            "floor": floor,
        })
        if dump_dir is not None:
            os.makedirs(dump_dir, exist_ok=True)
            write_snapshot(
                os.path.join(dump_dir, f"snap_{i:04d}.sfl"), u, params, t
            )

    u0_shell = besov_norm_lp(u0, idx_a)
    u0_heat = besov_norm_heat(u0, idx_a)
    u0_shell_p = besov_norm_lp(u0, idx_a_p)
    # Peak taken once the slowest pair has completed its transfer and the
    # free part has decayed to <= e^-2 of the initial norm: at bench-scale r
    # the lemma window's left edge still carries an e^-1 free remnant that
    # would mask the low-mode signal.
    knee = icfg.K ** (-2.0 * icfg.alpha)
    window_lo = 2.0 * knee if 2.0 * knee <= 0.8 * icfg.t_final else knee
    windowed = [row for row in rows if row["t"] >= window_lo] or rows[1:]
    peak = max(windowed, key=lambda row: row["u_besov_shell"])
    summary = {
        "r": icfg.r,
        "K": icfg.K,
        "T": icfg.t_final,
        "N1": lattice.dims[0],
        "N2": lattice.dims[1],
        "N3": lattice.dims[2],
        "u0_besov_shell": u0_shell,
        "u0_besov_heat": u0_heat,
        "u0_besov_shell_p": u0_shell_p,
        "t_star": peak["t"],
        "window_lo": window_lo,
        "peak_besov_shell": peak["u_besov_shell"],
        "peak_besov_heat": peak["u_besov_heat"],
        "ratio": peak["u_besov_shell"] / u0_shell,
        "remainder_linf_max": max(row["remainder_linf"] for row in rows),
        "floor": floor,
        "n_steps": traj.n_steps,
    }
    return SimulationResult(cfg, reports, rows, summary, overridden=not ok)


# ---------------------------------------------------------------------------
# CSV emission


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12e")


def write_series_csv(path, result: SimulationResult):
    lines = [f"# schema {SERIES_SCHEMA}"]
    if result.overridden:
        lines.append("# constraints overridden: results unsupported")
    lines.append(",".join(SERIES_COLUMNS))
    for row in result.rows:
        lines.append(",".join(_fmt(row[c]) for c in SERIES_COLUMNS))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sweep_csv(path, results):
    lines = [f"# schema {SWEEP_SCHEMA}", ",".join(SWEEP_COLUMNS)]
    for res in results:
        lines.append(",".join(_fmt(res.summary[c]) for c in SWEEP_COLUMNS))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# sweeps


def _sweep_member(args):
    cfg, override = args
    return run_simulation(cfg, override_constraints=override)


def run_sweep(base: ExperimentConfig, r_list, workers=None,
              override_constraints=False):
    """Run one simulation per r, in parallel processes when workers > 1.

    Every member is validated before anything runs, so an invalid member
    aborts the whole sweep with its report.
    """
    configs = [base.with_r(r) for r in r_list]
    for cfg in configs:
        reports = validate_parameters(cfg.inflation())
        if not constraints_ok(reports) and not override_constraints:
            raise ConstraintError(reports)
    if workers is None:
        workers = min(len(configs), os.cpu_count() or 1)
    if workers <= 1 or len(configs) == 1:
        results = [_sweep_member((cfg, override_constraints)) for cfg in configs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(_sweep_member,
                         [(cfg, override_constraints) for cfg in configs])
            )
    return results


def fitted_slope(xs, ys):
    """Least-squares slope of log(y) against log(x)."""
    xs = np.log(np.asarray(xs, dtype=np.float64))
    ys = np.log(np.asarray(ys, dtype=np.float64))
    return float(np.polyfit(xs, ys, 1)[0])


def sweep_slopes(results):
    rs = [res.summary["r"] for res in results]
    return {
        "u0_besov_shell": fitted_slope(rs, [r.summary["u0_besov_shell"] for r in results]),
        "ratio": fitted_slope(rs, [r.summary["ratio"] for r in results]),
        "peak_besov_shell": fitted_slope(rs, [r.summary["peak_besov_shell"] for r in results]),
    }
