"""Run orchestration: time loops, diagnostics output, verification suites.

A run writes into its output directory:

* ``diagnostics.csv``  -- one row per sample time (schema in `diagnostics`),
* ``snapshot_NNNNNNNN.pfns`` -- periodic state snapshots (step-numbered),
* ``final.pfns`` / ``checkpoint.pfns`` -- last state (clean end / failure),
* ``summary.txt``      -- ``key = value`` lines with invariant verdicts.

Runs are deterministic given the config (seeds included), and a run resumed
from a snapshot reproduces the diagnostics rows of the uninterrupted run
byte-for-byte (the snapshot stores the accumulated time, states round-trip
losslessly, and a resumed run writes no row at its start time).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import diagnostics, eulerac, nsac, transport
from .config import RunConfig, build_initial_fields
from .material import FluidParams
from .nsac import NsacSchemeParams, SimState, StepFailureError
from .snapshot import write_snapshot
from .transport import GradientBlowupError, grad_inf_norm

__all__ = ["run", "RunResult", "verify_suite", "report_run"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


@dataclass
class RunResult:
    exit_code: int
    reason: str
    steps_done: int
    summary: dict
    out_dir: Path
    diagnostics_path: Path
    checkpoint_path: Path | None = None


def _state_fields(model: str, state) -> dict:
    if model == "euler_ac":
        return {"omega": state.omega.values, "phi": state.phi.values}
    return {"u_x": state.u.x_values, "u_y": state.u.y_values,
            "phi": state.phi.values}


def _snapshot_name(step: int) -> str:
    return f"snapshot_{step:08d}.pfns"


def run(config: RunConfig, out_dir=None) -> RunResult:
    v = config.values
    model = config.model
    out = Path(out_dir if out_dir is not None else v["output.dir"])
    out.mkdir(parents=True, exist_ok=True)

    grid, t0, phi0, flow0 = build_initial_fields(config)
    pot = config.make_potential()
    fluids = config.make_fluids()
    mode = v["potential.mode"]
    scheme = NsacSchemeParams(dt=v["scheme.dt"], newton_tol=v["scheme.newton_tol"],
                              newton_max_iter=v["scheme.newton_max_iter"],
                              nu_split=v["scheme.nu_split"])
    dt = scheme.dt
    n_steps = int(round((v["scheme.t_end"] - t0) / dt))
    if n_steps < 1:
        raise ValueError("t_end leaves no steps to take")
    resumed = v["ic.kind"] == "from_snapshot"
    diag_every = v["output.diag_every"]
    snap_every = v["output.snapshot_every"]

    if model == "euler_ac":
        euler_fluids = FluidParams(1.0, 1.0, 0.0, 0.0, fluids.sigma, fluids.gamma)
        state = eulerac.EulerState(t0, flow0, phi0, pot, mode)

        def advance(s):
            return eulerac.step(s, dt, sigma=fluids.sigma, gamma=fluids.gamma,
                                scheme=scheme)

        def make_record(s, prev, t):
            u = eulerac.velocity_from_vorticity(s.omega)
            pu = None
            if prev is not None:
                pu = diagnostics._Pair(eulerac.velocity_from_vorticity(prev.omega),
                                       prev.phi)
            return diagnostics.record(t, u, s.phi, euler_fluids, pot, mode,
                                      prev=pu, dt=dt, omega=s.omega)
    else:
        state = SimState(t0, flow0, phi0, pot, fluids, mode)
        grad_ceiling = None
        if model == "transport":
            grad_ceiling = v["transport.grad_ceiling_factor"] * max(
                grad_inf_norm(phi0), 1e-30)

        if model == "nsac":
            def advance(s):
                return nsac.step(s, scheme)
        elif model == "nsac_matched":
            def advance(s):
                return nsac.step_matched(s, scheme)
        else:
            def advance(s):
                return transport.step(s, scheme, grad_ceiling)

        def make_record(s, prev, t):
            return diagnostics.record(t, s.u, s.phi, fluids, pot, mode,
                                      prev=prev, dt=dt)

    records = []
    if not resumed:
        records.append(make_record(state, None, t0))

    reason = "ok"
    exit_code = EXIT_OK
    checkpoint: Path | None = None
    steps_done = 0
    t = t0
    last_good = state
    try:
        for n in range(1, n_steps + 1):
            prev = state
            state = advance(state)
            t = t + dt
            state.t = t  # keep accumulation identical across resume splits
            steps_done = n
            last_good = state
            if n % diag_every == 0:
                records.append(make_record(state, prev, t))
            if snap_every and n % snap_every == 0:
                write_snapshot(out / _snapshot_name(n), grid, t,
                               _state_fields(model, state))
    except (StepFailureError, GradientBlowupError) as exc:
        reason = ("gradient blow-up" if isinstance(exc, GradientBlowupError)
                  else "step failure")
        reason += f": {exc}"
        exit_code = EXIT_NUMERICAL
        checkpoint = out / "checkpoint.pfns"
        write_snapshot(checkpoint, grid, last_good.t,
                       _state_fields(model, last_good))

    diag_path = out / "diagnostics.csv"
    diagnostics.write_csv(diag_path, records)
    if exit_code == EXIT_OK:
        write_snapshot(out / "final.pfns", grid, t, _state_fields(model, state))

    summary = _summarize(records, model, steps_done, t, reason)
    _write_summary(out / "summary.txt", summary)
    return RunResult(exit_code, reason, steps_done, summary, out, diag_path,
                     checkpoint)


def _summarize(records, model: str, steps: int, t_final: float, reason: str) -> dict:
    summary = {"model": model, "steps": steps, "t_final": t_final,
               "reason": reason}
    if records:
        mass0 = records[0].mass
        summary["mass_drift_max"] = max(abs(r.mass - mass0) for r in records)
        energies = [r.energy_total for r in records]
        upt = -math.inf
        ok = True
        for a, b in zip(energies, energies[1:]):
            if math.isnan(a) or math.isnan(b):
                ok = False
                continue
            upt = max(upt, b - a - 1e-10 * (1.0 + abs(a)))
        summary["energy_monotone"] = bool(ok and upt <= 0.0)
        summary["energy_max_uptick"] = upt if math.isfinite(upt) else 0.0
        summary["separation_delta_min"] = min(r.separation_delta for r in records)
        summary["phi_bound_ok"] = bool(all(
            abs(r.phi_min) < 1.0 and abs(r.phi_max) < 1.0 for r in records))
        summary["grad_phi_max_final"] = records[-1].grad_phi_max
    return summary


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_summary(path: Path, summary: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k, v in summary.items():
            fh.write(f"{k} = {_format_value(v)}\n")


def report_run(run_dir) -> str:
    """Human-readable digest of a finished run directory."""
    run_dir = Path(run_dir)
    recs = diagnostics.read_csv(run_dir / "diagnostics.csv")
    if not recs:
        return "empty diagnostics"
    mass0 = recs[0].mass
    lines = [
        f"rows: {len(recs)}  t: [{recs[0].t:g}, {recs[-1].t:g}]",
        f"mass drift max: {max(abs(r.mass - mass0) for r in recs):.3e}",
        f"energy: {recs[0].energy_total:.6g} -> {recs[-1].energy_total:.6g}",
        f"separation delta min: {min(r.separation_delta for r in recs):.3e}",
        f"grad_phi_max final: {recs[-1].grad_phi_max:.6g}",
        f"u_max final: {recs[-1].u_max:.6g}",
    ]
    sep = diagnostics.separation_report(recs)
    lines.append(f"separation (t >= {sep.sigma_cut:g}): inf delta = "
                 f"{sep.delta_inf:.3e} ({'ok' if sep.separated else 'below floor'})")
    summary_path = run_dir / "summary.txt"
    if summary_path.is_file():
        lines.append("-- summary.txt --")
        lines.append(summary_path.read_text().rstrip())
    return "\n".join(lines)


# -- verification suites ----------------------------------------------------------


def verify_suite(name: str, options: dict) -> tuple[bool, list[str]]:
    """Run a named verification suite; returns (passed, report lines)."""
    if name == "lemma":
        return _verify_lemma(options)
    if name == "potential_inequalities":
        return _verify_potential(options)
    if name == "invariants":
        return _verify_invariants(options)
    raise ValueError(f"unknown suite {name!r}")


def _verify_lemma(opt: dict):
    from .grid import Grid
    from .product_estimate import verify_estimate

    ps = opt.get("p") or [4.0]
    samples = opt.get("samples", 100)
    seed = opt.get("seed", 0)
    n = opt.get("grid_n", 128)
    c_cap = opt.get("c_cap", 10.0)
    csv_path = opt.get("csv")
    grid = Grid(n, n)
    lines = []
    ok = True
    reports = []
    for p in ps:
        rep = verify_estimate(grid, samples, p, seed, c_cap)
        reports.append(rep)
        status = "PASS" if rep.passed else "FAIL"
        ok &= rep.passed
        lines.append(f"{status} lemma p={p:g} samples={samples} seed={seed} "
                     f"max_ratio={rep.max_ratio:.6g} cap={c_cap:g}")
    if csv_path:
        with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("p,seed,lhs,rhs_core,ratio\n")
            for rep in reports:
                for row in rep.rows:
                    fh.write(f"{rep.p:.17g},{rep.seed},{row.lhs:.17g},"
                             f"{row.rhs_core:.17g},{row.ratio:.17g}\n")
        lines.append(f"per-sample report written to {csv_path}")
    return ok, lines


def _verify_potential(opt: dict):
    from .potential import (PotentialParams, f1, f2, f3,
                            log_product_constants, second_derivative_constants)

    thetas = opt.get("theta") or [1.0]
    n = opt.get("samples", 100_000)
    lines = []
    ok = True
    s = np.linspace(-1.0 + 1e-6, 1.0 - 1e-6, n)
    for theta in thetas:
        p = PotentialParams(theta=theta, theta0=2.0 * theta)
        v1, v2, v3 = f1(s, p), f2(s, p), f3(s, p)
        cross = v3 * v1
        c1, c2 = log_product_constants(theta)
        lhs = np.zeros_like(v3)
        m = np.abs(v3) > 0
        lhs[m] = np.abs(v3[m]) * np.log(np.abs(v3[m]))
        gap1 = float((c1 + c2 * cross - lhs).min())
        ok1 = gap1 >= -1e-9 * max(1.0, float(np.abs(lhs).max()))
        c3, c4 = second_derivative_constants(theta)
        gap2 = float((c3 + c4 * cross - v2).min())
        ok2 = gap2 >= -1e-9 * max(1.0, float(v2.max()))
        ok &= ok1 and ok2
        lines.append(f"{'PASS' if ok1 else 'FAIL'} third-derivative log bound "
                     f"theta={theta:g} C1={c1:.6g} C2={c2:.6g} min_gap={gap1:.3e}")
        lines.append(f"{'PASS' if ok2 else 'FAIL'} second-derivative bound "
                     f"theta={theta:g} C3={c3:.6g} C4={c4:.6g} min_gap={gap2:.3e}")
    return ok, lines


def _verify_invariants(opt: dict):
    from .config import parse_config_text

    model = opt.get("model", "nsac")
    steps = opt.get("steps", 200)
    n = opt.get("grid_n", 64)
    dt = opt.get("dt", 1e-3)
    nu = "0.0" if model == "euler_ac" else "0.1"
    rho2 = 1.5 if model in ("nsac", "transport") else 1.0
    text = f"""
model = {model}
grid.nx = {n}
grid.ny = {n}
fluids.rho1 = 1.0
fluids.rho2 = {rho2}
fluids.nu1 = {nu}
fluids.nu2 = {nu}
scheme.dt = {dt}
scheme.t_end = {steps * dt}
ic.kind = bubble
ic.inside = 0.9
ic.outside = -0.9
ic.velocity = taylor_green
ic.velocity_amplitude = 0.3
output.diag_every = 1
"""
    cfg = parse_config_text(text)
    import tempfile

    with tempfile.TemporaryDirectory() as td:
        res = run(cfg, out_dir=td)
    s = res.summary
    lines = []
    ok_mass = s["mass_drift_max"] <= 1e-12
    lines.append(f"{'PASS' if ok_mass else 'FAIL'} mass conservation "
                 f"drift={s['mass_drift_max']:.3e} (<= 1e-12)")
    ok_bound = s["phi_bound_ok"]
    lines.append(f"{'PASS' if ok_bound else 'FAIL'} pointwise bound max|phi| < 1 "
                 f"(min separation {s['separation_delta_min']:.3e})")
    ok_energy = s["energy_monotone"]
    lines.append(f"{'PASS' if ok_energy else 'FAIL'} energy monotone "
                 f"(max uptick beyond tolerance {s['energy_max_uptick']:.3e})")
    return bool(ok_mass and ok_bound and ok_energy), lines
