"""Run configuration: flat ``key = value`` text format.

Grammar (one statement per line):

    line    := [ key "=" value ] [ "#" comment ]
    key     := dotted path, e.g. ``grid.nx`` or ``ic.kind``
    value   := bare token (no quoting); numbers parsed as int/float

Unknown keys, type errors, and invariant violations are all collected and
reported together (not fail-fast on the first).  Defaults: 128^2 grid on a
2*pi torus, theta = 1, theta0 = 2, sigma = gamma = 1, dt = 1e-3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import Grid, ScalarField, VectorField
from .material import FluidParams
from .potential import PotentialParams

__all__ = ["RunConfig", "ConfigError", "parse_config", "parse_config_text",
           "build_initial_fields"]

MODELS = ("transport", "nsac", "nsac_matched", "euler_ac")
IC_KINDS = ("bubble", "random", "from_snapshot")
VELOCITY_KINDS = ("none", "taylor_green", "random")

_TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Carries every violation found, one message per line."""

    def __init__(self, violations: list[str]):
        super().__init__("invalid configuration:\n  " + "\n  ".join(violations))
        self.violations = violations


_DEFAULTS: dict[str, object] = {
    "model": None,  # required
    "grid.nx": 128, "grid.ny": 128, "grid.lx": _TWO_PI, "grid.ly": _TWO_PI,
    "grid.dealias_fraction": 2.0 / 3.0,
    "potential.theta": 1.0, "potential.theta0": 2.0, "potential.epsilon": 0.1,
    "potential.mode": "singular",
    "fluids.rho1": 1.0, "fluids.rho2": 1.0, "fluids.nu1": 0.1, "fluids.nu2": 0.1,
    "fluids.sigma": 1.0, "fluids.gamma": 1.0,
    "scheme.dt": 1e-3, "scheme.t_end": 1.0, "scheme.newton_tol": 1e-10,
    "scheme.newton_max_iter": 50, "scheme.nu_split": None,
    "ic.kind": "bubble",
    "ic.center_x": math.pi, "ic.center_y": math.pi, "ic.radius": 1.5,
    "ic.width": 0.3, "ic.inside": 0.9, "ic.outside": -0.9,
    "ic.mean": 0.0, "ic.amplitude": 0.1, "ic.seed": 0, "ic.band": 4,
    "ic.path": "",
    "ic.velocity": "none", "ic.velocity_amplitude": 1.0,
    "ic.velocity_seed": 0, "ic.velocity_band": 4,
    "output.dir": "phaseflow_out", "output.diag_every": 1,
    "output.snapshot_every": 0,
    "transport.grad_ceiling_factor": 1e3,
}

_INT_KEYS = {"grid.nx", "grid.ny", "scheme.newton_max_iter", "ic.seed", "ic.band",
             "ic.velocity_seed", "ic.velocity_band", "output.diag_every",
             "output.snapshot_every"}
_STR_KEYS = {"model", "potential.mode", "ic.kind", "ic.path", "ic.velocity",
             "output.dir"}


@dataclass
class RunConfig:
    values: dict[str, object] = field(default_factory=dict)

    def __getitem__(self, key: str):
        return self.values[key]

    @property
    def model(self) -> str:
        return self.values["model"]

    def make_grid(self) -> Grid:
        v = self.values
        return Grid(v["grid.nx"], v["grid.ny"], v["grid.lx"], v["grid.ly"],
                    v["grid.dealias_fraction"])

    def make_potential(self) -> PotentialParams:
        v = self.values
        return PotentialParams(v["potential.theta"], v["potential.theta0"],
                               v["potential.epsilon"])

    def make_fluids(self) -> FluidParams:
        v = self.values
        return FluidParams(v["fluids.rho1"], v["fluids.rho2"], v["fluids.nu1"],
                           v["fluids.nu2"], v["fluids.sigma"], v["fluids.gamma"])


def _parse_value(key: str, raw: str, line_no: int, col: int, errors: list[str]):
    if key in _STR_KEYS:
        return raw
    try:
        if key in _INT_KEYS:
            return int(raw)
        if raw.lower() in ("none", ""):
            return None
        return float(raw)
    except ValueError:
        errors.append(f"line {line_no}, col {col}: cannot parse value {raw!r} for {key}")
        return None


def parse_config_text(text: str, source: str = "<string>") -> RunConfig:
    values = dict(_DEFAULTS)
    errors: list[str] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            errors.append(f"line {line_no}, col 1: expected 'key = value'")
            continue
        key, raw = body.split("=", 1)
        key = key.strip()
        raw_stripped = raw.strip()
        col = body.index("=") + 2
        if key not in _DEFAULTS:
            errors.append(f"line {line_no}, col 1: unknown key {key!r}")
            continue
        values[key] = _parse_value(key, raw_stripped, line_no, col, errors)
    if errors:
        raise ConfigError(errors)
    _validate(values, errors)
    if errors:
        raise ConfigError(errors)
    return RunConfig(values)


def parse_config(path) -> RunConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError([f"config file not found: {p}"])
    return parse_config_text(p.read_text(encoding="utf-8"), source=str(p))


def _validate(v: dict, errors: list[str]) -> None:
    def bad(msg):
        errors.append(msg)

    model = v.get("model")
    if model not in MODELS:
        bad(f"model must be one of {MODELS}, got {model!r}")
        return  # most later checks depend on the model

    nx, ny = v["grid.nx"], v["grid.ny"]
    if nx < 8 or nx % 2 or ny < 8 or ny % 2:
        bad("grid.nx and grid.ny must be even and at least 8")
    if not (v["grid.lx"] > 0 and v["grid.ly"] > 0):
        bad("grid lengths must be positive")
    if not 0.0 < v["grid.dealias_fraction"] <= 1.0:
        bad("grid.dealias_fraction must lie in (0, 1]")

    th, th0 = v["potential.theta"], v["potential.theta0"]
    if not (th is not None and th0 is not None and 0.0 < th < th0):
        bad("potential requires 0 < theta < theta0 (the demixing regime)")
    if not (0.0 < v["potential.epsilon"] < 0.5):
        bad("potential.epsilon must lie in (0, 1/2)")
    if v["potential.mode"] not in ("singular", "regularized"):
        bad("potential.mode must be 'singular' or 'regularized'")

    r1, r2 = v["fluids.rho1"], v["fluids.rho2"]
    n1, n2 = v["fluids.nu1"], v["fluids.nu2"]
    if min(r1, r2) <= 0:
        bad("densities must be positive")
    if min(n1, n2) < 0:
        bad("viscosities must be non-negative")
    if model in ("nsac", "nsac_matched", "transport") and min(n1, n2) <= 0:
        bad(f"model {model} requires strictly positive viscosities")
    if model == "nsac_matched" and r1 != r2:
        bad("nsac_matched requires rho1 == rho2")
    if model == "euler_ac" and r1 != r2:
        bad("euler_ac is a matched-density model; set rho1 == rho2")
    if v["fluids.sigma"] <= 0 or v["fluids.gamma"] <= 0:
        bad("sigma and gamma must be positive")

    if v["scheme.dt"] is None or v["scheme.dt"] <= 0:
        bad("scheme.dt must be positive")
    if v["scheme.t_end"] is None or v["scheme.t_end"] <= 0:
        bad("scheme.t_end must be positive")
    ns = v["scheme.nu_split"]
    if ns is not None and ns < 0.5 * max(n1, n2):
        bad("scheme.nu_split must be at least max(nu1, nu2)/2")

    kind = v["ic.kind"]
    if kind not in IC_KINDS:
        bad(f"ic.kind must be one of {IC_KINDS}")
    singular = v["potential.mode"] == "singular"
    if kind == "bubble":
        if v["ic.width"] <= 0 or v["ic.radius"] <= 0:
            bad("bubble ic needs positive radius and width")
        amax = max(abs(v["ic.inside"]), abs(v["ic.outside"]))
        if singular and amax >= 1.0:
            bad("bubble ic must satisfy max|phi0| < 1 in singular mode")
        mean_bound = max(abs(v["ic.inside"]), abs(v["ic.outside"]))
        if mean_bound >= 1.0 and singular:
            pass  # already reported above
    elif kind == "random":
        if v["ic.amplitude"] < 0:
            bad("random ic amplitude must be non-negative")
        if singular and abs(v["ic.mean"]) + v["ic.amplitude"] >= 1.0:
            bad("random ic must satisfy |mean| + amplitude < 1 in singular mode")
        if abs(v["ic.mean"]) >= 1.0:
            bad("initial mean concentration must satisfy |mean| < 1")
        if v["ic.band"] < 1:
            bad("random ic band must be at least 1")
    elif kind == "from_snapshot" and not v["ic.path"]:
        bad("ic.kind = from_snapshot requires ic.path")

    if v["ic.velocity"] not in VELOCITY_KINDS:
        bad(f"ic.velocity must be one of {VELOCITY_KINDS}")
    if v["output.diag_every"] < 1:
        bad("output.diag_every must be at least 1")
    if v["output.snapshot_every"] < 0:
        bad("output.snapshot_every must be non-negative")
    if v["transport.grad_ceiling_factor"] <= 1.0:
        bad("transport.grad_ceiling_factor must exceed 1")


# -- initial data ---------------------------------------------------------------


def bubble_profile(grid: Grid, center_x: float, center_y: float, radius: float,
                   width: float, inside: float, outside: float) -> np.ndarray:
    """tanh bubble with torus-periodic distance; range stays within the plateaus."""
    dx = np.abs(grid.x - center_x)
    dy = np.abs(grid.y - center_y)
    dx = np.minimum(dx, grid.lx - dx)
    dy = np.minimum(dy, grid.ly - dy)
    d = np.sqrt(dx * dx + dy * dy)
    return outside + (inside - outside) * 0.5 * (1.0 + np.tanh((radius - d) / width))


def random_band_phi(grid: Grid, mean: float, amplitude: float, seed: int,
                    band: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    hat = np.zeros((grid.nx, grid.ny // 2 + 1), dtype=complex)
    ix = np.fft.fftfreq(grid.nx, 1.0 / grid.nx)
    iy = np.arange(grid.ny // 2 + 1)
    sel = (np.abs(ix)[:, None] <= band) & (iy[None, :] <= band)
    sel[0, 0] = False
    n = int(sel.sum())
    hat[sel] = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    noise = grid.from_hat(hat)
    peak = float(np.abs(noise).max()) or 1.0
    return mean + amplitude * noise / peak


def taylor_green_velocity(grid: Grid, amplitude: float) -> tuple[np.ndarray, np.ndarray]:
    kx = _TWO_PI / grid.lx
    ky = _TWO_PI / grid.ly
    ux = amplitude * np.cos(kx * grid.x) * np.sin(ky * grid.y)
    uy = -amplitude * (kx / ky) * np.sin(kx * grid.x) * np.cos(ky * grid.y)
    return ux, uy


def random_velocity(grid: Grid, amplitude: float, seed: int, band: int):
    rng = np.random.default_rng(seed)
    vx = random_band_phi(grid, 0.0, 1.0, seed, band)
    vy = random_band_phi(grid, 0.0, 1.0, rng.integers(1 << 30), band)
    hx, hy = grid.leray_hat(grid.to_hat(vx), grid.to_hat(vy))
    vx = grid.from_hat(hx)
    vy = grid.from_hat(hy)
    peak = float(np.sqrt(vx * vx + vy * vy).max()) or 1.0
    return amplitude * vx / peak, amplitude * vy / peak


def build_initial_fields(config: RunConfig):
    """Return ``(grid, t0, phi, u or omega)`` for the configured model.

    For ``euler_ac`` the last element is the initial vorticity; otherwise it
    is the initial velocity (Leray-projected).
    """
    v = config.values
    model = v["model"]
    if v["ic.kind"] == "from_snapshot":
        from .snapshot import read_snapshot

        grid, t0, fields = read_snapshot(v["ic.path"])
        if model == "euler_ac":
            return grid, t0, ScalarField(grid, fields["phi"]), \
                ScalarField(grid, fields["omega"])
        u = VectorField(grid, fields["u_x"], fields["u_y"])
        return grid, t0, ScalarField(grid, fields["phi"]), u

    grid = config.make_grid()
    if v["ic.kind"] == "bubble":
        phi_vals = bubble_profile(grid, v["ic.center_x"], v["ic.center_y"],
                                  v["ic.radius"], v["ic.width"],
                                  v["ic.inside"], v["ic.outside"])
    else:
        phi_vals = random_band_phi(grid, v["ic.mean"], v["ic.amplitude"],
                                   v["ic.seed"], v["ic.band"])
    singular = v["potential.mode"] == "singular"
    if singular and float(np.abs(phi_vals).max()) >= 1.0:
        raise ConfigError(["initial concentration violates max|phi0| < 1"])
    if abs(float(phi_vals.mean())) >= 1.0:
        raise ConfigError(["initial mean concentration must satisfy |mean| < 1"])
    phi = ScalarField(grid, phi_vals)

    vel = v["ic.velocity"]
    if vel == "taylor_green":
        ux, uy = taylor_green_velocity(grid, v["ic.velocity_amplitude"])
    elif vel == "random":
        ux, uy = random_velocity(grid, v["ic.velocity_amplitude"],
                                 v["ic.velocity_seed"], v["ic.velocity_band"])
    else:
        ux = np.zeros((grid.nx, grid.ny))
        uy = np.zeros((grid.nx, grid.ny))

    if model == "euler_ac":
        hx, hy = grid.to_hat(ux), grid.to_hat(uy)
        px, py = grid.leray_hat(hx, hy)
        w = grid.from_hat(grid.dx_hat(py) - grid.dy_hat(px))
        return grid, 0.0, phi, ScalarField(grid, w - w.mean())

    hx, hy = grid.leray_hat(grid.to_hat(ux), grid.to_hat(uy))
    u = VectorField(grid, grid.from_hat(hx), grid.from_hat(hy))
    return grid, 0.0, phi, u
