"""Parameter sweeps over the closed-form quantities, with CSV/JSON output.

Grids are evaluated in chunks on a thread pool and emitted in row-major
order (the first axis varies slowest).  Cells where a quantity is undefined
are written as ``NA``.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import CoordinatePair, SystemParams, TwoPhotonInput, single_photon_amplitudes
from .errors import ConfigError, PoleError
from .fano import chi, fano_parameters
from .two_photon import correlation_eta

QUANTITIES = ("eta_t", "eta_r", "chi_abs2", "q", "epsilon", "t_bar", "r_bar")
COMPLEX_QUANTITIES = {"t_bar", "r_bar"}
PARAMETERS = ("gamma", "kappa", "u", "delta1", "delta_a", "x", "xc", "omega")
DEFAULTS = {"gamma": 1.0, "kappa": 1.0, "u": 0.0, "delta1": 0.0, "delta_a": 0.0, "x": 0.0, "xc": 0.0, "omega": 0.0}
# Frequencies scale with kappa in kappa units; lengths scale with 1/kappa.
FREQUENCY_PARAMETERS = {"gamma", "u", "delta1", "delta_a", "omega"}
LENGTH_PARAMETERS = {"x", "xc"}
NA = "NA"
CHUNK = 4096


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    steps: int
    scale: str = "linear"

    def validate(self):
        if self.name not in PARAMETERS:
            raise ConfigError(f"unknown axis parameter {self.name!r}; choose from {', '.join(PARAMETERS)}")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"axis {self.name}: scale must be linear or log")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ConfigError(f"axis {self.name}: steps must be an integer >= 2")
        if not self.min < self.max:
            raise ConfigError(f"axis {self.name}: min must be below max")
        if self.scale == "log" and self.min <= 0:
            raise ConfigError(f"axis {self.name}: log axes need min > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.steps)
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class ScanSpec:
    """A sweep of one or more quantities over one or two parameters.

    ``fixed`` holds values for the parameters that are not swept; missing
    ones take :data:`DEFAULTS`.  With ``kappa_units`` every frequency is a
    multiple of ``kappa`` and every length a multiple of ``1/kappa``
    (``v_c = 1``).
    """

    quantities: tuple[str, ...]
    axes: tuple[Axis, ...]
    fixed: dict = field(default_factory=dict)
    kappa_units: bool = True

    def validate(self):
        if not self.quantities:
            raise ConfigError("scan needs at least one quantity")
        for name in self.quantities:
            if name not in QUANTITIES:
                raise ConfigError(f"unknown quantity {name!r}; choose from {', '.join(QUANTITIES)}")
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("scan needs one or two axes")
        names = [axis.name for axis in self.axes]
        if len(set(names)) != len(names):
            raise ConfigError("axes must sweep different parameters")
        for axis in self.axes:
            axis.validate()
        for key in self.fixed:
            if key not in PARAMETERS:
                raise ConfigError(f"unknown fixed parameter {key!r}")
        kappa = self.fixed.get("kappa", DEFAULTS["kappa"])
        if self.kappa_units and ("kappa" in names or kappa <= 0):
            raise ConfigError("kappa units need a fixed, positive kappa")

    @property
    def columns(self) -> list[str]:
        cols = [axis.name for axis in self.axes]
        for name in self.quantities:
            cols += [f"{name}_re", f"{name}_im"] if name in COMPLEX_QUANTITIES else [name]
        return cols


def to_absolute(values: dict, kappa_units: bool) -> dict:
    """Convert user-unit parameter values to absolute ones (``v_c = 1``)."""
    if not kappa_units:
        return dict(values)
    kappa = values["kappa"]
    out = {}
    for key, value in values.items():
        if key in FREQUENCY_PARAMETERS:
            out[key] = value * kappa
        elif key in LENGTH_PARAMETERS:
            out[key] = value / kappa
        else:
            out[key] = value
    return out


def build_inputs(values: dict):
    """Parameters, pair and coordinates from absolute parameter values."""
    params = SystemParams(gamma=values["gamma"], kappa=values["kappa"], u=values["u"])
    pair = TwoPhotonInput(delta1=values["delta1"], delta_a=values["delta_a"], omega=values["omega"])
    x, xc = values["x"], values["xc"]
    coords = CoordinatePair(xc - x / 2.0, xc + x / 2.0)
    return params, pair, coords


def evaluate(quantities, values: dict) -> dict:
    """Quantities at the (possibly array-valued) absolute parameter ``values``.

    Undefined cells are NaN.

    Raises:
        PoleError: If a denominator vanishes anywhere in the arrays.
    """
    params, pair, coords = build_inputs(values)
    out = {}
    wanted = set(quantities)
    if wanted & {"eta_t", "eta_r"}:
        eta = correlation_eta(pair, coords, params)
        out["eta_t"], out["eta_r"] = eta.eta_t, eta.eta_r
    if "chi_abs2" in wanted:
        out["chi_abs2"] = np.abs(chi(pair.delta_a, params)) ** 2
    if wanted & {"q", "epsilon"}:
        shape = fano_parameters(pair.delta_a, params)
        out["q"], out["epsilon"] = shape.q, shape.epsilon
    if wanted & {"t_bar", "r_bar"}:
        out["t_bar"], out["r_bar"] = single_photon_amplitudes(pair.delta1 - pair.delta_a, params)
    return {name: np.broadcast_to(np.asarray(out[name]), np.shape(values["gamma"])) for name in quantities}


def _evaluate_chunk(quantities, values: dict) -> dict:
    try:
        return evaluate(quantities, values)
    except PoleError:
        pass
    # Fall back to one point at a time so only the offending cells become NA.
    size = len(values["gamma"])
    result = {name: np.full(size, complex(np.nan, np.nan)) for name in quantities}
    for i in range(size):
        point = {key: value[i] for key, value in values.items()}
        for name in quantities:
            try:
                result[name][i] = evaluate([name], point)[name]
            except PoleError:
                pass
    return result


def thread_count() -> int:
    raw = os.environ.get("WQED_THREADS")
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        count = int(raw)
    except ValueError:
        raise ConfigError(f"WQED_THREADS must be an integer, got {raw!r}") from None
    if count < 1:
        raise ConfigError("WQED_THREADS must be at least 1")
    return count


@dataclass(frozen=True)
class ScanResult:
    spec: ScanSpec
    grid: dict
    values: dict

    def rows(self):
        """Rows of formatted cells in row-major order."""
        n = len(next(iter(self.grid.values())))
        for i in range(n):
            row = [format_number(self.grid[axis.name][i]) for axis in self.spec.axes]
            for name in self.spec.quantities:
                value = self.values[name][i]
                if name in COMPLEX_QUANTITIES:
                    row += [format_number(value.real), format_number(value.imag)]
                else:
                    row.append(format_number(value.real))
            yield row

    def column(self, name: str) -> np.ndarray:
        """Numeric values of an axis or quantity column (NaN where undefined)."""
        if name in self.grid:
            return self.grid[name]
        if name.endswith("_re") or name.endswith("_im"):
            base = name[:-3]
            data = self.values[base]
            return data.real if name.endswith("_re") else data.imag
        return self.values[name].real


def format_number(value) -> str:
    value = float(value)
    if not np.isfinite(value):
        return NA
    # Adding zero turns -0.0 into 0.0.
    value += 0.0
    return f"{value:.9g}"


def run_scan(spec: ScanSpec, threads: int | None = None) -> ScanResult:
    """Evaluate ``spec`` on its grid.

    Raises:
        ConfigError: If the spec is invalid.
    """
    spec.validate()
    axis_values = [axis.values() for axis in spec.axes]
    mesh = np.meshgrid(*axis_values, indexing="ij")
    grid = {axis.name: m.ravel() for axis, m in zip(spec.axes, mesh)}
    n = mesh[0].size

    user = {key: np.full(n, float(spec.fixed.get(key, DEFAULTS[key]))) for key in PARAMETERS}
    user.update(grid)
    absolute = to_absolute(user, spec.kappa_units)

    starts = range(0, n, CHUNK)
    chunks = [{key: value[s : s + CHUNK] for key, value in absolute.items()} for s in starts]
    workers = threads if threads is not None else thread_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: _evaluate_chunk(spec.quantities, c), chunks))
    values = {
        name: np.concatenate([np.asarray(p[name], dtype=complex).ravel() for p in parts])
        for name in spec.quantities
    }
    return ScanResult(spec=spec, grid=grid, values=values)


def write_csv(result: ScanResult, stream) -> None:
    stream.write(",".join(result.spec.columns) + "\n")
    for row in result.rows():
        stream.write(",".join(row) + "\n")


def write_json(result: ScanResult, stream) -> None:
    columns = result.spec.columns
    records = []
    for row in result.rows():
        records.append({c: (cell if cell == NA else float(cell)) for c, cell in zip(columns, row)})
    json.dump({"columns": columns, "rows": records}, stream, indent=1)
    stream.write("\n")


def _preset(quantities, axes, **fixed) -> ScanSpec:
    return ScanSpec(quantities=tuple(quantities), axes=tuple(axes), fixed=fixed)


# Figure presets, all in units of kappa.  Curves drawn for several values of
# a parameter use a short second axis.
PRESETS = {
    "fig2a": _preset(["eta_t"], [Axis("gamma", 0.25, 1.0, 3, "log"), Axis("x", -4.0, 4.0, 401)], u=10.0),
    "fig2b": _preset(["eta_t"], [Axis("gamma", 2.0, 8.0, 3, "log"), Axis("x", -4.0, 4.0, 401)], u=10.0),
    "fig2c": _preset(["eta_t"], [Axis("gamma", 0.1, 20.0, 200)], u=10.0),
    "fig2d": _preset(["eta_r"], [Axis("gamma", 1.0, 4.0, 3, "log"), Axis("x", -4.0, 4.0, 401)], u=10.0),
    "fig3a": _preset(["eta_t"], [Axis("gamma", 0.5, 2.0, 3, "log"), Axis("u", 0.01, 100.0, 401, "log")]),
    "fig3b": _preset(["eta_r"], [Axis("gamma", 0.5, 2.0, 3, "log"), Axis("u", 0.01, 100.0, 401, "log")]),
    "fig4a": _preset(["eta_t", "eta_r"], [Axis("delta_a", -2.0, 2.0, 401)], gamma=100.0, u=0.01),
    "fig4b": _preset(["eta_t"], [Axis("x", -0.2, 0.2, 401)], gamma=100.0, u=0.01, delta_a=0.5),
    "fig5a": _preset(
        ["eta_t"], [Axis("gamma", 1.0, 1000.0, 121, "log"), Axis("u", 1e-4, 1.0, 161, "log")], delta_a=0.5
    ),
    "fig5b": _preset(
        ["eta_t"], [Axis("gamma", 10.0, 1000.0, 3, "log"), Axis("u", 1e-4, 1.0, 401, "log")], delta_a=0.5
    ),
}


def preset(name: str) -> ScanSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
