"""Command-line driver: single points, sweeps, validation suites and the optimum.

Exit codes: 0 on success, 1 when a validation check fails, 2 on invalid
input or an evaluation pole.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
import warnings
from dataclasses import replace

from . import scan, validate
from .config import load_config, merge
from .errors import ConfigError, NoMinimumInRange, PoleError, WqedError
from .fano import chi, eta_min_estimate, fano_parameters, numeric_optimum_search, optimal_conditions
from .two_photon import channel_amplitudes, correlation_eta

PARAMETER_FLAGS = {
    "gamma": "decay rate into the waveguide",
    "kappa": "intrinsic cavity loss",
    "u": "Kerr interaction",
    "delta1": "detuning of the first photon from half the pair energy",
    "delta_a": "cavity detuning from half the pair energy",
    "x": "relative coordinate x2 - x1",
    "xc": "center-of-mass coordinate",
    "omega": "total pair energy (phase only)",
}


def _common(parser: argparse.ArgumentParser) -> None:
    for name, text in PARAMETER_FLAGS.items():
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=None, help=text)
    parser.add_argument(
        "--absolute-units", dest="absolute_units", action="store_true", default=None,
        help="take frequencies and lengths as absolute values instead of multiples of kappa and 1/kappa",
    )
    parser.add_argument("--config", default=None, help="flat key = value configuration file")
    parser.add_argument("--out", default=None, help="output path (default: standard output)")
    parser.add_argument("--format", choices=["csv", "json"], default=None, help="scan output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wqed", description="Two-photon transport through a waveguide-coupled Kerr cavity.")
    sub = parser.add_subparsers(dest="command", required=True)

    point = sub.add_parser("point", help="all amplitudes and correlations at one configuration")
    _common(point)

    sweep = sub.add_parser("scan", help="sweep quantities over one or two parameters")
    _common(sweep)
    sweep.add_argument("--preset", default=None, choices=sorted(scan.PRESETS), help="figure preset")
    sweep.add_argument("--quantity", default=None, help=f"comma-separated list from {', '.join(scan.QUANTITIES)}")
    sweep.add_argument(
        "--axis", action="append", default=None,
        help="swept parameter as name:min:max:steps[:log]; give once or twice",
    )

    check = sub.add_parser("validate", help="run a validation suite")
    check.add_argument("mode", choices=sorted(validate.SUITES))
    _common(check)
    check.add_argument("--seed", type=int, default=None)
    check.add_argument("--sets", type=int, default=None, help="number of random parameter sets")
    check.add_argument("--tolerance", type=float, default=None, help="pass threshold of the main check")

    best = sub.add_parser("optimal", help="closed-form and numerical optimum of the blockade")
    _common(best)
    best.add_argument("--joint", action="store_true", default=None, help="also search the cavity detuning")
    return parser


def _settings(args: argparse.Namespace) -> dict:
    cli_values = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    file_values = load_config(args.config) if args.config else {}
    defaults = {"absolute_units": False, "format": "csv"}
    return merge(defaults, file_values, cli_values)


def _parameter_values(settings: dict) -> dict:
    return {name: float(settings.get(name, scan.DEFAULTS[name])) for name in scan.PARAMETERS}


def _check_units(settings: dict) -> bool:
    kappa_units = not settings["absolute_units"]
    if kappa_units and settings.get("kappa", 1.0) <= 0:
        raise ConfigError("kappa units need kappa > 0; use --absolute-units for a lossless cavity")
    return kappa_units


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        try:
            handle = open(path, "w", newline="")
        except OSError as exc:
            raise ConfigError(f"cannot write {path}: {exc.strerror}") from None
        with handle:
            yield handle


def _number(value):
    text = scan.format_number(value)
    return text if text == scan.NA else float(text)


def _complex(prefix: str, value) -> dict:
    value = complex(value)
    return {f"{prefix}_re": _number(value.real), f"{prefix}_im": _number(value.imag)}


def point_report(settings: dict) -> dict:
    """JSON-ready report of one configuration; frequencies in the user's units."""
    kappa_units = _check_units(settings)
    user = _parameter_values(settings)
    values = scan.to_absolute(user, kappa_units)
    params, pair, coords = scan.build_inputs(values)

    amps = channel_amplitudes(pair, coords, params)
    eta = correlation_eta(pair, coords, params)
    interference = chi(pair.delta_a, params)
    try:
        shape = fano_parameters(pair.delta_a, params)
        q, epsilon = shape.q, shape.epsilon
    except PoleError:
        q = epsilon = float("nan")
    t_bar, r_bar = scan.evaluate(["t_bar", "r_bar"], values).values()

    channels = {}
    for name in ("tt", "rr", "rt"):
        triple = getattr(amps, name)
        entry = {}
        for part in ("plane", "bound", "total"):
            entry.update(_complex(part, getattr(triple, part) if part != "total" else triple.total))
        channels[name] = entry
    out = {
        "units": "kappa" if kappa_units else "absolute",
        "parameters": {k: _number(v) for k, v in user.items()},
        "channels": channels,
        "eta_t": _number(eta.eta_t),
        "eta_r": _number(eta.eta_r),
        **_complex("chi", interference),
        "chi_abs2": _number(abs(interference) ** 2),
        "q": _number(q),
        "epsilon": _number(epsilon),
        **_complex("t_bar", t_bar),
        **_complex("r_bar", r_bar),
    }
    for name in ("eta_t", "eta_r"):
        if out[name] == scan.NA:
            warnings.warn(f"{name} is undefined: the independent-scattering density vanishes", stacklevel=2)
    return out


def _parse_axis(text: str) -> scan.Axis:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise ConfigError(f"axis {text!r}: expected name:min:max:steps[:log]")
    try:
        low, high, steps = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise ConfigError(f"axis {text!r}: min, max must be numbers and steps an integer") from None
    return scan.Axis(parts[0].replace("-", "_"), low, high, steps, parts[4] if len(parts) == 5 else "linear")


def scan_spec(settings: dict) -> scan.ScanSpec:
    """Scan specification from a preset and/or explicit axes, with overrides."""
    kappa_units = _check_units(settings)
    explicit = {name: settings[name] for name in scan.PARAMETERS if settings.get(name) is not None}
    if settings.get("preset"):
        base = scan.preset(settings["preset"])
        quantities, axes, fixed = base.quantities, base.axes, dict(base.fixed)
    else:
        quantities, axes, fixed = (), (), {}
    if settings.get("quantity"):
        quantities = tuple(q.strip() for q in settings["quantity"].split(","))
    if settings.get("axis"):
        axes = tuple(_parse_axis(a) for a in settings["axis"])
    if not axes:
        raise ConfigError("scan needs --preset or --axis")
    swept = {axis.name for axis in axes}
    fixed.update({k: v for k, v in explicit.items() if k not in swept})
    spec = scan.ScanSpec(quantities=quantities, axes=axes, fixed=fixed, kappa_units=kappa_units)
    spec.validate()
    return spec


def optimal_report(settings: dict) -> dict:
    kappa_units = _check_units(settings)
    values = scan.to_absolute(_parameter_values(settings), kappa_units)
    params, _, _ = scan.build_inputs(values)
    delta_star, u_star = optimal_conditions(params)
    unit = params.kappa if kappa_units else 1.0
    fixed_detuning = values["delta_a"] if settings.get("delta_a") is not None else delta_star
    ranges = {"delta_a": fixed_detuning, "u": (u_star / 20.0, u_star * 20.0)}
    if settings.get("joint"):
        ranges["delta_a"] = (0.05 * params.kappa, 2.0 * params.kappa)
    try:
        found = numeric_optimum_search(params, ranges)
        numeric = {"delta_a": _number(found.delta_a / unit), "u": _number(found.u / unit), "eta_t": _number(found.eta)}
    except NoMinimumInRange as exc:
        numeric = {"error": str(exc)}
    at_star = abs(chi(delta_star, replace(params, u=u_star))) ** 2
    return {
        "units": "kappa" if kappa_units else "absolute",
        "closed_form": {"delta_a": _number(delta_star / unit), "u": _number(u_star / unit)},
        "eta_t_estimate": _number(eta_min_estimate(replace(params, u=u_star))),
        "eta_t_exact_at_closed_form": _number(at_star),
        "numeric": numeric,
    }


def validate_report(mode: str, settings: dict) -> dict:
    kwargs = {}
    if mode == "oracle":
        kappa_units = _check_units(settings)
        values = scan.to_absolute(_parameter_values({"u": 10.0, **settings}), kappa_units)
        kwargs = {k: values[k] for k in ("gamma", "kappa", "u", "delta_a")}
    elif mode == "fano":
        _check_units(settings)
        if settings.get("gamma") is not None:
            kwargs["gamma"] = settings["gamma"] * (settings.get("kappa") or 1.0)
        if settings.get("kappa") is not None:
            kwargs["kappa"] = settings["kappa"]
    for key in ("seed", "sets"):
        if settings.get(key) is not None and mode != "oracle":
            kwargs[key] = settings[key]
    if settings.get("tolerance") is not None:
        kwargs["tolerance"] = settings["tolerance"]
    checks = validate.SUITES[mode](**kwargs)
    return validate.report(mode, checks)


def _write_json(data: dict, path) -> None:
    with _output(path) as stream:
        json.dump(data, stream, indent=2)
        stream.write("\n")


def _warn(message, category, filename, lineno, file=None, line=None):
    sys.stderr.write(f"warning: {message}\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    warnings.showwarning = _warn
    try:
        settings = _settings(args)
        if args.command == "point":
            _write_json(point_report(settings), settings.get("out"))
        elif args.command == "scan":
            result = scan.run_scan(scan_spec(settings))
            with _output(settings.get("out")) as stream:
                (scan.write_json if settings["format"] == "json" else scan.write_csv)(result, stream)
        elif args.command == "optimal":
            _write_json(optimal_report(settings), settings.get("out"))
        else:
            result = validate_report(args.mode, settings)
            _write_json(result, settings.get("out"))
            return 0 if result["passed"] else 1
    except PoleError as exc:
        sys.stderr.write(f"error: pole: {exc}\n")
        return 2
    except (ConfigError, WqedError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
