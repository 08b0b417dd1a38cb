"""Command-line front end.

Every failure prints one JSON line on stderr, e.g.::

    {"error": "ValidationError", "exit": 2, "message": "...", "node": 17}

Exit codes: 0 ok, 1 usage/config/file format, 2 validation, 3 numerical abort.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import math
import os
import sys

import numpy as np

from . import surface as surf
from .errors import CapflowError, DomainError, FormatError, NumericalAbort, ValidationError

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_ABORT = 0, 1, 2, 3

log = logging.getLogger("capflow")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# Defaults for the [simulate] section; types are taken from the defaults.
SIMULATE_DEFAULTS = {
    "n": 2,
    "m": 256,
    "mode": surf.AXISYMMETRIC,
    "n_azimuth": 0,
    "theta": math.pi / 3,
    "r0": 0.6,
    "eps": 0.05,
    "modes": 2,
    "seed": 0,
    "initial": "",
    "dt_safety": 0.2,
    "t_max": 50.0,
    "stop_speed_tol": 1e-6,
    "monitor_stride": 1000,
    "enclosing_radius": 0.0,
    "plots": True,
}


def load_config(path: str | None, section: str, defaults: dict) -> dict:
    """Read ``[section]`` of an INI file over ``defaults``; unknown keys are errors."""
    cfg = dict(defaults)
    if not path:
        return cfg
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not parser.has_section(section):
        return cfg
    for key, raw in parser.items(section):
        if key not in defaults:
            raise UsageError(f"unknown key {key!r} in [{section}]")
        default = defaults[key]
        try:
            if isinstance(default, bool):
                cfg[key] = parser.getboolean(section, key)
            elif isinstance(default, int):
                cfg[key] = int(raw)
            elif isinstance(default, float):
                cfg[key] = float(raw)
            else:
                cfg[key] = raw
        except ValueError:
            raise UsageError(f"bad value for {key!r}: {raw!r}") from None
    return cfg


def _check_theta(theta: float) -> float:
    if not (0.0 < theta <= math.pi / 2 + 1e-15):
        raise DomainError("theta out of (0, pi/2]")
    return theta


def _out_dir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def _emit(args, name: str, text: str) -> None:
    """Write ``text`` to ``--out/name`` if given, else to stdout."""
    if args.out:
        with open(os.path.join(_out_dir(args), name), "w", encoding="utf-8") as fh:
            fh.write(text)
    if not args.out or not args.quiet:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_surface(args) -> surf.GraphSurface:
    s = surf.load(args.surface)
    if args.theta is not None and abs(args.theta - s.theta) > 0:
        s = surf.GraphSurface(s.grid, s.rho, _check_theta(args.theta))
    if getattr(args, "enclosing_radius", None):
        surf.check_between_caps(s, None, args.enclosing_radius)
    return s


# -- commands -------------------------------------------------------------


def cmd_simulate(args) -> int:
    from .flow import FlowConfig, run
    from .plotting import plot_monitors

    cfg = load_config(args.config, "simulate", SIMULATE_DEFAULTS)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.resolution is not None:
        cfg["m"] = args.resolution
    if args.theta is not None:
        cfg["theta"] = args.theta
    theta = _check_theta(cfg["theta"])

    if cfg["initial"]:
        initial = surf.load(cfg["initial"])
    else:
        grid = surf.HalfSphereGrid(cfg["n"], cfg["m"], cfg["mode"], cfg["n_azimuth"])
        if cfg["eps"] == 0.0:
            initial = surf.cap_graph(theta, cfg["r0"], grid)
        else:
            rng = np.random.default_rng(cfg["seed"])
            initial = surf.perturbed_cap(theta, cfg["r0"], grid, cfg["eps"], rng, modes=cfg["modes"])
    config = FlowConfig(
        dt_safety=cfg["dt_safety"],
        t_max=cfg["t_max"],
        stop_speed_tol=cfg["stop_speed_tol"],
        monitor_stride=cfg["monitor_stride"],
        enclosing_radius=cfg["enclosing_radius"] or None,
    )
    out = _out_dir(args)
    surf.save(initial, os.path.join(out, "initial_surface.txt"))
    result = run(initial, config)
    with open(os.path.join(out, "monitors.csv"), "w", encoding="ascii", newline="") as fh:
        result.write_csv(fh)
    surf.save(result.final.surface, os.path.join(out, "final_surface.txt"))
    summary = result.summary()
    summary["config"] = cfg
    with open(os.path.join(out, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if cfg["plots"]:
        from .flow import monitor_columns

        data = np.array([s.row() for s in result.samples])
        plot_monitors(monitor_columns(result.n), data, out)
    if not args.quiet:
        print(json.dumps({k: summary[k] for k in ("converged", "steps", "r_star", "cap_distance", "conservation_drift")}))
    return EXIT_OK


def cmd_quermass(args) -> int:
    from .quermass import quermass_report

    s = _load_surface(args)
    _emit(args, "quermass.json", quermass_report(s).to_json(indent=2))
    return EXIT_OK


def cmd_minkowski(args) -> int:
    from .inequal import check_minkowski_n2

    s = _load_surface(args)
    fields = surf.geometry(s)
    res = {str(k): surf.minkowski_residual(s, fields, k) for k in range(1, s.n + 1)}
    report = {"n": s.n, "theta": s.theta, "area": fields.area, "residual": res}
    if s.n == 2:
        report["minkowski_inequality"] = check_minkowski_n2(s, fields)
    _emit(args, "minkowski.json", json.dumps(report, indent=2))
    return EXIT_OK


def cmd_check_af(args) -> int:
    from .inequal import check_af

    s = _load_surface(args)
    report = check_af(s, tol=args.tol)
    _emit(args, "check_af.json", json.dumps(report, indent=2))
    return EXIT_OK if report["pass"] else EXIT_VALIDATION


def cmd_cap_table(args) -> int:
    from .inequal import cap_max_radius, cap_table

    theta = _check_theta(args.theta if args.theta is not None else math.pi / 3)
    r_max = args.r_max if args.r_max is not None else 0.95 * cap_max_radius(theta)
    if not 0.0 < args.r_min < r_max:
        raise UsageError("need 0 < r-min < r-max")
    if args.samples < 2:
        raise UsageError("need at least two samples")
    m = args.resolution or 1024
    table = cap_table(theta, np.linspace(args.r_min, r_max, args.samples), n=args.n, m_ref=m)
    if not table.strictly_increasing():
        raise ValidationError("cap table is not strictly increasing")
    _emit(args, "cap_table.csv", table.to_csv())
    return EXIT_OK


def cmd_plot(args) -> int:
    from .flow import read_monitor_csv
    from .plotting import plot_monitors

    try:
        with open(args.csv, encoding="ascii") as fh:
            cols, data = read_monitor_csv(fh)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    if data.shape[0] == 0:
        raise FormatError("monitor CSV has no data rows")
    stem = os.path.splitext(os.path.basename(args.csv))[0]
    paths = plot_monitors(cols, data, _out_dir(args), stem=stem)
    if not args.quiet:
        for p in paths:
            print(p)
    return EXIT_OK


# -- wiring ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="INI file with one section per command")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed for random perturbations")
    common.add_argument("--resolution", type=int, help="grid resolution m")
    common.add_argument("--theta", type=float, help="contact angle in (0, pi/2]")
    common.add_argument("--quiet", action="store_true", help="suppress stdout reports")

    p = _Parser(prog="capflow", description="Capillary inverse curvature flow in hyperbolic space.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", parents=[common], help="run the flow")
    s.set_defaults(func=cmd_simulate)

    for name, func, helptext in (
        ("quermass", cmd_quermass, "quermassintegrals of a surface file"),
        ("minkowski", cmd_minkowski, "Minkowski residuals of a surface file"),
        ("check-af", cmd_check_af, "Alexandrov-Fenchel slacks of a surface file"),
    ):
        c = sub.add_parser(name, parents=[common], help=helptext)
        c.add_argument("surface", help="surface file")
        c.add_argument("--enclosing-radius", type=float, help="require the surface inside this cap")
        if name == "check-af":
            c.add_argument("--tol", type=float, default=1e-8)
        c.set_defaults(func=func)

    t = sub.add_parser("cap-table", parents=[common], help="tabulate f_k(r) for caps")
    t.add_argument("--n", type=int, default=2)
    t.add_argument("--r-min", type=float, default=0.05)
    t.add_argument("--r-max", type=float)
    t.add_argument("--samples", type=int, default=64)
    t.set_defaults(func=cmd_cap_table)

    pl = sub.add_parser("plot", parents=[common], help="SVG charts from a monitors CSV")
    pl.add_argument("csv", help="monitors CSV written by simulate")
    pl.set_defaults(func=cmd_plot)
    return p


def _fail(code: int, exc: BaseException) -> int:
    payload = {"error": type(exc).__name__, "exit": code, "message": str(exc)}
    node = getattr(exc, "node", None)
    if node is not None:
        payload["node"] = node
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, FormatError) as exc:
        return _fail(EXIT_USAGE, exc)
    except NumericalAbort as exc:
        return _fail(EXIT_ABORT, exc)
    except (ValidationError, DomainError) as exc:
        return _fail(EXIT_VALIDATION, exc)
    except CapflowError as exc:
        return _fail(EXIT_ABORT, exc)
    except OSError as exc:
        return _fail(EXIT_USAGE, exc)


if __name__ == "__main__":
    sys.exit(main())
