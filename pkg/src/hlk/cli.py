"""Command-line front end: ``hlk cylinder | trace | classify | export-mesh``.

Exit codes: 0 success, 1 numeric failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import io as hio
from .classify import (
    classification_table, classify_axis_surface, classify_offaxis_surface, default_jobs, grid_of,
)
from .cylindrical import (
    CylCase, IntegrationError, InvalidCaseError, auto_case, closed_form_curve,
    integrate_base_curve, verify_closed_forms,
)
from .model import ModelParams, ParameterError, PrescribedFunction
from .orbits import EventKind, InvalidSeedError, OrbitOptions, OrbitSeed, integrate_orbit

log = logging.getLogger("hlk")

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    params: ModelParams | None
    seed: str | None = None
    case: str | None = None
    options: OrbitOptions = field(default_factory=OrbitOptions)
    out_format: str = "csv"
    out_path: str | None = None


def _span(text: str) -> tuple[float, float]:
    try:
        a, b = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}") from None
    if not b > a:
        raise argparse.ArgumentTypeError(f"empty span {text!r}")
    return a, b


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list, got {text!r}") from None


def _theta0(text: str) -> float:
    if text.lower() == "pi":
        return math.pi
    return float(text)


def _add_params(p: argparse.ArgumentParser, need_lambda=True):
    p.add_argument("--n", type=int, default=2, help="hypersurface dimension")
    p.add_argument("--lambda", dest="lam", type=float, required=need_lambda, default=None,
                   help="prescribed constant lambda > 0")


def _add_numeric(p: argparse.ArgumentParser):
    d = OrbitOptions()
    g = p.add_argument_group("numerics")
    g.add_argument("--tol", type=float, default=d.tol, help="integrator rtol = atol")
    g.add_argument("--s-max", type=float, default=d.s_max, help="arc-length budget")
    g.add_argument("--x-max", type=float, default=d.x_max,
                   help="escape radius (default: max(1e3 e0, 4 (n-1) / (n e0_radius)))")
    g.add_argument("--e0-radius", type=float, default=d.e0_radius,
                   help="radius of the convergence ball around e0")
    g.add_argument("--winding-cap", type=int, default=d.winding_cap, help="winding budget")
    g.add_argument("--turn-cap", type=int, default=d.turn_cap,
                   help="budget of y = +-1 turns (default: 4 x winding cap)")
    g.add_argument("--sample-step", type=float, default=d.sample_step, help="output sample spacing")


def _options(args, **extra) -> OrbitOptions:
    return OrbitOptions(tol=args.tol, s_max=args.s_max, x_max=args.x_max, e0_radius=args.e0_radius,
                        winding_cap=args.winding_cap, turn_cap=args.turn_cap,
                        sample_step=args.sample_step, **extra)


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter):
    def _get_help_string(self, action):
        # help texts that already describe a computed default keep their own wording
        if action.help and "default" in action.help:
            return action.help
        if action.required or action.default is None:
            return action.help
        return super()._get_help_string(action)


def config_from_args(args) -> RunConfig:
    params = None
    if getattr(args, "lam", None) is not None:
        params = ModelParams(args.n, args.lam, getattr(args, "v", 1.0))
    opts = _options(args) if hasattr(args, "winding_cap") else OrbitOptions()
    fmt = {"cylinder": "csv", "trace": "csv", "classify": "json", "export-mesh": "obj"}[args.command]
    return RunConfig(args.command, params, getattr(args, "seed", None), getattr(args, "case", None),
                     opts, fmt, getattr(args, "out", None))


def build_parser() -> argparse.ArgumentParser:
    fmt = _HelpFormatter
    parser = argparse.ArgumentParser(
        prog="hlk", formatter_class=fmt,
        description="Invariant hypersurfaces with mean curvature <eta, v> + lambda.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cylinder", formatter_class=fmt, help="base curve of a cylindrical surface")
    _add_params(c)
    c.add_argument("--v", type=float, default=1.0, help="density component v_{n+1}")
    c.add_argument("--case", default="auto", choices=["auto"] + [k.value for k in CylCase],
                   help="closed-form case")
    c.add_argument("--theta0", type=_theta0, default=0.0,
                   help="initial angle picking the case when lambda < |v| (0 or pi)")
    c.add_argument("--s-span", type=_span, default=(-5.0, 5.0), help="arc-length interval A:B")
    c.add_argument("--step", type=float, default=1e-3, help="sample spacing")
    c.add_argument("--tol", type=float, default=1e-10, help="integrator tolerance")
    c.add_argument("--source", choices=["closed-form", "integrated"], default="closed-form",
                   help="which curve to write")
    c.add_argument("--verify", action="store_true", help="append the closed-form verification report")
    c.add_argument("--verify-tol", type=float, default=1e-6, help="deviation flagged by --verify")
    c.add_argument("--out", default=None, help="CSV path (default: stdout)")

    t = sub.add_parser("trace", formatter_class=fmt, help="integrate a rotational profile orbit")
    _add_params(t)
    t.add_argument("--seed", required=True,
                   help="axis-up | axis-down | interior:x0,y0,eps")
    t.add_argument("--prescribed", choices=["linear", "cosine"], default="linear",
                   help="prescribed function h")
    t.add_argument("--direction", type=int, choices=[1, -1], default=1,
                   help="integration direction for interior seeds")
    t.add_argument("--stop-after-y0", type=int, default=None,
                   help="stop at this many y = 0 crossings (cosine default: 2)")
    _add_numeric(t)
    t.add_argument("--out", default="trace.csv", help="trace CSV path ('-' for stdout)")
    t.add_argument("--events", default=None, help="event JSON path (default: CSV path with .json)")

    k = sub.add_parser("classify", formatter_class=fmt, help="classify rotational surfaces")
    _add_params(k, need_lambda=False)
    k.add_argument("--seed", default="axis-up", help="axis-up | axis-down | offaxis:x_hat")
    k.add_argument("--grid", action="store_true", help="classify every cell of --ns x --lambdas")
    k.add_argument("--ns", type=_ints, default=[2, 3, 4, 5], help="grid dimensions")
    k.add_argument("--lambdas", type=_floats, default=[0.5, 1.0, 2.0], help="grid lambdas")
    k.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="worker processes for --grid (env HLK_JOBS overrides)")
    _add_numeric(k)

    m = sub.add_parser("export-mesh", formatter_class=fmt, help="revolve a profile CSV into an OBJ mesh")
    m.add_argument("--n", type=int, default=2, help="dimension of the profile's surface")
    m.add_argument("--profile", required=True, help="profile CSV with x and z columns")
    m.add_argument("--segments", type=int, default=hio.DEFAULT_SEGMENTS, help="angular segments")
    m.add_argument("--out", default=None, help="OBJ path (default: stdout)")
    return parser


def _params(args, v=1.0) -> ModelParams:
    if args.lam is None:
        raise UsageError("--lambda is required")
    return ModelParams(args.n, args.lam, v)


def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_cylinder(args) -> int:
    p = _params(args, args.v)
    case = auto_case(p, args.theta0) if args.case == "auto" else CylCase(args.case)
    if args.source == "closed-form":
        curve = closed_form_curve(p, case, args.s_span, step=args.step)
    else:
        curve = integrate_base_curve(p, case.initial_angle + (math.pi if p.v_last < 0 else 0.0),
                                     args.s_span, tol=args.tol, step=args.step)
    _emit(hio.base_curve_csv(curve), args.out)
    log.info("case %s, %d samples", case.value, len(curve))
    if args.verify:
        rep = verify_closed_forms(p, case, args.s_span, tol=args.verify_tol, int_tol=args.tol,
                                  step=args.step)
        stream = sys.stderr if args.out in (None, "-") else sys.stdout
        stream.write(hio.to_json(rep.to_dict()) + "\n")
    return EXIT_OK


def parse_seed(text: str, p: ModelParams) -> OrbitSeed:
    if text == "axis-up":
        return OrbitSeed.axis_up(p)
    if text == "axis-down":
        return OrbitSeed.axis_down(p)
    if text.startswith("interior:"):
        try:
            x0, y0, eps = text.split(":", 1)[1].split(",")
            return OrbitSeed.interior(p, float(x0), float(y0), int(eps))
        except ValueError as exc:
            raise UsageError(f"bad interior seed {text!r}: {exc}") from None
    raise UsageError(f"unknown seed {text!r}; expected axis-up, axis-down or interior:x0,y0,eps")


def cmd_trace(args) -> int:
    p = _params(args)
    seed = parse_seed(args.seed, p)
    f = PrescribedFunction.linear(p.lam) if args.prescribed == "linear" else PrescribedFunction.cosine()
    stop = args.stop_after_y0
    if stop is None and args.prescribed == "cosine" and seed.kind.value == "Interior":
        stop = 2
    opts = _options(args, direction=args.direction, stop_after_y0=stop)
    trace = integrate_orbit(seed, f, opts)
    if trace.termination.kind is EventKind.EXACT:
        log.warning("seed lies on the exact solution %s", trace.termination.data["solution"])
    _emit(hio.trace_csv(trace), args.out)
    events = hio.to_json(trace.events_json()) + "\n"
    if args.events:
        Path(args.events).write_text(events)
    elif args.out not in (None, "-"):
        Path(args.out).with_suffix(".json").write_text(events)
    if args.out not in (None, "-"):
        sys.stdout.write(hio.to_json({"termination": trace.termination.to_dict(),
                                      "winding": trace.winding}) + "\n")
    if trace.termination.kind is EventKind.STEP_FAILURE:
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_classify(args) -> int:
    opts = _options(args)
    env = os.environ.get("HLK_JOBS")
    jobs = default_jobs() if env else args.jobs
    if args.grid:
        reports = classification_table(grid_of(args.ns, args.lambdas), 1, opts, jobs=jobs)
        sys.stdout.write(hio.to_json([r.to_dict() for r in reports]) + "\n")
        return EXIT_NUMERIC if any(r.error for r in reports) else EXIT_OK
    p = _params(args)
    if args.seed in ("axis-up", "axis-down"):
        rep = classify_axis_surface(p, 1 if args.seed == "axis-up" else -1, opts)
    elif args.seed.startswith("offaxis:"):
        try:
            x_hat = float(args.seed.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad seed {args.seed!r}") from None
        if not x_hat > 0:
            raise UsageError("x_hat must be positive")
        rep = classify_offaxis_surface(p, x_hat, opts)
    else:
        raise UsageError(f"unknown seed {args.seed!r}; expected axis-up, axis-down or offaxis:x_hat")
    sys.stdout.write(hio.to_json(rep.to_dict()) + "\n")
    return EXIT_NUMERIC if rep.error else EXIT_OK


def cmd_export_mesh(args) -> int:
    if args.n != 2:
        raise UsageError(f"only n = 2 profiles sweep surfaces in R^3 that can be meshed, got n = {args.n}")
    if args.segments < 3:
        raise UsageError("--segments must be at least 3")
    try:
        with open(args.profile, newline="") as fh:
            cols = hio.read_csv(fh)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    if "x" not in cols or "z" not in cols:
        raise UsageError("profile CSV needs x and z columns")
    verts, tris = hio.revolve(cols["x"], cols["z"], args.segments)
    _emit(hio.obj_text(verts, tris), args.out)
    return EXIT_OK


COMMANDS = {
    "cylinder": cmd_cylinder,
    "trace": cmd_trace,
    "classify": cmd_classify,
    "export-mesh": cmd_export_mesh,
}


def _join_spans(argv: list[str]) -> list[str]:
    # "-5:5" looks like an option to argparse; glue it to its flag
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--s-span" and i + 1 < len(argv):
            out.append(f"--s-span={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_spans(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        log.info("%s", config_from_args(args))
        return COMMANDS[args.command](args)
    except (UsageError, ParameterError, InvalidSeedError, InvalidCaseError) as exc:
        print(f"hlk {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrationError, ArithmeticError, RuntimeError) as exc:
        print(f"hlk {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
