"""Command-line front end.

Subcommands: ``threshold``, ``robin-region``, ``delta-region``, ``neumann-curve``
and ``critical``. Apertures are given and printed in units of pi.

Every subcommand accepts ``--config FILE``: one ``key = value`` per line,
keys spelled like the long flags without the leading dashes (``beta-count``
or ``beta_count``), ``#`` starts a comment. Flags given on the command line
override values from the file.

Exit codes: 0 success, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import __version__, neumann
from .cache import ThresholdCache
from .errors import NumericalError
from .fiber import FiberConfig, FiberKind, FiberModel, threshold
from .scan import (
    CURVE_COLUMNS,
    axis,
    delta_region,
    neumann_curve,
    render_csv,
    robin_region,
    thresholds_for,
)

log = logging.getLogger("magwedge")

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("common options")
    g.add_argument("--out", type=Path, help="write the result here instead of stdout")
    g.add_argument("--config", type=Path, help="key = value file mirroring the flags")
    g.add_argument("--jobs", type=int, default=1, help="worker processes for grid scans")
    g.add_argument("--h", type=float, default=FiberConfig.h, help="fibre grid step")
    g.add_argument("--L", type=float, default=FiberConfig.L, help="fibre truncation margin")
    g.add_argument("--cache-dir", type=Path, help="threshold cache directory")
    g.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    g.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="magwedge",
        description="Bound-state certificates for magnetic wedge and broken-line operators.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    subs = {}

    p = sub.add_parser("threshold", help="bottom of the essential spectrum, as JSON")
    p.add_argument("--model", choices=[k.value for k in FiberKind])
    p.add_argument("--beta", type=float)
    subs["threshold"] = p

    p = sub.add_parser("robin-region", help="Robin wedge certificate over a (phi, beta) grid")
    p.add_argument("--phi-min", type=float, default=0.05)
    p.add_argument("--phi-max", type=float, default=0.95)
    p.add_argument("--phi-count", type=int, default=19)
    p.add_argument("--beta-min", type=float, default=-1.0)
    p.add_argument("--beta-max", type=float, default=3.0)
    p.add_argument("--beta-count", type=int, default=17)
    subs["robin-region"] = p

    p = sub.add_parser("delta-region", help="broken-line delta certificate over a (phi, beta) grid")
    p.add_argument("--phi-min", type=float, default=0.02)
    p.add_argument("--phi-max", type=float, default=0.98)
    p.add_argument("--phi-count", type=int, default=25)
    p.add_argument("--beta-min", type=float, default=0.05)
    p.add_argument("--beta-max", type=float, default=5.0)
    p.add_argument("--beta-count", type=int, default=12)
    subs["delta-region"] = p

    p = sub.add_parser("neumann-curve", help="optimised N=2 functional against aperture")
    p.add_argument("--phi-min", type=float, default=0.4)
    p.add_argument("--phi-max", type=float, default=0.7)
    p.add_argument("--count", type=int, default=61)
    subs["neumann-curve"] = p

    p = sub.add_parser("critical", help="largest aperture certified by the order-N Ansatz")
    p.add_argument("--n", type=int, dest="order")
    p.add_argument("--tol", type=float, default=1e-4, help="aperture tolerance in units of pi")
    p.add_argument("--engine", choices=["direct", "spectral"], default="direct")
    p.add_argument("--grid", type=int, default=512, help="angular grid intervals (direct engine)")
    subs["critical"] = p

    for p in subs.values():
        _common(p)
    return parser, subs


def _read_config(path: Path, sub: argparse.ArgumentParser) -> dict:
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    actions = {}
    for act in sub._actions:
        for opt in act.option_strings:
            if opt.startswith("--"):
                actions[opt[2:].replace("_", "-")] = act
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        act = actions.get(key.replace("_", "-"))
        if act is None or act.dest in ("config", "help"):
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        if isinstance(act, argparse._StoreTrueAction):
            if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"{path}:{lineno}: {key} expects true/false")
            values[act.dest] = val.lower() in ("true", "1", "yes")
            continue
        try:
            conv = act.type(val) if act.type else val
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {val!r}") from exc
        if act.choices is not None and conv not in act.choices:
            raise UsageError(f"{path}:{lineno}: {key} must be one of {sorted(act.choices)}")
        values[act.dest] = conv
    return values


def _fiber_config(args) -> FiberConfig:
    try:
        return FiberConfig(h=args.h, L=args.L)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _cache(args) -> ThresholdCache | None:
    return None if args.no_cache else ThresholdCache(args.cache_dir)


def _emit(args, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    try:
        args.out.write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from exc
    log.info("wrote %s", args.out)


def _json(obj) -> str:
    return json.dumps(obj, indent=None) + "\n"


def cmd_threshold(args) -> None:
    if args.model is None or args.beta is None:
        raise UsageError("threshold needs --model and --beta")
    if not math.isfinite(args.beta):
        raise UsageError("--beta must be finite")
    cfg = _fiber_config(args)
    model = FiberModel(args.model, args.beta)
    cache = _cache(args)
    res = cache.get(model, cfg) if cache is not None else None
    if res is None:
        res = threshold(model, cfg)
        if cache is not None:
            cache.put(res)
            cache.save()
    _emit(args, _json(res.to_dict()))


def _grid_axes(args):
    if args.phi_count < 1 or args.beta_count < 1:
        raise UsageError("grid counts must be positive")
    if not (0 < args.phi_min <= args.phi_max < 1):
        raise UsageError("aperture range must lie inside (0, 1) in units of pi")
    if args.beta_min > args.beta_max:
        raise UsageError("empty beta range")
    return axis(args.phi_min, args.phi_max, args.phi_count), axis(
        args.beta_min, args.beta_max, args.beta_count
    )


def _region_cmd(args, kind: FiberKind, fn) -> None:
    phis, betas = _grid_axes(args)
    if kind is FiberKind.DELTA and betas[0] <= 0:
        raise UsageError("delta-region needs beta > 0 on the whole axis")
    cfg = _fiber_config(args)
    cache = _cache(args)
    grid = fn(phis, betas, cfg, cache, args.jobs)
    meta = {
        "command": f"{kind.value}-region",
        "model": kind.value,
        "h": cfg.h,
        "L": cfg.L,
        "phi_count": len(phis),
        "beta_count": len(betas),
    }
    text = render_csv(grid.columns, grid.rows(), meta)
    _emit(args, text)
    if cache is not None:
        cache.save()


def cmd_robin_region(args) -> None:
    _region_cmd(args, FiberKind.ROBIN, robin_region)


def cmd_delta_region(args) -> None:
    _region_cmd(args, FiberKind.DELTA, delta_region)


def _neumann_theta(args) -> float:
    cfg = _fiber_config(args)
    cache = _cache(args)
    res = thresholds_for(FiberKind.ROBIN, [0.0], cfg, cache)[0.0]
    if cache is not None:
        cache.save()
    return res.theta


def cmd_neumann_curve(args) -> None:
    if args.count < 1 or not (0 < args.phi_min <= args.phi_max < 1):
        raise UsageError("aperture range must lie inside (0, 1) in units of pi")
    theta = _neumann_theta(args)
    rows = neumann_curve(axis(args.phi_min, args.phi_max, args.count), theta)
    meta = {"command": "neumann-curve", "order": 2, "theta": theta, "h": args.h, "L": args.L}
    _emit(args, render_csv(CURVE_COLUMNS, rows, meta))


def cmd_critical(args) -> None:
    if args.order is None:
        raise UsageError("critical needs --n")
    if not 1 <= args.order <= 6:
        raise UsageError("--n must lie in 1..6")
    if args.tol < 1e-4:
        raise UsageError("--tol must be at least 1e-4 (units of pi)")
    theta = _neumann_theta(args)
    phi = neumann.critical_aperture(
        args.order, theta, tol_phi=args.tol * math.pi, engine=args.engine, m=args.grid
    )
    _emit(args, _json({"N": args.order, "phi_star_over_pi": phi / math.pi}))


COMMANDS = {
    "threshold": cmd_threshold,
    "robin-region": cmd_robin_region,
    "delta-region": cmd_delta_region,
    "neumann-curve": cmd_neumann_curve,
    "critical": cmd_critical,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.config is not None:
            subs[args.command].set_defaults(**_read_config(args.config, subs[args.command]))
            args = parser.parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        t0 = time.perf_counter()
        COMMANDS[args.command](args)
        log.info("%s finished in %.2f s", args.command, time.perf_counter() - t0)
    except UsageError as exc:
        print(f"magwedge {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"magwedge {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
