"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 unreadable or malformed input,
3 an input that is well formed but mathematically invalid (for example a
Möbius map with ``ad - bc = 0``).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import antiholo as ah
from . import fixtures
from .averaging import (
    FirstOrderNotZero,
    PerturbationSpec,
    descartes_bound,
    m1_closed,
    m1_numeric,
    m2_closed,
    m2_numeric,
    positive_simple_zeros,
)
from .cpoly import ComplexRationalField
from .cycles import find_cycles
from .flow import integrate_pwcs
from .mobius import Circle, InvalidMobius, MobiusMap
from .normalform import InconsistencyError, classify, falsify_crossing_cycles, rigidity_check
from .portrait import default_interval, portrait_svg
from .system import NotOnManifold, PiecewiseSystem, SingularOnManifold, transform_system

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_MATH = 0, 1, 2, 3


class InputError(Exception):
    """Unreadable or malformed input; the message names the location."""


class MathError(Exception):
    """Well formed input describing an invalid mathematical object."""


MATH_ERRORS = (InvalidMobius, SingularOnManifold, NotOnManifold, ah.ResultantDegenerate, FirstOrderNotZero, MathError)


@dataclass
class RunConfig:
    subcommand: str
    input: str | None = None
    output: str | None = None
    rtol: float = 1e-10
    atol: float = 1e-12
    interval: tuple | None = None
    grid: int = 64
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise InputError("tolerances must be positive")
        if self.interval is not None and not self.interval[1] > self.interval[0]:
            raise InputError(f"empty interval {self.interval[0]}:{self.interval[1]}")
        if self.grid < 0:
            raise InputError("grid size must be nonnegative")


# ---------------------------------------------------------------------------
# parsing helpers


def parse_complex(text):
    """``"1.5-2i"``, ``"0+0i"``, ``"i"``, ``"3"`` or Python's ``j`` form."""
    s = text.strip().replace(" ", "").replace("i", "j")
    s = re.sub(r"(^|[+-])j", r"\g<1>1j", s)
    try:
        return complex(s)
    except ValueError:
        raise InputError(f"not a complex number: {text!r}") from None


def parse_interval(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise InputError(f"interval must look like a:b, got {text!r}")
    try:
        a, b = float(parts[0]), float(parts[1])
    except ValueError:
        raise InputError(f"interval must look like a:b, got {text!r}") from None
    if not b > a:
        raise InputError(f"empty interval {text!r}")
    return a, b


def parse_window(text):
    parts = text.split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        vals = []
    if len(vals) != 4 or not (vals[1] > vals[0] and vals[3] > vals[2]):
        raise InputError(f"window must look like x0:x1:y0:y1 with x0 < x1, y0 < y1, got {text!r}")
    return tuple(vals)


def load_json(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _build(path, fn, data):
    try:
        return fn(data)
    except (KeyError, TypeError, IndexError, AttributeError) as exc:
        what = f"missing key {exc}" if isinstance(exc, KeyError) else str(exc)
        raise InputError(f"{path}: {what}") from None
    except InvalidMobius:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise MathError(f"{path}: {exc}") from None


def load_system(arg):
    """System from a JSON file or a named fixture written ``@name``."""
    if arg is None:
        raise InputError("--system is required")
    if arg.startswith("@"):
        try:
            return fixtures.named(arg[1:])
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    return _build(arg, PiecewiseSystem.from_json, load_json(arg))


def load_map(arg):
    """Möbius map by name (``canonical``, ``canonical-inverse``, ``identity``) or JSON file."""
    if arg is None:
        raise InputError("--map is required")
    try:
        return MobiusMap.named(arg)
    except KeyError:
        pass
    return _build(arg, MobiusMap.from_json, load_json(arg))


def load_field(arg):
    data = load_json(arg)
    if isinstance(data, list):
        data = {"num": data}
    return _build(arg, ComplexRationalField.from_json, data)


def load_antiholo_pair(arg):
    """``{"plus": side, "minus": side}`` or a conjugated system file."""
    if arg.startswith("@"):
        raise InputError("antiholomorphic pairs have no named fixtures")
    data = load_json(arg)
    if isinstance(data, dict) and "plus" in data:
        return _build(arg, lambda d: (ah.AntiholoSide.from_json(d["plus"]), ah.AntiholoSide.from_json(d["minus"])), data)
    sys_ = _build(arg, PiecewiseSystem.from_json, data)
    if not sys_.conjugated:
        raise MathError(f"{arg}: system is not marked conjugated")
    return _build(arg, lambda s: (ah.AntiholoSide.from_field(s.outer), ah.AntiholoSide.from_field(s.inner)), sys_)


def dump(obj, out=None):
    text = json.dumps(obj, indent=2) + "\n"
    write_text(text, out)


def write_text(text, out=None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _c(z):
    return [float(z.real), float(z.imag)]


def describe_shape(shape):
    if isinstance(shape, Circle):
        return {"kind": "circle", "center": _c(shape.center), "radius": float(shape.radius)}
    return {"kind": "line", "point": _c(shape.point), "direction": _c(shape.direction)}


# ---------------------------------------------------------------------------
# subcommands


def cmd_transform(cfg):
    sys_ = load_system(cfg.input)
    m = load_map(cfg.extra["map"])
    try:
        out = transform_system(sys_, m)
    except ValueError as exc:
        raise MathError(str(exc)) from None
    info = describe_shape(m.image_of(sys_.manifold.shape()))
    if cfg.output:
        write_text(out.dumps() + "\n", cfg.output)
        print(f"manifold image: {json.dumps(info)}")
    else:
        dump(out.to_json())
        print(f"manifold image: {json.dumps(info)}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(cfg):
    sys_ = load_system(cfg.input)
    traj = integrate_pwcs(sys_, cfg.extra["z0"], cfg.extra["tspan"], rtol=cfg.rtol, atol=cfg.atol, bound=cfg.extra["bound"])
    write_text(traj.to_csv(), cfg.output)
    return EXIT_OK


def cmd_cycles(cfg):
    sys_ = load_system(cfg.input)
    interval = cfg.interval or default_interval(sys_)
    found = find_cycles(sys_, interval, grid=cfg.grid, rtol=cfg.rtol, atol=cfg.atol, tmax=cfg.extra["tmax"])
    dump(
        {
            "interval": list(interval),
            "grid": cfg.grid,
            "cycles": [c.to_json() for c in found],
            "continuum": bool(found.continuum),
            "undefined_grid_points": len(found.skipped),
        },
        cfg.output,
    )
    return EXIT_OK


def cmd_portrait(cfg):
    sys_ = load_system(cfg.input)
    svg, pr = portrait_svg(
        sys_,
        window=cfg.extra["window"],
        grid=cfg.grid,
        tspan=cfg.extra["tspan"],
        seed=cfg.seed,
        interval=cfg.interval,
        cycle_grid=cfg.extra["cycle_grid"],
        rtol=cfg.rtol,
        atol=cfg.atol,
    )
    write_text(svg, cfg.output)
    summary = {"trajectories": len(pr.trajectories), "cycles": [r.to_json() for r in pr.reports], "skipped": pr.skipped}
    print(json.dumps(summary), file=sys.stderr if cfg.output in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_verify_paper(cfg):
    from . import verify

    only = []
    for item in cfg.extra["only"] or []:
        only.extend(x for x in item.split(",") if x)
    unknown = [g for g in only if g not in verify.GROUPS]
    if unknown:
        raise InputError(f"unknown check group(s) {', '.join(unknown)}; known: {', '.join(verify.GROUPS)}")
    overrides = {}
    for text in cfg.extra["expect"] or []:
        try:
            k, v = verify.parse_override(text)
        except (KeyError, ValueError) as exc:
            raise InputError(f"--expect {text!r}: {exc}") from None
        overrides[k] = v
    report = verify.run(only or None, overrides, seed=cfg.seed or 0)
    for g in report.groups:
        print(g.line(), file=sys.stderr)
    dump(report.to_json(), cfg.output)
    if not report.passed:
        print("failing checks:", file=sys.stderr)
        for c in report.failures():
            print(f"  {c.label}: measured {c.measured!r}, expected {c.expected!r} {c.detail}".rstrip(), file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_averaging(cfg):
    data = load_json(cfg.input) if cfg.input else None
    spec = _build(cfg.input, PerturbationSpec.from_json, data)
    order, emit = cfg.extra["order"], cfg.extra["emit"]
    poly = m1_closed(spec) if order == 1 else m2_closed(spec)
    if emit == "poly":
        dump({"order": order, "coeffs": [float(c) for c in poly.coeffs], "monomials": poly.monomials()}, cfg.output)
        return EXIT_OK
    if emit == "zeros":
        zero = poly.is_zero()
        dump(
            {
                "order": order,
                "identically_zero": bool(zero),
                "positive_simple_zeros": [] if zero else positive_simple_zeros(poly),
                "descartes_bound": None if zero else descartes_bound(poly),
            },
            cfg.output,
        )
        return EXIT_OK
    numeric = m1_numeric if order == 1 else m2_numeric
    rows, ok = [], True
    for r in cfg.extra["radii"]:
        a, b = float(poly(r)), float(numeric(spec, r))
        good = abs(a - b) < 1e-8
        ok &= good
        rows.append({"r": r, "closed": a, "quadrature": b, "passed": good})
    dump({"order": order, "checks": rows, "passed": ok}, cfg.output)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_antiholo(cfg):
    plus, minus = load_antiholo_pair(cfg.input)
    if plus.degree != minus.degree:
        raise MathError("both sides must have the same degree")
    emit = cfg.extra["emit"]
    rb = ah.resultant_bound(plus, minus)
    if emit == "resultant":
        out = rb.report()
        out["R"] = [str(c) for c in rb.R.to_univariate()] if not rb.R.is_zero() else []
        out["reduced"] = [str(c) for c in rb.reduced.to_univariate()] if not rb.reduced.is_zero() else []
        dump(out, cfg.output)
        return EXIT_OK
    if emit == "candidates":
        pairs = ah.cycle_candidates(plus, minus, bound_result=rb)
        points = ah.candidate_points(plus, minus)
        dump(
            {
                "bound": rb.bound,
                "candidates": [[float(x), float(y)] for x, y in pairs],
                "boundary_points": [[_c(p), _c(q)] for p, q in points],
            },
            cfg.output,
        )
        return EXIT_OK
    conf = ah.confirm_candidates(plus, minus)
    dump({"bound": rb.bound, "confirmed": [dict(rep.to_json(), candidate=[_c(p), _c(q)]) for rep, (p, q) in conf]}, cfg.output)
    return EXIT_OK


def cmd_classify(cfg):
    F = load_field(cfg.input)
    try:
        res = classify(F, cfg.extra["at"])
    except ValueError as exc:
        raise MathError(str(exc)) from None
    dump(res.to_json(), cfg.output)
    return EXIT_OK


def cmd_rigidity(cfg):
    sys_ = load_system(cfg.input)
    if cfg.extra["map"]:
        sys_ = transform_system(sys_, load_map(cfg.extra["map"]))
    res = rigidity_check(sys_)
    out = {"rigidity": res.to_json()}
    code = EXIT_OK
    if cfg.extra["trials"] > 0:
        try:
            f = falsify_crossing_cycles(sys_, trials=cfg.extra["trials"], seed=cfg.seed or 0, rigidity=res)
            out["falsify"] = f.to_json()
        except InconsistencyError as exc:
            out["falsify"] = {"error": str(exc)}
            code = EXIT_CHECK
    dump(out, cfg.output)
    return code


def cmd_fixtures(cfg):
    name = cfg.extra["dump"]
    if name is None:
        for k in sorted(fixtures.NAMED):
            print(k)
        return EXIT_OK
    write_text(load_system("@" + name).dumps() + "\n", cfg.output)
    return EXIT_OK


COMMANDS = {
    "transform": cmd_transform,
    "simulate": cmd_simulate,
    "cycles": cmd_cycles,
    "portrait": cmd_portrait,
    "verify-paper": cmd_verify_paper,
    "averaging": cmd_averaging,
    "antiholo": cmd_antiholo,
    "classify": cmd_classify,
    "rigidity": cmd_rigidity,
    "fixtures": cmd_fixtures,
}


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _common(p, tol=True, out=True):
    if out:
        p.add_argument("--out", help="output file (default: stdout)")
    if tol:
        p.add_argument("--rtol", type=float, default=1e-10)
        p.add_argument("--atol", type=float, default=1e-12)


def build_parser():
    ap = _Parser(prog="pwholo", description="Piecewise holomorphic systems: transforms, cycles and checks.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("transform", help="push a system forward by a Möbius map")
    p.add_argument("--system", required=True)
    p.add_argument("--map", required=True, help="canonical, canonical-inverse, identity or a JSON file")
    _common(p, tol=False)

    p = sub.add_parser("simulate", help="integrate one trajectory to CSV")
    p.add_argument("--system", required=True)
    p.add_argument("--z0", required=True)
    p.add_argument("--tspan", type=float, default=10.0)
    p.add_argument("--bound", type=float, default=1e6)
    _common(p)

    p = sub.add_parser("cycles", help="search crossing limit cycles on a section interval")
    p.add_argument("--system", required=True)
    p.add_argument("--interval")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--tmax", type=float, default=200.0)
    _common(p)

    p = sub.add_parser("portrait", help="phase portrait as SVG")
    p.add_argument("--system", required=True)
    p.add_argument("--grid", type=int, default=12)
    p.add_argument("--seed", type=int)
    p.add_argument("--window", help="x0:x1:y0:y1")
    p.add_argument("--interval", help="section interval for the cycle search")
    p.add_argument("--cycle-grid", type=int, default=64)
    p.add_argument("--tspan", type=float, default=10.0)
    _common(p)
    p.set_defaults(rtol=1e-8, atol=1e-10)

    p = sub.add_parser("verify-paper", help="run the reproduction checks")
    p.add_argument("--only", action="append", help="group name(s), comma separated or repeated")
    p.add_argument("--expect", action="append", help="override an expectation, key=value")
    p.add_argument("--seed", type=int, default=0)
    _common(p, tol=False)

    p = sub.add_parser("averaging", help="averaged functions of a perturbation spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--order", type=int, choices=(1, 2), default=1)
    p.add_argument("--emit", choices=("poly", "zeros", "verify"), default="poly")
    p.add_argument("--radii", default="0.25,0.5,1,2")
    _common(p, tol=False)

    p = sub.add_parser("antiholo", help="antiholomorphic pair analysis")
    p.add_argument("action", choices=("bound",))
    p.add_argument("--system", required=True, help='{"plus": side, "minus": side} or a conjugated system')
    p.add_argument("--emit", choices=("resultant", "candidates", "confirmed"), default="resultant")
    _common(p, tol=False)

    p = sub.add_parser("classify", help="normal form class of a field at a point")
    p.add_argument("--field", required=True)
    p.add_argument("--at", default="0")
    _common(p, tol=False)

    p = sub.add_parser("rigidity", help="no-crossing-cycle certificates plus a random search")
    p.add_argument("--system", required=True)
    p.add_argument("--map", help="Möbius map applied to the system first")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    _common(p, tol=False)

    p = sub.add_parser("fixtures", help="list named systems or dump one as JSON")
    p.add_argument("--dump", metavar="NAME")
    _common(p, tol=False)
    return ap


def config_from_args(a):
    get = lambda k, d=None: getattr(a, k, d)
    extra = {}
    if a.cmd == "transform":
        extra["map"] = a.map
    elif a.cmd == "simulate":
        extra.update(z0=parse_complex(a.z0), tspan=a.tspan, bound=a.bound)
    elif a.cmd == "cycles":
        extra["tmax"] = a.tmax
    elif a.cmd == "portrait":
        extra.update(window=parse_window(a.window) if a.window else None, tspan=a.tspan, cycle_grid=a.cycle_grid)
    elif a.cmd == "verify-paper":
        extra.update(only=a.only, expect=a.expect)
    elif a.cmd == "averaging":
        try:
            radii = [float(r) for r in a.radii.split(",")]
        except ValueError:
            raise InputError(f"--radii must be comma separated numbers, got {a.radii!r}") from None
        extra.update(order=a.order, emit=a.emit, radii=radii)
    elif a.cmd == "antiholo":
        extra["emit"] = a.emit
    elif a.cmd == "classify":
        extra["at"] = parse_complex(a.at)
    elif a.cmd == "rigidity":
        extra.update(map=a.map, trials=a.trials)
    elif a.cmd == "fixtures":
        extra["dump"] = a.dump
    source = get("system") or get("spec") or get("field")
    interval = parse_interval(a.interval) if get("interval") else None
    return RunConfig(
        a.cmd,
        input=source,
        output=get("out"),
        rtol=get("rtol", 1e-10),
        atol=get("atol", 1e-12),
        interval=interval,
        grid=get("grid", 64),
        seed=get("seed"),
        extra=extra,
    )


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        return COMMANDS[cfg.subcommand](cfg)
    except InputError as exc:
        print(f"pwholo: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MATH_ERRORS as exc:
        print(f"pwholo: invalid object: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    raise SystemExit(main())
