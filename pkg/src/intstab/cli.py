"""Command-line driver: ``intstab prove | region | trace | plot``.

Exit codes: 0 proven (or output written), 1 undetermined, 2 input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import scenarios
from .expr import ArityError, ExprSyntaxError, UnknownIdentifier, VectorFunc, parse
from .interval import Box, DimensionMismatch, Interval
from .paving import InvalidDomain, export_paving, pave, sqrt_rule
from .plot import BadProjection, trace_csv, trace_svg
from .stability import (
    CentreResidualTooLarge,
    Disturbance,
    Mode,
    StabilityReport,
    check_invariance,
    check_stability,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_PROVEN, EXIT_UNDETERMINED, EXIT_INPUT = 0, 1, 2


class ConfigError(ValueError):
    pass


# -- scenario defaults ------------------------------------------------------

DEFAULTS = {
    "logistic": {"centre": ["7/12"], "box": [[0.577, 0.585]], "mode": "equilibrium"},
    "rot3d": {"centre": [0, 0, 0], "eps": 0.004, "mode": "equilibrium"},
    "cycle": {"box": [[1.5, 6.5], [9.5, 15.5]], "mode": "invariance", "drift": 0.05, "speed": 1.0},
    "localisation": {"centre": [0, 0], "mode": "equilibrium",
                     "params": [[0.995, 1.005], [-0.005, 0.005]],
                     "domain": [[0.5, 1.5], [-0.5, 0.5]], "cell_width": 0.05},
}

KEYS = ("scenario", "expr", "centre", "box", "eps", "N", "mode", "drift", "speed", "params",
        "domain", "cell_width", "workers", "trace_csv", "csv", "svg", "out", "proj", "residual_tol")


@dataclass
class RunConfig:
    scenario: Optional[str] = None
    expr: Optional[str] = None
    centre: Optional[list] = None
    box: Optional[list] = None
    eps: Optional[float] = None
    N: int = 10
    mode: str = "equilibrium"
    drift: float = 0.05
    speed: float = 1.0
    params: Optional[list] = None
    domain: Optional[list] = None
    cell_width: Optional[float] = None
    workers: Optional[int] = None
    trace_csv: Optional[str] = None
    csv: Optional[str] = None
    svg: Optional[str] = None
    out: Optional[str] = None
    proj: list = field(default_factory=lambda: [1, 2])
    residual_tol: float = 1e-9


# -- value parsing ------------------------------------------------------------

def _num(v) -> Fraction:
    if isinstance(v, bool):
        raise ConfigError(f"not a number: {v!r}")
    try:
        return Fraction(str(v).strip()) if not isinstance(v, float) else Fraction(v)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a number: {v!r}") from None


def parse_box_text(text: str) -> list:
    """``"[1.5,6.5];[9.5,15.5]"`` -> ``[["1.5","6.5"], ["9.5","15.5"]]``."""
    comps = []
    for part in text.split(";"):
        part = part.strip().strip("[]() ")
        if not part:
            continue
        vals = [v.strip() for v in part.split(",")]
        if len(vals) not in (1, 2):
            raise ConfigError(f"bad box component {part!r}")
        comps.append(vals)
    if not comps:
        raise ConfigError(f"empty box {text!r}")
    return comps


def to_box(components) -> Box:
    """Outward enclosure of a box given as ``[[lo, hi], ...]`` (exact decimals/rationals)."""
    comps = []
    for c in components:
        if isinstance(c, (list, tuple)):
            if len(c) == 1:
                c = [c[0], c[0]]
            if len(c) != 2:
                raise ConfigError(f"bad box component {c!r}")
            lo, hi = _num(c[0]), _num(c[1])
        else:
            lo = hi = _num(c)
        if lo > hi:
            raise ConfigError(f"lower bound above upper bound in {c!r}")
        comps.append(Interval(Interval.enclose(lo).lo, Interval.enclose(hi).hi))
    return Box(comps)


def to_point(components) -> Box:
    return Box([Interval.enclose(_num(v)) for v in components])


# -- configuration -------------------------------------------------------------

def load_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    base = os.getcwd()
    if args.config:
        try:
            with open(args.config, "rb") as fh:
                data = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        base = os.path.dirname(os.path.abspath(args.config))
        unknown = set(data) - set(KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "expr" in data:
            data["expr"] = os.path.join(base, data["expr"])
    for key in KEYS:
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    for key in ("box", "params", "domain"):
        if isinstance(data.get(key), str):
            data[key] = parse_box_text(data[key])
    if isinstance(data.get("centre"), str):
        data["centre"] = [v.strip() for v in data["centre"].strip("[]() ").replace(";", ",").split(",")]
    if isinstance(data.get("proj"), str):
        try:
            data["proj"] = [int(v) for v in data["proj"].split(",")]
        except ValueError:
            raise ConfigError(f"bad projection {data['proj']!r}") from None
    if bool(data.get("scenario")) == bool(data.get("expr")):
        raise ConfigError("give exactly one of --scenario or --expr")
    scen = data.get("scenario")
    if scen:
        if scen not in DEFAULTS:
            raise ConfigError(f"unknown scenario {scen!r} (choose from {', '.join(DEFAULTS)})")
        merged = dict(DEFAULTS[scen])
        if "box" in data or "eps" in data:
            merged.pop("box", None)
            merged.pop("eps", None)
        merged.update(data)
        data = merged
    cfg = RunConfig(**{k: v for k, v in data.items() if k in KEYS})
    if cfg.mode not in ("equilibrium", "invariance"):
        raise ConfigError(f"unknown mode {cfg.mode!r}")
    if cfg.N < 1:
        raise ConfigError("N must be >= 1")
    return cfg


def load_system(cfg: RunConfig) -> list[VectorFunc]:
    """The system as a list of stages (one stage unless it is a cycle)."""
    if cfg.scenario:
        if cfg.scenario == "cycle":
            return scenarios.cycle_stages(v=str(cfg.speed))
        return [scenarios.SCENARIOS[cfg.scenario]()]
    try:
        with open(cfg.expr, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read expression file: {exc}") from None
    stages = text.split("|")
    funcs = [parse(t) for t in stages]
    n = max(f.n for f in funcs)
    p = max(f.p for f in funcs)
    return [parse(t, n=n, p=p, name=f"stage{i + 1}") for i, t in enumerate(stages)]


def _initial_box(cfg: RunConfig, n: int, centre: Optional[Box], params: Optional[Box] = None) -> Box:
    eps = cfg.eps
    if eps is None and params is not None:
        eps = sqrt_rule(params.width())
    if cfg.box is not None:
        x0 = to_box(cfg.box)
    elif eps is not None:
        if eps <= 0:
            raise ConfigError("eps must be positive")
        x0 = Box.hypercube(n, -float(eps), float(eps))
        if centre is not None:
            x0 = x0 + centre
    else:
        raise ConfigError("need an initial box (--box or --eps)")
    if len(x0) != n:
        raise ConfigError(f"initial box has dimension {len(x0)}, system has {n}")
    return x0


def run_proof(cfg: RunConfig) -> StabilityReport:
    stages = load_system(cfg)
    n = stages[0].n
    if cfg.mode == "invariance":
        if stages[0].p:
            raise ConfigError("invariance mode does not take parameters")
        x0 = _initial_box(cfg, n, None)
        centre = to_point(cfg.centre).mid() if cfg.centre is not None else None
        dist = Disturbance(eps=float(cfg.drift), speed=float(cfg.speed))
        return check_invariance(stages, x0, dist, cfg.N, centre_point=centre)
    if len(stages) != 1:
        raise ConfigError("equilibrium mode takes a single map")
    f = stages[0]
    if cfg.centre is None:
        raise ConfigError("equilibrium mode needs --centre")
    xbar = to_point(cfg.centre)
    if len(xbar) != n:
        raise ConfigError(f"centre has dimension {len(xbar)}, system has {n}")
    params = None
    if f.p:
        if cfg.params is None:
            raise ConfigError(f"system has {f.p} parameters; give --params")
        params = to_box(cfg.params)
        if len(params) != f.p:
            raise ConfigError(f"parameter box has dimension {len(params)}, system has {f.p}")
    x0 = _initial_box(cfg, n, xbar, params)
    return check_stability(f, xbar, x0, cfg.N, params=params, residual_tol=cfg.residual_tol)


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def report_text(rep: StabilityReport) -> str:
    if rep.proven and rep.mode is Mode.INVARIANCE:
        lines = ["PROVEN: the initial box is forward invariant for the disturbed cycle",
                 f"  cycles until inclusion q = {rep.q}"]
        if rep.alpha is not None:
            lines.append(f"  undisturbed contraction rate alpha = {rep.alpha!r}")
        if rep.beta is not None:
            lines.append(f"  beta = {rep.beta!r}")
        lines.append(f"  invariant box = {rep.delta_box}")
        lines.append(f"  cycle centre = {rep.xbar}")
        return "\n".join(lines) + "\n"
    if rep.proven:
        return "\n".join([
            "PROVEN: exponentially stable",
            f"  q = {rep.q}",
            f"  alpha = {rep.alpha!r}",
            f"  beta = {rep.beta!r}",
            f"  delta box = {rep.delta_box}",
            f"  centre = {rep.xbar}",
        ]) + "\n"
    return f"UNDETERMINED ({rep.cause}): {rep.detail}\n"


# -- commands -----------------------------------------------------------------

def cmd_prove(cfg: RunConfig) -> int:
    rep = run_proof(cfg)
    sys.stdout.write(report_text(rep))
    if cfg.trace_csv and rep.trace is not None:
        _write(cfg.trace_csv, trace_csv(rep.trace))
    return EXIT_PROVEN if rep.proven else EXIT_UNDETERMINED


def cmd_trace(cfg: RunConfig) -> int:
    rep = run_proof(cfg)
    if rep.trace is None:
        raise ConfigError(f"no trace produced ({rep.cause})")
    _write(cfg.out, trace_csv(rep.trace))
    return 0


def cmd_plot(cfg: RunConfig) -> int:
    rep = run_proof(cfg)
    if rep.trace is None:
        raise ConfigError(f"no trace produced ({rep.cause})")
    proj = [int(i) - 1 for i in cfg.proj]
    svg = trace_svg(rep.trace, rep.xbar, rep.delta_box, proj, proven_step=rep.q)
    _write(cfg.out, svg)
    return 0


def cmd_region(cfg: RunConfig) -> int:
    stages = load_system(cfg)
    if len(stages) != 1:
        raise ConfigError("region runs take a single parametrised map")
    f = stages[0]
    if cfg.domain is None or cfg.cell_width is None:
        raise ConfigError("region runs need --domain and --cell-width")
    w = float(cfg.cell_width)
    if not w > 0:
        raise ConfigError("cell width must be positive")
    domain = to_box(cfg.domain)
    rule = sqrt_rule
    if cfg.eps is not None:
        eps = float(cfg.eps)
        rule = lambda _w: eps  # noqa: E731
    result = pave(f, domain, w, cfg.N, eps_rule=rule, workers=cfg.workers, residual_tol=cfg.residual_tol)
    if cfg.csv:
        export_paving(result, "csv", cfg.csv)
    if cfg.svg:
        export_paving(result, "svg", cfg.svg)
    total = len(result.cells)
    sys.stdout.write(f"{result.n_proven}/{total} cells proven stable ({100.0 * result.proven_fraction:.1f}%)\n")
    return EXIT_PROVEN if result.n_proven else EXIT_UNDETERMINED


COMMANDS = {"prove": cmd_prove, "region": cmd_region, "trace": cmd_trace, "plot": cmd_plot}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="intstab", description="Centred-form stability proofs for discrete-time systems.")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration; flags override it")
    src = common.add_mutually_exclusive_group()
    src.add_argument("--scenario", choices=sorted(DEFAULTS), help="built-in system")
    src.add_argument("--expr", help="file with the system expression")
    common.add_argument("--centre", help="centre point, e.g. '7/12' or '0,0,0'")
    common.add_argument("--box", help="initial box, e.g. '[0.577,0.585]' or '[1,2];[3,4]'")
    common.add_argument("--eps", type=float, help="half width of a hypercube around the centre (region: fixed eps)")
    common.add_argument("-N", type=int, dest="N", help="maximum number of iterations (default 10)")
    common.add_argument("--mode", choices=["equilibrium", "invariance"])
    common.add_argument("--drift", type=float, help="disturbance growth rate eps of a cycle")
    common.add_argument("--speed", type=float, help="cruising speed v of a cycle")
    common.add_argument("--params", help="parameter box for parametrised systems")
    common.add_argument("--residual-tol", type=float, dest="residual_tol")

    p = sub.add_parser("prove", parents=[common], help="run the stability proof")
    p.add_argument("--trace-csv", dest="trace_csv", help="also write the trace as CSV")

    r = sub.add_parser("region", parents=[common], help="pave a parameter domain")
    r.add_argument("--domain", help="parameter domain box")
    r.add_argument("--cell-width", type=float, dest="cell_width")
    r.add_argument("--csv")
    r.add_argument("--svg")
    r.add_argument("--workers", type=int)

    t = sub.add_parser("trace", parents=[common], help="write the centred-form trace as CSV")
    t.add_argument("--out", "-o")

    pl = sub.add_parser("plot", parents=[common], help="draw the nested boxes as SVG")
    pl.add_argument("--out", "-o")
    pl.add_argument("--proj", help="coordinate pair to draw, 1-based, e.g. '1,3'")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except (ConfigError, ExprSyntaxError, UnknownIdentifier, ArityError, DimensionMismatch,
            InvalidDomain, BadProjection, CentreResidualTooLarge, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
