"""Command-line surface: CSV tables for constants, densities, smiles and validation.

    svoltails constants --model heston --t 1 --b 0 --c 1 --y0 1
    svoltails density   --model heston --target mixing --grid-min 0.2 --grid-max 4 --grid-count 120
    svoltails smile     --model stein_stein --t 1 --rate 0.02 --grid-min -2 --grid-max 2
    svoltails validate  --model heston --paths 100000 --seed 7

Exit codes: 0 success, 1 validation failure, 2 invalid input, 3 numerical failure.
Flags may be preloaded from a plain ``key=value`` config file via --config;
explicit flags override file values.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys

import numpy as np

from . import __version__
from . import asymptotics as asy
from . import densities, montecarlo, pricing
from .params import HestonParams, SteinSteinParams
from .roots import smallest_root

_FMT = "{:.17g}"


def _fmt(x) -> str:
    return _FMT.format(float(x))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svoltails",
        description="Densities, tail asymptotics and smiles for uncorrelated "
                    "Stein-Stein and Heston models",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("constants", "density", "smile", "validate"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value file of flag defaults")
        p.add_argument("--model", choices=("heston", "stein_stein"), default="heston")
        p.add_argument("--t", type=float, default=1.0, help="horizon")
        p.add_argument("--rate", type=float, default=0.0)
        p.add_argument("--mu", type=float, default=0.0)
        p.add_argument("--x0", type=float, default=1.0)
        # heston volatility equation
        p.add_argument("--a", type=float, default=1.0)
        p.add_argument("--b", type=float, default=-1.0)
        p.add_argument("--c", type=float, default=1.0)
        # stein-stein volatility equation
        p.add_argument("--q", type=float, default=1.0)
        p.add_argument("--m", type=float, default=0.2)
        p.add_argument("--sigma", type=float, default=0.2)
        p.add_argument("--y0", type=float, default=None,
                       help="initial variance (heston) / volatility (stein_stein)")
        p.add_argument("--grid-min", type=float, default=None)
        p.add_argument("--grid-max", type=float, default=None)
        p.add_argument("--grid-count", type=int, default=101)
        p.add_argument("--grid-spacing", choices=("linear", "log"), default="linear")
        p.add_argument("--paths", type=int, default=100_000)
        p.add_argument("--steps", type=int, default=1024)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--abs-tol", type=float, default=1e-8,
                       help="pointwise density tolerance")
        p.add_argument("--out", help="output CSV path (default stdout)")
        if name == "density":
            p.add_argument("--target", choices=("mixing", "stock"), default="mixing")
        if name == "validate":
            p.add_argument("--corrupt-constant", action="store_true",
                           help=argparse.SUPPRESS)  # negative-control test hook
    return parser


def _apply_config_file(argv: list[str], parser: argparse.ArgumentParser) -> list[str]:
    """Fold --config file entries in as leading flags (so explicit flags win)."""
    if "--config" not in argv:
        return argv
    path = argv[argv.index("--config") + 1]
    injected: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not key or not value:
                raise ValueError(f"malformed config line: {line!r}")
            if key == "corrupt-constant":
                if value.lower() in {"1", "true", "yes"}:
                    injected.append("--corrupt-constant")
                continue
            injected += [f"--{key}", value]
    return argv[:1] + injected + argv[1:]


def _model(args):
    y0 = args.y0
    if args.model == "heston":
        return HestonParams(mu=args.mu, a=args.a, b=args.b, c=args.c,
                            y0=1.0 if y0 is None else y0, x0=args.x0)
    return SteinSteinParams(mu=args.mu, q=args.q, m=args.m, sigma=args.sigma,
                            y0=0.2 if y0 is None else y0, x0=args.x0)


def _grid(args, default_min, default_max):
    lo = default_min if args.grid_min is None else args.grid_min
    hi = default_max if args.grid_max is None else args.grid_max
    n = args.grid_count
    if n < 2 or not lo < hi:
        raise ValueError("grid requires count >= 2 and min < max")
    if args.grid_spacing == "log":
        if lo <= 0:
            raise ValueError("log spacing requires grid-min > 0")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def _header_lines(args) -> list[str]:
    echo = " ".join(
        f"{k}={v}" for k, v in sorted(vars(args).items())
        if k not in {"command", "out", "config"} and v is not None
    )
    return [f"# svoltails {__version__}", f"# config: {echo}"]


def _write(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_constants(args) -> int:
    model = _model(args)
    t = args.t
    rows: list[tuple[str, float]] = []
    if isinstance(model, HestonParams):
        rows.append(("r_s", smallest_root(0.5 * t * abs(model.b))))
        mix = (asy.heston_mixing_constants_b0(model, t) if model.b == 0
               else asy.heston_mixing_constants(model, t))
    else:
        rows.append(("r_s", smallest_root(model.q * t)))
        mix = asy.stein_mixing_constants(model, t)
    for field in dataclasses.fields(mix):
        rows.append((field.name, getattr(mix, field.name)))
    stock = (asy.heston_stock_constants(model, t) if isinstance(model, HestonParams)
             else asy.stein_stock_constants(model, t))
    prefix = "A" if isinstance(model, HestonParams) else "B"
    rows += [(f"{prefix}1", stock.c1), (f"{prefix}2", stock.c2), (f"{prefix}3", stock.c3),
             ("k", stock.k), ("l", stock.l), ("power_shift", stock.power_shift),
             ("log_power", stock.log_power)]
    sc = asy.smile_coeffs(stock, t)
    wing = ("beta", "gamma")[isinstance(model, SteinSteinParams)]
    rows += [(f"{wing}1", sc.b1), (f"{wing}2", sc.b2)]
    if sc.has_log_term:
        rows.append((f"{wing}3", sc.b3))
    p_lo, p_hi = asy.moment_window(model, t)
    rows += [("p_lo", p_lo), ("p_hi", p_hi)]
    lines = _header_lines(args) + ["name,value"]
    lines += [f"{name},{_fmt(value)}" for name, value in rows]
    _write(lines, args.out)
    return 0


def cmd_density(args) -> int:
    model = _model(args)
    t = args.t
    if isinstance(model, HestonParams):
        mix = (asy.heston_mixing_constants_b0(model, t) if model.b == 0
               else asy.heston_mixing_constants(model, t))
        stock = asy.heston_stock_constants(model, t)
    else:
        mix = asy.stein_mixing_constants(model, t)
        stock = asy.stein_stock_constants(model, t)

    if args.target == "mixing":
        grid = _grid(args, 0.05, 6.0)
        table = densities.mixing_density_grid(model, t, grid, args.abs_tol)
        tail = np.array([asy.mixing_tail_eval(mix, y) for y in grid])
    else:
        grid = _grid(args, 1.05, 40.0)
        table = densities.stock_density_grid(model, t, grid, args.abs_tol)
        tail = np.array([asy.stock_tail_eval(stock, x) if x > 1 else math.nan
                         for x in grid])

    lines = _header_lines(args) + [f"# total_mass={_fmt(table.total_mass)}",
                                   "x_or_y,exact,asymptotic,ratio"]
    for x, exact, approx in zip(grid, table.values, tail):
        ratio = exact / approx if approx and not math.isnan(approx) else math.nan
        lines.append(f"{_fmt(x)},{_fmt(exact)},{_fmt(approx)},{_fmt(ratio)}")
    _write(lines, args.out)
    return 0


def cmd_smile(args) -> int:
    model = _model(args)
    grid = _grid(args, -2.0, 2.0)
    points = pricing.model_smile(model, args.t, args.rate, grid)
    stock = (asy.heston_stock_constants(model.with_drift(args.rate), args.t)
             if isinstance(model, HestonParams)
             else asy.stein_stock_constants(model.with_drift(args.rate), args.t))
    sc = asy.smile_coeffs(stock, args.t)
    lines = _header_lines(args) + ["k,implied_vol,asymptotic,flagged_tail"]
    for pt in points:
        wing = asy.smile_eval(sc, abs(pt.log_strike)) if abs(pt.log_strike) > 1 else math.nan
        lines.append(
            f"{_fmt(pt.log_strike)},{_fmt(pt.implied_vol)},{_fmt(wing)},{int(pt.flagged_tail)}"
        )
    _write(lines, args.out)
    return 0


def cmd_validate(args) -> int:
    model = _model(args)
    t = args.t
    checks: list[tuple[str, float, float, bool]] = []  # name, stat, threshold, ok

    # KS probe: alpha_t draws against the inverted-density CDF
    cfg = montecarlo.McConfig(paths=args.paths, steps=args.steps, seed=args.seed)
    if isinstance(model, HestonParams):
        sample = montecarlo.simulate_cir_alpha(model, t, cfg)
    else:
        sample = montecarlo.simulate_ou_alpha(model, t, cfg)
    lo = max(np.min(sample.draws) * 0.5, 1e-4)
    hi = np.max(sample.draws) * 1.2
    grid = np.linspace(lo, hi, 600)
    table = densities.mixing_density_grid(model, t, grid, args.abs_tol)
    values = table.values * (1.05 if getattr(args, "corrupt_constant", False) else 1.0)
    table = densities.DensityGrid(table.abscissae, values, table.abs_tolerance,
                                  table.total_mass)
    ks = montecarlo.ks_distance(sample, table.cdf())
    checks.append(("ks_alpha", ks, 0.01, ks < 0.01))

    # moment-window probe: truncated moments settle inside, grow outside
    p_lo, p_hi = asy.moment_window(model, t)
    conv = _truncated_moment_increments(model, t, p_hi - 0.3)
    div = _truncated_moment_increments(model, t, p_hi + 0.3)
    ok_conv = conv[-1] < 0.05 * conv[0]
    ok_div = div[-1] > div[0]
    checks.append(("moment_inside_settles", conv[-1] / conv[0], 0.05, ok_conv))
    checks.append(("moment_outside_grows", div[-1] / div[0], 1.0, ok_div))

    lines = _header_lines(args) + ["check,statistic,threshold,status"]
    for name, stat, thr, ok in checks:
        lines.append(f"{name},{_fmt(stat)},{_fmt(thr)},{'pass' if ok else 'fail'}")
    _write(lines, args.out)
    if not all(ok for *_, ok in checks):
        failed = next(name for name, *_, ok in checks if not ok)
        print(f"validation failed: {failed}", file=sys.stderr)
        return 1
    return 0


def _truncated_moment_increments(model, t, p):
    """Increments of int x^p D dx over doubling windows (moment-explosion probe)."""
    curve = densities._stock_log_curve(model, t, 24.0)
    out = []
    prev = 0.0
    for hi in (3.0, 6.0, 12.0, 24.0):
        nodes, w = densities._gl_panels(0.0, min(hi, curve.hi), 64)
        val = float(np.dot(w, np.exp(p * nodes + curve.log_d(nodes) + nodes)))
        out.append(val - prev)
        prev = val
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv if argv is None else ["svoltails", *argv])
    parser = _build_parser()
    try:
        argv = _apply_config_file(argv, parser)
        args = parser.parse_args(argv[1:])
        handler = {
            "constants": cmd_constants,
            "density": cmd_density,
            "smile": cmd_smile,
            "validate": cmd_validate,
        }[args.command]
        return handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except densities.QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
