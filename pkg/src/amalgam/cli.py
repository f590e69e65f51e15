"""Command-line front end.

Exit codes: 0 pass, 1 assertion failure, 2 usage or parse error, 3 numeric error.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .config import ConfigError, parse_config, parse_grid_flag, parse_pairs
from .grid import DegenerateBallError, ParameterError, dyadic_ladder, make_grid, make_weight, sample
from .harness import (
    HEADROOM, REFERENCE_N, RatioReport, SpaceConfig, TestFamily, TheoremCase, config_hash,
    default_cases, default_family, default_fixture_path, op_norm_estimate, parse_t_grid, pin,
    read_fixtures, reports_to_csv, sweep_config, sweep_t, write_fixtures,
)
from .spaces import SpaceParams, amalgam_norm, weak_amalgam_norm
from .weights import a1_constant, ap_constant, apq_constant, ball_family

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_GRID = {"grid.dim": "1", "grid.L": "4", "grid.N": "1024"}


class AssertionFailure(Exception):
    pass


# -- option plumbing -------------------------------------------------------

class Options:
    """Merged view of config file, ``--grid`` and command-line pairs."""

    def __init__(self, values: dict):
        self.values = values
        self.used = set()

    def get(self, key, default=None, block="space"):
        for k in (key, f"{block}.{key}"):
            if k in self.values:
                self.used.add(k)
                return self.values[k]
        if default is None:
            raise ConfigError(f"missing option {key!r}")
        return default

    def number(self, key, default=None, block="space"):
        raw = self.get(key, None if default is None else str(default), block)
        try:
            return math.inf if raw in ("inf", "∞") else float(raw)
        except ValueError:
            raise ConfigError(f"option {key}={raw!r} is not a number") from None

    def grid(self):
        try:
            dim, L, N = (self.values.get(f"grid.{k}", DEFAULT_GRID[f"grid.{k}"]) for k in ("dim", "L", "N"))
            return make_grid(int(dim), float(L), int(N))
        except ValueError as exc:
            raise ConfigError(f"bad grid: {exc}") from None


def _dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x).__name__}")


def _emit(args, text, kind="json"):
    """Write ``text`` to ``--out`` (plus a metadata sidecar) or to stdout."""
    if args.out:
        path = Path(args.out)
        path.write_text(text)
        meta = {"argv": sys.argv[1:], "backend": kernels.backend(), "version": __version__,
                "written": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"), "format": kind}
        Path(str(path) + ".meta.json").write_text(_dumps(meta))
    else:
        sys.stdout.write(text)


def _space(opts: Options, grid):
    p, q, t = opts.number("p"), opts.number("q"), opts.number("t")
    w, v = opts.get("w", "1"), opts.get("v", "1")
    return SpaceParams(p, q, t, make_weight(w, grid), make_weight(v, grid))


def _family(opts: Options, args, grid):
    fam = opts.get("family", "default", block="run")
    if fam == "default":
        return default_family(grid.dim, args.seed)
    return TestFamily(tuple(s for s in fam.split(";") if s), args.seed, "custom")


def _find_case(name: str, dim: int) -> TheoremCase:
    tid, _, sel = name.partition("/")
    sel = sel or "strong"
    for c in default_cases(dim):
        if c.theorem_id == tid and c.norm_selector == sel:
            return c
    raise ConfigError(f"unknown theorem case {name!r}")


# -- commands --------------------------------------------------------------

def cmd_norm(opts, args):
    grid = opts.grid()
    f = sample(opts.get("f", block="run"), grid)
    params = _space(opts, grid)
    out = {"f": opts.get("f", block="run"), "space": params.describe(),
           "strong": amalgam_norm(f, params), "weak": weak_amalgam_norm(f, params)}
    _emit(args, _dumps(out))
    return EXIT_OK


def cmd_apconst(opts, args):
    grid = opts.grid()
    w = make_weight(opts.get("w"), grid)
    cls = opts.get("class", "ap", block="run")
    ladder = dyadic_ladder(grid, r_max=grid.L)
    fam = ball_family(grid, ladder, stride=int(opts.number("stride", 1, block="run")))
    p = opts.number("p")
    if cls == "ap":
        out = ap_constant(w, p, fam).to_dict()
    elif cls in ("apq", "a1q"):
        out = apq_constant(w, p, opts.number("q"), fam).to_dict()
    elif cls == "a1":
        out = {"constant": a1_constant(w, ladder), "ladder": list(ladder.radii)}
    else:
        raise ConfigError(f"class must be ap, a1 or apq, got {cls!r}")
    if not np.isfinite(out["constant"]):
        raise FloatingPointError("weight constant is not finite")
    _emit(args, _dumps(out))
    return EXIT_OK


def _case_from_opts(opts, grid):
    name = opts.get("case", "", block="run")
    if name:
        return _find_case(name, grid.dim)
    op = opts.get("op", block="run")
    space = SpaceConfig(opts.number("p"), opts.number("q"), opts.get("w", "1"), opts.get("v", "1"))
    sel = opts.get("norm", "strong", block="run")
    return TheoremCase("custom", op, space, space, sel, grid.dim)


def cmd_opnorm(opts, args):
    grid = opts.grid()
    case = _case_from_opts(opts, grid)
    rep = op_norm_estimate(case, _family(opts, args, grid), grid, opts.number("t"))
    if args.out and args.out.endswith(".csv"):
        _emit(args, reports_to_csv([rep]), "csv")
    else:
        _emit(args, _dumps(rep.to_dict()))
    return EXIT_OK


def _fixture_path(args):
    return Path(args.fixtures) if args.fixtures else Path(str(default_fixture_path()))


def cmd_sweep(opts, args):
    grid = opts.grid()
    name = opts.get("case", "", block="run")
    t_text = opts.get("t", "0.125:2:dyadic", block="run")
    ts = parse_t_grid(t_text, grid)
    cases = default_cases(grid.dim) if name == "all" else [_case_from_opts(opts, grid)]
    family = _family(opts, args, grid)
    sweeps = [(c, sweep_t(c, family, grid, ts)) for c in cases]
    if args.pin:
        return _pin(args, grid, family, ts, sweeps)
    ref = make_grid(grid.dim, grid.L, REFERENCE_N[grid.dim])
    try:
        fixtures = read_fixtures(_fixture_path(args))
    except FileNotFoundError:
        fixtures = {}
    rows, failed = [], False
    for c, sw in sweeps:
        fx = fixtures.get(c.suite_id)
        ok, bound = True, None
        if fx is not None and fx.config_hash == config_hash(sweep_config(c, family, ref, ts)):
            bound = fx.value * HEADROOM
            ok = sw.spread <= bound
        failed |= not ok
        rows.append({**sw.to_dict(), "bound": bound, "passed": ok})
    if args.out and args.out.endswith(".csv"):
        _emit(args, reports_to_csv([r for _, sw in sweeps for r in sw.reports], argmax_only=True), "csv")
    else:
        _emit(args, _dumps(rows if len(rows) > 1 else rows[0]))
    for r in rows:
        msg = "no fixture" if r["bound"] is None else f"bound {r['bound']:.6g}"
        print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['theorem_id']:<20} spread={r['spread']:.6g}  {msg}",
              file=sys.stderr)
    if failed:
        raise AssertionFailure("spread exceeds pinned bound")
    return EXIT_OK


def _pin(args, grid, family, ts, sweeps):
    if grid.N != REFERENCE_N[grid.dim]:
        raise ConfigError(f"pinning runs at the reference resolution N={REFERENCE_N[grid.dim]}")
    path = _fixture_path(args)
    try:
        fixtures = read_fixtures(path)
    except FileNotFoundError:
        fixtures = {}
    for c, sw in sweeps:
        fixtures[c.suite_id] = pin(c.suite_id, sweep_config(c, family, grid, ts), sw.spread)
    from . import suites
    rep = suites.scaling_run(grid)
    fixtures["Lemma-scaling"] = pin("Lemma-scaling", suites.scaling_config(grid), rep.K)
    write_fixtures(fixtures, path, header=[
        "oracle-pinned constants: suite_id config_hash value date",
        "regenerate with: amalgam sweep case=all --pin --grid dim=1,L=4,N=2048",
    ])
    _emit(args, _dumps({k: fixtures[k].value for k in sorted(fixtures)}))
    return EXIT_OK


def cmd_verify(opts, args):
    from . import suites
    name = args.suite or opts.get("suite", "all", block="run")
    if name != "all" and name not in suites.SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(suites.SUITES + ('all',))}")
    fixtures = read_fixtures(_fixture_path(args)) if args.fixtures else None
    checks = suites.run_suite(name, opts.grid(), fixtures, args.seed)
    lines = [c.line() for c in checks]
    passed = sum(c.passed for c in checks)
    lines.append(f"{passed}/{len(checks)} checks passed")
    print("\n".join(lines))
    if args.out:
        _emit(args, _dumps({"suite": name, "checks": [c.to_dict() for c in checks],
                            "passed": passed, "total": len(checks)}))
    if passed != len(checks):
        raise AssertionFailure(f"{len(checks) - passed} checks failed")
    return EXIT_OK


def cmd_report(opts, args):
    path = Path(opts.get("in", block="run"))
    data = json.loads(path.read_text())
    rows = data if isinstance(data, list) else [data]
    if rows and "t_values" in rows[0]:
        text = "theorem_id,t,max_ratio\n" + "".join(
            f"{r['theorem_id']},{t!r},{m!r}\n" for r in rows for t, m in zip(r["t_values"], r["max_ratios"]))
    elif rows and "ratios" in rows[0]:
        text = reports_to_csv([RatioReport(**r) for r in rows])
    elif rows and "checks" in rows[0]:
        text = "suite,name,passed,value\n" + "".join(
            f"{c['suite']},{c['name']},{c['passed']},{c['value']!r}\n" for r in rows for c in r["checks"])
    else:
        raise ConfigError(f"{path}: not a sweep, ratio or verify report")
    _emit(args, text, "csv")
    return EXIT_OK


COMMANDS = {"norm": cmd_norm, "apconst": cmd_apconst, "opnorm": cmd_opnorm,
            "sweep": cmd_sweep, "verify": cmd_verify, "report": cmd_report}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", default=argparse.SUPPRESS, help="dim=1,L=4,N=1024")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output path (.json or .csv)")
    common.add_argument("--fixtures", default=argparse.SUPPRESS, help="fixtures file")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="family seed")
    common.add_argument("--config", default=argparse.SUPPRESS, help="key=value config file")
    parser = argparse.ArgumentParser(prog="amalgam", parents=[common],
                                     description="Weighted amalgam norms, weights and operator checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "verify":
            sp.add_argument("suite", nargs="?", default=None)
        if name == "sweep":
            sp.add_argument("--pin", action="store_true", help="measure and record fixtures")
        sp.add_argument("pairs", nargs="*", metavar="key=value")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    for key, default in (("grid", None), ("out", None), ("fixtures", None), ("seed", 0), ("config", None)):
        if not hasattr(args, key):
            setattr(args, key, default)
    args.pin = getattr(args, "pin", False)
    args.suite = getattr(args, "suite", None)
    try:
        values = {}
        if args.config:
            values.update(parse_config(Path(args.config).read_text(), args.config))
        if args.grid:
            values.update(parse_grid_flag(args.grid))
        values.update(parse_pairs(args.pairs))
        with np.errstate(divide="raise", invalid="raise", over="raise"):
            return COMMANDS[args.command](Options(values), args)
    except AssertionFailure as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (DegenerateBallError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ParameterError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
