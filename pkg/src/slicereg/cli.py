"""Command line interface: ``slicereg series|check|verify|report``.

Exit codes: 0 pass, 1 check or bound failed, 2 input error,
3 math-domain error, 4 sampled theorem hypothesis failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import maps, verify
from .errors import HypothesisFailed, InputFormatError, MathDomainError
from .geocheck import (
    DEFAULT_ANGLES,
    DEFAULT_RADII,
    DEFAULT_TOL,
    DEFAULT_UNITS,
    Condition,
    SampleGrid,
    SpiralParams,
    check_condition,
    check_injectivity_slice,
)
from .quat import Quaternion, parse_unit
from .series import (
    DEFAULT_DEGREE,
    Side,
    TruncatedSeries,
    bullet_compose,
    bullet_inverse,
    classify,
    evaluate,
    slice_derivative,
    split_coefficients,
    star_inverse,
    star_mul,
)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_DOMAIN, EXIT_HYPOTHESIS = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    degree: int
    tol: float
    radii: tuple[float, ...]
    angles: int
    units: int
    seed: int
    resolution: int
    format: str

    def grid(self) -> SampleGrid:
        return SampleGrid.generate(self.radii, self.angles, self.units, self.seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["radii"] = list(self.radii)
        return d


class InputError(Exception):
    """Bad command line input; mapped to exit code 2."""


# ---------------------------------------------------------------------------
# argument plumbing


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--degree", type=int, default=None, help=f"truncation degree N (default {DEFAULT_DEGREE})")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--radii", type=_float_list, default=DEFAULT_RADII)
    p.add_argument("--angles", type=int, default=DEFAULT_ANGLES)
    p.add_argument("--units", type=int, default=DEFAULT_UNITS, help="number of imaginary units in the grid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resolution", type=int, default=256)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="output file (default stdout)")


def _config(args) -> RunConfig:
    seed = args.seed
    env = os.environ.get("SLICEREG_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise InputError(f"SLICEREG_SEED must be an integer, got {env!r}") from None
    degree = args.degree if args.degree is not None else DEFAULT_DEGREE
    if degree < 1:
        raise InputError("--degree must be at least 1")
    if not args.tol > 0:
        raise InputError("--tol must be positive")
    return RunConfig(degree, args.tol, tuple(args.radii), args.angles, args.units, seed, args.resolution, args.format)


def load_series(source: str, degree: int) -> tuple[TruncatedSeries, str]:
    """A builtin name, inline JSON or a path to a series JSON/CSV file."""
    if source in maps.BUILTINS:
        return maps.builtin(source, degree), source
    text = source.strip()
    if text.startswith("{"):
        return TruncatedSeries.from_json(text), "inline"
    path = Path(source)
    if not path.is_file():
        raise InputError(f"series {source!r} is neither a builtin ({', '.join(sorted(maps.BUILTINS))}) nor a file")
    content = path.read_text()
    if path.suffix.lower() == ".csv":
        return _series_from_csv(content), path.stem
    return TruncatedSeries.from_json(content), path.stem


def _series_from_csv(text: str) -> TruncatedSeries:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:5] != ["n", "w", "x", "y", "z"]:
        raise InputFormatError("series CSV needs the header n,w,x,y,z")
    try:
        data = [[float(v) for v in r[1:5]] for r in rows[1:] if r]
    except ValueError as exc:
        raise InputFormatError(f"non-numeric series CSV entry: {exc}") from exc
    return TruncatedSeries.from_dict({"degree": len(data) - 1, "coeffs": data})


def _file_degree(source: str | None) -> int | None:
    """Degree of a non-builtin series argument, used to size builtins next to it."""
    if source is None or source in maps.BUILTINS:
        return None
    try:
        return load_series(source, DEFAULT_DEGREE)[0].degree
    except Exception:
        return None


def _operand_degree(args, *specs) -> int:
    if args.degree is not None:
        return args.degree
    for s in specs:
        d = _file_degree(s)
        if d is not None:
            return d
    return DEFAULT_DEGREE


def _parse_quaternion(text: str) -> Quaternion:
    t = text.strip()
    try:
        vals = json.loads(t) if t.startswith("[") else [float(v) for v in t.split(",")]
        q = Quaternion.from_seq(vals) if len(vals) == 4 else None
    except (ValueError, TypeError):
        q = None
    if q is None:
        raise InputError(f"expected a quaternion 'w,x,y,z', got {text!r}")
    return q


def _unit(text: str):
    try:
        return parse_unit(text)
    except (ValueError, MathDomainError) as exc:
        raise InputError(str(exc)) from exc


# ---------------------------------------------------------------------------
# output


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _clean(obj):
    """Replace non-finite floats so the JSON stays standard."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def _flatten(obj, prefix="") -> dict:
    out = {}
    if isinstance(obj, dict):
        for k in sorted(obj):
            out.update(_flatten(obj[k], f"{prefix}{k}."))
    elif isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        out[prefix[:-1]] = json.dumps(obj, sort_keys=True)
    elif isinstance(obj, list):
        out[prefix[:-1]] = ";".join(repr(v) for v in obj)
    else:
        out[prefix[:-1]] = "" if obj is None else obj
    return out


def _to_csv(doc: dict) -> str:
    flat = _flatten(doc)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(flat))
    w.writerow(list(flat.values()))
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_series(f: TruncatedSeries, cfg: RunConfig, out: str | None) -> None:
    _emit(f.to_csv() if cfg.format == "csv" else _dumps(f.to_dict()), out)


def _emit_report(kind: str, series_name: str, report: dict, cfg: RunConfig, out: str | None) -> None:
    doc = _clean({"kind": kind, "series": series_name, "config": cfg.to_dict(), "report": report})
    _emit(_to_csv(doc) if cfg.format == "csv" else _dumps(doc), out)


# ---------------------------------------------------------------------------
# series


def cmd_series(args) -> int:
    cfg = _config(args)
    op = args.series_cmd
    if op == "make":
        f = _make(args, cfg)
    elif op == "star-mul":
        n = _operand_degree(args, args.f, args.g)
        f = star_mul(load_series(args.f, n)[0], load_series(args.g, n)[0], degree=args.degree)
    elif op == "star-inv":
        n = _operand_degree(args, args.f)
        f = star_inverse(load_series(args.f, n)[0], degree=args.degree)
    elif op == "compose":
        n = _operand_degree(args, args.g, args.w)
        f = bullet_compose(load_series(args.g, n)[0], load_series(args.w, n)[0], degree=args.degree)
    elif op == "invert-compose":
        n = _operand_degree(args, args.g)
        f = bullet_inverse(load_series(args.g, n)[0], Side(args.side), degree=args.degree)
    elif op == "derive":
        f = slice_derivative(load_series(args.f, _operand_degree(args, args.f))[0])
    elif op == "evaluate":
        g = load_series(args.f, _operand_degree(args, args.f))[0]
        v = evaluate(g, _parse_quaternion(args.q))
        _emit(_dumps({"q": _parse_quaternion(args.q).to_list(), "value": v.to_list()}), args.out)
        return EXIT_PASS
    elif op == "split":
        g = load_series(args.f, _operand_degree(args, args.f))[0]
        sp = split_coefficients(g, _unit(args.unit), _unit(args.j))
        doc = {
            "I": sp.I.to_list(),
            "J": sp.J.to_list(),
            "f1": [[c.real, c.imag] for c in sp.f1_coeffs],
            "f2": [[c.real, c.imag] for c in sp.f2_coeffs],
        }
        _emit(_dumps(doc), args.out)
        return EXIT_PASS
    elif op == "classify":
        g = load_series(args.f, _operand_degree(args, args.f))[0]
        _emit(_dumps(classify(g).to_dict()), args.out)
        return EXIT_PASS
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown series command {op}")
    _emit_series(f, cfg, args.out)
    return EXIT_PASS


_OPERATORS = ("dilation", "rotate-conjugate", "alexander", "libera", "ratio", "odd-sqrt")


def _make(args, cfg: RunConfig) -> TruncatedSeries:
    name = args.name
    N = cfg.degree
    if name in maps.BUILTINS and name != "caratheodory-extremal":
        return maps.builtin(name, N)
    if name == "caratheodory-extremal":
        return maps.caratheodory_extremal(args.theta, _unit(args.unit), N)
    if name == "mobius":
        return maps.mobius_series(args.t, N)
    if name in _OPERATORS:
        if not args.source:
            raise InputError(f"series make {name} needs --from SERIES")
        f = load_series(args.source, _operand_degree(args, args.source))[0]
        if name == "dilation":
            return maps.dilation(f, args.r)
        if name == "rotate-conjugate":
            return maps.rotate_conjugate(f, _parse_quaternion(args.u))
        if name == "alexander":
            return maps.alexander_op(f)
        if name == "libera":
            return maps.libera_op(f)
        if name == "ratio":
            return maps.ratio_transform(f, args.a)
        return maps.odd_sqrt_transform(f)
    raise InputError(f"unknown series name {name!r}")


# ---------------------------------------------------------------------------
# check


_CHECKS = {
    "positive-deriv-real-part": Condition.POSITIVE_DERIV_REAL_PART,
    "slice-starlike": Condition.SLICE_STARLIKE,
    "slice-convex": Condition.SLICE_CONVEX,
    "spirallike": Condition.SPIRALLIKE,
    "bounded-rotation": Condition.BOUNDED_ROTATION,
    "p-class-ratio": Condition.P_CLASS_RATIO,
    "injectivity": Condition.INJECTIVITY,
}


def _grid(args, cfg: RunConfig) -> SampleGrid:
    source = getattr(args, "grid", "default")
    if source in (None, "default"):
        return cfg.grid()
    path = Path(source)
    if not path.is_file():
        raise InputError(f"grid file {source!r} not found")
    return SampleGrid.from_json(path.read_text())


def cmd_check(args) -> int:
    cfg = _config(args)
    f, name = load_series(args.series, cfg.degree)
    grid = _grid(args, cfg)
    cond = _CHECKS[args.condition]
    if cond is Condition.INJECTIVITY:
        rep = check_injectivity_slice(f, _unit(args.unit), grid, separation=args.separation, tol=cfg.tol)
    else:
        spiral = SpiralParams(args.gamma) if cond is Condition.SPIRALLIKE else None
        rep = check_condition(f, cond, grid, cfg.tol, spiral=spiral)
    _emit_report(f"check:{args.condition}", name, rep.to_dict(), cfg, args.out)
    return EXIT_PASS if rep.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify


_ENVELOPES = ("caratheodory", "distortion", "growth", "rotation-ratio")
_COEFFS = ("area-sum", "bieberbach", "starlike-coeff", "convex-coeff")
VERIFY_KINDS = _ENVELOPES + _COEFFS + (
    "integral-mean",
    "koebe-quarter",
    "area",
    "rogosinski",
    "subordination",
    "m-norm",
    "t-transform",
)


def _subordinate_pair(args, cfg: RunConfig, grid: SampleGrid):
    if not args.against:
        raise InputError(f"verify {args.kind} needs --against G")
    n = _operand_degree(args, args.against, args.series, args.w)
    g, gname = load_series(args.against, n)
    if args.w:
        w = load_series(args.w, n)[0]
        f = verify.build_subordinate(g, w, grid, cfg.tol)
        return f, g, gname
    if not args.series:
        raise InputError(f"verify {args.kind} needs --series F or --w W")
    return load_series(args.series, n)[0], g, gname


def cmd_verify(args) -> int:
    cfg = _config(args)
    kind = args.kind
    grid = _grid(args, cfg)
    unit = _unit(args.unit)
    if kind == "area":
        if not args.tail:
            raise InputError("verify area needs --tail T (inline JSON or file)")
        text = args.tail if args.tail.strip().startswith("{") else _read(args.tail)
        tail = verify.LaurentTail.from_json(text)
        rep = verify.area_complement(tail, unit, args.resolution_area or max(cfg.resolution, 4096)).report
        name = "inline" if args.tail.strip().startswith("{") else Path(args.tail).stem
    elif kind in ("rogosinski", "subordination"):
        f, g, name = _subordinate_pair(args, cfg, grid)
        if kind == "rogosinski":
            rep = verify.rogosinski(f, g, cfg.tol)
        else:
            rep = verify.subordination_suite(f, g, unit, args.r, args.p, cfg.resolution, cfg.tol)
    else:
        if not args.series:
            raise InputError(f"verify {kind} needs --series F")
        f, name = load_series(args.series, cfg.degree)
        if kind in _ENVELOPES:
            rep = verify.verify_envelope(f, kind, grid, cfg.tol)
        elif kind in _COEFFS:
            if kind == "area-sum":
                f = verify.LaurentTail(f.coeffs) if f.degree >= 1 else f
            rep = verify.coefficient_bounds(f, kind, cfg.tol)
        elif kind == "integral-mean":
            rep = verify.integral_mean_bound(f, unit, args.r, cfg.resolution, cfg.tol)
        elif kind == "koebe-quarter":
            rep = verify.koebe_quarter(f, grid, cfg.tol)
        elif kind == "t-transform":
            rep = verify.t_transform_bounds(f, args.delta, args.samples, cfg.tol)
        else:
            which = {
                "MInf": verify.MNorm.inf(),
                "MP": verify.MNorm.mp(args.p),
                "MInfSlice": verify.MNorm.inf_slice(unit),
                "MPSlice": verify.MNorm.mp_slice(args.p, unit),
            }[args.norm]
            value = verify.m_norm(f, which, args.r, cfg.resolution)
            doc = {"norm": args.norm, "value": value, "r": args.r, "p": args.p, "unit": unit.to_list()}
            if args.norm == "MP":
                doc["normalization"] = verify.MP_NORMALIZATION
                doc["sphere_measure"] = verify.sphere_measure(args.r)
            _emit_report("verify:m-norm", name, doc, cfg, args.out)
            return EXIT_PASS
    _emit_report(f"verify:{kind}", name, rep.to_dict(), cfg, args.out)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"file {path!r} not found")
    return p.read_text()


# ---------------------------------------------------------------------------
# report


REPORT_COLUMNS = ("kind", "series", "passed", "margin", "max_violation", "witness", "file")


def _margin(rep: dict):
    for key in ("worst_margin", "tightness"):
        if key in rep:
            return rep[key]
    return None


def cmd_report(args) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        raise InputError(f"{args.directory!r} is not a directory")
    rows = []
    for path in sorted(directory.glob("*.json")):
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"{path.name}: invalid JSON ({exc})") from exc
        if not isinstance(doc, dict) or not {"kind", "series", "report"} <= set(doc) or not isinstance(doc["report"], dict):
            raise InputFormatError(f"{path.name}: not a slicereg report (needs kind, series, report)")
        rep = doc["report"]
        rows.append(
            {
                "kind": doc["kind"],
                "series": doc["series"],
                "passed": rep.get("passed", ""),
                "margin": _margin(rep),
                "max_violation": rep.get("max_violation", ""),
                "witness": json.dumps(rep.get("witness")),
                "file": path.name,
            }
        )
    rows.sort(key=lambda r: (r["kind"], r["series"], r["file"]))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: ("" if r[k] is None else r[k]) for k in REPORT_COLUMNS})
    table = Path(args.out) if args.out else directory / "summary.csv"
    table.write_text(buf.getvalue())
    lines = ["# index margin kind series"]
    for i, r in enumerate(rows):
        m = r["margin"]
        lines.append(f'{i} {m if isinstance(m, (int, float)) else "NaN"} "{r["kind"]}" "{r["series"]}"')
    table.with_suffix(".dat").write_text("\n".join(lines) + "\n")
    return EXIT_PASS


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slicereg", description="Slice regular power series toolkit and verifiers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_series = sub.add_parser("series", help="construct and transform series")
    ssub = p_series.add_subparsers(dest="series_cmd", required=True)
    mk = ssub.add_parser("make", help="build a named series or apply an operator")
    mk.add_argument("name", choices=sorted(set(maps.BUILTINS) | {"mobius"} | set(_OPERATORS)))
    mk.add_argument("--theta", type=float, default=0.0)
    mk.add_argument("--unit", default="i")
    mk.add_argument("--t", type=float, default=0.0, help="Möbius parameter")
    mk.add_argument("--from", dest="source", default=None, help="input series for operators")
    mk.add_argument("--r", type=float, default=1.0, help="dilation radius")
    mk.add_argument("--u", default="1,0,0,0", help="unit rotor for rotate-conjugate")
    mk.add_argument("--a", type=float, default=2.0, help="value omitted by f (ratio)")
    _common(mk)
    for name, operands in (
        ("star-mul", ("f", "g")),
        ("star-inv", ("f",)),
        ("compose", ("g", "w")),
        ("invert-compose", ("g",)),
        ("derive", ("f",)),
        ("evaluate", ("f",)),
        ("split", ("f",)),
        ("classify", ("f",)),
    ):
        sp = ssub.add_parser(name)
        for o in operands:
            sp.add_argument(f"--{o}", required=True, help="builtin name, inline JSON or file")
        if name == "invert-compose":
            sp.add_argument("--side", choices=("left", "right"), default="right")
        if name == "evaluate":
            sp.add_argument("--q", required=True, help="point as w,x,y,z")
        if name == "split":
            sp.add_argument("--unit", default="i")
            sp.add_argument("--j", default="j")
        _common(sp)

    p_check = sub.add_parser("check", help="pointwise geometric conditions on a sample grid")
    p_check.add_argument("condition", choices=sorted(_CHECKS))
    p_check.add_argument("--series", required=True)
    p_check.add_argument("--grid", default="default")
    p_check.add_argument("--gamma", type=float, default=0.0)
    p_check.add_argument("--unit", default="i")
    p_check.add_argument("--separation", type=float, default=1e-3)
    _common(p_check)

    p_verify = sub.add_parser("verify", help="quantitative bounds and identities")
    p_verify.add_argument("kind", choices=VERIFY_KINDS)
    p_verify.add_argument("--series", default=None)
    p_verify.add_argument("--tail", default=None)
    p_verify.add_argument("--against", default=None)
    p_verify.add_argument("--w", default=None)
    p_verify.add_argument("--grid", default="default")
    p_verify.add_argument("--r", type=float, default=0.5)
    p_verify.add_argument("--p", type=float, default=2.0)
    p_verify.add_argument("--unit", default="i")
    p_verify.add_argument("--norm", choices=("MInf", "MP", "MInfSlice", "MPSlice"), default="MInfSlice")
    p_verify.add_argument("--delta", type=float, default=0.5)
    p_verify.add_argument("--samples", type=int, default=101)
    p_verify.add_argument("--resolution-area", type=int, default=None, help="boundary nodes for verify area")
    _common(p_verify)

    p_report = sub.add_parser("report", help="aggregate report JSON files")
    p_report.add_argument("directory")
    p_report.add_argument("--out", default=None, help="CSV path (default DIR/summary.csv)")
    return parser


_COMMANDS = {"series": cmd_series, "check": cmd_check, "verify": cmd_verify, "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except HypothesisFailed as exc:
        print(f"slicereg: hypothesis failed: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (InputError, InputFormatError, OSError, KeyError) as exc:
        print(f"slicereg: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MathDomainError as exc:
        print(f"slicereg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"slicereg: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

