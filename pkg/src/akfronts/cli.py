"""Command line front end: ``akfronts {classify,scan,zigzag,fixture,selfcheck}``."""

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import (
    check_box,
    check_field,
    check_grid,
    check_jet_order,
    check_point,
    check_route,
    check_tolerance,
)
from .classify import classify, scan_singular_set
from .definitions import FrontInstance, LoopSpec, MorinMapInstance, parse_definition
from .errors import AkError, NumericFailure, ParseError
from .front import DEFAULT_JET_ORDER, TOL_RANK, TOL_ZERO
from .morin import classify_morin
from .oracle import fixture_text
from .zigzag import zigzag_report

EXIT_OK, EXIT_PARSE, EXIT_NUMERIC, EXIT_INCONCLUSIVE = 0, 1, 2, 3

DEFAULTS = {
    "tol_zero": TOL_ZERO,
    "tol_rank": TOL_RANK,
    "jet_order": DEFAULT_JET_ORDER,
    "grid": 9,
    "samples": None,
    "field": None,
    "route": "lambda",
    "format": "json",
}
_CASTS = {
    "tol_zero": float,
    "tol_rank": float,
    "jet_order": int,
    "grid": int,
    "samples": int,
    "field": str,
    "route": str,
    "format": str,
}


class UsageError(Exception):
    """Bad arguments or configuration; reported with exit code 1."""


# -- configuration -----------------------------------------------------------

def read_config(path):
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _CASTS:
            raise UsageError(f"{path}:{lineno}: expected 'key = value' with key in "
                             f"{sorted(_CASTS)}")
        try:
            out[key] = _CASTS[key](value.strip())
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: {exc}") from None
    return out


def resolve_config(args):
    """Defaults, then the config file, then explicit flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    try:
        check_tolerance(cfg["tol_zero"], "tol_zero")
        check_tolerance(cfg["tol_rank"], "tol_rank")
        check_jet_order(cfg["jet_order"])
        check_route(cfg["route"])
        if cfg["field"] is not None:
            check_field(cfg["field"])
        if cfg["format"] not in ("json", "text", "csv"):
            raise ValueError(f"format must be json, text or csv, got {cfg['format']!r}")
        if cfg["grid"] < 1:
            raise ValueError("grid must be positive")
        if cfg["samples"] is not None and cfg["samples"] < 8:
            raise ValueError("samples must be at least 8")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


# -- input -------------------------------------------------------------------

def _locate(name):
    path = Path(name)
    if path.exists():
        return path
    data = resources.files("akfronts") / "data"
    for cand in (name, name + ".front", name + ".loop"):
        p = data / cand
        if p.is_file():
            return p
    raise UsageError(f"no such file: {name}")


def load(name):
    """Parsed definition and the raw bytes it came from."""
    path = _locate(name)
    raw = path.read_bytes()
    return parse_definition(raw.decode("utf-8")), raw


def _with_field(obj, field):
    if field is None or field == obj.field:
        return obj
    return dataclasses.replace(obj, field=field)


# -- output ------------------------------------------------------------------

def _fmt_float(x):
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    # keep floats recognisable as floats after a round trip
    return text if any(c in text for c in ".en") else text + ".0"


def dumps(obj, indent=2, _level=0):
    """JSON with floats at 17 significant digits and keys in insertion order."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_fmt_float(obj.real)}, {_fmt_float(obj.imag)}]"
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    return json.dumps(str(obj))


def document(command, inputs, cfg, extra, entries, warnings):
    """The report body; its bytes depend only on inputs and configuration."""
    config = {k: cfg[k] for k in DEFAULTS}
    config.update(extra)
    h = hashlib.sha256()
    for raw in inputs:
        h.update(hashlib.sha256(raw).digest())
    h.update(dumps(config).encode())
    return {
        "tool": "akfronts",
        "version": __version__,
        "command": command,
        "input_digest": h.hexdigest(),
        "config": config,
        "entries": entries,
        "warnings": warnings,
    }


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt_float(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def locus_csv(reports, n):
    """One row per report: coordinates, class and lambda chain values."""
    width = max([len(r.chain.values) for r in reports if r.chain is not None], default=0)
    header = [f"x{i + 1}" for i in range(n)] + ["class"] + [f"lambda{i}" for i in range(width)]
    rows = []
    for r in reports:
        pt = [float(np.real(v)) for v in np.ravel(r.point)]
        vals = [] if r.chain is None else [float(np.real(v)) for v in r.chain.values]
        rows.append(pt + [r.label] + vals + [""] * (width - len(vals)))
    return _csv_text(header, rows)


def angle_csv(rep):
    if rep.angle is None:
        return _csv_text(["s", "theta"], [])
    return _csv_text(["s", "theta"], [(float(s), float(t)) for s, t in zip(rep.angle_s, rep.angle)])


def _text_entry(e):
    if "class" in e:
        return f"{e['point']}  {e['class']}  (route {e['route']})"
    if not e.get("coorientable", True):
        return "loop is not co-orientable (rho = 1)"
    return (f"raw {e.get('raw', '')}  normalized {e.get('normalized', '')}  z = {e.get('z')}"
            f"  maslov = {e.get('maslov')}  consistent = {e.get('consistent')}")


def emit(doc, fmt, csv_text, out):
    if fmt == "csv":
        out.write(csv_text if csv_text is not None else "")
    elif fmt == "text":
        cfg = doc["config"]
        out.write(f"{doc['command']}: {cfg.get('file') or cfg.get('front', '')}\n")
        for e in doc["entries"]:
            out.write(_text_entry(e) + "\n")
        for w in doc["warnings"]:
            out.write(f"warning: {w}\n")
    else:
        out.write(dumps(doc) + "\n")


# -- commands ----------------------------------------------------------------

def _kw(cfg):
    return {"tol_zero": cfg["tol_zero"], "tol_rank": cfg["tol_rank"],
            "jet_order": cfg["jet_order"]}


def _code_for(labels):
    if any(lab == "CorankTooHigh" for lab in labels):
        return EXIT_NUMERIC
    if any(lab.startswith("Inconclusive") for lab in labels):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_classify(args, cfg):
    obj, raw = load(args.file)
    obj = _with_field(obj, cfg["field"])
    if isinstance(obj, LoopSpec):
        raise UsageError("classify needs a front or morin definition, not a loop")
    try:
        p = check_point(args.point, obj.n, obj.dtype)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    warnings = []
    if isinstance(obj, MorinMapInstance):
        rep = classify_morin(obj, p, **_kw(cfg))
    else:
        try:
            check_route(cfg["route"], obj.n)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rep = classify(obj, p, route=cfg["route"], **_kw(cfg))
    if rep.cls.kind == "inconclusive":
        warnings.append(f"inconclusive at {list(map(float, np.real(p)))}: {rep.cls.reason}")
    extra = {"file": str(args.file), "point": [float(np.real(v)) for v in p]}
    doc = document("classify", [raw], cfg, extra, [rep.to_dict()], warnings)
    return doc, locus_csv([rep], obj.n), rep.elapsed, _code_for([rep.label])


def cmd_scan(args, cfg):
    front, raw = load(args.file)
    front = _with_field(front, cfg["field"])
    if not isinstance(front, FrontInstance):
        raise UsageError("scan needs a front definition")
    try:
        check_route(cfg["route"], front.n)
        box = check_box(args.box, front.n)
        grid = check_grid(cfg["grid"], front.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        res = scan_singular_set(front, box, grid, route=cfg["route"], **_kw(cfg))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    warnings = []
    if res.n_dropped:
        warnings.append(f"{res.n_dropped} of {res.n_seeds} Newton seeds dropped "
                        f"(diverged or left the box)")
    for r in res.reports:
        if r.cls.kind == "inconclusive":
            warnings.append(f"inconclusive at {[float(v) for v in r.point]}: {r.cls.reason}")
    extra = {"file": str(args.file), "box": box.tolist(), "n_seeds": res.n_seeds}
    doc = document("scan", [raw], cfg, extra, [r.to_dict() for r in res.reports], warnings)
    if args.csv:
        Path(args.csv).write_text(locus_csv(res.reports, front.n))
    elapsed = sum(r.elapsed for r in res.reports)
    return doc, locus_csv(res.reports, front.n), elapsed, _code_for([r.label for r in res])


def cmd_zigzag(args, cfg):
    front, raw_f = load(args.front)
    loop, raw_l = load(args.loop)
    if not isinstance(front, FrontInstance) or not isinstance(loop, LoopSpec):
        raise UsageError("zigzag needs a front file and a loop file")
    if cfg["field"] not in (None, "real"):
        raise UsageError("zig-zag numbers are defined for real fronts only")
    t0 = time.perf_counter()
    try:
        rep = zigzag_report(front, loop, cfg["samples"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    warnings = [] if rep.coorientable else ["loop is not co-orientable; z is undefined"]
    extra = {"front": str(args.front), "loop": str(args.loop)}
    doc = document("zigzag", [raw_f, raw_l], cfg, extra, [rep.to_dict()], warnings)
    if args.csv:
        Path(args.csv).write_text(angle_csv(rep))
    return doc, angle_csv(rep), time.perf_counter() - t0, EXIT_OK


def cmd_fixture(args, cfg):
    try:
        gamma = tuple(args.gamma) if args.gamma else None
        if args.kind != "tangent-developable" and (args.k is None or args.n is None):
            raise ValueError(f"fixture {args.kind} needs --k and --n")
        return fixture_text(args.kind, args.k, args.n, gamma)
    except (ValueError, ParseError) as exc:
        raise UsageError(str(exc)) from None


def selfcheck():
    """Small oracle suite: (name, passed) pairs."""
    from .classify import classify_lambda_route
    from .definitions import parse_front, parse_loop
    from .morin import morin_normal_form
    from .oracle import (
        ak_front_normal_form,
        tangent_developable_fixture,
        versal_membership,
    )

    def data(name):
        return (resources.files("akfronts") / "data" / name).read_text()

    checks = []
    for n in range(1, 4):
        for k in range(1, n + 1):
            rep = classify_lambda_route(ak_front_normal_form(k, n), np.zeros(n))
            checks.append((f"ak-front k={k} n={n} is A{k + 1}", rep.label == f"A{k + 1}"))
            rep = classify_morin(morin_normal_form(k, n), np.zeros(n))
            checks.append((f"morin k={k} n={n} is A{k}", rep.label == f"A{k}"))
    td = tangent_developable_fixture(("z", "z^2", "z^3", "z^4"))
    checks.append(("tangent developable A2 on the cuspidal edge",
                   classify(td, [0.5, 0.3, 0.0], route="both").label == "A2"))
    checks.append(("tangent developable A3 on the swallowtail line",
                   classify(td, [0.5, 0.0, 0.0], route="both").label == "A3"))
    checks.append(("versal discriminant contains the origin",
                   versal_membership(2, [0.0, 0.0, 0.0]).inside))
    checks.append(("versal discriminant misses t^2 + 1", not versal_membership(0, [1.0]).inside))
    loop = parse_loop(data("full_turn.loop"))
    rep = zigzag_report(parse_front(data("twelve_signs.front")), loop)
    checks.append(("twelve-sign curve normalizes to +-+- with z = 2",
                   rep.z == 2 and rep.to_dict()["normalized"] == "+-+-" and rep.consistent))
    rep = zigzag_report(parse_front(data("circle.front")), loop)
    checks.append(("circle has z = maslov = 0", rep.z == 0 and rep.maslov == 0))
    return checks


def cmd_selfcheck(args, cfg, out):
    checks = selfcheck()
    for name, ok in checks:
        out.write(f"{'PASS' if ok else 'FAIL'}  {name}\n")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_NUMERIC


# -- entry point ---------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="file of 'key = value' lines; flags override it")
    common.add_argument("--tol-zero", dest="tol_zero", type=float)
    common.add_argument("--tol-rank", dest="tol_rank", type=float)
    common.add_argument("--jet-order", dest="jet_order", type=int)
    common.add_argument("--grid", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--field", choices=("real", "complex"))
    common.add_argument("--route", choices=("lambda", "mu", "both"))
    common.add_argument("--format", choices=("json", "text", "csv"))
    common.add_argument("--timing", metavar="FILE",
                        help="write wall-clock time here (kept out of the report)")

    parser = argparse.ArgumentParser(
        prog="akfronts", description="A_k singularities and zig-zag numbers of wave fronts.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify one point")
    p.add_argument("file", help="front or morin definition (or a shipped fixture name)")
    p.add_argument("--point", type=float, nargs="+", required=True)

    p = sub.add_parser("scan", parents=[common], help="locate and classify singular points")
    p.add_argument("file")
    p.add_argument("--box", type=float, nargs="+", default=[-1.0, 1.0],
                   help="lo hi for every axis, or one pair per axis")
    p.add_argument("--csv", metavar="FILE", help="also write the locus CSV here")

    p = sub.add_parser("zigzag", parents=[common], help="zig-zag number and Maslov index")
    p.add_argument("front")
    p.add_argument("loop")
    p.add_argument("--csv", metavar="FILE", help="also write the angle trace CSV here")

    p = sub.add_parser("fixture", parents=[common], help="print a generated definition")
    p.add_argument("kind", choices=("ak-front", "morin", "tangent-developable"))
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--gamma", nargs=4, metavar="EXPR", help="curve in z (tangent developable)")

    sub.add_parser("selfcheck", parents=[common], help="run the built-in oracle checks")
    return parser


COMMANDS = {"classify": cmd_classify, "scan": cmd_scan, "zigzag": cmd_zigzag}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors; 2 means numeric here
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        cfg = resolve_config(args)
        if args.command == "fixture":
            out.write(cmd_fixture(args, cfg))
            return EXIT_OK
        if args.command == "selfcheck":
            return cmd_selfcheck(args, cfg, out)
        t0 = time.perf_counter()
        doc, csv_text, _, code = COMMANDS[args.command](args, cfg)
        emit(doc, cfg["format"], csv_text, out)
        if args.timing:
            Path(args.timing).write_text(
                dumps({"input_digest": doc["input_digest"],
                       "wall_time_s": time.perf_counter() - t0}) + "\n")
        return code
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NumericFailure, AkError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
