"""Command-line front end. Reports go to stdout as JSON (CSV or SVG where
asked), diagnostics to stderr.

Exit codes: 0 success, 1 acceptance failure, 2 obstruction or violated
precondition, 3 numerical failure, 4 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import catalog as K
from . import homotopy as H
from . import monotone as M
from . import shs
from . import stabilize as B
from .curve import ProfileCurve, curve_from_json
from .errors import MalformedInputError, ParameterError, PreconditionError, ShsError
from .jsonio import dumps, load, save
from .render import Marker, RenderSpec, render
from .shs import ShsPair


def _pair(path: str) -> ShsPair:
    return ShsPair.from_json(load(path))


def _curve(path: str) -> ProfileCurve:
    d = load(path)
    # a pair file stands for its h-curve
    if isinstance(d, dict) and "h" in d and "g" in d:
        return curve_from_json(d["h"])
    try:
        return curve_from_json(d)
    except (KeyError, TypeError) as exc:
        raise MalformedInputError(f"{path}: not a curve object ({exc})") from exc


def _homotopy(path: str) -> H.StableHomotopy:
    return H.StableHomotopy.from_json(load(path))


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj))


# ---------------------------------------------------------------- commands


def cmd_verify(a) -> int:
    rep = shs.verify(_pair(a.pair), a.n)
    _emit(rep)
    return 0 if rep["ok"] else 2


def cmd_invariants(a) -> int:
    pair = _pair(a.pair)
    ver = shs.verify(pair)
    prop = shs.proportionality(pair)
    dm, dp = shs.delta_bounds(pair)
    mb = shs.morse_bott_check(pair, a.Q)
    out = {
        "verify": ver,
        "contact_sign": K.contact_sign(pair.h),
        "proportionality": {"min": prop["min"], "max": prop["max"], "constant": prop["constant"]},
        "delta_minus": dm,
        "delta_plus": dp,
        "helicity": shs.helicity_data(pair),
        "morse_bott": {"verdict": mb.verdict, "witnesses": len(mb.witnesses), "bands": len(mb.bands)},
    }
    if a.tameness:
        out["tameness"] = shs.tameness_scan(pair, a.Q)
    _emit(out)
    return 0


def cmd_stabilize(a) -> int:
    h = _curve(a.curve)
    if a.special is not None:
        g = B.special_stabilizer(h, a.special)
    elif a.boundary is None:
        raise ParameterError("stabilize needs --boundary or --special")
    else:
        bd = B.BoundaryData.from_json(load(a.boundary))
        g = B.constant_slope_stabilizer(h, bd, a.constant_slope) if a.constant_slope is not None else B.boundary_value_stabilizer(h, bd)
    pair = ShsPair(h, g)
    rep = shs.verify(pair)
    print(f"verify: ok={rep['ok']} residual={rep['residual_sup']:.3e} min_pairing={rep['min_pairing']:.3e}", file=sys.stderr)
    _emit(pair)
    return 0 if rep["ok"] else 3


def cmd_connect(a) -> int:
    h0, h1 = _curve(a.h0), _curve(a.h1)
    bd = B.BoundaryData.from_json(load(a.boundary))
    gamma = B.connect_same_winding(h0, h1, bd, a.samples)
    rep = H.verify_homotopy(gamma)
    print(f"homotopy check: ok={rep['ok']} residual={rep['residual_sup']:.3e}", file=sys.stderr)
    _emit(gamma)
    return 0 if rep["ok"] else 3


def cmd_length(a) -> int:
    gamma = _homotopy(a.homotopy)
    _emit({**H.homotopy_constants(gamma).to_json(), "interval": list(gamma.interval)})
    return 0


def cmd_cobordism(a) -> int:
    gamma = _homotopy(a.homotopy)
    form = H.triple_cobordism(gamma) if a.triple else H.cobordism_from_short(gamma)
    if a.csv:
        sys.stdout.write(form.to_csv())
    else:
        _emit({"ok": form.min_density > 0, **form.summary()})
    return 0 if form.min_density > 0 else 3


def cmd_monotone(a) -> int:
    if a.exotic:
        path = M.exotic_ball_path()
    elif a.path:
        path = M.MonotonePath.from_json(load(a.path))
    else:
        raise ParameterError("monotone needs --path or --exotic")
    if a.save:
        save(path, a.save)
    rep = M.monotone_check(path, a.n_r)
    out = {**rep, "standardized": path.standardized}
    try:
        w0, w1 = M.standardized_winding(path.curves[0]), M.standardized_winding(path.curves[-1])
        out["winding"] = {"start": w0, "end": w1}
    except PreconditionError as exc:
        print(f"winding not reported: {exc}", file=sys.stderr)
    _emit(out)
    return 0 if rep["ok"] else 2


def cmd_classify(a) -> int:
    pair = _pair(a.pair)
    if a.other:
        ans = K.is_homotopic(pair, _pair(a.other), a.manifold, a.samples)
        if a.witness and ans.witness is not None:
            save(ans.witness, a.witness)
        _emit(ans)
        return 0
    inv = K.classify(pair, a.manifold)
    out = inv.to_json()
    try:
        out["origin_winding"] = M.standardized_winding(pair.h)
    except PreconditionError:
        pass
    _emit(out)
    return 0


def _param(text: str):
    if "=" not in text:
        raise ParameterError(f"parameter {text!r} is not of the form key=value")
    k, v = text.split("=", 1)
    try:
        return k, json.loads(v)
    except json.JSONDecodeError:
        return k, v


def cmd_catalog(a) -> int:
    if a.name is None or a.name == "list":
        _emit(sorted(K.NAMES))
        return 0
    pair = K.make_named(a.name, **dict(_param(p) for p in a.param))
    _emit(pair)
    return 0


def _render_inputs(items) -> list:
    curves = []
    for kind, value in items:
        if kind == "catalog":
            curves.append(K.make_named(value).h)
        elif kind == "homotopy":
            d = load(value)
            if d.get("samples") and "curve" in d["samples"][0]:
                curves.extend(M.MonotonePath.from_json(d, check=False).curves)
            else:
                curves.extend(p.h for p in H.StableHomotopy.from_json(d, check=False).pairs)
        else:
            curves.append(_curve(value))
    return curves


def _marker(text: str) -> Marker:
    parts = text.split(":", 2)
    if len(parts) != 3:
        raise ParameterError(f"marker {text!r} must be CURVE:R:LABEL")
    try:
        return Marker(int(parts[0]), float(parts[1]), parts[2])
    except ValueError as exc:
        raise ParameterError(f"bad marker {text!r}") from exc


def cmd_render(a) -> int:
    curves = _render_inputs(a.inputs or [])
    spec = RenderSpec(width=a.width, height=a.height, title=a.title)
    if a.viewport:
        try:
            spec.viewport = tuple(float(v) for v in a.viewport.split(","))
        except ValueError as exc:
            raise ParameterError("viewport must be xmin,xmax,ymin,ymax") from exc
        if len(spec.viewport) != 4:
            raise ParameterError("viewport must be xmin,xmax,ymin,ymax")
    if a.styles:
        spec.styles = list(load(a.styles))
    spec.markers = [_marker(m) for m in a.marker]
    svg = render(curves, spec)
    if a.out:
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)
    return 0


def cmd_suite(a) -> int:
    from . import suite

    ids = [int(x) for x in a.only.split(",")] if a.only else None

    def log(k, name, sec):
        print(f"criterion {k:2d} {name}: {sec:.2f} s", file=sys.stderr)

    res = suite.run(ids, log)
    _emit(res)
    return 0 if all(r["ok"] for r in res) else 1


# ------------------------------------------------------------------ parser


class _Append(argparse.Action):
    """Keeps render inputs in command-line order, tagged by flag."""

    def __call__(self, parser, ns, values, option_string=None):
        items = getattr(ns, self.dest) or []
        items.append((option_string.lstrip("-"), values))
        setattr(ns, self.dest, items)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shskit", description="T^2-invariant stable Hamiltonian structures")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", help="check the stabilization conditions of a pair")
    s.add_argument("--pair", required=True)
    s.add_argument("--n", type=int, default=513)
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("invariants", help="delta bounds, helicity and orbit data of a pair")
    s.add_argument("--pair", required=True)
    s.add_argument("--Q", type=int, default=64)
    s.add_argument("--tameness", action="store_true")
    s.set_defaults(fn=cmd_invariants)

    s = sub.add_parser("stabilize", help="build g for a curve")
    s.add_argument("--curve", required=True)
    s.add_argument("--boundary")
    s.add_argument("--special", type=float, nargs="?", const=1.0, default=None, metavar="C")
    s.add_argument("--constant-slope", type=float, default=None, metavar="DELTA")
    s.set_defaults(fn=cmd_stabilize)

    s = sub.add_parser("connect", help="stable homotopy between curves of equal winding")
    s.add_argument("--h0", required=True)
    s.add_argument("--h1", required=True)
    s.add_argument("--boundary", required=True)
    s.add_argument("--samples", type=int, default=B.HOMOTOPY_SAMPLES)
    s.set_defaults(fn=cmd_connect)

    s = sub.add_parser("length", help="constants A, B, delta and the length L")
    s.add_argument("--homotopy", required=True)
    s.set_defaults(fn=cmd_length)

    s = sub.add_parser("cobordism", help="symplectic form on the trace of a short homotopy")
    s.add_argument("--homotopy", required=True)
    s.add_argument("--triple", action="store_true")
    s.add_argument("--csv", action="store_true")
    s.set_defaults(fn=cmd_cobordism)

    s = sub.add_parser("monotone", help="check a monotone path of curves")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--path")
    g.add_argument("--exotic", action="store_true")
    s.add_argument("--save")
    s.add_argument("--n-r", type=int, default=257)
    s.set_defaults(fn=cmd_monotone)

    s = sub.add_parser("classify", help="class invariants, or a homotopy test with --other")
    s.add_argument("--pair", required=True)
    s.add_argument("--manifold", default="S3")
    s.add_argument("--other")
    s.add_argument("--witness", help="write the witness homotopy here")
    s.add_argument("--samples", type=int, default=K.WITNESS_SAMPLES)
    s.set_defaults(fn=cmd_classify)

    s = sub.add_parser("catalog", help="named pairs; 'list' shows the names")
    s.add_argument("name", nargs="?")
    s.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    s.set_defaults(fn=cmd_catalog)

    s = sub.add_parser("render", help="SVG picture of profile curves")
    for flag in ("--curve", "--pair", "--homotopy", "--catalog"):
        s.add_argument(flag, dest="inputs", action=_Append)
    s.add_argument("--width", type=int, default=480)
    s.add_argument("--height", type=int, default=480)
    s.add_argument("--viewport", metavar="XMIN,XMAX,YMIN,YMAX")
    s.add_argument("--styles", help="JSON list of per-curve style overrides")
    s.add_argument("--marker", action="append", default=[], metavar="CURVE:R:LABEL")
    s.add_argument("--title")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_render)

    s = sub.add_parser("suite", help="run the acceptance checks")
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.set_defaults(fn=cmd_suite)
    return p


def _jsonable(v):
    try:
        dumps(v)
        return v
    except TypeError:
        return str(v)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8")
    try:
        return args.fn(args)
    except ShsError as exc:
        reason = str(exc)
        print(f"shskit {args.command}: {type(exc).__name__}: {reason}", file=sys.stderr)
        _emit({"ok": False, "error": type(exc).__name__, "reason": reason,
               "details": {k: _jsonable(v) for k, v in exc.details.items()}})
        return exc.exit_code
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
