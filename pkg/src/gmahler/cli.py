"""Command-line front end.

Every subcommand prints one JSON document to stdout::

    {"schema": "gmahler/1", "command": ..., "timestamp": ..., "result": {...}}

``timestamp`` is the only field that changes between identical runs; set
``SOURCE_DATE_EPOCH`` to pin it.  Exit codes: 0 success (for ``verify``: the
check passed), 1 a ``verify`` check failed, 2 bad usage, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import os
import random
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import (
    DegeneracyError,
    DivergentSeries,
    DomainError,
    GMahlerError,
    PreconditionNotMet,
    UsageError,
)
from .laurent import LaurentPoly, family_q, parse
from .measure import Method, Torus, as_torus, mahler_direct, mahler_jensen, mahler_measure
from .quad import GridSpec, grid_from_budget
from .q4 import q4_closed, q4_params, q4_poly
from .region import MIN_ANGLES, agreement_rate, build_region, ellipse_conditions, family_extremes
from .special import dilog, smyth_constant
from .theorems import (
    bounded_component_value,
    cassaigne_maillot,
    linear_poly,
    series_expansion,
    verify_main_relation,
)
from .winding import nu_vector

SCHEMA = "gmahler/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

REPRODUCE_TARGETS = ("region_10_4", "region_1p5_1p07", "q4_grid", "r8_window", "r2i_window", "smyth", "cm_triangle")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# value parsing
# ---------------------------------------------------------------------------


def parse_complex(text: str) -> complex:
    """``"6"``, ``"6+2i"``, ``"-3i"``, ``"i"``, ``"1.5e-3-2j"``."""
    s = str(text).strip().replace(" ", "").replace("I", "i").replace("j", "i")
    if not s:
        raise UsageError("empty number")
    if s.endswith("i"):
        body = s[:-1]
        # split the imaginary part off at the last sign that is not an exponent sign
        cut = max((k for k, ch in enumerate(body) if ch in "+-" and k > 0 and body[k - 1] not in "eE"), default=0)
        re_txt, im_txt = body[:cut], body[cut:]
        if im_txt in ("", "+", "-"):
            im_txt += "1"
        try:
            return complex(float(re_txt) if re_txt else 0.0, float(im_txt))
        except ValueError:
            raise UsageError(f"cannot parse complex number {text!r}") from None
    try:
        return complex(float(s), 0.0)
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def parse_radii(text: str) -> tuple[float, ...]:
    try:
        radii = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"radii must be comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(r) and r > 0 for r in radii):
        raise UsageError("radii must be positive")
    return radii


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise UsageError(f"expected a positive integer, got {text!r}") from None
    if v <= 0:
        raise UsageError(f"expected a positive integer, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise UsageError(f"expected a positive number, got {text!r}") from None
    if not v > 0:
        raise UsageError(f"expected a positive number, got {text!r}")
    return v


def _poly(args, radii: Sequence[float] | None = None) -> LaurentPoly:
    text = getattr(args, "poly", None)
    if text is None or text == "q":
        n = len(radii) if radii else 2
        p = family_q(n)
    else:
        p = parse(text, n_vars=len(radii) if radii else None)
    if radii is not None and len(radii) != p.n_vars:
        raise UsageError(f"{len(radii)} radii given for a polynomial in {p.n_vars} variables")
    return p


def _spec(n_dims: int, nodes: int | None, budget: int | None) -> GridSpec | None:
    if nodes is None and budget is None:
        return None
    n = grid_from_budget(n_dims, budget, nodes)
    try:
        return GridSpec.uniform(n_dims, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cx(z: complex) -> list[float]:
    return [z.real, z.imag]


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch else _dt.datetime.now(_dt.timezone.utc)
    return now.replace(microsecond=0).isoformat()


def _jsonable(obj):
    if isinstance(obj, complex):
        return _cx(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, (tuple, set)):
        return list(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def envelope(command: str, result: dict) -> dict:
    return {"schema": SCHEMA, "version": __version__, "command": command,
            "timestamp": _timestamp(), "result": result}


def dumps(doc: dict) -> str:
    return json.dumps(doc, default=_jsonable, sort_keys=True, indent=2, allow_nan=True)


def _write_json(path: Path, command: str, result: dict) -> None:
    path.write_text(dumps(envelope(command, result)) + "\n")


# ---------------------------------------------------------------------------
# subcommands; each returns (result dict, exit code)
# ---------------------------------------------------------------------------


def cmd_measure(args):
    radii = parse_radii(args.radii) if args.radii else None
    p = _poly(args, radii)
    torus = as_torus(radii or (1.0,) * p.n_vars, p.n_vars)
    dims = 1 if args.method == "jensen" else p.n_vars
    res = mahler_measure(p, torus, args.method, _spec(dims, args.nodes, args.budget))
    return {"poly": str(p), **res.to_dict()}, EXIT_OK


def cmd_nu(args):
    radii = parse_radii(args.radii)
    p = _poly(args, radii)
    counts = nu_vector(p, radii)
    return {"poly": str(p), "radii": list(radii), "nu": [c.nu for c in counts],
            "indices": [c.to_dict() for c in counts]}, EXIT_OK


def _region_payload(Q, a, b, res, n_angles, out: Path | None, family: bool):
    model = build_region(Q, a, b, n_angles=n_angles, raster_res=res)
    payload = {"poly": str(Q), **model.summary()}
    if family:
        ext = family_extremes(a, b)
        payload["extremes"] = {"r_max": ext.r_max, "r_min": ext.r_min, "im_max": ext.im_max}
        payload["conditions"] = ellipse_conditions(a, b).to_dict()
    if out is not None:
        write_raster_csv(model, out)
        payload["csv"] = str(out)
    return payload, model


def write_raster_csv(model, path: Path) -> None:
    """Columns ``re, im, label`` with one row per pixel centre, rows of constant ``im``."""
    grid = model.label_grid()
    n = grid.shape[0]
    centres = model.lo + (np.arange(n) + 0.5) * model.pixel
    re = np.tile(centres, n)
    im = np.repeat(centres, n)
    with open(path, "w", newline="") as fh:
        fh.write("re,im,label\n")
        np.savetxt(fh, np.column_stack([re, im, grid.ravel()]), fmt=["%.17g", "%.17g", "%d"], delimiter=",")


def _is_family(args) -> bool:
    return getattr(args, "poly", None) in (None, "q")


def cmd_region(args):
    radii = parse_radii(args.radii)
    Q = _poly(args, radii)
    if Q.n_vars != 2:
        raise UsageError("region needs a two-variable polynomial")
    n_angles = args.angles
    if args.budget is not None:
        # the raster needs MIN_ANGLES per axis; the budget only trims finer grids
        n_angles = max(MIN_ANGLES, min(n_angles, int(math.isqrt(args.budget))))
    out = Path(args.out) if args.out else None
    payload, _ = _region_payload(Q, *radii, args.res, n_angles, out, _is_family(args))
    return payload, EXIT_OK


def cmd_verify(args):
    tol = args.tol
    if args.what == "cm":
        a, b, c = (parse_complex(v) for v in (args.a, args.b, args.c))
        closed = cassaigne_maillot(a, b, c)
        num = mahler_direct(linear_poly(a, b, c), Torus.unit(2), _spec(2, args.nodes, args.budget))
        disc = abs(closed - num.value)
        ok = disc <= tol
        return {"kind": "cm", "closed_form": closed, "quadrature": num.to_dict(),
                "discrepancy": disc, "tol": tol, "pass": ok}, EXIT_OK if ok else EXIT_FAIL
    if args.r is None or args.radii is None:
        raise UsageError(f"verify {args.what} needs --r and --radii")
    radii = parse_radii(args.radii)
    if args.poly_family is not None and args.poly_family != "q":
        raise UsageError("the only built-in family is 'q'")
    Q = _poly(argparse.Namespace(poly=args.poly), radii)
    r = parse_complex(args.r)
    try:
        if args.what == "main":
            spec = _spec(1 if Q.n_vars == 2 else Q.n_vars, args.nodes, args.budget)
            rep = verify_main_relation(Q, r, radii, tol=tol, spec=spec, region_res=args.res)
            return {"kind": "main", "r": _cx(r), **rep.to_dict()}, EXIT_OK if rep.passed else EXIT_FAIL
        bv = bounded_component_value(Q, r, radii, role=args.role, region_res=args.res)
        num = mahler_jensen(Q + r, radii, _spec(1, args.nodes, args.budget))
        disc = abs(bv.value - num.value)
        ok = disc <= tol
        return {"kind": "bounded", "r": _cx(r), "radii": list(radii), "closed_form": bv.to_dict(),
                "quadrature": num.to_dict(), "discrepancy": disc, "tol": tol, "pass": ok}, \
            EXIT_OK if ok else EXIT_FAIL
    except PreconditionNotMet as exc:
        return {"kind": args.what, "r": _cx(r), "radii": list(radii), "pass": False,
                "precondition": str(exc), "error": type(exc).__name__}, EXIT_FAIL


def cmd_series(args):
    Q = _poly(args)
    r = parse_complex(args.r)
    s = series_expansion(Q, r, args.N)
    return {"poly": str(Q), "r": _cx(r), "N": args.N, "mtilde": _cx(s.value),
            "value": s.value.real, "truncation_bound": s.truncation_bound,
            "radius_bound": s.radius_bound}, EXIT_OK


def cmd_q4(args):
    radii = parse_radii(args.radii)
    if len(radii) != 2:
        raise UsageError("q4 takes two radii")
    a, b = radii
    params = q4_params(a, b)
    payload = {"radii": [a, b], "value": q4_closed(a, b),
               "branch": "elementary" if params.mu is None else "dilog", "params": params.to_dict()}
    if args.check:
        num = mahler_direct(q4_poly(), radii, _spec(2, args.nodes, args.budget))
        payload["check"] = {"quadrature": num.to_dict(), "discrepancy": abs(num.value - payload["value"])}
    return payload, EXIT_OK


def cmd_dilog(args):
    z = parse_complex(args.z)
    v = dilog(z, args.kind)
    return {"z": _cx(z), "kind": args.kind, "value": v.value, "est_error": v.est_error}, EXIT_OK


# ---------------------------------------------------------------------------
# reproduce
# ---------------------------------------------------------------------------


def _window(r: complex, lo: float, hi: float, count: int, spec) -> list[dict]:
    Q = family_q(2)
    p = Q + r
    base = mahler_jensen(p, (1.0, 1.0), spec).value
    rows = []
    for k in range(count):
        a = lo + (hi - lo) * (k + 0.5) / count
        for label, b in (("a,a", a), ("a,sqrt(a)", math.sqrt(a))):
            m = mahler_jensen(p, (a, b), spec).value
            rows.append({"a": a, "b": b, "case": label, "m_ab": m, "m": base, "difference": m - base})
    return rows


def _write_rows(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def reproduce(target: str, out: Path, seed: int = 0, budget: int | None = None, res: int = 512) -> dict:
    """Write the data files for ``target`` into ``out`` and return a summary."""
    out.mkdir(parents=True, exist_ok=True)
    files: list[str] = []

    if target in ("region_10_4", "region_1p5_1p07"):
        a, b = (10.0, 4.0) if target == "region_10_4" else (1.5, 1.07)
        n_angles = MIN_ANGLES
        csv_path = out / f"{target}.csv"
        payload, model = _region_payload(family_q(2), a, b, res, n_angles, csv_path, True)
        rate, count = agreement_rate(model, a, b)
        # no decidable pixels when both ellipse predicates fail
        payload["ellipse_agreement"] = {"rate": rate if count else None, "points": count}
        files.append(csv_path.name)
        summary = payload

    elif target == "q4_grid":
        spec = _spec(2, None, budget)
        rows = []
        for a in (0.5, 1.0, 1.5, 2.0):
            for b in (0.5, 1.0, 1.5, 2.0):
                closed = q4_closed(a, b)
                num = mahler_direct(q4_poly(), (a, b), spec)
                rows.append({"a": a, "b": b, "branch": "elementary" if q4_params(a, b).mu is None else "dilog",
                             "closed_form": closed, "quadrature": num.value, "difference": closed - num.value})
        _write_rows(out / "q4_grid.csv", rows)
        files.append("q4_grid.csv")
        summary = {"points": len(rows), "max_difference": max(abs(r["difference"]) for r in rows),
                   "at_1_1": q4_closed(1.0, 1.0)}

    elif target in ("r8_window", "r2i_window"):
        spec = _spec(1, None, budget)
        if target == "r8_window":
            r, lo, hi = 8.0, 2 - math.sqrt(3), 2 + math.sqrt(3)
        else:
            r, lo, hi = 2j, (math.sqrt(5) - 1) / 2, (math.sqrt(5) + 1) / 2
        rows = _window(r, lo, hi, 21, spec)
        for row in rows:
            row.pop("m")
        _write_rows(out / f"{target}.csv", rows)
        files.append(f"{target}.csv")
        summary = {"r": _cx(complex(r)), "window": [lo, hi], "samples": len(rows),
                   "max_abs_difference": max(abs(row["difference"]) for row in rows)}

    elif target == "smyth":
        spec2, spec3 = _spec(2, None, budget), _spec(3, None, budget)
        two = mahler_direct(parse("x+y+1"), None, spec2)
        three = mahler_direct(parse("1+x+y+z"), None, spec3)
        ref3 = 7 * 1.2020569031595942 / (2 * math.pi ** 2)
        summary = {
            "two_variable": {"quadrature": two.to_dict(), "reference": smyth_constant(),
                             "difference": two.value - smyth_constant()},
            "three_variable": {"quadrature": three.to_dict(), "reference": ref3,
                               "difference": three.value - ref3},
        }

    elif target == "cm_triangle":
        rng = random.Random(seed)
        spec = _spec(2, None, budget)
        rows = []
        for _ in range(20):
            a, b, c = (complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(3))
            A, B, C = abs(a), abs(b), abs(c)
            closed = cassaigne_maillot(a, b, c)
            num = mahler_direct(linear_poly(a, b, c), None, spec).value
            rows.append({"a": repr(a), "b": repr(b), "c": repr(c),
                         "triangle": A < B + C and B < A + C and C < A + B,
                         "closed_form": closed, "quadrature": num, "difference": closed - num})
        _write_rows(out / "cm_triangle.csv", rows)
        files.append("cm_triangle.csv")
        summary = {"seed": seed, "samples": len(rows),
                   "triangle_cases": sum(r["triangle"] for r in rows),
                   "max_abs_difference": max(abs(r["difference"]) for r in rows)}

    else:
        raise UsageError(f"unknown target {target!r}")

    _write_json(out / f"{target}.json", f"reproduce {target}", summary)
    files.append(f"{target}.json")
    return {"target": target, "out": str(out), "files": files, "summary": summary}


def cmd_reproduce(args):
    return reproduce(args.target, Path(args.out), args.seed, args.budget, args.res), EXIT_OK


# ---------------------------------------------------------------------------
# argument parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--budget", type=_positive_int, help="cap on total quadrature nodes")
    common.add_argument("--threads", type=_positive_int, help="worker threads (default: $GMAHLER_THREADS)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized targets")

    ap = _Parser(prog="gmahler", description="Generalized Mahler measures.")
    ap.add_argument("--version", action="version", version=f"gmahler {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("measure", parents=[common], help="m_a(P) by quadrature")
    p.add_argument("--poly", required=True)
    p.add_argument("--radii")
    p.add_argument("--method", choices=[Method.DIRECT.value, Method.JENSEN.value], default="direct")
    p.add_argument("--nodes", type=_positive_int)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("nu", parents=[common], help="winding indices")
    p.add_argument("--poly", required=True)
    p.add_argument("--radii", required=True)
    p.set_defaults(func=cmd_nu)

    p = sub.add_parser("region", parents=[common], help="vanishing region raster")
    p.add_argument("--poly", help="polynomial (default: the family x + 1/x + y + 1/y)")
    p.add_argument("--radii", required=True)
    p.add_argument("--out", help="CSV path for the raster")
    p.add_argument("--res", type=_positive_int, default=1024)
    p.add_argument("--angles", type=_positive_int, default=256)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("verify", parents=[common], help="check a closed form against quadrature")
    p.add_argument("what", choices=["main", "bounded", "cm"])
    p.add_argument("--poly-family", choices=["q"])
    p.add_argument("--poly")
    p.add_argument("--r")
    p.add_argument("--radii")
    p.add_argument("--role", choices=["x", "y"], default="x")
    p.add_argument("--tol", type=_positive_float, default=1e-5)
    p.add_argument("--res", type=_positive_int, default=1024)
    p.add_argument("--nodes", type=_positive_int)
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--c")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("series", parents=[common], help="large-r expansion")
    p.add_argument("--poly", help="polynomial without constant term (default: the family)")
    p.add_argument("--r", required=True)
    p.add_argument("--N", type=_positive_int, default=40)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("q4", parents=[common], help="closed form for x + 1/x + y + 1/y + 4")
    p.add_argument("--radii", required=True)
    p.add_argument("--check", action="store_true")
    p.add_argument("--nodes", type=_positive_int)
    p.set_defaults(func=cmd_q4)

    p = sub.add_parser("dilog", parents=[common], help="Bloch-Wigner D(z) or Li2(z)")
    p.add_argument("z")
    p.add_argument("--kind", choices=["D", "li2"], default="D")
    p.set_defaults(func=cmd_dilog)

    p = sub.add_parser("reproduce", parents=[common], help="write data files for a named result")
    p.add_argument("target", choices=REPRODUCE_TARGETS)
    p.add_argument("--out", default="artifacts")
    p.add_argument("--res", type=_positive_int, default=512)
    p.set_defaults(func=cmd_reproduce)
    return ap


def _fail(command: str, exc: BaseException, code: int) -> int:
    diag = {"error": type(exc).__name__, "message": str(exc)}
    residuals = getattr(exc, "residuals", None)
    if residuals is not None:
        diag["residuals"] = np.asarray(residuals, dtype=float).ravel()[:64].tolist()
    print(dumps(envelope(command, diag)))
    return code


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"gmahler: {exc}", file=sys.stderr)
        return EXIT_USAGE
    command = args.command if args.command != "verify" else f"verify {args.what}"
    if args.threads:
        os.environ["GMAHLER_THREADS"] = str(args.threads)
    try:
        result, code = args.func(args)
    except (UsageError, PreconditionNotMet, DomainError, DegeneracyError, DivergentSeries) as exc:
        print(f"gmahler: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GMahlerError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(command, exc, EXIT_NUMERIC)
    except ValueError as exc:
        print(f"gmahler: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(dumps(envelope(command, result)))
    return code


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
