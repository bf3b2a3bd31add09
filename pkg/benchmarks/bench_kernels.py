"""Compiled root solver against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Times the batched Aberth solver on random batches, then the Jensen engine end
to end with each backend swapped in.
"""

import argparse
import json
import time
from contextlib import contextmanager

import numpy as np

from gmahler import _backend
from gmahler.laurent import parse
from gmahler.measure import mahler_jensen


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


@contextmanager
def backend(mod):
    saved = _backend._kernels
    _backend._kernels = mod
    try:
        yield
    finally:
        _backend._kernels = saved


def solver_cases():
    rng = np.random.default_rng(0)
    for m, d in ((4096, 2), (2000, 6), (500, 12), (100, 30)):
        c = rng.normal(size=(m, d + 1)) + 1j * rng.normal(size=(m, d + 1))
        yield f"aberth {m} x degree {d}", c


ENGINE_CASES = [
    ("jensen x+1/x+y+1/y+6 @ (1.2,1.1)", "x + 1/x + y + 1/y + 6", (1.2, 1.1)),
    ("jensen 1+x+y^3+x^2y^5 @ (1,1)", "1 + x + y^3 + x^2*y^5", (1.0, 1.0)),
    ("jensen (1+x)y^8+x^3y^2-2 @ (1.5,0.8)", "(1+x)*y^8 + x^3*y^2 - 2", (1.5, 0.8)),
]


def run(repeat):
    py = _backend.get_kernels("python")
    try:
        cc = _backend.get_kernels("compiled")
    except ImportError:
        cc = None
    mods = [("python", py)] + ([("compiled", cc)] if cc is not None else [])
    rows = []
    for label, coeffs in solver_cases():
        row, outs = {"case": label}, {}
        for name, mod in mods:
            row[name], outs[name] = best_of(lambda mod=mod: _backend.aberth(coeffs, kernels=mod)[0], repeat)
        rows.append(_finish(row, outs, lambda z: np.sort_complex(z)))
    for label, text, radii in ENGINE_CASES:
        p = parse(text)
        row, outs = {"case": label}, {}
        for name, mod in mods:
            with backend(mod):
                row[name], res = best_of(lambda: mahler_jensen(p, radii), repeat)
            outs[name] = np.array([res.value])
        rows.append(_finish(row, outs, lambda v: v))
    return rows


def _finish(row, outs, canon):
    if len(outs) == 2:
        row["max_diff"] = float(np.max(np.abs(canon(outs["python"]) - canon(outs["compiled"]))))
        row["speedup"] = row["python"] / row["compiled"]
    return row


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json")
    args = ap.parse_args()
    rows = run(args.repeat)
    print(f"default backend: {_backend.BACKEND}")
    print(f"{'case':40s} {'python':>9s} {'compiled':>9s} {'speedup':>8s} {'max diff':>10s}")
    nan = float("nan")
    for r in rows:
        print(f"{r['case']:40s} {r['python']:9.4f} {r.get('compiled', nan):9.4f} "
              f"{r.get('speedup', nan):8.2f} {r.get('max_diff', nan):10.2e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
