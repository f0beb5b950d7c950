"""Compare the compiled and pure-Python kernels on identical inputs.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Every timed call is also checked for identical output across backends.
"""
from __future__ import annotations

import argparse
import sys
import time

from turanforge.constructions import build_gq
from turanforge.detect import ForbiddenFamily
from turanforge.kernels import backends
from turanforge.turan import SearchState, ex_problem, z_problem


def _time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _search(mod, prob):
    root = SearchState(0, [0] * prob.nv, bytearray(len(prob.su)), False)
    val, _, nodes, done = mod.search_subtree(prob, root, 0, 10 ** 9)
    return val, nodes, done


def cases(quick: bool):
    g = build_gq(11 if quick else 17).graph
    out = [
        ("triangles_per_vertex gq", lambda m: sum(m.triangles_per_vertex(g))),
        ("c4_count gq", lambda m: m.c4_count(g)),
        ("first_pair_codegree t=3 gq", lambda m: m.first_pair_codegree(g, 3)),
        ("search ex(8, K3)", lambda m: _search(m, ex_problem(8, ForbiddenFamily.parse("triangle")))),
        ("search ex(7, C4)", lambda m: _search(m, ex_problem(7, ForbiddenFamily.parse("c4")))),
        ("search z(4,5, K22)", lambda m: _search(m, z_problem(4, 5, ForbiddenFamily.parse("k{2,2}")))),
    ]
    if not quick:
        out.append(("search ex(9, C4)",
                    lambda m: _search(m, ex_problem(9, ForbiddenFamily.parse("c4")))))
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args(argv)
    mods = backends()
    if "cython" not in mods:
        print("compiled kernels are not available; nothing to compare", file=sys.stderr)
    names = sorted(mods, reverse=True)
    print(f"{'kernel':32s}" + "".join(f"{n:>12s}" for n in names) + f"{'speedup':>10s}")
    ok = True
    for label, fn in cases(args.quick):
        times, outs = [], []
        for n in names:
            t, o = _time(lambda: fn(mods[n]), args.repeat)
            times.append(t)
            outs.append(o)
        same = all(o == outs[0] for o in outs)
        ok = ok and same
        speed = f"{times[0] / times[-1]:9.1f}x" if len(times) > 1 and times[-1] > 0 else ""
        flag = "" if same else "  MISMATCH"
        print(f"{label:32s}" + "".join(f"{t:11.4f}s" for t in times) + f"{speed:>10s}{flag}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
