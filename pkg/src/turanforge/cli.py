"""Command-line entry point: ``turanforge <command> ...``.

Exit codes: 0 success, 1 domain error, 2 budget exhausted (partial result
written), 3 internal invariant failure, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .constructions import (MultiplierError, MultiplierSet, NotFound, build_gq, build_gqt,
                            find_multipliers, projective_plane_incidence)
from .detect import (ForbiddenFamily, PatternError, count_c4, count_triangles, girth,
                     is_family_free, odd_girth)
from .gf import FieldError
from .graph import GraphError, read_graph, write_graph
from .lemmas import (KST_FAST_PATH_K0, LemmaError, SmoothnessParams, StabilityContradiction,
                     book_family_bound, c4_lower_bound, ell0_k0, f_exponent, find_odd_cycle,
                     frac, furedi_kst_bound, kst_expansion_bound, smooth_expansion_bound,
                     transfer_report, tri_stab)
from .reports import report_multiplier_scan, report_theorem4
from .sparsereg import (ExceptionalOverflow, PartitionError, capped_energy_diagnostics,
                        cluster_graph, sparse_regular_partition)
from .sparsereg import InvariantError as RegInvariantError
from .turan import InvariantError as SearchInvariantError
from .turan import ex_exact, ratio_csv, ratio_table, z_exact

SCHEMA = "turanforge/1"
EXIT_OK, EXIT_DOMAIN, EXIT_BUDGET, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class RunConfig:
    seed: int = 0
    threads: int = 1
    budget: int | None = None
    output: str = "json"
    precision: str = "auto"

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        threads = args.threads
        if threads is None:
            env = os.environ.get("TURANFORGE_THREADS")
            threads = int(env) if env else 1
        return cls(args.seed, max(1, threads), getattr(args, "budget", None),
                   getattr(args, "format", None) or "json", args.precision)

    @property
    def exact(self):
        return {"auto": None, "rational": True, "float64": False}[self.precision]


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def emit(args, payload) -> None:
    if isinstance(payload, dict):
        body = dict(payload)
        body["schema"] = SCHEMA
        text = json.dumps(_jsonable(body), sort_keys=True, indent=2) + "\n"
    else:
        text = payload
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- construct / verify / count -------------------------------------------------

def cmd_construct(args) -> int:
    fmt = args.format or "graph6"
    if fmt not in ("graph6", "edgelist"):
        raise ValueError("construct writes graph6 or edgelist")
    if args.kind == "gq":
        g = build_gq(args.q).graph
    elif args.kind == "pg":
        g = projective_plane_incidence(args.q).graph
    else:
        if args.multipliers:
            with open(args.multipliers, encoding="utf-8") as fh:
                ms = MultiplierSet.from_json(fh.read())
        else:
            strategy = "paper_greedy" if args.strategy == "greedy" else args.strategy
            ms = find_multipliers(args.q, args.t, strategy, args.budget or 10 ** 6)
        if args.multipliers_out:
            with open(args.multipliers_out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(ms.dumps() + "\n")
        g = build_gqt(args.q, ms).graph
    text = write_graph(g, None, fmt)
    emit(args, text)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = read_graph(args.inp)
    fam = ForbiddenFamily.parse(args.forbid)
    free, w = is_family_free(g, fam)
    out = {"free": free, "forbid": str(fam),
           "counts": {"vertices": g.n, "edges": g.m, "triangles": count_triangles(g)}}
    if w is not None:
        out["witness"] = w.to_json()
    emit(args, out)
    return EXIT_OK


def cmd_count(args) -> int:
    g = read_graph(args.inp)
    deg = g.degrees()
    gi, og = girth(g), odd_girth(g)
    out = {"vertices": g.n, "edges": g.m, "triangles": count_triangles(g), "c4": count_c4(g),
           "girth": None if gi == float("inf") else int(gi),
           "odd_girth": None if og == float("inf") else int(og),
           "min_degree": min(deg) if deg else 0, "max_degree": max(deg) if deg else 0}
    emit(args, out)
    return EXIT_OK


# -- turan -----------------------------------------------------------------------

def cmd_turan(args) -> int:
    cfg = RunConfig.from_args(args)
    budget = cfg.budget or 10 ** 8
    if args.kind == "ratio":
        s = 2 * args.t + 1
        with_cycle = ForbiddenFamily.parse(f"triangle,k{{2,{s}}}")
        bip = ForbiddenFamily.parse(f"k{{2,{s}}}")
        rows = ratio_table(range(1, args.n_max + 1), with_cycle, bip, budget, cfg.threads)
        emit(args, ratio_csv(rows))
        return EXIT_OK if all(r.ex_exhaustive and r.z_exhaustive for r in rows) else EXIT_BUDGET
    fam = ForbiddenFamily.parse(args.forbid)
    if args.kind == "ex":
        res = ex_exact(args.n, fam, budget, cfg.threads)
    else:
        res = z_exact(args.m, args.n, fam, budget, cfg.threads)
    out = res.to_json()
    out["forbid"] = str(fam)
    emit(args, out)
    return EXIT_OK if res.exhaustive else EXIT_BUDGET


# -- regularity ------------------------------------------------------------------

def _parse_p(text: str, n: int):
    if text.startswith("auto:"):
        alpha = float(frac(text[5:]))
        if not 1 < alpha < 2:
            raise ValueError("auto:alpha needs 1 < alpha < 2")
        return n ** (alpha - 2)
    return frac(text)


def _regularity(g, args, cfg):
    p = _parse_p(args.p, g.n)
    res = sparse_regular_partition(g, frac(args.eps), p, L=frac(args.L),
                                   max_rounds=args.max_rounds, seed=cfg.seed,
                                   budget=cfg.budget or 200, threads=cfg.threads,
                                   exact=cfg.exact)
    R = cluster_graph(g, res.partition, res.classification, frac(args.d))
    return p, res, R


def cmd_regularity(args) -> int:
    cfg = RunConfig.from_args(args)
    g = read_graph(args.inp)
    p, res, R = _regularity(g, args, cfg)
    out = {
        "n": g.n, "edges": g.m, "eps": args.eps, "p": float(p), "d": args.d, "L": args.L,
        "seed": cfg.seed, "rounds": res.rounds, "converged": res.converged,
        "partition": res.partition.to_json(),
        "pairs": res.classification.to_json(),
        "cluster_graph": R.to_json(),
        "energy_trace": [float(x) for x in res.trace],
        "irregular_counts": res.irregular_counts,
        "cap_diagnostics": capped_energy_diagnostics(g, res.partition.with_singletons(),
                                                     frac(args.L), cfg.exact),
    }
    emit(args, out)
    return EXIT_OK if res.converged else EXIT_BUDGET


# -- analyze ---------------------------------------------------------------------

def _kv(text: str | None) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise ValueError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _num(v: str):
    try:
        return int(v)
    except ValueError:
        return float(frac(v))


def _bound(which: str, kv: dict) -> dict:
    ints = {k: _num(v) for k, v in kv.items() if k not in ("alpha", "beta", "case", "tag")}
    if which == "furedi":
        return {"value": furedi_kst_bound(ints["m"], ints["n"], ints["s"], ints["t"])}
    if which == "book":
        return {"value": book_family_bound(ints["m"], ints["n"], ints["t"])}
    if which == "c4":
        v = c4_lower_bound(ints["m"], ints["n"], ints["e"])
        return {"applicable": v is not None, "value": None if v is None else str(v)}
    if which == "f":
        return {"value": str(f_exponent(int(kv["i"]), frac(kv["beta"])))}
    if which == "ell0":
        params = SmoothnessParams(frac(kv["alpha"]), frac(kv["beta"]))
        ell, k0 = ell0_k0(params)
        return {"ell0": ell, "k0": k0, "k0_kst_fast_path": KST_FAST_PATH_K0}
    if which == "expansion":
        if "rhoX" in kv:
            return {"value": kst_expansion_bound(ints["rhoX"], ints["rhoY"], ints["sizeY"],
                                                 ints["n"], ints["s"], ints["t"])}
        params = SmoothnessParams(frac(kv["alpha"]), frac(kv["beta"]),
                                  ints.get("rho", 1.0), ints.get("C", 1.0))
        return smooth_expansion_bound(params, ints["delta"], ints["sizeU"], ints["n"],
                                      kv.get("case", "U_smaller")).to_json()
    raise ValueError(f"unknown bound {which!r}")


def cmd_analyze(args) -> int:
    cfg = RunConfig.from_args(args)
    if args.kind == "bound":
        try:
            out = _bound(args.which, _kv(args.params))
        except KeyError as exc:
            raise ValueError(f"missing parameter {exc.args[0]!r}") from None
        out["which"] = args.which
        emit(args, out)
        return EXIT_OK
    g = read_graph(args.inp)
    if args.kind == "tristab":
        out = tri_stab(g, frac(args.gamma)).to_json()
    elif args.kind == "oddcycle":
        res = find_odd_cycle(g, args.k, seed=cfg.seed, max_starts=args.max_starts,
                             budget=cfg.budget or 20_000)
        out = res.to_json()
        out["k"] = args.k
    else:
        args.p = f"auto:{args.alpha}"
        p, res, R = _regularity(g, args, cfg)
        params = SmoothnessParams(frac(args.alpha), frac(args.beta), float(frac(args.rho)))
        out = transfer_report(g, res.partition, res.classification, R, params,
                              float(frac(args.gamma)))
        out["regularity_converged"] = res.converged
    emit(args, out)
    return EXIT_OK


# -- report ----------------------------------------------------------------------

def _qlist(text: str) -> list:
    return [int(x) for x in text.split(",") if x.strip()]


def cmd_report(args) -> int:
    if args.kind == "theorem4":
        emit(args, report_theorem4(args.t, _qlist(args.q)))
    else:
        emit(args, report_multiplier_scan(args.t, args.q_max, args.build_max,
                                          args.budget or 10 ** 6))
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--budget", type=int, default=None)
    common.add_argument("--out", default=None, help="write to this file instead of stdout")
    common.add_argument("--precision", choices=("auto", "rational", "float64"), default="auto")
    common.add_argument("--config", default=None, help="JSON file of option defaults")

    p = _Parser(prog="turanforge", description="Extremal graph constructions and checks.")
    p.add_argument("--version", action="version", version=f"turanforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", parents=[common], help="build a graph")
    c.add_argument("kind", choices=("gq", "gqt", "pg"))
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--t", type=int, default=1)
    c.add_argument("--strategy", choices=("backtracking", "greedy", "paper_greedy"),
                   default="backtracking")
    c.add_argument("--multipliers", default=None, help="multiplier set JSON to use")
    c.add_argument("--multipliers-out", default=None)
    c.add_argument("--format", choices=("graph6", "edgelist"), default=None)
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", parents=[common], help="check a graph for forbidden patterns")
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--forbid", required=True)
    v.set_defaults(func=cmd_verify)

    n = sub.add_parser("count", parents=[common], help="subgraph counts and girth")
    n.add_argument("--in", dest="inp", required=True)
    n.set_defaults(func=cmd_count)

    t = sub.add_parser("turan", parents=[common], help="exact Turan / Zarankiewicz numbers")
    t.add_argument("kind", choices=("ex", "z", "ratio"))
    t.add_argument("--n", type=int)
    t.add_argument("--m", type=int)
    t.add_argument("--forbid")
    t.add_argument("--t", type=int, default=1)
    t.add_argument("--n-max", type=int, default=6)
    t.set_defaults(func=cmd_turan)

    r = sub.add_parser("regularity", parents=[common], help="sparse regular partition")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--eps", default="0.25")
    r.add_argument("--p", default="1")
    r.add_argument("--d", default="0.5")
    r.add_argument("--L", default="2")
    r.add_argument("--max-rounds", type=int, default=8)
    r.set_defaults(func=cmd_regularity)

    a = sub.add_parser("analyze", parents=[common], help="bounds and constructive lemmas")
    a.add_argument("kind", choices=("bound", "tristab", "oddcycle", "transfer"))
    a.add_argument("--which", choices=("furedi", "book", "c4", "ell0", "f", "expansion"))
    a.add_argument("--params", default=None, help="comma separated key=value pairs")
    a.add_argument("--in", dest="inp")
    a.add_argument("--gamma", default="0.01")
    a.add_argument("--k", type=int, default=5)
    a.add_argument("--max-starts", type=int, default=None)
    a.add_argument("--alpha", default="3/2")
    a.add_argument("--beta", default="4/3")
    a.add_argument("--rho", default="1")
    a.add_argument("--eps", default="0.25")
    a.add_argument("--d", default="0.5")
    a.add_argument("--L", default="2")
    a.add_argument("--max-rounds", type=int, default=8)
    a.set_defaults(func=cmd_analyze)

    rp = sub.add_parser("report", parents=[common], help="CSV reports")
    rp.add_argument("kind", choices=("theorem4", "multipliers"))
    rp.add_argument("--t", type=int, default=1)
    rp.add_argument("--q", default="5,11,17,23,29")
    rp.add_argument("--q-max", type=int, default=300)
    rp.add_argument("--build-max", type=int, default=None)
    rp.set_defaults(func=cmd_report)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config, encoding="utf-8") as fh:
        conf = json.load(fh)
    if not isinstance(conf, dict):
        raise UsageError("--config must hold a JSON object")
    conf = {k.replace("-", "_"): v for k, v in conf.items()}
    for action in parser._subparsers._group_actions:  # noqa: SLF001
        for sp in action.choices.values():
            dests = {a.dest for a in sp._actions}  # noqa: SLF001
            sp.set_defaults(**{k: v for k, v in conf.items() if k in dests})


def _check_required(args) -> None:
    if args.command == "turan":
        need = {"ex": ("n", "forbid"), "z": ("m", "n", "forbid"), "ratio": ()}[args.kind]
    elif args.command == "analyze":
        need = ("which",) if args.kind == "bound" else ("inp",)
    else:
        return
    missing = [k for k in need if getattr(args, k) is None]
    if missing:
        raise UsageError(f"{args.command} {args.kind}: missing --{missing[0].replace('inp', 'in')}")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        _check_required(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"turanforge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except NotFound as exc:
        print(f"turanforge: {exc}", file=sys.stderr)
        return EXIT_BUDGET if exc.reason == "budget" else EXIT_DOMAIN
    except (SearchInvariantError, RegInvariantError, StabilityContradiction,
            AssertionError) as exc:
        print(f"turanforge: internal invariant failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ExceptionalOverflow as exc:
        print(f"turanforge: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (LemmaError, FieldError, PatternError, GraphError, PartitionError, MultiplierError,
            ValueError, OSError) as exc:
        print(f"turanforge: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
