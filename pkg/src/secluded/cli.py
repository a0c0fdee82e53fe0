"""Command-line driver: ``secluded solve | approx | gen | bench``.

Results are printed as JSON run records (``"schema": "run/1"``).  Exit codes:
0 ok, 2 infeasible, 3 budget or size guard exceeded, 4 bad input (parse
errors, bad parameters), 5 algorithm does not apply to the input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import approx as ap
from .errors import BudgetError, InfeasibleError, InputError, SecludedError, UnsupportedError
from .graph import Graph, PathSeq, SteinerSolution, cost, read_graph, validate_path, write_graph
from .oracle import DEFAULT_BUDGET, exact_secluded_path, exact_secluded_steiner, parse_rbsc
from .skeleton import secluded_steiner_fixed_k
from .suffix_dp import DEFAULT_DEGREE_GUARD, secluded_path_bounded_degree
from .treewidth import (
    DEFAULT_WIDTH_GUARD,
    min_fill_tree_decomposition,
    parse_td,
    solve_treewidth_secluded_steiner,
)

log = logging.getLogger("secluded")

SCHEMA = "run/1"
EXIT_OK, EXIT_INFEASIBLE, EXIT_BUDGET, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 2, 3, 4, 5

EXACT_ALGOS = ["oracle", "dp-degree", "dp-treewidth", "skeleton", "auto"]
APPROX_ALGOS = ["degcost", "sqrt2n", "kr", "2approx", "spanning", "best"]


def number_json(x):
    """Ints stay ints; other rationals become ``"p/q"`` strings."""
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _tree_to_path(sol: SteinerSolution, s: int, t: int) -> PathSeq:
    adj: dict[int, list[int]] = {u: [] for u in sol.nodes}
    for a, b in sol.edges:
        adj[a].append(b)
        adj[b].append(a)
    prev = {s: None}
    stack = [s]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in prev:
                prev[v] = u
                stack.append(v)
    out = [t]
    while prev[out[-1]] is not None:
        out.append(prev[out[-1]])
    return PathSeq(tuple(reversed(out)))


def choose_algorithm(g: Graph, problem: str, k: int) -> str:
    """The ``auto`` rule: bounded-degree DP, then treewidth DP, then the oracle."""
    if g.directed:
        return "oracle"
    plain = not g.weighted
    if problem == "path" and plain and g.max_degree() <= DEFAULT_DEGREE_GUARD:
        return "dp-degree"
    if problem == "steiner" and plain and g.max_degree() <= 3 and k <= 3:
        return "skeleton"
    if min_fill_tree_decomposition(g).width <= DEFAULT_WIDTH_GUARD:
        return "dp-treewidth"
    return "oracle"


def run_exact(
    g: Graph,
    problem: str,
    algo: str,
    source=None,
    target=None,
    terminals=None,
    td=None,
    budget: int = DEFAULT_BUDGET,
) -> dict[str, Any]:
    if problem == "path":
        if source is None or target is None:
            raise InputError("path problems need --source and --target")
        terms = [source, target]
    else:
        if not terminals:
            raise InputError("steiner problems need --terminals")
        terms = list(terminals)
    chosen = choose_algorithm(g, problem, len(set(terms))) if algo == "auto" else algo
    if chosen == "dp-degree" and problem == "steiner":
        chosen = "skeleton"
    t0 = time.perf_counter()
    if chosen == "oracle":
        if problem == "path":
            res = exact_secluded_path(g, source, target, budget=budget)
        else:
            res = exact_secluded_steiner(g, terms, budget=budget)
    elif chosen == "dp-degree":
        res = secluded_path_bounded_degree(g, source, target)
    elif chosen == "skeleton":
        res = secluded_steiner_fixed_k(g, terms, budget=budget)
    elif chosen == "dp-treewidth":
        res = solve_treewidth_secluded_steiner(g, terms, td=td)
    else:
        raise InputError(f"unknown algorithm {algo!r}")
    elapsed = (time.perf_counter() - t0) * 1000
    sol = res.solution
    if problem == "path" and isinstance(sol, SteinerSolution):
        sol = _tree_to_path(sol, source, target)
    rec = _record("solve", g, problem, sol, chosen, res.proven_optimal, elapsed)
    rec["explored"] = res.nodes_explored
    return rec


def run_approx(g: Graph, problem: str, algo: str, source=None, target=None, terminals=None) -> dict[str, Any]:
    t0 = time.perf_counter()
    if problem == "path":
        if algo not in ("degcost", "best"):
            raise InputError("path approximation supports --algo degcost (or best) only")
        out = ap.approx_secluded_path(g, source, target)
    else:
        if not terminals:
            raise InputError("steiner problems need --terminals")
        if algo == "best":
            out = ap.approx_secluded_steiner(g, terminals)
        elif algo == "degcost":
            raise InputError("degcost is a path algorithm; use kr for trees")
        else:
            tag = {
                "sqrt2n": ap.AlgorithmTag.SQRT2N,
                "kr": ap.AlgorithmTag.KR_DEGCOST,
                "2approx": ap.AlgorithmTag.STEINER_2APPROX,
                "spanning": ap.AlgorithmTag.SPANNING,
            }.get(algo)
            if tag is None:
                raise InputError(f"unknown algorithm {algo!r}")
            out = ap.approx_secluded_steiner_all(g, terminals)[tag]
    elapsed = (time.perf_counter() - t0) * 1000
    rec = _record("approx", g, problem, out.solution, algo, False, elapsed)
    rec["algorithm_tag"] = out.algorithm_tag.value
    rec["claimed_ratio"] = out.claimed_ratio
    rec["ratio_bound"] = out.ratio_bound if out.ratio_bound != float("inf") else None
    rec["explored"] = 0
    return rec


def _record(command, g, problem, sol, algo, optimal, elapsed) -> dict[str, Any]:
    rep = cost(g, sol.nodes)
    rec: dict[str, Any] = {
        "schema": SCHEMA,
        "command": command,
        "problem": problem,
        "digest": g.digest(),
        "algorithm": algo,
        "exposure": number_json(rep.exposure),
        "deg_cost": rep.deg_cost,
        "optimal": bool(optimal),
        "runtime_ms": round(elapsed, 3),
        "nodes": sorted(sol.nodes),
    }
    if isinstance(sol, PathSeq):
        rec["path"] = list(sol.nodes)
    else:
        rec["edges"] = sorted([list(e) for e in sol.edges])
        rec["terminals"] = sorted(sol.terminals)
    return rec


def verify_record(rec: dict[str, Any], g: Graph) -> bool:
    """Recompute exposure from the record's nodes; for paths also re-validate the path."""
    if rec.get("digest") != g.digest():
        return False
    if "path" in rec:
        ok, _ = validate_path(g, rec["path"])
        if not ok or sorted(rec["path"]) != rec["nodes"]:
            return False
    return cost(g, rec["nodes"]).exposure == Fraction(rec["exposure"])


# -- gen ----------------------------------------------------------------------


def _params(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        for part in item.split(","):
            if not part:
                continue
            if "=" not in part:
                raise InputError(f"expected key=value, got {part!r}")
            k, v = part.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _int(params, key, default=None) -> int:
    if key not in params:
        if default is None:
            raise InputError(f"missing parameter {key}")
        return default
    try:
        return int(params[key])
    except ValueError:
        raise InputError(f"parameter {key} must be an integer") from None


def _base_graph(params, seed: int) -> Graph:
    from .generators import random_graph
    from .graph import complete_graph, path_graph

    base = params.get("base", "random")
    named = {"K3": lambda: complete_graph(3), "K4": lambda: complete_graph(4),
             "P3": lambda: path_graph(3), "edge": lambda: path_graph(2)}
    if base in named:
        return named[base]()
    if base == "random":
        return random_graph(
            _int(params, "n", 5),
            params.get("model", "degree_bounded"),
            seed,
            p=float(params.get("p", 0.5)),
            max_degree=_int(params, "max_degree", 3),
        )
    return read_graph(base)


def generate(family: str, params: dict[str, str], seed: int):
    from . import generators as gen

    if family in ("rbsc", "rbsc-dag"):
        if params.get("five_set"):
            inst = gen.five_set_rbsc()
        elif "instance" in params:
            inst = parse_rbsc(Path(params["instance"]).read_text())
        else:
            inst = gen.random_rbsc(
                _int(params, "blue", 3), _int(params, "red", 3), _int(params, "sets", 4), seed
            )
        size = max(inst.blue_count, inst.red_count, len(inst.sets))
        m = _int(params, "M", size**3)
        if family == "rbsc":
            h = _int(params, "H", 0) or None
            return gen.reduce_rbsc_to_pp(inst, m, h)
        return gen.reduce_rbsc_to_directed_pp(inst, m)
    if family == "vc-weighted":
        return gen.reduce_vc_to_weighted_pp(_base_graph(params, seed))
    if family == "vc-directed":
        return gen.reduce_vc_to_directed_pp(_base_graph(params, seed))
    if family == "vc-steiner":
        return gen.reduce_vc_to_ps_bounded_degree(_base_graph(params, seed))
    if family == "degcost-gap":
        return gen.gen_degcost_gap_instance(_int(params, "delta", 4), _int(params, "k", 5))
    if family == "random":
        g = _base_graph({**params, "base": "random", "model": params.get("model", "gnp")}, seed)
        return g
    raise InputError(f"unknown family {family!r}")


def write_instance(obj, family: str, seed: int, out: Path) -> tuple[Path, Path | None]:
    out.mkdir(parents=True, exist_ok=True)
    g = obj if isinstance(obj, Graph) else obj.graph
    stem = f"{family}-{g.digest()}"
    gpath = out / f"{stem}.graph"
    write_graph(g, gpath)
    if isinstance(obj, Graph):
        return gpath, None
    man = obj.manifest()
    man["graph"] = gpath.name
    man["family"] = family
    man["seed"] = seed
    mpath = out / f"{stem}.json"
    mpath.write_text(json.dumps(man, indent=2, sort_keys=True) + "\n")
    return gpath, mpath


# -- bench --------------------------------------------------------------------


def bench(corpus: Path, algos: list[str], repeat: int = 1) -> list[dict[str, Any]]:
    rows = []
    manifests = {}
    for mpath in sorted(corpus.glob("*.json")):
        man = json.loads(mpath.read_text())
        if man.get("schema") == "instance/1":
            manifests[man["graph"]] = man
    for gpath in sorted(corpus.glob("*.graph")):
        g = read_graph(gpath)
        man = manifests.get(gpath.name)
        if man is None:
            log.warning("%s: no manifest, skipped", gpath.name)
            rows.append({"instance": gpath.name, "digest": g.digest(), "warning": "no manifest"})
            continue
        problem = "path" if man["problem"] == "PP" else "steiner"
        expected = Fraction(man["expected_optimum"])
        for algo in algos:
            row: dict[str, Any] = {"instance": gpath.name, "digest": g.digest(), "algorithm": algo}
            try:
                times = []
                for _ in range(max(repeat, 1)):
                    if algo.startswith("approx-"):
                        rec = run_approx(g, problem, algo[len("approx-"):], man.get("source"),
                                         man.get("target"), man.get("terminals"))
                    else:
                        rec = run_exact(g, problem, algo, man.get("source"), man.get("target"),
                                        man.get("terminals"))
                    times.append(rec["runtime_ms"])
                exp = Fraction(rec["exposure"])
                row.update(
                    exposure=rec["exposure"],
                    expected=number_json(expected),
                    ratio=float(exp / expected) if expected else None,
                    runtime_ms=min(times),
                )
            except SecludedError as e:
                row["warning"] = f"{type(e).__name__}: {e}"
            rows.append(row)
    rows.sort(key=lambda r: (r["digest"], r.get("algorithm", "")))
    return rows


def format_table(rows: list[dict[str, Any]]) -> str:
    head = ["instance", "algorithm", "exposure", "expected", "ratio", "runtime_ms", "warning"]
    body = []
    for r in rows:
        ratio = r.get("ratio")
        body.append([
            r["instance"], r.get("algorithm", "-"), str(r.get("exposure", "-")),
            str(r.get("expected", "-")), "-" if ratio is None else f"{ratio:.3f}",
            "-" if "runtime_ms" not in r else f"{r['runtime_ms']:.1f}", r.get("warning", ""),
        ])
    widths = [max(len(h), *(len(row[i]) for row in body)) if body else len(h) for i, h in enumerate(head)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths)).rstrip()]
    for row in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


# -- argument handling --------------------------------------------------------------


def _terminal_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError("terminals must be comma-separated integers") from None


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; argparse's own code 2 would read as "infeasible"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="secluded", description="Minimum-exposure paths and Steiner trees.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def instance_args(sp):
        sp.add_argument("--problem", choices=["path", "steiner"], required=True)
        sp.add_argument("--graph", required=True, type=Path)
        sp.add_argument("--source", type=int)
        sp.add_argument("--target", type=int)
        sp.add_argument("--terminals", type=_terminal_list)

    sp = sub.add_parser("solve", help="exact solvers")
    instance_args(sp)
    sp.add_argument("--algo", choices=EXACT_ALGOS, default="auto")
    sp.add_argument("--td", type=Path, help="tree decomposition file (td v1)")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    sp = sub.add_parser("approx", help="approximation algorithms")
    instance_args(sp)
    sp.add_argument("--algo", choices=APPROX_ALGOS, default="best")

    sp = sub.add_parser("gen", help="write a generated instance and its manifest")
    sp.add_argument("--family", required=True,
                    choices=["rbsc", "rbsc-dag", "vc-weighted", "vc-directed", "vc-steiner", "degcost-gap", "random"])
    sp.add_argument("--params", nargs="*", default=[], help="key=value pairs")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=Path, required=True)

    sp = sub.add_parser("bench", help="run algorithms over a generated corpus")
    sp.add_argument("--corpus", type=Path, required=True)
    sp.add_argument("--algos", default="oracle", help="comma-separated; approx-<name> for approximations")
    sp.add_argument("--repeat", type=int, default=1)
    sp.add_argument("--json", type=Path, help="also write the rows as JSON here")
    return p


def _fail(code: int, exc: Exception) -> int:
    print(json.dumps({"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}))
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command in ("solve", "approx"):
            g = read_graph(args.graph)
            if args.command == "solve":
                td = parse_td(args.td.read_text()) if args.td else None
                rec = run_exact(g, args.problem, args.algo, args.source, args.target,
                                args.terminals, td, args.budget)
            else:
                rec = run_approx(g, args.problem, args.algo, args.source, args.target, args.terminals)
            if not verify_record(rec, g):
                raise SecludedError("self-audit failed: exposure does not match the solution")
            print(json.dumps(rec, sort_keys=True))
        elif args.command == "gen":
            obj = generate(args.family, _params(args.params), args.seed)
            gpath, mpath = write_instance(obj, args.family, args.seed, args.out)
            print(json.dumps({"graph": str(gpath), "manifest": str(mpath) if mpath else None}))
        else:
            if not args.corpus.is_dir():
                raise InputError(f"corpus {args.corpus} is not a directory")
            algos = [a for a in args.algos.split(",") if a]
            rows = bench(args.corpus, algos, args.repeat)
            if args.json:
                args.json.write_text(json.dumps(rows, indent=2) + "\n")
            print(format_table(rows))
    except InfeasibleError as e:
        return _fail(EXIT_INFEASIBLE, e)
    except BudgetError as e:
        return _fail(EXIT_BUDGET, e)
    except UnsupportedError as e:
        return _fail(EXIT_UNSUPPORTED, e)
    except (InputError, OSError) as e:
        return _fail(EXIT_INPUT, e)
    except SecludedError as e:
        return _fail(1, e)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
