"""Command-line front end: ``morsetw {solve,verify,oracle,td,gen,bench}``.

Exit codes: 0 ok, 1 infeasible (or a failed verification), 2 input error,
3 cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import generators
from .complexes import (ErasibilityInstance, RegularComplex, format_complex,
                        hasse_diagram, load_complex, solve_erasibility,
                        solve_omm)
from .digraph import (Digraph, backward_edges, format_dg, is_acyclic,
                      is_matching, objective, parse_dg, reverse_matched)
from .dp import DEFAULT_BAG_CAP, run_dp
from .errors import CapExceeded, DecompositionError, InputError, MorseTWError
from .oracle import (brute_force_erasibility, brute_force_matchings,
                     brute_force_orders)
from .treedecomp import (STRATEGIES, heuristic_td, nice_decomposition,
                         read_td_pace, validate_discipline, validate_td,
                         write_td_pace)

log = logging.getLogger("morsetw")

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
REPORT_FIELDS = ("status", "value", "order", "matching", "critical", "width",
                 "bags", "peak_states", "wall_ms")
BENCH_HEADER = ("instance", "n", "width", "bags", "peak_states", "wall_ms",
                "value")
TD_SOURCES = STRATEGIES + ("naive-path",)


@dataclass
class RunConfig:
    input: Path | None = None
    format: str | None = None
    td: Path | None = None
    td_strategy: str = "min-fill"
    mode: str = "fmm"
    budget: int = 0
    seed: int = 0
    bag_cap: int = DEFAULT_BAG_CAP
    output: Path | None = None

    @classmethod
    def from_args(cls, ns) -> "RunConfig":
        cfg = cls(**{k: getattr(ns, k) for k in cls.__dataclass_fields__
                     if hasattr(ns, k)})
        if cfg.bag_cap < 1:
            raise InputError("--bag-cap must be positive")
        if cfg.budget < 0:
            raise InputError("--budget must be nonnegative")
        return cfg


def _num(x):
    if isinstance(x, float) and x.is_integer():
        return int(x)
    return x


def _infer_format(path: Path, fmt: str | None) -> str:
    if fmt:
        return fmt
    if path.suffix in (".dg", ".sc"):
        return path.suffix[1:]
    raise InputError(f"cannot infer the format of {path}; pass --format")


def _read(path: Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_instance(path: Path, fmt: str | None = None):
    """``(Digraph, RegularComplex or None)`` for a ``.dg`` or ``.sc`` file."""
    fmt = _infer_format(Path(path), fmt)
    text = _read(path)
    if fmt == "dg":
        return parse_dg(text), None
    K = load_complex(text)
    return hasse_diagram(K), K


def _decomposition(G: Digraph, cfg: RunConfig):
    if cfg.td is not None:
        return nice_decomposition(G, read_td_pace(_read(cfg.td), G))
    return nice_decomposition(G, cfg.td_strategy)


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _dump(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def solve_report(cfg: RunConfig) -> dict:
    """Run one solve and build the JSON report (see README for fields)."""
    G, K = load_instance(cfg.input, cfg.format)
    if K is None and cfg.mode != "fmm":
        raise InputError(f"mode {cfg.mode} needs a complex (.sc) input")
    if K is not None and cfg.mode == "fmm":
        cfg.mode = "omm"
    start = time.perf_counter()
    ntd = _decomposition(G, cfg)
    if cfg.mode == "fmm":
        run = run_dp(G, ntd, bag_cap=cfg.bag_cap)
        res = run.result()
        extra = {}
    elif cfg.mode == "omm":
        omm = solve_omm(K, decomposition=ntd, bag_cap=cfg.bag_cap)
        res = omm.result
        extra = {}
    else:
        er = solve_erasibility(ErasibilityInstance(K, cfg.budget),
                               decomposition=ntd, bag_cap=cfg.bag_cap)
        res = er.result
        extra = {"budget": cfg.budget, "answer": er.answer,
                 "witness": sorted(K.labels[c] for c in er.witness)}
    wall_ms = (time.perf_counter() - start) * 1000
    labels = G.labels
    report = {"status": res.status.value, "value": _num(res.value),
              "order": None, "matching": [], "critical": None,
              "width": ntd.width, "bags": len(ntd.bags),
              "peak_states": res.stats.peak_states,
              "wall_ms": round(wall_ms, 3)}
    if res.optimal:
        report["order"] = [labels[v] for v in res.order]
        report["matching"] = sorted([labels[u], labels[v]]
                                    for u, v in res.matching)
        if K is not None:
            report["critical"] = [labels[c] for c in sorted(res.unmatched)]
    if K is not None:
        report["mode"] = cfg.mode
        report["cells"] = list(K.labels)
    report.update(extra)
    return report


def verify_solution(G: Digraph, solution: dict) -> dict:
    """Check a solution JSON against ``G``; returns ``{"ok", "reason"}``."""
    def fail(reason):
        return {"ok": False, "reason": reason}

    try:
        arcs = [G.arc(t, h) for t, h in solution.get("matching") or []]
    except InputError as exc:
        raise InputError(f"solution {exc}") from None
    if any(not G.has_arc(u, v) for u, v in arcs):
        return fail("matching contains an arc that is not in the digraph")
    if not is_matching(G, arcs):
        return fail("not a matching")
    if not is_acyclic(reverse_matched(G, arcs)):
        return fail("reversing the matching leaves a directed cycle")
    recomputed = objective(G, arcs)
    claimed = solution.get("value")
    if claimed is not None and recomputed != claimed:
        return fail(f"objective mismatch (recomputed {_num(recomputed)})")
    order = solution.get("order")
    if order is not None:
        ids = [G.index(x) for x in order]
        if sorted(ids) != list(range(G.n)):
            return fail("order is not a permutation of the vertices")
        if backward_edges(G, ids) != frozenset(arcs):
            return fail("backward arcs of the order differ from the matching")
    return {"ok": True, "reason": None}


def oracle_report(cfg: RunConfig) -> dict:
    G, K = load_instance(cfg.input, cfg.format)
    labels = G.labels
    if K is not None and cfg.mode == "erasibility":
        res = brute_force_erasibility(K)
        return {"status": "OPTIMAL", "value": res.value,
                "answer": res.value <= cfg.budget, "budget": cfg.budget,
                "witness": sorted(K.labels[c] for c in res.witness),
                "count": res.count}
    if K is not None:
        G = hasse_diagram(K)
        res = brute_force_matchings(G)
    else:
        res = brute_force_orders(G)
    if not res.feasible:
        return {"status": "INFEASIBLE", "value": None, "order": None,
                "matching": []}
    return {"status": "OPTIMAL", "value": _num(res.value),
            "order": None if res.order is None
            else [labels[v] for v in res.order],
            "matching": sorted([labels[u], labels[v]]
                               for u, v in res.matching),
            "count": res.count}


def bench_rows(corpus: Path, bag_cap: int = DEFAULT_BAG_CAP) -> list:
    """One row per ``.dg``/``.sc`` file; a sibling ``.td`` is used if present."""
    rows = []
    for path in sorted(Path(corpus).iterdir()):
        if path.suffix not in (".dg", ".sc"):
            continue
        try:
            G, K = load_instance(path)
            td_path = path.with_suffix(".td")
            source = (read_td_pace(td_path.read_text(), G)
                      if td_path.exists() else "min-fill")
            ntd = nice_decomposition(G, source)
            start = time.perf_counter()
            res = run_dp(G, ntd, bag_cap=bag_cap).result()
            wall_ms = (time.perf_counter() - start) * 1000
        except MorseTWError as exc:
            log.warning("skipping %s: %s", path.name, exc)
            continue
        rows.append({"instance": path.stem, "n": G.n, "width": ntd.width,
                     "bags": len(ntd.bags),
                     "peak_states": res.stats.peak_states,
                     "wall_ms": round(wall_ms, 3), "value": _num(res.value)})
    rows.sort(key=lambda r: r["instance"])
    return rows


def format_bench(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, BENCH_HEADER, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# -- subcommands --------------------------------------------------------------

def cmd_solve(ns) -> int:
    cfg = RunConfig.from_args(ns)
    report = solve_report(cfg)
    _emit(_dump(report), cfg.output)
    return EXIT_OK if report["status"] == "OPTIMAL" else EXIT_INFEASIBLE


def cmd_verify(ns) -> int:
    G, _ = load_instance(ns.input, ns.format)
    try:
        solution = json.loads(_read(ns.solution))
    except json.JSONDecodeError as exc:
        raise InputError(f"solution is not valid JSON: {exc}") from None
    if solution.get("status") == "INFEASIBLE":
        report = {"ok": False, "reason": "solution claims infeasibility"}
    else:
        report = verify_solution(G, solution)
    _emit(_dump(report), ns.output)
    return EXIT_OK if report["ok"] else EXIT_INFEASIBLE


def cmd_oracle(ns) -> int:
    cfg = RunConfig.from_args(ns)
    report = oracle_report(cfg)
    _emit(_dump(report), cfg.output)
    return EXIT_OK if report["status"] == "OPTIMAL" else EXIT_INFEASIBLE


def cmd_td(ns) -> int:
    G, _ = load_instance(ns.input, ns.format)
    if ns.action == "compute":
        if ns.td_strategy == "naive-path":
            raise InputError("naive-path yields a nice decomposition only; "
                             "use min-fill or min-degree for a .td file")
        _emit(write_td_pace(heuristic_td(G, ns.td_strategy), G.n), ns.output)
        return EXIT_OK
    if ns.td is None:
        raise InputError(f"td {ns.action} needs --td")
    td = read_td_pace(_read(ns.td))
    check = validate_td(G, td)
    if ns.action == "validate":
        report = {"valid": check.ok, "rule": check.rule,
                  "message": check.message, "width": td.width}
        _emit(_dump(report), ns.output)
        return EXIT_OK if check.ok else EXIT_INFEASIBLE
    if not check:
        raise DecompositionError(f"invalid tree decomposition: {check.message}",
                                 check.rule)
    ntd = nice_decomposition(G, td)
    disc = validate_discipline(ntd, G)
    lines = [f"c nice decomposition, {len(ntd.bags)} nodes, width {ntd.width}"]
    lines += [ntd.describe(t, G) for t in range(len(ntd.bags))]
    if not disc:
        raise DecompositionError(disc.message, disc.rule)
    _emit("\n".join(lines) + "\n", ns.output)
    return EXIT_OK


def cmd_gen(ns) -> int:
    family = ns.family
    obj = generators.generate(family, n=ns.n, k=ns.k, p=ns.p, seed=ns.seed,
                              triangles=ns.triangles)
    td = None
    if isinstance(obj, tuple):
        obj, td = obj
    if isinstance(obj, RegularComplex):
        text, suffix = format_complex(obj), ".sc"
    else:
        text, suffix = format_dg(obj, f"{family} seed={ns.seed}"), ".dg"
    if ns.output is None:
        sys.stdout.write(text)
        if td is not None:
            sys.stdout.write(write_td_pace(td, obj.n))
        return EXIT_OK
    stem = Path(ns.output)
    stem = stem.with_suffix("") if stem.suffix in (".dg", ".sc") else stem
    stem.with_suffix(suffix).write_text(text)
    if td is not None:
        stem.with_suffix(".td").write_text(write_td_pace(td, obj.n))
    return EXIT_OK


def cmd_bench(ns) -> int:
    corpus = Path(ns.input)
    if not corpus.is_dir():
        raise InputError(f"{corpus} is not a directory")
    _emit(format_bench(bench_rows(corpus, ns.bag_cap)), ns.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morsetw",
        description="Feedback Morse matchings via a tree decomposition DP.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        p.add_argument("--input", type=Path, required=needs_input)
        p.add_argument("--format", choices=("dg", "sc"))
        p.add_argument("--output", type=Path)
        p.add_argument("--seed", type=int, default=0)

    def decomposition(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--td", type=Path, help="PACE .td file")
        g.add_argument("--td-strategy", choices=TD_SOURCES,
                       default="min-fill")
        p.add_argument("--bag-cap", type=int, default=DEFAULT_BAG_CAP)

    p = sub.add_parser("solve", help="solve one instance, print JSON")
    common(p)
    decomposition(p)
    p.add_argument("--mode", choices=("fmm", "omm", "erasibility"),
                   default="fmm")
    p.add_argument("--budget", type=int, default=0)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution JSON")
    common(p)
    p.add_argument("--solution", type=Path, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exhaustive reference solve")
    common(p)
    p.add_argument("--mode", choices=("fmm", "omm", "erasibility"),
                   default="fmm")
    p.add_argument("--budget", type=int, default=0)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("td", help="compute, validate or convert .td files")
    p.add_argument("action", choices=("compute", "validate", "convert"))
    common(p)
    p.add_argument("--td", type=Path)
    p.add_argument("--td-strategy", choices=TD_SOURCES, default="min-fill")
    p.set_defaults(func=cmd_td)

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("--family", required=True,
                   choices=generators.DIGRAPH_FAMILIES
                   + generators.COMPLEX_FAMILIES)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--p", type=float, default=0.7)
    p.add_argument("--triangles", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path,
                   help="file stem; the suffix is chosen by family")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="solve a corpus directory, print CSV")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path)
    p.add_argument("--bag-cap", type=int, default=DEFAULT_BAG_CAP)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return ns.func(ns)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except MorseTWError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
