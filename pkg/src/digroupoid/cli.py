"""Command-line front end.

Exit status: 0 success / true / found, 1 false / not found, 2 inconclusive,
3 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import coset, groupoid
from .constructions import (
    DiffSetParams,
    alegre_graph,
    diffset_digraph,
    hoffman_singleton_graph,
    kautz_graph,
    parse_params,
    search_diffsets,
)
from .digraph import Digraph, format_edge_list, parse_edge_list, random_regular, to_dot, validate
from .errors import DigroupoidError, SearchBudgetExceeded
from .factorize import Factorization, format_factorization, one_factorization, parse_factorization
from .spanfact import (
    SpanningFactorization,
    Status,
    find_spanning_factorization,
    format_wordset,
    greedy_schedule,
    is_spanning,
    is_vertex_transitive,
    parse_wordset,
    schedule_to_json,
    verify_schedule,
)

EXIT_ERROR = 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_ERROR)


def positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


# -- helpers -----------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_graph(path: str) -> Digraph:
    return parse_edge_list(_read(path))


def _load_factorization(g: Digraph, path: str | None) -> Factorization:
    if path is None:
        return one_factorization(g)
    return parse_factorization(_read(path), g)


def _check_paths(args, *names) -> None:
    inputs = {getattr(args, "graph", None), getattr(args, "input", None)} - {None, "-"}
    for name in names:
        out = getattr(args, name, None)
        if out not in (None, "-") and out in inputs:
            raise UsageError(f"--{name.replace('_', '-')} would overwrite an input file")


# -- gen ---------------------------------------------------------------------

def _diffset_from_args(args) -> DiffSetParams:
    if args.params:
        return parse_params(_read(args.params))
    if None in (args.n, args.a, args.b, args.pi, args.v):
        raise UsageError("diffset needs --params or all of --n --a --b --pi --v")
    v = [int(x) for x in args.v.replace(",", " ").split()]
    return DiffSetParams.make(args.n, args.a, args.b, args.pi, v)


def cmd_gen(args) -> int:
    _check_paths(args, "out", "factors_out", "dot")
    factors = None
    labels = None
    if args.name == "kautz":
        g, f = kautz_graph()
        factors = f.factors
    elif args.name == "hs":
        g = hoffman_singleton_graph(args.p)
    elif args.name == "alegre":
        g, f = alegre_graph()
        factors = f.factors
    elif args.name == "petersen-coset":
        spec = coset.petersen_spec()
        if args.closed:
            f = coset.coset_factorization(coset.h_closure(spec))
            g, factors = f.host, f.factors
        else:
            cg = coset.build_coset_graph(spec, coset.petersen_reps())
            g = cg.digraph
            factors = tuple(coset.rep_factor(cg, k) for k in range(len(cg.spec.S)))
    elif args.name == "diffset":
        g, f = diffset_digraph(_diffset_from_args(args))
        if not g.strongly_connected:
            raise UsageError("these parameters give a digraph that is not strongly connected")
        factors = f.factors
    elif args.name == "cycle":
        if args.n is None or args.n < 2:
            raise UsageError("cycle needs --n >= 2")
        g = validate([(i, (i + 1) % args.n) for i in range(args.n)], args.n)
        factors = (tuple((i + 1) % args.n for i in range(args.n)),)
    elif args.name == "random":
        if args.n is None or args.d is None:
            raise UsageError("random needs --n and --d")
        g = random_regular(args.n, args.d, random.Random(args.seed))
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown graph {args.name}")
    _emit(format_edge_list(g), args.out)
    if args.factors_out and factors is not None:
        _emit(format_factorization(Factorization(g, tuple(factors))), args.factors_out)
    if args.dot:
        _emit(to_dot(g, factors, labels=labels), args.dot)
    return 0


# -- factorize / spanning / schedule / check-vt -------------------------------

def cmd_factorize(args) -> int:
    _check_paths(args, "out")
    g = _load_graph(args.graph)
    _emit(format_factorization(one_factorization(g)), args.out)
    return 0


def _spanning_result(args, g: Digraph):
    return find_spanning_factorization(g, budget=args.budget, alternate_orders=args.alternate_roots,
                                       node_budget=args.node_budget)


def cmd_spanning(args) -> int:
    _check_paths(args, "factors_out", "words_out")
    g = _load_graph(args.graph)
    result = _spanning_result(args, g)
    if args.json or not result.spanning:
        _emit(_dump(result.to_json()), None)
    if result.spanning is not None:
        sf = result.spanning
        if args.factors_out:
            _emit(format_factorization(sf.factorization), args.factors_out)
        if args.words_out:
            _emit(format_wordset(sf.wordset), args.words_out)
        if not args.json and not args.factors_out and not args.words_out:
            _emit(format_factorization(sf.factorization) + "\n" + format_wordset(sf.wordset), None)
    return result.status.exit_code


def cmd_schedule(args) -> int:
    _check_paths(args, "out")
    g = _load_graph(args.graph)
    if args.factors and args.words:
        f = parse_factorization(_read(args.factors), g)
        ws = parse_wordset(_read(args.words))
        report = is_spanning(f, ws)
        if not report:
            print(f"error: word set is not spanning: {report.problems[0]}", file=sys.stderr)
            return 1
        sf = SpanningFactorization(f, ws)
    elif args.factors or args.words:
        raise UsageError("--factors and --words go together")
    else:
        result = _spanning_result(args, g)
        if result.spanning is None:
            _emit(_dump(result.to_json()), None)
            return result.status.exit_code
        sf = result.spanning
    sched = greedy_schedule(sf.wordset)
    check = verify_schedule(sf, sched)
    if not check:
        print(f"error: schedule failed verification: {check.problems[0]}", file=sys.stderr)
        return EXIT_ERROR
    _emit(schedule_to_json(sched, sf.wordset) + "\n", args.out)
    return 0


def cmd_check_vt(args) -> int:
    g = _load_graph(args.graph)
    verdict = is_vertex_transitive(g, budget=args.budget, node_budget=args.node_budget,
                                   alternate_orders=args.alternate_roots)
    out = verdict.to_json()
    if not args.json:
        out.pop("generators", None)
        out.pop("factors", None)
        out.pop("words", None)
    _emit(_dump(out), None)
    return verdict.status.exit_code


# -- groupoid ----------------------------------------------------------------

def _gens_from_labels(table, text: str | None):
    if text is None:
        raise UsageError("a full table needs --gens with the generator labels")
    names = list(table.labels)
    try:
        return tuple(names.index(x.strip()) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise UsageError(f"unknown generator label: {exc}") from None


def _load_table(args):
    table = groupoid.parse_table_csv(_read(args.input))
    if isinstance(table, groupoid.FullGroupoid):
        table = groupoid.full_with_generators(table, _gens_from_labels(table, args.gens))
    return table


def cmd_groupoid(args) -> int:
    _check_paths(args, "out")
    op = args.op
    if op == "from-graph":
        g = _load_graph(args.input)
        f = _load_factorization(g, args.factors)
        lg = groupoid.groupoid_from_factorization(f, args.root)
        pg = lg.groupoid
        names = tuple("".join(map(str, w)) or "e" for w in lg.labels)
        pg = groupoid.PartialGroupoid(pg.n, pg.gen_ids, pg.table, names)
        _emit(groupoid.format_table_csv(pg), args.out)
        return 0
    table = _load_table(args)
    if op == "axioms":
        report = groupoid.check_axioms(table)
        out = {str(k): {"pass": r.ok, "problems": r.problems} for k, r in report.axioms.items()}
        if isinstance(table, groupoid.FullGroupoid):
            out["left_cancellation"] = groupoid.has_left_cancellation(table)
        _emit(_dump(out), args.out)
        return 0 if report.valid else 1
    pg = table.restrict() if isinstance(table, groupoid.FullGroupoid) else table
    if op == "extend":
        fg = groupoid.canonical_extension(pg.require_valid())
        _emit(groupoid.format_table_csv(fg), args.out)
        return 0
    if op == "cayley":
        cg = groupoid.cayley_graph(pg)
        _emit(format_edge_list(cg.digraph), args.out)
        return 0
    raise UsageError(f"unknown groupoid operation {op}")  # pragma: no cover


# -- search / export-dot ------------------------------------------------------

def cmd_search(args) -> int:
    if args.n != args.a * args.b:
        raise UsageError("--n must equal --a times --b")
    try:
        rep = search_diffsets(args.n, args.a, args.b, args.target,
                              reduction="none" if args.unreduced else "canonical",
                              negation=args.negation_symmetry, workers=args.workers,
                              budget=args.budget)
    except SearchBudgetExceeded as exc:
        out = exc.partial.to_json()
        out["status"] = Status.INCONCLUSIVE.value
        _emit(_dump(out), args.out)
        return Status.INCONCLUSIVE.exit_code
    out = rep.to_json()
    _emit(_dump(out), args.out)
    if args.target is not None and (rep.best_diameter is None or rep.best_diameter > args.target):
        return 1
    return 0


def cmd_export_dot(args) -> int:
    _check_paths(args, "out")
    g = _load_graph(args.graph)
    factors = parse_factorization(_read(args.factors), g).factors if args.factors else None
    _emit(to_dot(g, factors), args.out)
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = Parser(prog="digroupoid", description="Regular digraphs, factorizations and groupoids.")
    p.add_argument("--seed", type=int, default=0, help="seed for random graph generation")
    p.add_argument("--workers", type=positive, default=1)
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    def budgets(sp):
        sp.add_argument("--budget", type=positive, default=10_000,
                        help="maximum number of factorizations to examine")
        sp.add_argument("--node-budget", type=positive, default=2_000_000,
                        help="maximum backtracking nodes")
        sp.add_argument("--alternate-roots", action="store_true",
                        help="also try BFS trees with other factor priorities")

    g = sub.add_parser("gen", help="write a named digraph as an edge list")
    g.add_argument("name", choices=["kautz", "hs", "alegre", "petersen-coset", "diffset", "cycle", "random"])
    g.add_argument("--p", type=int, default=5)
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=positive)
    g.add_argument("--a", type=positive)
    g.add_argument("--b", type=positive)
    g.add_argument("--pi")
    g.add_argument("--v")
    g.add_argument("--params", help="difference-set params file")
    g.add_argument("--closed", action="store_true", help="petersen-coset: use the H-closed connection set")
    g.add_argument("--out")
    g.add_argument("--factors-out")
    g.add_argument("--dot")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.set_defaults(func=cmd_gen)

    f = sub.add_parser("factorize", help="split a regular digraph into 1-factors")
    f.add_argument("graph")
    f.add_argument("--out")
    f.set_defaults(func=cmd_factorize)

    s = sub.add_parser("spanning", help="find a spanning tree-like factorization")
    s.add_argument("graph")
    budgets(s)
    s.add_argument("--json", action="store_true")
    s.add_argument("--factors-out")
    s.add_argument("--words-out")
    s.set_defaults(func=cmd_spanning)

    sc = sub.add_parser("schedule", help="greedy conflict-free schedule as JSON")
    sc.add_argument("graph")
    sc.add_argument("--factors")
    sc.add_argument("--words")
    budgets(sc)
    sc.add_argument("--out")
    sc.set_defaults(func=cmd_schedule)

    vt = sub.add_parser("check-vt", help="decide vertex transitivity")
    vt.add_argument("graph")
    budgets(vt)
    vt.add_argument("--json", action="store_true", help="include generators and factors")
    vt.set_defaults(func=cmd_check_vt)

    gr = sub.add_parser("groupoid", help="groupoid table operations")
    gr.add_argument("op", choices=["from-graph", "extend", "axioms", "cayley"])
    gr.add_argument("input", help="edge list (from-graph) or table CSV")
    gr.add_argument("--factors", help="from-graph: factorization file")
    gr.add_argument("--root", type=int, default=0)
    gr.add_argument("--gens", help="full tables: comma-separated generator labels")
    gr.add_argument("--out")
    gr.set_defaults(func=cmd_groupoid)

    se = sub.add_parser("search", help="difference-set parameter search")
    se.add_argument("--n", type=positive, required=True)
    se.add_argument("--a", type=positive, required=True)
    se.add_argument("--b", type=positive, required=True)
    se.add_argument("--target", type=positive)
    se.add_argument("--budget", type=positive, help="maximum candidates to examine")
    se.add_argument("--negation-symmetry", action="store_true")
    se.add_argument("--unreduced", action="store_true", help="enumerate the whole space")
    se.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    se.add_argument("--workers", type=positive, default=argparse.SUPPRESS)
    se.add_argument("--out")
    se.set_defaults(func=cmd_search)

    dot = sub.add_parser("export-dot", help="Graphviz source for an edge list")
    dot.add_argument("graph")
    dot.add_argument("--factors")
    dot.add_argument("--out")
    dot.set_defaults(func=cmd_export_dot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (DigroupoidError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
