"""Finite groupoids given by multiplication tables.

Here a groupoid is a finite set with a product that need not be associative.
Element 0 is the left identity ``e``, and a set of generators ``S`` is fixed.
The axioms checked are:

1. ``e * s = s`` for each generator (``e`` is a left identity);
2. ``x * s != x`` (no element lies in its own image under a generator);
3. each generator column is a permutation (right cancellation);
4. (optional) ``v * s = v * t`` only if ``s = t`` (left cancellation on S).

A *partial* table stores only the generator columns.  Its Cayley graph has
edges ``(u, u * s)``; walking a tree of words from ``e`` labels every element,
and evaluating labels left to right completes the table (the canonical
extension).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .digraph import DEFAULT_NODE_BUDGET, Digraph, validate
from .errors import DigroupoidError, NotGenerated, ParseError, SearchBudgetExceeded
from .factorize import Factorization, iter_one_factorizations
from .report import Report
from .spanfact import Status, WordSet, automorphism_data, bfs_labels, walk, word_order


class AxiomViolation(DigroupoidError, ValueError):
    def __init__(self, report: "AxiomReport"):
        super().__init__("table violates groupoid axioms: " + "; ".join(report.problems()))
        self.report = report


@dataclass(frozen=True)
class PartialGroupoid:
    """Generator columns of a groupoid: ``table[u][k] = u * s_k``.

    Construction does not enforce the axioms, so malformed tables can be
    inspected; use :func:`check_axioms` or :meth:`require_valid`.
    """

    n: int
    gen_ids: tuple[int, ...]
    table: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    @property
    def d(self) -> int:
        return len(self.gen_ids)

    def column(self, k: int) -> tuple[int, ...]:
        return tuple(row[k] for row in self.table)

    @property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.column(k) for k in range(self.d))

    def label(self, u: int) -> str:
        return self.labels[u] if self.labels else str(u)

    def require_valid(self) -> "PartialGroupoid":
        report = check_axioms(self)
        if not report.valid:
            raise AxiomViolation(report)
        return self


@dataclass(frozen=True)
class FullGroupoid:
    n: int
    gen_ids: tuple[int, ...]
    table: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    def product(self, u: int, w: int) -> int:
        return self.table[u][w]

    def restrict(self) -> PartialGroupoid:
        return PartialGroupoid(
            self.n, self.gen_ids,
            tuple(tuple(row[s] for s in self.gen_ids) for row in self.table),
            self.labels)


def make_partial(table: Sequence[Sequence[int]], gen_ids: Sequence[int],
                 labels: Sequence[str] | None = None) -> PartialGroupoid:
    rows = tuple(tuple(int(x) for x in row) for row in table)
    return PartialGroupoid(len(rows), tuple(int(s) for s in gen_ids), rows,
                           tuple(labels) if labels is not None else None)


def make_full(table: Sequence[Sequence[int]], gen_ids: Sequence[int],
              labels: Sequence[str] | None = None) -> FullGroupoid:
    rows = tuple(tuple(int(x) for x in row) for row in table)
    return FullGroupoid(len(rows), tuple(int(s) for s in gen_ids), rows,
                        tuple(labels) if labels is not None else None)


# -- axioms ------------------------------------------------------------------

@dataclass
class AxiomReport:
    axioms: dict  # axiom number -> Report

    @property
    def valid(self) -> bool:
        """Axioms 1-3 hold (axiom 4 is optional)."""
        return all(self.axioms[k].ok for k in (1, 2, 3))

    def passed(self) -> dict:
        return {k: r.ok for k, r in self.axioms.items()}

    def problems(self) -> list:
        return [f"axiom {k}: {p}" for k, r in sorted(self.axioms.items()) for p in r.problems]


def _duplicate(values: Sequence[int]):
    first = {}
    for i, x in enumerate(values):
        if x in first:
            return first[x], i, x
        first[x] = i
    return None


def check_axioms(g: PartialGroupoid | FullGroupoid) -> AxiomReport:
    """Evaluate axioms 1-4 on a partial or full table.

    On a full table axiom 1 asks for row ``e`` to be the identity and axiom
    3 for every column to be a permutation; axioms 2 and 4 always look at
    generator columns only.
    """
    n = g.n
    full = isinstance(g, FullGroupoid)
    if full:
        gen_cols = list(g.gen_ids)
        all_cols = list(range(n))
    else:
        gen_cols = list(range(g.d))
        all_cols = gen_cols
    for row in g.table:
        if len(row) != len(all_cols):
            bad = Report.fail(f"row width {len(row)}, expected {len(all_cols)}")
            return AxiomReport({1: bad, 2: bad, 3: bad, 4: bad})
        if any(not 0 <= x < n for x in row):
            bad = Report.fail("entry outside the element range")
            return AxiomReport({1: bad, 2: bad, 3: bad, 4: bad})

    one = Report(True)
    if full:
        for w in all_cols:
            if g.table[0][w] != w:
                one = Report.fail(f"e * {g_label(g, w)} = {g_label(g, g.table[0][w])}",
                                  (w, g.table[0][w]))
                break
    else:
        for k, s in enumerate(g.gen_ids):
            if g.table[0][k] != s:
                one = Report.fail(f"e * s_{k} = {g_label(g, g.table[0][k])}, expected {g_label(g, s)}",
                                  (k, g.table[0][k]))
                break

    two = Report(True)
    for u in range(n):
        hit = next((c for c in gen_cols if g.table[u][c] == u), None)
        if hit is not None:
            two = Report.fail(f"{g_label(g, u)} is fixed by column {hit}", (u, hit))
            break

    three = Report(True)
    for c in all_cols:
        dup = _duplicate([g.table[u][c] for u in range(n)])
        if dup is not None:
            u, v, x = dup
            three = Report.fail(f"column {c} sends {g_label(g, u)} and {g_label(g, v)} to {g_label(g, x)}",
                                (c, u, v))
            break

    four = Report(True)
    for u in range(n):
        dup = _duplicate([g.table[u][c] for c in gen_cols])
        if dup is not None:
            i, j, x = dup
            four = Report.fail(f"row {g_label(g, u)} repeats {g_label(g, x)} on generators {i} and {j}",
                               (u, i, j))
            break
    return AxiomReport({1: one, 2: two, 3: three, 4: four})


def g_label(g, u: int) -> str:
    return g.labels[u] if g.labels else str(u)


# -- labelings and the canonical extension -----------------------------------

@dataclass
class LabelingReport:
    labels: list  # element -> word over generator indices
    levels: list  # level j -> elements at distance j, in discovery order

    def wordset(self) -> WordSet:
        return WordSet(tuple(sorted(self.labels, key=word_order)), tree_like=True)


def tree_like_labeling(pg: PartialGroupoid) -> LabelingReport:
    """Label every element by a shortest word, level by level.

    Within level ``j+1`` the products ``u * s_k`` with ``u`` in level ``j``
    are grouped by value; each class keeps the pair with the smallest
    (position of ``u`` in its level, ``k``).
    """
    labels: list = [None] * pg.n
    labels[0] = ()
    levels = [[0]]
    while True:
        nxt = []
        for u in levels[-1]:
            for k in range(pg.d):
                v = pg.table[u][k]
                if labels[v] is None:
                    labels[v] = labels[u] + (k,)
                    nxt.append(v)
        if not nxt:
            break
        levels.append(nxt)
    missing = next((u for u in range(pg.n) if labels[u] is None), None)
    if missing is not None:
        raise NotGenerated(pg.label(missing))
    return LabelingReport(labels, levels)


def canonical_extension(pg: PartialGroupoid, labels: Sequence[Sequence[int]] | None = None) -> FullGroupoid:
    """Complete the table with ``u * w = u`` followed along the label of ``w``.

    ``labels[w]`` is a word over generator indices; the labels must be
    prefix-closed and ``e``'s label empty.  Defaults to
    :func:`tree_like_labeling`.
    """
    if labels is None:
        labels = tree_like_labeling(pg).labels
    words = [tuple(w) for w in labels]
    if len(words) != pg.n or words[0] != ():
        raise ValueError("need one label per element with the empty word on e")
    members = set(words)
    if len(members) != pg.n or any(w and w[:-1] not in members for w in words):
        raise ValueError("labels must be distinct and prefix-closed")
    cols = pg.columns
    table = tuple(tuple(walk(cols, u, words[w]) for w in range(pg.n)) for u in range(pg.n))
    return FullGroupoid(pg.n, pg.gen_ids, table, pg.labels)


def has_left_cancellation(fg: FullGroupoid) -> bool:
    """Every row of the full table is injective."""
    return all(len(set(row)) == fg.n for row in fg.table)


def left_cancellation_witness(fg: FullGroupoid):
    """``(u, w1, w2)`` with ``u * w1 == u * w2``, or ``None``."""
    for u, row in enumerate(fg.table):
        dup = _duplicate(row)
        if dup is not None:
            return u, dup[0], dup[1]
    return None


# -- digraph correspondence --------------------------------------------------

class CayleyGraph(NamedTuple):
    digraph: Digraph
    factorization: Factorization | None  # None if some column is not a 1-factor


def cayley_graph(pg: PartialGroupoid) -> CayleyGraph:
    """Digraph with edges ``(u, u * s_k)``.

    The generator columns form a factorization only when each is a
    fixed-point-free permutation; otherwise ``factorization`` is ``None``
    and only the edge multiset is returned.
    """
    tree_like_labeling(pg)  # raises NotGenerated for unreachable elements
    edges = [(u, pg.table[u][k]) for u in range(pg.n) for k in range(pg.d)]
    g = validate(edges, pg.n)
    cols = pg.columns
    if all(sorted(c) == list(range(pg.n)) and all(c[u] != u for u in range(pg.n)) for c in cols):
        return CayleyGraph(g, Factorization(g, cols))
    return CayleyGraph(g, None)


class LabeledGroupoid(NamedTuple):
    groupoid: PartialGroupoid
    labels: list  # element -> word
    vertex_of: tuple  # element -> host vertex


def groupoid_from_factorization(f: Factorization, root: int = 0,
                                order: Sequence[int] | None = None) -> LabeledGroupoid:
    """Partial groupoid whose Cayley graph is ``f``'s host.

    Elements are the host vertices with ``root`` and ``0`` swapped, so the
    root becomes ``e``; ``u * s_k`` is the factor-``k`` successor.
    """
    n = f.n
    vertex_of = list(range(n))
    vertex_of[0], vertex_of[root] = vertex_of[root], vertex_of[0]
    elem_of = vertex_of  # a transposition is its own inverse
    table = tuple(tuple(elem_of[succ[vertex_of[u]]] for succ in f.factors) for u in range(n))
    gen_ids = tuple(elem_of[succ[root]] for succ in f.factors)
    pg = PartialGroupoid(n, gen_ids, table)
    host_labels = bfs_labels(f, root, order)
    labels = [host_labels[vertex_of[u]] for u in range(n)]
    return LabeledGroupoid(pg, labels, tuple(vertex_of))


# -- vertex transitivity through groupoids -----------------------------------

@dataclass
class GroupoidVerdict:
    status: Status
    groupoid: FullGroupoid | None = None
    labels: list | None = None
    factorization: Factorization | None = None
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"status": self.status.value, "stats": self.stats}
        if self.factorization is not None:
            out["factors"] = [list(s) for s in self.factorization.factors]
            out["labels"] = [list(w) for w in self.labels]
        return out


def _orbit_classes(g: Digraph, node_budget: int):
    """Split each vertex's out-edges by the stabilizer orbits at vertex 0.

    Returns ``(classes, info)`` where ``classes[u][v]`` is the orbit index
    of edge ``(u, v)``, or ``None`` when the automorphism data does not
    support the split (not transitive, truncated, or parallel edges).
    """
    info: dict = {}
    if g.has_parallel_edges:
        info["refine"] = "skipped: parallel edges"
        return None, info
    data = automorphism_data(g, node_budget)
    if not data.transitive:
        info["transitive"] = False
        return None, info
    heads = sorted(g.out[0])
    orbit_of = {}
    for x in heads:
        if x not in orbit_of:
            idx = len(set(orbit_of.values()))
            for h in data.stabilizer:
                orbit_of.setdefault(h[x], idx)
    classes = []
    for u in range(g.n):
        t = data.transporters[u]
        inv = {t[x]: x for x in heads}
        classes.append({v: orbit_of[inv[v]] for v in g.out[u]})
    info["orbits"] = sorted(sorted(x for x in heads if orbit_of[x] == i)
                            for i in set(orbit_of.values()))
    return classes, info


def vt_check_via_groupoid(g: Digraph, budget: int = 10_000, node_budget: int = DEFAULT_NODE_BUDGET,
                          refine: bool = False) -> GroupoidVerdict:
    """Search for a factorization whose canonical extension is left cancellative.

    Each factorization is turned into a partial groupoid rooted at vertex 0;
    its canonical extension along the BFS labeling is tested for left
    cancellation.  Exhausting every factorization proves the graph is not
    vertex transitive.

    With ``refine`` the stabilizer of vertex 0 splits the out-neighbours of
    0 into orbits, and only factorizations whose factors stay inside one
    orbit class are tried.  If the graph turns out not to be vertex
    transitive the transporter search already settles the question.
    """
    stats: dict = {"examined": 0}
    classes = None
    if refine:
        try:
            classes, info = _orbit_classes(g, node_budget)
        except SearchBudgetExceeded:
            classes, info = None, {"refine": "skipped: automorphism budget"}
        stats.update(info)
        if info.get("transitive") is False:
            stats["method"] = "automorphism-search"
            return GroupoidVerdict(Status.NOT_FOUND, stats=stats)

    counter = [0]
    try:
        for f in iter_one_factorizations(g, node_budget, counter):
            if classes is not None and not _respects(f, classes):
                stats["skipped_by_refine"] = stats.get("skipped_by_refine", 0) + 1
                continue
            if stats["examined"] >= budget:
                stats["nodes"] = counter[0]
                return GroupoidVerdict(Status.INCONCLUSIVE, stats=stats)
            stats["examined"] += 1
            lg = groupoid_from_factorization(f, 0)
            fg = canonical_extension(lg.groupoid, lg.labels)
            if has_left_cancellation(fg):
                stats["nodes"] = counter[0]
                return GroupoidVerdict(Status.FOUND, fg, lg.labels, f, stats)
    except SearchBudgetExceeded:
        stats["nodes"] = counter[0]
        return GroupoidVerdict(Status.INCONCLUSIVE, stats=stats)
    stats["nodes"] = counter[0]
    if classes is not None:
        # Orbit-respecting factorizations are a subset; exhausting them alone
        # proves nothing.
        stats["exhausted_refined"] = True
        return GroupoidVerdict(Status.INCONCLUSIVE, stats=stats)
    stats["exhausted"] = True
    return GroupoidVerdict(Status.NOT_FOUND, stats=stats)


def _respects(f: Factorization, classes) -> bool:
    for succ in f.factors:
        if len({classes[u][v] for u, v in enumerate(succ)}) > 1:
            return False
    return True


# -- CSV ---------------------------------------------------------------------

def format_table_csv(g: PartialGroupoid | FullGroupoid) -> str:
    """Header of column labels, then one labelled row per element."""
    name = g.labels if g.labels else tuple(str(u) for u in range(g.n))
    cols = list(range(g.n)) if isinstance(g, FullGroupoid) else list(g.gen_ids)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + [name[c] for c in cols])
    for u, row in enumerate(g.table):
        w.writerow([name[u]] + [name[x] for x in row])
    return buf.getvalue()


def parse_table_csv(text: str) -> PartialGroupoid | FullGroupoid:
    """Read a table; fewer columns than rows means a partial table.

    Row labels name the elements (the first row is ``e``); header labels
    name the generator columns of a partial table.  A full table's
    generators must be given separately, so its ``gen_ids`` are left empty.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise ParseError("need a header and at least one row", 1)
    header = [c.strip() for c in rows[0][1:]]
    names = [r[0].strip() for r in rows[1:]]
    index = {name: i for i, name in enumerate(names)}
    if len(index) != len(names):
        raise ParseError("duplicate row label")
    table = []
    for lineno, r in enumerate(rows[1:], start=2):
        cells = [c.strip() for c in r[1:]]
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} entries, got {len(cells)}", lineno)
        row = []
        for col, cell in enumerate(cells, start=2):
            if cell not in index:
                raise ParseError(f"unknown element {cell!r}", lineno, col)
            row.append(index[cell])
        table.append(tuple(row))
    for col, name in enumerate(header, start=2):
        if name not in index:
            raise ParseError(f"unknown column label {name!r}", 1, col)
    cols = tuple(index[h] for h in header)
    if len(header) == len(names):
        if cols != tuple(range(len(names))):
            raise ParseError("full table columns must follow the row order", 1)
        return FullGroupoid(len(names), (), tuple(table), tuple(names))
    return PartialGroupoid(len(names), cols, tuple(table), tuple(names))


def full_with_generators(fg: FullGroupoid, gen_ids: Sequence[int]) -> FullGroupoid:
    return FullGroupoid(fg.n, tuple(gen_ids), fg.table, fg.labels)
