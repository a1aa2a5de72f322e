"""Words over factors, spanning factorizations and conflict-free schedules.

A word is a tuple of factor indices; ``walk(f, v, w)`` follows factor
``w[0]`` from ``v``, then ``w[1]``, and so on.  A word set with ``n`` words
(the empty word first) is *spanning* for a factorization when, from every
start vertex, the ``n`` walks end at distinct vertices.

Search results are three-valued.  ``NOT_FOUND`` is only reported after the
factorization enumeration was exhausted; running out of budget yields
``INCONCLUSIVE``.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .digraph import (
    DEFAULT_NODE_BUDGET,
    Digraph,
    check_map_is_automorphism,
    compose,
    find_automorphism,
    orbit,
    stabilizer_automorphisms,
)
from .errors import InvariantViolation, ParseError, SearchBudgetExceeded
from .factorize import (
    Factorization,
    iter_one_factorizations,
)
from .report import Report

Word = tuple[int, ...]


class Status(enum.Enum):
    FOUND = "found"
    NOT_FOUND = "notfound"
    INCONCLUSIVE = "inconclusive"

    @property
    def exit_code(self) -> int:
        return {"found": 0, "notfound": 1, "inconclusive": 2}[self.value]


@dataclass(frozen=True)
class WordSet:
    words: tuple[Word, ...]
    tree_like: bool = False

    def __post_init__(self):
        if not self.words or self.words[0] != ():
            raise ValueError("a word set starts with the empty word")
        if len(set(self.words)) != len(self.words):
            raise ValueError("words must be pairwise distinct")
        if self.tree_like and not is_prefix_closed(self.words):
            raise ValueError("tree-like word set is not prefix-closed")

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)


def is_prefix_closed(words: Sequence[Word]) -> bool:
    members = set(words)
    return all(w[:-1] in members for w in words if w)


def word_order(w: Word):
    return (len(w), w)


@dataclass(frozen=True)
class SpanningFactorization:
    factorization: Factorization
    wordset: WordSet


def walk(f: Factorization | Sequence[Sequence[int]], v: int, w: Sequence[int]) -> int:
    factors = f.factors if isinstance(f, Factorization) else f
    for k in w:
        v = factors[k][v]
    return v


def tree_wordset(f: Factorization, root: int = 0, order: Sequence[int] | None = None) -> WordSet:
    """Breadth-first tree of words from ``root``.

    Each vertex is reached once; ties go to the smaller factor index (or the
    earlier entry of ``order``), then discovery order.  Words are returned in
    (length, lexicographic) order.
    """
    labels = bfs_labels(f, root, order)
    if None in labels:
        raise InvariantViolation("factors do not reach every vertex from the root")
    return WordSet(tuple(sorted(labels, key=word_order)), tree_like=True)


def bfs_labels(f: Factorization, root: int = 0, order: Sequence[int] | None = None) -> list:
    """Word reaching each vertex in the BFS tree (``None`` if unreached)."""
    factors = f.factors
    ks = list(order) if order is not None else list(range(len(factors)))
    labels: list = [None] * len(factors[0])
    labels[root] = ()
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for k in ks:
            v = factors[k][u]
            if labels[v] is None:
                labels[v] = labels[u] + (k,)
                queue.append(v)
    return labels


def is_spanning(f: Factorization | Sequence[Sequence[int]], ws: WordSet | Sequence[Word]) -> Report:
    """Check that the walks from every vertex end at distinct vertices.

    Factors that are not permutations are rejected first, with the colliding
    pair as witness ``("factor", k, u, v)``.  Otherwise a failure carries
    ``(v, wi, wj)`` with ``walk(v, wi) == walk(v, wj)``.
    """
    factors = f.factors if isinstance(f, Factorization) else [tuple(x) for x in f]
    words = list(ws)
    n = len(factors[0])
    for k, succ in enumerate(factors):
        seen = {}
        for u, v in enumerate(succ):
            if v in seen:
                return Report.fail(
                    f"factor {k} sends {seen[v]} and {u} to {v}", ("factor", k, seen[v], u))
            seen[v] = u
    if len(words) != n:
        return Report.fail(f"{len(words)} words for {n} vertices")
    for v in range(n):
        ends = {}
        for w in words:
            x = walk(factors, v, w)
            if x in ends:
                return Report.fail(f"from {v}: {ends[x]} and {w} both end at {x}", (v, ends[x], w))
            ends[x] = w
    return Report(True)


# -- searching ---------------------------------------------------------------

@dataclass
class SearchResult:
    status: Status
    spanning: SpanningFactorization | None = None
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"status": self.status.value, "stats": self.stats}
        if self.spanning is not None:
            out["factors"] = [list(s) for s in self.spanning.factorization.factors]
            out["words"] = [list(w) for w in self.spanning.wordset.words]
        return out


@dataclass
class AutomorphismData:
    """Vertex stabilizer at 0 plus one transporter per vertex (``None`` if absent)."""

    stabilizer: list
    transporters: list
    complete: bool

    @property
    def transitive(self) -> bool:
        return all(t is not None for t in self.transporters)


def automorphism_data(g: Digraph, node_budget: int = DEFAULT_NODE_BUDGET, stabilizer_limit: int = 100_000):
    """Stabilizer of vertex 0 and transporters ``0 -> v`` for every ``v``.

    ``complete`` is False when the stabilizer list was truncated.
    """
    stab = stabilizer_automorphisms(g, 0, limit=stabilizer_limit, node_budget=node_budget)
    transporters: list = [None] * g.n
    transporters[0] = tuple(range(g.n))
    group = list(stab.maps)
    # Close the orbit of 0 under maps found so far before searching again.
    for v in range(1, g.n):
        if transporters[v] is not None:
            continue
        t = find_automorphism(g, 0, v, node_budget)
        if t is None:
            continue
        transporters[v] = t
        group.append(t)
        _propagate(transporters, group)
    return AutomorphismData(stab.maps, transporters, not stab.truncated)


def _propagate(transporters: list, group: list) -> None:
    # if t maps 0 -> x and m is an automorphism, m∘t maps 0 -> m(x)
    changed = True
    while changed:
        changed = False
        known = [(x, t) for x, t in enumerate(transporters) if t is not None]
        for x, t in known:
            for m in group:
                y = m[x]
                if transporters[y] is None:
                    transporters[y] = tuple(m[t[i]] for i in range(len(t)))
                    changed = True


def transporter_maps(g: Digraph, node_budget: int = DEFAULT_NODE_BUDGET) -> list:
    """One automorphism ``0 -> v`` per vertex, ``None`` where none exists."""
    transporters: list = [None] * g.n
    transporters[0] = tuple(range(g.n))
    found = []
    for v in range(1, g.n):
        if transporters[v] is not None:
            continue
        t = find_automorphism(g, 0, v, node_budget)
        if t is None:
            continue
        transporters[v] = t
        found.append(t)
        _propagate(transporters, found)
    return transporters


def _cycle_order(m: Sequence[int]) -> int:
    seen = [False] * len(m)
    order = 1
    for i in range(len(m)):
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = m[j]
            length += 1
        if length:
            order = math.lcm(order, length)
    return order


def _power(m: Sequence[int], e: int) -> tuple:
    r = tuple(range(len(m)))
    for _ in range(e):
        r = tuple(m[x] for x in r)
    return r


def _prime_factors(k: int) -> list:
    out = []
    p = 2
    while p * p <= k:
        if k % p == 0:
            out.append(p)
            while k % p == 0:
                k //= p
        p += 1
    if k > 1:
        out.append(k)
    return out


def _closure(gens: Sequence[Sequence[int]], cap: int):
    ident = tuple(range(len(gens[0])))
    group = {ident}
    frontier = [ident]
    while frontier:
        x = frontier.pop()
        for z in gens:
            y = tuple(z[i] for i in x)
            if y not in group:
                group.add(y)
                frontier.append(y)
                if len(group) > cap:
                    return None
    return group


def _fixed_point_free(m: Sequence[int]) -> bool:
    return all(m[i] != i for i in range(len(m)))


def _semiregular(group) -> bool:
    ident = tuple(range(len(next(iter(group)))))
    return all(m == ident or _fixed_point_free(m) for m in group)


def semiregular_automorphisms(g: Digraph, node_budget: int = DEFAULT_NODE_BUDGET,
                              max_seeds: int = 8) -> list:
    """A semiregular group of automorphisms, as a sorted list of maps.

    Seeds are prime-order, fixed-point-free powers of transporters and their
    pairwise products.  Each seed is grown greedily by prime-order powers of
    automorphisms that commute with everything chosen so far.  The largest
    group found is returned; the trivial group if there is no seed.
    """
    n = g.n
    ident = tuple(range(n))
    trans = [t for t in transporter_maps(g, node_budget)[1:] if t is not None]
    pool = trans + [compose(a, b) for a in trans[:12] for b in trans[:12]]
    seeds: dict = {}
    for m in pool:
        o = _cycle_order(m)
        for p in _prime_factors(o):
            z = _power(m, o // p)
            if _fixed_point_free(z):
                key = min(_power(z, e) for e in range(1, p))
                seeds.setdefault(key, z)
    best = [ident]
    for z in list(seeds.values())[:max_seeds]:
        gens = [z]
        group = _closure(gens, n)
        for v in range(1, n):
            if v in {m[0] for m in group}:
                continue
            m = find_automorphism(g, 0, v, node_budget, commuting=gens)
            if m is None:
                continue
            o = _cycle_order(m)
            for p in _prime_factors(o):
                c = _power(m, o // p)
                if c in group or not _fixed_point_free(c):
                    continue
                bigger = _closure(gens + [c], n)
                if bigger is not None and n % len(bigger) == 0 and _semiregular(bigger):
                    gens.append(c)
                    group = bigger
        if len(group) > len(best):
            best = sorted(group)
        if len(best) == n:
            break
    return best


def invariant_factorizations(g: Digraph, group: Sequence[Sequence[int]],
                             node_budget: int | None = None, counter: list | None = None):
    """Factorizations preserved colour by colour by a semiregular ``group``.

    Such a factorization is fixed by its choice of out-edges at one
    representative per orbit: factor ``k`` picks one out-edge of each
    representative so that the target orbits are all different, and is then
    transported along the group.  This is a 1-factorization of the quotient
    multigraph on orbits (which may have loops).
    """
    n, d = g.n, g.d
    counter = counter if counter is not None else [0]
    budget = node_budget if node_budget is not None else float("inf")
    carrier: list = [None] * n  # vertex -> (orbit index, element moving the rep onto it)
    reps = []
    for u in range(n):
        if carrier[u] is None:
            for m in group:
                if carrier[m[u]] is None:
                    carrier[m[u]] = (len(reps), m)
            reps.append(u)
    if any(c is None for c in carrier) or len(group) * len(reps) != n:
        raise ValueError("group is not semiregular")
    q = len(reps)
    outs = [sorted(g.out[r]) for r in reps]
    target = [[carrier[x][0] for x in out] for out in outs]
    used = [[False] * d for _ in range(q)]
    choice = [[-1] * q for _ in range(d)]
    seen: set = set()

    def lift(k: int) -> tuple:
        succ = [0] * n
        for u in range(n):
            i, m = carrier[u]
            succ[u] = m[outs[i][choice[k][i]]]
        return tuple(succ)

    def rec(k: int, i: int, hit: set):
        if k == d:
            factors = tuple(sorted(lift(j) for j in range(d)))
            if factors not in seen:
                seen.add(factors)
                yield Factorization(g, factors)
            return
        if i == q:
            yield from rec(k + 1, 0, set())
            return
        slots = [k] if i == 0 else range(d)
        for j in slots:
            if used[i][j] or target[i][j] in hit:
                continue
            counter[0] += 1
            if counter[0] > budget:
                raise SearchBudgetExceeded("invariant factorization node budget exhausted")
            used[i][j] = True
            choice[k][i] = j
            hit.add(target[i][j])
            yield from rec(k, i + 1, hit)
            hit.discard(target[i][j])
            used[i][j] = False

    yield from rec(0, 0, set())


def find_spanning_factorization(
    g: Digraph,
    budget: int = 10_000,
    alternate_orders: bool = False,
    order_cap: int = 120,
    node_budget: int = DEFAULT_NODE_BUDGET,
    use_automorphisms: bool = True,
) -> SearchResult:
    """Look for a factorization whose BFS word tree from vertex 0 is spanning.

    With ``use_automorphisms`` a semiregular automorphism group is sought
    first and the factorizations it preserves are tried; on vertex
    transitive graphs this usually hits at once.  Then up to ``budget``
    factorizations are enumerated.  ``alternate_orders`` also tries BFS
    trees with other factor priorities (at most ``order_cap`` orders).
    Only the plain enumeration can end in ``NOT_FOUND``.
    """
    stats: dict = {"examined": 0}
    orders = [None]
    if alternate_orders:
        orders = [list(p) for p in itertools.islice(itertools.permutations(range(g.d)), order_cap)]
        stats["orders"] = len(orders)

    def first_hit(f: Factorization):
        for order in orders:
            labels = bfs_labels(f, 0, order)
            if None in labels:
                continue
            ws = WordSet(tuple(sorted(labels, key=word_order)), tree_like=True)
            if is_spanning(f, ws):
                return SpanningFactorization(f, ws)
        return None

    if use_automorphisms:
        route: dict = {"examined": 0}
        stats["symmetric_route"] = route
        counter = [0]
        try:
            group = semiregular_automorphisms(g, node_budget)
            route["group_order"] = len(group)
            if len(group) > 1:
                for f in invariant_factorizations(g, group, node_budget, counter):
                    if route["examined"] >= budget:
                        break
                    route["examined"] += 1
                    hit = first_hit(f)
                    if hit is not None:
                        stats["method"] = "symmetric"
                        return SearchResult(Status.FOUND, hit, stats)
        except SearchBudgetExceeded:
            route["budget_exhausted"] = True

    counter = [0]
    try:
        for f in iter_one_factorizations(g, node_budget, counter):
            if stats["examined"] >= budget:
                stats["nodes"] = counter[0]
                return SearchResult(Status.INCONCLUSIVE, None, stats)
            stats["examined"] += 1
            hit = first_hit(f)
            if hit is not None:
                stats["method"] = "enumeration"
                stats["nodes"] = counter[0]
                return SearchResult(Status.FOUND, hit, stats)
    except SearchBudgetExceeded:
        stats["nodes"] = counter[0]
        stats["budget_exhausted"] = "nodes"
        return SearchResult(Status.INCONCLUSIVE, None, stats)
    stats["nodes"] = counter[0]
    stats["exhausted"] = True
    return SearchResult(Status.NOT_FOUND, None, stats)


@dataclass
class TransitivityVerdict:
    status: Status
    generators: list = field(default_factory=list)
    spanning: SpanningFactorization | None = None
    method: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def value(self):
        return {Status.FOUND: True, Status.NOT_FOUND: False}.get(self.status)

    def to_json(self) -> dict:
        out = {"status": self.status.value, "vertex_transitive": self.value,
               "method": self.method, "stats": self.stats,
               "generators": [list(m) for m in self.generators]}
        if self.spanning is not None:
            out["factors"] = [list(s) for s in self.spanning.factorization.factors]
            out["words"] = [list(w) for w in self.spanning.wordset.words]
        return out


def left_translation_maps(sf: SpanningFactorization, root: int = 0) -> list:
    """Maps ``u -> walk(walk(root, [i]), label(u))``, one per factor ``i``."""
    f = sf.factorization
    n = f.n
    labels: list = [None] * n
    for w in sf.wordset.words:
        labels[walk(f, root, w)] = w
    maps = []
    for i in range(f.d):
        start = f.factors[i][root]
        maps.append(tuple(walk(f, start, labels[u]) for u in range(n)))
    return maps


def is_vertex_transitive(g: Digraph, budget: int = 10_000, node_budget: int = DEFAULT_NODE_BUDGET,
                         alternate_orders: bool = False) -> TransitivityVerdict:
    """Decide vertex transitivity, returning automorphisms as evidence.

    A vertex transitive digraph always has a spanning tree-like
    factorization, so an exhausted search with none proves the negative.
    A spanning factorization alone does not prove the positive; the left
    translation maps it induces are checked as automorphisms and, failing
    that, transporters are searched for directly.
    """
    result = find_spanning_factorization(g, budget, alternate_orders, node_budget=node_budget)
    stats = dict(result.stats)
    if result.status is Status.NOT_FOUND:
        return TransitivityVerdict(Status.NOT_FOUND, method="exhausted-spanning-search", stats=stats)
    if result.status is Status.INCONCLUSIVE:
        return TransitivityVerdict(Status.INCONCLUSIVE, method="budget", stats=stats)

    sf = result.spanning
    maps = left_translation_maps(sf)
    if all(check_map_is_automorphism(g, m) for m in maps) and len(orbit([0], maps)) == g.n:
        return TransitivityVerdict(Status.FOUND, maps, sf, "left-translations", stats)
    try:
        transporters = transporter_maps(g, node_budget)
    except SearchBudgetExceeded:
        return TransitivityVerdict(Status.INCONCLUSIVE, spanning=sf, method="budget", stats=stats)
    if None in transporters:
        stats["missing_transporter"] = transporters.index(None)
        return TransitivityVerdict(Status.NOT_FOUND, spanning=sf, method="automorphism-search", stats=stats)
    gens = transporters[1:]
    if not all(check_map_is_automorphism(g, m) for m in gens):
        raise InvariantViolation("transporter search returned a non-automorphism")
    return TransitivityVerdict(Status.FOUND, gens, sf, "transporters", stats)


# -- schedules ---------------------------------------------------------------

@dataclass
class Schedule:
    times: dict  # (word index, position) -> time
    T: int

    def to_json(self, ws: WordSet) -> dict:
        rows = [{"word": i, "pos": j, "factor": ws.words[i][j], "time": t}
                for (i, j), t in sorted(self.times.items())]
        return {"T": self.T, "assignments": rows}


def greedy_schedule(ws: WordSet) -> Schedule:
    """Earliest-slot schedule over words in (length, lexicographic) order."""
    used: dict = {}
    times: dict = {}
    order = sorted(range(len(ws.words)), key=lambda i: word_order(ws.words[i]))
    for i in order:
        prev = 0
        for j, k in enumerate(ws.words[i]):
            taken = used.setdefault(k, set())
            t = prev + 1
            while t in taken:
                t += 1
            taken.add(t)
            times[(i, j)] = t
            prev = t
    return Schedule(times, max(times.values(), default=0))


def verify_schedule(sf: SpanningFactorization, s: Schedule) -> Report:
    """Check the schedule rules, then simulate every time-labelled walk."""
    words = sf.wordset.words
    factors = sf.factorization.factors
    n = sf.factorization.n
    slot: dict = {}
    for i, w in enumerate(words):
        prev = 0
        for j, k in enumerate(w):
            if (i, j) not in s.times:
                return Report.fail(f"occurrence ({i}, {j}) has no time", (i, j))
            t = s.times[(i, j)]
            if t <= prev:
                return Report.fail(f"times in word {i} do not increase at position {j}", (i, j))
            prev = t
            if (k, t) in slot:
                return Report.fail(
                    f"factor {k} gets time {t} twice: {slot[(k, t)]} and {(i, j)}",
                    ("factor_time", k, t, slot[(k, t)], (i, j)))
            slot[(k, t)] = (i, j)

    # An edge of factor k is identified by its tail.
    edge_time: dict = {}
    for v in range(n):
        ends = set()
        for i, w in enumerate(words):
            x = v
            for j, k in enumerate(w):
                key = (k, x, s.times[(i, j)])
                if key in edge_time:
                    return Report.fail(
                        f"edge ({x}, {factors[k][x]}) carries time {key[2]} twice",
                        ("edge_time", (x, factors[k][x]), key[2]))
                edge_time[key] = (v, i)
                x = factors[k][x]
            if w:
                if x == v or x in ends:
                    return Report.fail(f"walks from {v} do not reach distinct vertices", (v, i))
                ends.add(x)
        if len(ends) != n - 1:
            return Report.fail(f"walks from {v} reach {len(ends)} of {n - 1} vertices", (v,))
    return Report(True)


# -- text formats ------------------------------------------------------------

def format_wordset(ws: WordSet) -> str:
    return "".join((" ".join(map(str, w)) if w else "-") + "\n" for w in ws.words)


def parse_wordset(text: str) -> WordSet:
    words = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "-":
            words.append(())
            continue
        try:
            words.append(tuple(int(tok) for tok in line.split()))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    try:
        return WordSet(tuple(words), tree_like=is_prefix_closed(words))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def schedule_to_json(s: Schedule, ws: WordSet) -> str:
    return json.dumps(s.to_json(ws), indent=2)


def schedule_from_json(text: str) -> Schedule:
    data = json.loads(text)
    times = {(a["word"], a["pos"]): a["time"] for a in data["assignments"]}
    return Schedule(times, data["T"])
