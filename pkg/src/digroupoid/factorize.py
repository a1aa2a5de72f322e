"""1-factorizations of regular digraphs.

A 1-factor is a fixed-point-free successor permutation whose edges all lie in
the host; a factorization splits the host's edge multiset into ``d`` of them.
Existence comes from splitting the bipartite double cover (left copy ``u'``,
right copy ``v''`` per edge ``(u, v)``) into perfect matchings.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from .digraph import DEFAULT_NODE_BUDGET, Digraph
from .errors import InvariantViolation, ParseError, SearchBudgetExceeded
from .report import Report

OneFactor = tuple[int, ...]


@dataclass(frozen=True)
class Factorization:
    host: Digraph
    factors: tuple[OneFactor, ...]

    @property
    def d(self) -> int:
        return len(self.factors)

    @property
    def n(self) -> int:
        return self.host.n

    def normalized(self) -> "Factorization":
        return Factorization(self.host, tuple(sorted(self.factors)))


def make_factorization(host: Digraph, factors: Sequence[Sequence[int]]) -> Factorization:
    return Factorization(host, tuple(tuple(int(x) for x in f) for f in factors))


# -- construction ------------------------------------------------------------

def _perfect_matching(n: int, cap: Counter, adj: list[list[int]]) -> list[int] | None:
    """Augmenting-path matching on the double cover restricted to ``cap > 0``.

    Free left vertices are scanned in index order and neighbours in sorted
    order, so the result is deterministic.
    """
    match_right = [-1] * n
    match_left = [-1] * n
    for root in range(n):
        prev_left = {root: None}
        via = {}
        queue = deque([root])
        end = -1
        while queue and end < 0:
            x = queue.popleft()
            for y in adj[x]:
                if cap[(x, y)] <= 0 or y in via:
                    continue
                via[y] = x
                if match_right[y] < 0:
                    end = y
                    break
                z = match_right[y]
                if z not in prev_left:
                    prev_left[z] = y
                    queue.append(z)
        if end < 0:
            return None
        y = end
        while y is not None:
            x = via[y]
            next_y = match_left[x] if x != root else None
            match_right[y] = x
            match_left[x] = y
            y = next_y
    return match_left


def one_factorization(g: Digraph) -> Factorization:
    """Split ``g`` into ``d`` 1-factors by repeated perfect matching."""
    cap = Counter(g.multiplicity)
    adj = [sorted(set(heads)) for heads in g.out]
    factors = []
    for _ in range(g.d):
        succ = _perfect_matching(g.n, cap, adj)
        if succ is None:
            raise InvariantViolation("regular bipartite double cover without a perfect matching")
        for u, v in enumerate(succ):
            cap[(u, v)] -= 1
        factors.append(tuple(succ))
    f = Factorization(g, tuple(factors))
    report = verify_factorization(f)
    if not report:
        raise InvariantViolation(f"one_factorization produced an invalid split: {report.problems}")
    return f


# -- enumeration -------------------------------------------------------------

class FactorizationEnumeration(NamedTuple):
    factorizations: list
    exhausted: bool
    nodes: int


def iter_one_factorizations(
    g: Digraph, node_budget: int | None = None, counter: list | None = None
) -> Iterator[Factorization]:
    """Yield every 1-factorization of ``g`` once, factors sorted.

    Backtracks over the assignment of each vertex's out-edges to factor
    slots.  Vertex 0's out-edges go to slots in sorted order, which removes
    the relabelling symmetry of the factors; remaining duplicates (from
    parallel edges at vertex 0) are dropped by a seen-set.
    """
    n, d = g.n, g.d
    counter = counter if counter is not None else [0]
    budget = node_budget if node_budget is not None else float("inf")
    used = [[False] * n for _ in range(d)]
    succ = [[-1] * n for _ in range(d)]
    remaining = [Counter(heads) for heads in g.out]
    seen: set = set()

    first = sorted(g.out[0])
    for k, v in enumerate(first):
        succ[k][0] = v
        used[k][v] = True
    remaining[0] = Counter()

    def rec(u: int, k: int):
        if u == n:
            key = tuple(sorted(tuple(s) for s in succ))
            if key not in seen:
                seen.add(key)
                yield Factorization(g, key)
            return
        if k == d:
            yield from rec(u + 1, 0)
            return
        rem = remaining[u]
        used_k = used[k]
        for v in sorted(rem):
            if rem[v] <= 0 or used_k[v]:
                continue
            counter[0] += 1
            if counter[0] > budget:
                raise SearchBudgetExceeded("factorization enumeration node budget exhausted")
            rem[v] -= 1
            used_k[v] = True
            succ[k][u] = v
            yield from rec(u, k + 1)
            succ[k][u] = -1
            used_k[v] = False
            rem[v] += 1

    if n == 1:
        return
    yield from rec(1, 0)


def enumerate_one_factorizations(
    g: Digraph, budget: int | None = None, node_budget: int | None = DEFAULT_NODE_BUDGET
) -> FactorizationEnumeration:
    """Collect up to ``budget`` factorizations.

    ``exhausted`` is True when the enumeration finished, i.e. the list is
    every factorization of ``g``.  Running out of ``node_budget`` raises
    :class:`SearchBudgetExceeded` with the collected list as ``partial``.
    """
    counter = [0]
    found: list = []
    it = iter_one_factorizations(g, node_budget, counter)
    try:
        for f in it:
            if budget is not None and len(found) >= budget:
                return FactorizationEnumeration(found, False, counter[0])
            found.append(f)
    except SearchBudgetExceeded as exc:
        exc.partial = found
        exc.stats = {"nodes": counter[0]}
        raise
    return FactorizationEnumeration(found, True, counter[0])


# -- verification ------------------------------------------------------------

def verify_factorization(f: Factorization) -> Report:
    g = f.host
    problems = []
    witness = None
    if len(f.factors) != g.d:
        problems.append(f"{len(f.factors)} factors for a degree-{g.d} host")
    usage: Counter = Counter()
    for k, succ in enumerate(f.factors):
        if len(succ) != g.n:
            problems.append(f"factor {k} has length {len(succ)}, expected {g.n}")
            continue
        if sorted(succ) != list(range(g.n)):
            dup = next(v for v, c in Counter(succ).items() if c > 1) if len(set(succ)) < g.n else None
            problems.append(f"factor {k} is not a permutation (repeated head {dup})")
            witness = witness or ("not_permutation", k, dup)
        for u, v in enumerate(succ):
            if u == v:
                problems.append(f"factor {k} fixes vertex {u}")
                witness = witness or ("fixed_point", k, u)
            usage[(u, v)] += 1
    mult = g.multiplicity
    for e, c in sorted(usage.items()):
        have = mult.get(e, 0)
        if have == 0:
            problems.append(f"edge {e} is not in the host")
            witness = witness or ("not_in_host", e)
        elif c > have:
            problems.append(f"edge {e} used {c} times, host has {have}")
            witness = witness or ("overused", e, c, have)
    if not problems:
        for e, c in mult.items():
            if usage.get(e, 0) != c:
                problems.append(f"edge {e} covered {usage.get(e, 0)} times, host has {c}")
                witness = witness or ("uncovered", e)
    return Report(not problems, problems, witness)


# -- text format -------------------------------------------------------------

def format_factorization(f: Factorization) -> str:
    return "".join(" ".join(map(str, succ)) + "\n" for succ in f.factors)


def parse_factorization(text: str, host: Digraph) -> Factorization:
    factors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            succ = tuple(int(tok) for tok in line.split())
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if len(succ) != host.n:
            raise ParseError(f"expected {host.n} successor images, got {len(succ)}", lineno)
        factors.append(succ)
    return Factorization(host, tuple(factors))
