"""Regular digraphs on dense integer vertices.

A :class:`Digraph` is a loop-free directed multigraph in which every vertex
has the same in- and out-degree ``d``.  Parallel edges are allowed and count
towards the degree.  Vertices are always ``0..n-1``; any richer labelling
(cosets, words, residues) lives with whichever module produced the graph.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import (
    DegreeMismatch,
    GraphError,
    LoopEdge,
    NotStronglyConnected,
    ParseError,
    SearchBudgetExceeded,
)

Edge = tuple[int, int]
VertexMap = tuple[int, ...]

DEFAULT_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class Digraph:
    n: int
    edges: tuple[Edge, ...]
    d: int
    strongly_connected: bool = True

    @cached_property
    def multiplicity(self) -> Counter:
        return Counter(self.edges)

    @cached_property
    def out(self) -> tuple[tuple[int, ...], ...]:
        heads: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            heads[u].append(v)
        return tuple(tuple(h) for h in heads)

    @cached_property
    def into(self) -> tuple[tuple[int, ...], ...]:
        tails: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            tails[v].append(u)
        return tuple(tuple(sorted(t)) for t in tails)

    @cached_property
    def out_set(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(h) for h in self.out)

    def mult(self, u: int, v: int) -> int:
        return self.multiplicity.get((u, v), 0)

    @property
    def has_parallel_edges(self) -> bool:
        return any(c > 1 for c in self.multiplicity.values())

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))


def validate(edges: Iterable[Sequence[int]], n: int, require_strong: bool = True) -> Digraph:
    """Check ``edges`` and return the regular digraph they describe.

    ``require_strong=False`` admits regular but disconnected edge sets; the
    coset code needs these for the sub-digraphs of a decomposed connection
    set.  Everything user-facing keeps the default.
    """
    if n < 1:
        raise GraphError("need at least one vertex")
    pairs = []
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise LoopEdge(u)
        pairs.append((u, v))
    if not pairs:
        raise GraphError("edge list is empty")
    pairs.sort()

    outdeg = [0] * n
    indeg = [0] * n
    for u, v in pairs:
        outdeg[u] += 1
        indeg[v] += 1
    d = outdeg[0]
    for x in range(n):
        if outdeg[x] != indeg[x] or outdeg[x] != d:
            raise DegreeMismatch(x, indeg[x], outdeg[x], expected=d)

    g = Digraph(n, tuple(pairs), d, strongly_connected=True)
    if require_strong:
        _check_strong(g)
    else:
        object.__setattr__(g, "strongly_connected", _is_strong(g))
    return g


def _reach(adj, start: int) -> list[bool]:
    seen = [False] * len(adj)
    seen[start] = True
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return seen


def _check_strong(g: Digraph) -> None:
    fwd = _reach(g.out, 0)
    for v, ok in enumerate(fwd):
        if not ok:
            raise NotStronglyConnected(0, v)
    back = _reach(g.into, 0)
    for v, ok in enumerate(back):
        if not ok:
            raise NotStronglyConnected(v, 0)


def _is_strong(g: Digraph) -> bool:
    return all(_reach(g.out, 0)) and all(_reach(g.into, 0))


def from_successors(factors: Sequence[Sequence[int]], require_strong: bool = True) -> Digraph:
    """Union of successor permutations as a digraph."""
    n = len(factors[0])
    return validate([(u, f[u]) for f in factors for u in range(n)], n, require_strong)


# -- traversal ---------------------------------------------------------------

def distances_from(g: Digraph, source: int) -> list:
    """Hop counts from ``source``; ``None`` marks unreachable vertices."""
    dist: list = [None] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.out[u]:
            if dist[v] is None:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def eccentricity(g: Digraph, source: int) -> int:
    dist = distances_from(g, source)
    if None in dist:
        raise NotStronglyConnected(source, dist.index(None))
    return max(dist)


def diameter(g: Digraph, sources: Iterable[int] | None = None) -> int:
    if sources is None:
        sources = range(g.n)
    return max(eccentricity(g, s) for s in sources)


def is_symmetric(g: Digraph) -> bool:
    m = g.multiplicity
    return all(m.get((v, u), 0) == c for (u, v), c in m.items())


def underlying_girth(g: Digraph) -> int | None:
    """Shortest cycle length (>= 3) of the underlying simple undirected graph."""
    nbrs = [set() for _ in range(g.n)]
    for u, v in g.edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    best = None
    for s in range(g.n):
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if best is not None and 2 * dist[u] + 1 >= best:
                break
            for v in nbrs[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    queue.append(v)
                elif parent[u] != v:
                    length = dist[u] + dist[v] + 1
                    if best is None or length < best:
                        best = length
    return best


# -- vertex maps and automorphisms -----------------------------------------------

def is_permutation(m: Sequence[int], n: int | None = None) -> bool:
    n = len(m) if n is None else n
    return len(m) == n and sorted(m) == list(range(n))


def compose(a: Sequence[int], b: Sequence[int]) -> VertexMap:
    """``a`` after ``b``: ``compose(a, b)[i] == a[b[i]]``."""
    return tuple(a[x] for x in b)


def invert(m: Sequence[int]) -> VertexMap:
    inv = [0] * len(m)
    for i, x in enumerate(m):
        inv[x] = i
    return tuple(inv)


def check_map_is_automorphism(g: Digraph, m: Sequence[int]) -> bool:
    if not is_permutation(m, g.n):
        return False
    mult = g.multiplicity
    return all(mult.get((m[u], m[v]), 0) == c for (u, v), c in mult.items())


class AutomorphismSearch(NamedTuple):
    maps: list
    truncated: bool
    nodes: int


def _bfs_order(g: Digraph, root: int) -> tuple[list[int], list[int]]:
    order = [root]
    parent = [-1] * g.n
    seen = [False] * g.n
    seen[root] = True
    for u in order:
        for v in g.out[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                order.append(v)
        for v in g.into[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                order.append(v)
    return order, parent


def _iter_automorphisms(g: Digraph, src: int, dst: int, node_budget: int, counter: list,
                        commuting: Sequence[Sequence[int]] = ()) -> Iterator[VertexMap]:
    # Vertices are fixed in BFS order from src; every non-root vertex has an
    # already-fixed neighbour, whose image restricts the candidates.  Maps in
    # ``commuting`` must commute with the result, which pins image[z[x]] to
    # z[image[x]].
    order, parent = _bfs_order(g, src)
    if len(order) < g.n:
        raise GraphError("automorphism search needs a weakly connected digraph")
    n = g.n
    mult = g.multiplicity
    out_set = g.out_set
    in_set = [frozenset(t) for t in g.into]
    key = [(len(g.out[v]), len(g.into[v])) for v in range(n)]

    image = [-1] * n
    used = [False] * n
    zs = [tuple(z) for z in commuting]
    zinvs = [invert(z) for z in zs]

    def forced(x: int):
        for z, zi in zip(zs, zinvs):
            w = zi[x]
            if image[w] >= 0:
                return z[image[w]]
            w = z[x]
            if image[w] >= 0:
                return zi[image[w]]
        return None

    def consistent(x: int, y: int) -> bool:
        if key[x] != key[y]:
            return False
        # edges between x and already-mapped vertices must transfer exactly
        mapped_out = 0
        for w in out_set[x]:
            if image[w] >= 0:
                c = mult[(x, w)]
                if mult.get((y, image[w]), 0) != c:
                    return False
                mapped_out += c
        img_out = 0
        for z in out_set[y]:
            if used[z]:
                img_out += mult[(y, z)]
        if img_out != mapped_out:
            return False
        mapped_in = 0
        for w in in_set[x]:
            if image[w] >= 0:
                c = mult[(w, x)]
                if mult.get((image[w], y), 0) != c:
                    return False
                mapped_in += c
        img_in = 0
        for z in in_set[y]:
            if used[z]:
                img_in += mult[(z, y)]
        return img_in == mapped_in

    def forced_ok(x: int, y: int) -> bool:
        for z, zi in zip(zs, zinvs):
            for w, want in ((zi[x], zi[y]), (z[x], z[y])):
                if image[w] >= 0 and image[w] != want:
                    return False
        return True

    if key[src] != key[dst]:
        return
    image[src] = dst
    used[dst] = True

    def rec(depth: int):
        if depth == n:
            yield tuple(image)
            return
        x = order[depth]
        p = parent[x]
        py = image[p]
        if x in out_set[p]:
            pool = out_set[py]
        else:
            pool = in_set[py]
        pin = forced(x)
        if pin is not None:
            pool = [pin] if pin in pool else []
        for y in sorted(pool):
            if used[y]:
                continue
            counter[0] += 1
            if counter[0] > node_budget:
                raise SearchBudgetExceeded("automorphism search node budget exhausted")
            if consistent(x, y) and (not zs or forced_ok(x, y)):
                image[x] = y
                used[y] = True
                yield from rec(depth + 1)
                image[x] = -1
                used[y] = False

    yield from rec(1)


def stabilizer_automorphisms(
    g: Digraph, fixed: int = 0, limit: int | None = None, node_budget: int = DEFAULT_NODE_BUDGET
) -> AutomorphismSearch:
    """All automorphisms fixing ``fixed``, in deterministic order.

    Stops after ``limit`` maps with ``truncated=True``.  Raises
    :class:`SearchBudgetExceeded` (carrying the maps found so far) when the
    backtracking visits more than ``node_budget`` candidate assignments.
    """
    counter = [0]
    maps: list = []
    it = _iter_automorphisms(g, fixed, fixed, node_budget, counter)
    try:
        for m in it:
            if limit is not None and len(maps) >= limit:
                return AutomorphismSearch(maps, True, counter[0])
            maps.append(m)
    except SearchBudgetExceeded as exc:
        exc.partial = maps
        exc.stats = {"nodes": counter[0]}
        raise
    return AutomorphismSearch(maps, False, counter[0])


def find_automorphism(g: Digraph, src: int, dst: int, node_budget: int = DEFAULT_NODE_BUDGET,
                      commuting: Sequence[Sequence[int]] = ()):
    """First automorphism sending ``src`` to ``dst``, or ``None`` if there is none.

    With ``commuting`` the search is restricted to maps that commute with
    each given permutation.
    """
    counter = [0]
    for m in _iter_automorphisms(g, src, dst, node_budget, counter, commuting):
        return m
    return None


def orbit(points: Iterable[int], maps: Sequence[Sequence[int]]) -> set[int]:
    seen = set(points)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for m in maps:
            y = m[x]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


# -- serialization -----------------------------------------------------------

def format_edge_list(g: Digraph) -> str:
    lines = [f"{g.n} {g.d}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def _int_fields(raw: str, lineno: int, expected: int) -> list[int]:
    fields = raw.split()
    if len(fields) != expected:
        raise ParseError(f"expected {expected} integers, got {len(fields)}", lineno)
    values = []
    col = 1
    for tok in fields:
        col = raw.index(tok, col - 1) + 1
        try:
            values.append(int(tok))
        except ValueError:
            raise ParseError(f"not an integer: {tok!r}", lineno, col) from None
        col += len(tok)
    return values


def parse_edge_list(text: str, require_strong: bool = True) -> Digraph:
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = _int_fields(raw, lineno, 2)
            continue
        u, v = _int_fields(raw, lineno, 2)
        edges.append((u, v))
    if header is None:
        raise ParseError("missing 'n d' header line")
    n, d = header
    g = validate(edges, n, require_strong=require_strong)
    if g.d != d:
        raise ParseError(f"header declares degree {d} but edges have degree {g.d}", 1)
    return g


def read_edge_list(path) -> Digraph:
    with open(path) as fh:
        return parse_edge_list(fh.read())


def write_edge_list(g: Digraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(g))


def to_dot(
    g: Digraph,
    factors: Sequence[Sequence[int]] | None = None,
    colors: Sequence[str] | None = None,
    name: str = "G",
    labels: Sequence[str] | None = None,
) -> str:
    """Graphviz source; with ``factors`` each edge is coloured by its factor."""
    lines = [f"digraph {name} {{"]
    if labels is not None:
        for v in range(g.n):
            lines.append(f'  {v} [label="{labels[v]}"];')
    if factors is None:
        for u, v in g.edges:
            lines.append(f"  {u} -> {v};")
    else:
        palette = list(colors) if colors else [
            "black", "red", "blue", "darkgreen", "orange", "purple", "brown", "cyan"]
        for k, succ in enumerate(factors):
            color = palette[k % len(palette)]
            for u, v in enumerate(succ):
                lines.append(f'  {u} -> {v} [color="{color}", label="{k}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def random_derangement(n: int, rng) -> list[int]:
    while True:
        p = list(range(n))
        rng.shuffle(p)
        if all(p[i] != i for i in range(n)):
            return p


def random_regular(n: int, d: int, rng, shuffle: bool = True, max_tries: int = 1000) -> Digraph:
    """Union of ``d`` random derangements, retried until strongly connected.

    With ``shuffle`` the vertex labels are permuted afterwards so the edge
    order carries no trace of the generating factors.
    """
    if n < 2:
        raise GraphError("need n >= 2")
    for _ in range(max_tries):
        perms = [random_derangement(n, rng) for _ in range(d)]
        edges = [(u, p[u]) for p in perms for u in range(n)]
        if shuffle:
            relabel = list(range(n))
            rng.shuffle(relabel)
            edges = [(relabel[u], relabel[v]) for u, v in edges]
        try:
            return validate(edges, n)
        except NotStronglyConnected:
            continue
    raise GraphError(f"no strongly connected sample after {max_tries} tries")
