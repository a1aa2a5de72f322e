"""Named graphs and groupoids, and the cyclic difference-set family.

The difference-set digraphs live on Z_n with n = a*b.  ``U`` is the
subgroup ``{0, a, 2a, ...}`` of order ``b`` and ``0..a-1`` are the coset
representatives.  Given a permutation ``pi`` of ``0..a-1`` and offsets
``v_i`` in ``U``, the factor ``Y`` sends ``i + u`` to ``pi(i) + u + v_i``;
the other factor ``Z`` is ``x -> x + 1``.
"""

from __future__ import annotations

import itertools
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .digraph import Digraph, check_map_is_automorphism, diameter, distances_from, validate
from .errors import FixedPointProduced, NonPrimeModulus, ParseError, SearchBudgetExceeded
from .factorize import Factorization
from .groupoid import FullGroupoid, PartialGroupoid, cayley_graph

KAUTZ_LABELS = ("00", "01", "02", "10", "11", "12")

# Full 6x6 Kautz table, rows and columns in KAUTZ_LABELS order.
_EXAMPLE1 = (
    "00 01 02 10 11 12",
    "01 02 10 12 00 01",
    "02 10 11 01 02 10",
    "10 11 12 00 01 02",
    "11 12 00 02 10 11",
    "12 00 01 11 12 00",
)

# Same carrier with a right identity but no left identity.
_EXAMPLE2 = (
    "00 01 02 11 12 10",
    "01 02 00 10 11 12",
    "02 00 01 12 10 11",
    "10 11 12 01 02 00",
    "11 12 10 00 01 02",
    "12 10 11 02 00 01",
)

KAUTZ_GENERATORS = (1, 3)  # s = 01, t = 10


def _table(rows: Sequence[str]) -> tuple:
    idx = {x: i for i, x in enumerate(KAUTZ_LABELS)}
    return tuple(tuple(idx[x] for x in row.split()) for row in rows)


def example1_table() -> FullGroupoid:
    return FullGroupoid(6, KAUTZ_GENERATORS, _table(_EXAMPLE1), KAUTZ_LABELS)


def kautz_table() -> PartialGroupoid:
    """Generator columns (s = 01, t = 10) of the 6-element table."""
    return example1_table().restrict()


def example2_table() -> FullGroupoid:
    return FullGroupoid(6, KAUTZ_GENERATORS, _table(_EXAMPLE2), KAUTZ_LABELS)


def kautz_graph() -> tuple[Digraph, Factorization]:
    cg = cayley_graph(kautz_table())
    return cg.digraph, cg.factorization


# -- Hoffman-Singleton -------------------------------------------------------

HS_GENERATORS_P5 = ((0, 0, 1), (0, 0, 4), (1, 0, 0), (1, 1, 0), (1, 2, 0), (1, 3, 0), (1, 4, 0))


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, math.isqrt(p) + 1))


def hs_product(u: Sequence[int], w: Sequence[int], p: int, printed_sign: bool = False) -> tuple:
    """``(a,b,c) * (x,y,z) = (a+x, b-bx+y, c + (-1)^a by + 2^a z)``.

    The sign on the ``by`` term follows the left factor's first coordinate;
    ``printed_sign=True`` uses ``(-1)^x`` instead, which does not give a
    symmetric graph.
    """
    a, b, c = u
    x, y, z = w
    sign = -1 if (x if printed_sign else a) % 2 else 1
    return ((a + x) % 2, (b - b * x + y) % p, (c + sign * b * y + (2 ** (a % 2)) * z) % p)


def hs_elements(p: int) -> list:
    return [(a, b, c) for a in range(2) for b in range(p) for c in range(p)]


def hoffman_singleton_groupoid(p: int = 5, generators: Sequence[Sequence[int]] | None = None,
                               printed_sign: bool = False) -> PartialGroupoid:
    """Generator columns ``u * s`` on Z_2 x Z_p x Z_p (``(a,b,c)`` -> a*p*p + b*p + c).

    Only p = 5 has a default generator set.  The columns of generators
    with ``x = 1`` are not permutations, so the table fails right
    cancellation even though its edge multiset is a regular digraph.
    """
    if not _is_prime(p):
        raise NonPrimeModulus(p)
    if generators is None:
        if p != 5:
            raise ValueError("only p = 5 has a default generator set")
        generators = HS_GENERATORS_P5
    els = hs_elements(p)
    idx = {e: i for i, e in enumerate(els)}
    gens = [tuple(int(t) for t in s) for s in generators]
    table = tuple(tuple(idx[hs_product(u, s, p, printed_sign)] for s in gens) for u in els)
    labels = tuple("".join(map(str, e)) for e in els) if p < 10 else None
    return PartialGroupoid(len(els), tuple(idx[s] for s in gens), table, labels)


def hoffman_singleton_graph(p: int = 5, printed_sign: bool = False) -> Digraph:
    return cayley_graph(hoffman_singleton_groupoid(p, printed_sign=printed_sign)).digraph


# -- Alegre ------------------------------------------------------------------

ALEGRE_T_PRINTED = "(0 5 10 15 20)(3 23 18 13 8)(1 17 24 21 12 19 16 7 14 11 2 9 6)"
# The printed long cycle omits two vertices; "22 4" is the only completion
# that gives diameter 4.
ALEGRE_T = "(0 5 10 15 20)(3 23 18 13 8)(1 17 24 21 12 19 16 7 14 11 2 9 6 22 4)"


def parse_cycles(text: str, n: int | None = None) -> list:
    """Cycle notation, with or without commas, to an image list.

    Points that are not listed are fixed.  ``n`` defaults to one more than
    the largest point.
    """
    cycles = []
    for m in re.finditer(r"\(([^()]*)\)", text):
        body = m.group(1).replace(",", " ").split()
        try:
            cycles.append([int(x) for x in body])
        except ValueError:
            raise ParseError(f"bad cycle {m.group(0)!r}") from None
    rest = re.sub(r"\(([^()]*)\)", "", text).strip()
    if rest:
        raise ParseError(f"unexpected text {rest!r} in cycle notation")
    pts = [x for c in cycles for x in c]
    if len(set(pts)) != len(pts):
        raise ParseError("a point appears in two cycles")
    size = n if n is not None else (max(pts) + 1 if pts else 0)
    if any(not 0 <= x < size for x in pts):
        raise ParseError("cycle point out of range")
    perm = list(range(size))
    for c in cycles:
        for i, x in enumerate(c):
            perm[x] = c[(i + 1) % len(c)]
    return perm


def cycle_decomposition(perm: Sequence[int], include_fixed: bool = False) -> list:
    """Cycles, each starting at its smallest point, sorted by that point."""
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = perm[j]
        if len(cyc) > 1 or include_fixed:
            out.append(tuple(cyc))
    return out


def format_cycles(perm: Sequence[int]) -> str:
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cycle_decomposition(perm))


def alegre_graph() -> tuple[Digraph, Factorization]:
    n = 25
    s = tuple((i + 1) % n for i in range(n))
    t = tuple(parse_cycles(ALEGRE_T, n))
    g = validate([(u, f[u]) for f in (s, t) for u in range(n)], n)
    return g, Factorization(g, (s, t))


# -- difference sets ---------------------------------------------------------

@dataclass(frozen=True)
class DiffSetParams:
    n: int
    a: int
    b: int
    pi: tuple[int, ...]
    v: tuple[int, ...]

    def __post_init__(self):
        if self.a < 1 or self.b < 1 or self.n != self.a * self.b:
            raise ValueError(f"need n = a*b, got n={self.n}, a={self.a}, b={self.b}")
        if sorted(self.pi) != list(range(self.a)):
            raise ValueError("pi must be a permutation of 0..a-1")
        if len(self.v) != self.a or any(x % self.a or not 0 <= x < self.n for x in self.v):
            raise ValueError("every v_i must be one of 0, a, ..., (b-1)a")

    @classmethod
    def make(cls, n: int, a: int, b: int, pi, v) -> "DiffSetParams":
        """``pi`` as an image list or a cycle-notation string."""
        if isinstance(pi, str):
            pi = parse_cycles(pi, a)
        return cls(n, a, b, tuple(int(x) for x in pi), tuple(int(x) % n for x in v))

    def U(self) -> list:
        return [k * self.a for k in range(self.b)]


def diffset_Y(p: DiffSetParams, allow_fixed: bool = False) -> tuple:
    succ = [0] * p.n
    for i in range(p.a):
        for u in p.U():
            succ[i + u] = (p.pi[i] + u + p.v[i]) % p.n
    if not allow_fixed:
        for x, y in enumerate(succ):
            if x == y:
                raise FixedPointProduced(x)
    return tuple(succ)


def predicted_cycle_length(p: DiffSetParams, start: int) -> int:
    """``alpha * c``: ``c`` is the length of i's cycle under pi and
    ``alpha`` the additive order of the offset sum along it."""
    i = start % p.a
    c = 1
    j = p.pi[i]
    total = p.v[i]
    while j != i:
        total += p.v[j]
        j = p.pi[j]
        c += 1
    alpha = p.n // math.gcd(total % p.n, p.n)
    return alpha * c


def shift_params(p: DiffSetParams) -> DiffSetParams:
    """Parameters of the same digraph after renaming vertex j as j+1."""
    a, n = p.a, p.n
    pi2 = tuple((p.pi[(i - 1) % a] + 1) % a for i in range(a))
    w = [p.v[(i - 1) % a] for i in range(a)]
    w[0] = (w[0] - a) % n
    k = (p.pi.index(a - 1) + 1) % a
    w[k] = (w[k] + a) % n
    return DiffSetParams(n, a, p.b, pi2, tuple(w))


def diffset_digraph(p: DiffSetParams) -> tuple[Digraph, Factorization]:
    """Digraph with factors ``Z = x+1`` (first) and ``Y``."""
    y = diffset_Y(p)
    z = tuple((i + 1) % p.n for i in range(p.n))
    g = validate([(u, f[u]) for f in (z, y) for u in range(p.n)], p.n, require_strong=False)
    return g, Factorization(g, (z, y))


def translation(p: DiffSetParams, w: int) -> tuple:
    return tuple((x + w) % p.n for x in range(p.n))


def translations_are_automorphisms(p: DiffSetParams) -> bool:
    g, _ = diffset_digraph(p)
    return all(check_map_is_automorphism(g, translation(p, w)) for w in p.U())


def _eccentricity_or_none(succ_z, succ_y, src: int, n: int):
    dist = [-1] * n
    dist[src] = 0
    frontier = [src]
    seen = 1
    d = 0
    while frontier:
        d += 1
        nxt = []
        for x in frontier:
            for y in (succ_z[x], succ_y[x]):
                if dist[y] < 0:
                    dist[y] = d
                    nxt.append(y)
        seen += len(nxt)
        frontier = nxt
    return d - 1 if seen == n else None


def diffset_diameter(p: DiffSetParams) -> int | None:
    """Diameter from sources ``0..a-1`` only; ``None`` if not strongly connected.

    Translations by ``U`` are automorphisms and every vertex is a
    translate of one of these sources.
    """
    y = diffset_Y(p)
    z = [(i + 1) % p.n for i in range(p.n)]
    worst = 0
    for src in range(p.a):
        e = _eccentricity_or_none(z, y, src, p.n)
        if e is None:
            return None
        worst = max(worst, e)
    return worst


def full_diameter(p: DiffSetParams) -> int | None:
    g, _ = diffset_digraph(p)
    if not g.strongly_connected:
        return None
    return diameter(g)


# -- parameter search --------------------------------------------------------

def reduced_space(a: int, b: int) -> int:
    return math.factorial(a - 1) * b ** (a - 1)


def negate_Y(y: Sequence[int]) -> tuple:
    """Y' with ``Y'(x) = -Y^{-1}(-x)``: negate every vertex, then reverse edges."""
    n = len(y)
    inv = [0] * n
    for x, t in enumerate(y):
        inv[t] = x
    return tuple((-inv[(-x) % n]) % n for x in range(n))


@dataclass
class SearchReport:
    n: int
    a: int
    b: int
    examined: int = 0
    skipped_fixed_point: int = 0
    skipped_disconnected: int = 0
    skipped_negation: int = 0
    best_diameter: int | None = None
    argmin: list = field(default_factory=list)
    reduced_space: int = 0
    exhausted: bool = True

    def to_json(self) -> dict:
        return {
            "examined": self.examined,
            "skipped_fixed_point": self.skipped_fixed_point,
            "best_diameter": self.best_diameter,
            "argmin": [{"pi": list(p.pi), "v": list(p.v)} for p in self.argmin],
            "reduced_space": self.reduced_space,
        }


def _candidates(a: int, b: int, reduction: str, pis=None):
    U = [k * a for k in range(b)]
    if reduction == "canonical":
        for rest in pis if pis is not None else itertools.permutations(range(1, a)):
            pi = (0,) + tuple(rest)
            for tail in itertools.product(U, repeat=a - 1):
                yield pi, (U[1 % b],) + tail
    elif reduction == "none":
        for pi in pis if pis is not None else itertools.permutations(range(a)):
            for v in itertools.product(U, repeat=a):
                yield tuple(pi), v
    else:
        raise ValueError(f"unknown reduction {reduction!r}")


def _search_chunk(n, a, b, reduction, pis, negation, target, limit):
    rep = SearchReport(n, a, b)
    seen_neg: set = set()
    for pi, v in _candidates(a, b, reduction, pis):
        if limit is not None and rep.examined >= limit:
            rep.exhausted = False
            break
        rep.examined += 1
        p = DiffSetParams(n, a, b, pi, v)
        try:
            y = diffset_Y(p)
        except FixedPointProduced:
            rep.skipped_fixed_point += 1
            continue
        if negation:
            ny = negate_Y(y)
            if ny in seen_neg and ny != y:
                rep.skipped_negation += 1
                continue
            seen_neg.add(y)
        d = diffset_diameter(p)
        if d is None:
            rep.skipped_disconnected += 1
            continue
        if rep.best_diameter is None or d < rep.best_diameter:
            rep.best_diameter = d
            rep.argmin = [p]
        elif d == rep.best_diameter:
            rep.argmin.append(p)
    return rep


def search_diffsets(n: int, a: int, b: int, target: int | None = None, reduction: str = "canonical",
                    negation: bool = False, workers: int = 1, budget: int | None = None) -> SearchReport:
    """Enumerate difference-set parameters and keep the minimum diameter.

    ``reduction="canonical"`` fixes ``pi(0) = 0`` and ``v_0 = a``, leaving
    ``(a-1)! * b^(a-1)`` candidates; ``"none"`` enumerates everything.
    ``target`` is informational: the search always completes so the argmin
    list is exact.  ``negation`` skips a candidate whose negated twin (same
    diameter) was already examined in the same work item.  Work is split
    by the second entry of ``pi``; results merge deterministically.

    ``budget`` caps the number of candidates; when it runs out
    :class:`SearchBudgetExceeded` carries the partial report.
    """
    if n != a * b:
        raise ValueError("need n = a*b")
    if reduction == "canonical":
        head = list(range(1, a))
        chunks = [[p for p in itertools.permutations(range(1, a)) if p[0] == h] for h in head] if a > 1 else [[()]]
    else:
        chunks = [[p for p in itertools.permutations(range(a)) if p[0] == h] for h in range(a)]
    args = [(n, a, b, reduction, c, negation, target, None) for c in chunks]
    if budget is not None:
        total = reduced_space(a, b) if reduction == "canonical" else math.factorial(a) * b ** a
        if total > budget:
            rep = _search_chunk(n, a, b, reduction, None, negation, target, budget)
            rep.reduced_space = reduced_space(a, b)
            raise SearchBudgetExceeded("difference-set search budget exhausted", partial=rep,
                                       stats=rep.to_json())
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_search_chunk_star, args))
    else:
        parts = [_search_chunk(*x) for x in args]
    out = SearchReport(n, a, b)
    for rep in parts:
        out.examined += rep.examined
        out.skipped_fixed_point += rep.skipped_fixed_point
        out.skipped_disconnected += rep.skipped_disconnected
        out.skipped_negation += rep.skipped_negation
        if rep.best_diameter is None:
            continue
        if out.best_diameter is None or rep.best_diameter < out.best_diameter:
            out.best_diameter = rep.best_diameter
            out.argmin = list(rep.argmin)
        elif rep.best_diameter == out.best_diameter:
            out.argmin.extend(rep.argmin)
    out.argmin.sort(key=lambda p: (p.pi, p.v))
    out.reduced_space = reduced_space(a, b)
    return out


def _search_chunk_star(args):
    return _search_chunk(*args)


def shift_orbit(p: DiffSetParams) -> list:
    out = [p]
    for _ in range(p.a - 1):
        out.append(shift_params(out[-1]))
    return out


# -- params file -------------------------------------------------------------

def parse_params(text: str) -> DiffSetParams:
    """Three lines: ``n a b``, ``pi: <cycles>``, ``v: v0, v1, ...``."""
    lines = [(i, ln.split("#")[0].strip()) for i, ln in enumerate(text.splitlines(), start=1)]
    lines = [(i, ln) for i, ln in lines if ln]
    if len(lines) != 3:
        raise ParseError(f"expected 3 lines, got {len(lines)}")
    (l1, head), (l2, pi_line), (l3, v_line) = lines
    try:
        n, a, b = (int(x) for x in head.split())
    except ValueError:
        raise ParseError("first line must be 'n a b'", l1) from None
    if not pi_line.startswith("pi:"):
        raise ParseError("expected 'pi:'", l2, 1)
    if not v_line.startswith("v:"):
        raise ParseError("expected 'v:'", l3, 1)
    try:
        v = [int(x) for x in v_line[2:].replace(",", " ").split()]
    except ValueError:
        raise ParseError("v entries must be integers", l3) from None
    try:
        return DiffSetParams.make(n, a, b, pi_line[3:].strip() or "()", v)
    except ParseError as exc:
        raise ParseError(str(exc), l2) from None
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def format_params(p: DiffSetParams) -> str:
    cycles = format_cycles(p.pi) or "()"
    return f"{p.n} {p.a} {p.b}\npi: {cycles}\nv: {', '.join(map(str, p.v))}\n"


def distances_profile(g: Digraph) -> list:
    return [max(distances_from(g, v)) for v in range(g.n)]
