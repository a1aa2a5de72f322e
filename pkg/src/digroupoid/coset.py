"""Permutation groups and Cayley coset digraphs.

Permutations are image tuples composed left to right: ``mul(g, h)`` applies
``g`` first, then ``h``, i.e. ``mul(g, h)[i] = h[g[i]]``.  Cosets are left
cosets ``gH``.  A coset digraph has the cosets as vertices and edges
``(gH, gsH)`` for ``s`` in the connection set ``S``; its vertices are
numbered by the smallest element index in each coset, so ``H`` itself is
vertex 0.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .digraph import Digraph, check_map_is_automorphism, validate
from .errors import (
    ClosureBudgetExceeded,
    ConditionViolated,
    InvariantViolation,
    NotIrreducible,
    ParseError,
    RepresentativeCollision,
)
from .factorize import Factorization, iter_one_factorizations, verify_factorization
from .report import Report
from .spanfact import SpanningFactorization, is_spanning, tree_wordset

Perm = tuple[int, ...]

DEFAULT_CLOSURE_CAP = 100_000


@dataclass(frozen=True)
class PermGroup:
    degree: int
    generators: tuple[Perm, ...]
    elements: tuple[Perm, ...]  # elements[0] is the identity

    @cached_property
    def index(self) -> dict:
        return {g: i for i, g in enumerate(self.elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, i: int, j: int) -> int:
        g, h = self.elements[i], self.elements[j]
        return self.index[tuple(h[x] for x in g)]

    def inv(self, i: int) -> int:
        g = self.elements[i]
        out = [0] * self.degree
        for x, y in enumerate(g):
            out[y] = x
        return self.index[tuple(out)]

    def power(self, i: int, e: int) -> int:
        if e < 0:
            i, e = self.inv(i), -e
        r = 0
        for _ in range(e):
            r = self.mul(r, i)
        return r

    def word(self, letters: Sequence[int | tuple[int, int]]) -> int:
        """Element for a word over generator indices (``(k, -1)`` for an inverse)."""
        r = 0
        for letter in letters:
            k, e = letter if isinstance(letter, tuple) else (letter, 1)
            r = self.mul(r, self.power(self.index[self.generators[k]], e))
        return r

    def subgroup(self, gens: Sequence[int]) -> list[int]:
        """Sorted element indices of the subgroup generated by ``gens``."""
        members = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for s in gens:
                y = self.mul(x, s)
                if y not in members:
                    members.add(y)
                    frontier.append(y)
        return sorted(members)


def closure(generators: Sequence[Sequence[int]], degree: int, cap: int = DEFAULT_CLOSURE_CAP) -> PermGroup:
    """Breadth-first closure; elements appear in the order first reached."""
    gens = tuple(tuple(int(x) for x in g) for g in generators)
    for g in gens:
        if sorted(g) != list(range(degree)):
            raise ValueError(f"{g} is not a permutation of 0..{degree - 1}")
    ident = tuple(range(degree))
    elements = [ident]
    seen = {ident}
    for x in elements:
        for s in gens:
            y = tuple(s[i] for i in x)
            if y not in seen:
                if len(elements) >= cap:
                    raise ClosureBudgetExceeded(f"group has more than {cap} elements")
                seen.add(y)
                elements.append(y)
    return PermGroup(degree, gens, tuple(elements))


# -- coset specifications ----------------------------------------------------

@dataclass(frozen=True)
class CosetSpec:
    group: PermGroup
    H: tuple[int, ...]
    S: tuple[int, ...]
    names: tuple[str, ...] | None = None  # one per element of S

    def s_name(self, k: int) -> str:
        return self.names[k] if self.names else f"s{k}"


def make_spec(group: PermGroup, H: Sequence[int], S: Sequence[int],
              names: Sequence[str] | None = None) -> CosetSpec:
    return CosetSpec(group, tuple(sorted(set(H))), tuple(S), tuple(names) if names else None)


def left_coset(group: PermGroup, g: int, H: Sequence[int]) -> frozenset:
    return frozenset(group.mul(g, h) for h in H)


def check_conditions(spec: CosetSpec, need_generation: bool = True) -> dict:
    """Reports for the subgroup check and conditions (i), (ii), (iii)."""
    G, H, S = spec.group, spec.H, spec.S
    hset = set(H)
    out = {}
    sub = Report(True)
    if 0 not in hset:
        sub = Report.fail("H does not contain the identity")
    else:
        for a, b in itertools.product(H, H):
            if G.mul(a, b) not in hset:
                sub = Report.fail(f"H is not closed: {a}*{b}", (a, b))
                break
    out["subgroup"] = sub

    cond1 = Report(True)
    meet = [s for s in S if s in hset]
    if meet:
        cond1 = Report.fail(f"S meets H in element {meet[0]}", ("meet", meet[0]))
    elif need_generation and len(G.subgroup(list(S) + list(H))) != G.order:
        cond1 = Report.fail("S and H do not generate the group", ("generation",))
    out["i"] = cond1

    cond2 = Report(True)
    sh = {G.mul(s, h) for s in S for h in H}
    for h in H:
        for k, s in enumerate(S):
            x = G.mul(h, s)
            if x not in sh:
                cond2 = Report.fail(f"h*s = {x} is not in SH (h={h}, s={spec.s_name(k)})", (h, s))
                break
        if not cond2:
            break
    out["ii"] = cond2

    cond3 = Report(True)
    seen: dict = {}
    for k, s in enumerate(S):
        c = left_coset(G, s, H)
        if c in seen:
            cond3 = Report.fail(f"{spec.s_name(seen[c])} and {spec.s_name(k)} lie in the same coset",
                                (S[seen[c]], s))
            break
        seen[c] = k
    out["iii"] = cond3
    return out


def require_conditions(spec: CosetSpec, conditions=("i", "ii", "iii"), need_generation: bool = True) -> None:
    reports = check_conditions(spec, need_generation)
    if not reports["subgroup"]:
        raise ValueError(reports["subgroup"].problems[0])
    for c in conditions:
        if not reports[c]:
            raise ConditionViolated(c, reports[c].witness, reports[c].problems[0])


def h_closure(spec: CosetSpec) -> CosetSpec:
    """Smallest connection set containing S and closed under ``sH -> hsH``.

    One representative (smallest index) per coset ``hsH``; the result
    satisfies condition (ii) whenever (i) and (iii) held.
    """
    G = spec.group
    chosen: dict = {}
    names = []
    out = []
    for k, s in enumerate(spec.S):
        for h in spec.H:
            x = G.mul(h, s)
            c = left_coset(G, x, spec.H)
            if c not in chosen:
                rep = x if h == 0 else min(c)
                chosen[c] = rep
                out.append(rep)
                names.append(spec.s_name(k) if h == 0 else f"{spec.s_name(k)}^{h}")
    return CosetSpec(G, spec.H, tuple(out), tuple(names))


# -- coset digraphs ----------------------------------------------------------

@dataclass(frozen=True)
class CosetGraph:
    spec: CosetSpec
    coset_index: tuple[int, ...]  # element -> vertex
    cosets: tuple[tuple[int, ...], ...]  # vertex -> sorted member elements
    reps: tuple[int, ...]  # vertex -> representative element
    digraph: Digraph

    def vertex(self, g: int) -> int:
        return self.coset_index[g]


def _cosets(G: PermGroup, H: Sequence[int]):
    index = [-1] * G.order
    cosets = []
    for g in range(G.order):
        if index[g] < 0:
            members = sorted(left_coset(G, g, H))
            for x in members:
                index[x] = len(cosets)
            cosets.append(tuple(members))
    return tuple(index), tuple(cosets)


def build_coset_graph(spec: CosetSpec, reps: Sequence[int] | None = None,
                      require_strong: bool = True) -> CosetGraph:
    """Coset digraph with edges ``(gH, gsH)``.

    Without ``reps`` every condition is enforced; then ``gsH`` over ``s`` in
    ``S`` does not depend on the member ``g`` chosen.  With ``reps`` (one
    element per vertex) only (i) and (iii) are enforced and the edges are
    ``(rH, rsH)`` for the given representatives ``r``; that is the graph
    a representative labelling describes, which need not be regular.
    """
    G = spec.group
    if reps is None:
        require_conditions(spec, ("i", "ii", "iii"), need_generation=require_strong)
    else:
        require_conditions(spec, ("i", "iii"), need_generation=require_strong)
    index, cosets = _cosets(G, spec.H)
    if reps is None:
        reps = tuple(c[0] for c in cosets)
    else:
        reps = tuple(reps)
        if len(reps) != len(cosets) or any(index[r] != v for v, r in enumerate(reps)):
            raise ValueError("need one representative inside each coset, in vertex order")
    edges = [(v, index[G.mul(r, s)]) for v, r in enumerate(reps) for s in spec.S]
    g = validate(edges, len(cosets), require_strong=require_strong)
    return CosetGraph(spec, index, cosets, reps, g)


def rep_factor(cg: CosetGraph, k: int, reps: Sequence[int] | None = None) -> tuple[int, ...]:
    """Successor map ``rH -> r s_k H`` for representatives ``reps``.

    Raises :class:`RepresentativeCollision` when two cosets land on the
    same head, i.e. the labels do not give a 1-factor.
    """
    G = cg.spec.group
    reps = tuple(reps) if reps is not None else cg.reps
    s = cg.spec.S[k]
    succ = []
    seen: dict = {}
    for v, r in enumerate(reps):
        head = cg.coset_index[G.mul(r, s)]
        if head in seen:
            raise RepresentativeCollision(seen[head], v, head, cg.spec.s_name(k))
        seen[head] = v
        succ.append(head)
    return tuple(succ)


def coset_map(cg: CosetGraph, x: int) -> tuple[int, ...]:
    """Vertex map ``gH -> xgH`` induced by left multiplication."""
    G = cg.spec.group
    return tuple(cg.coset_index[G.mul(x, c[0])] for c in cg.cosets)


def random_coset_automorphism_check(cg: CosetGraph, rng: random.Random, trials: int = 10) -> bool:
    G = cg.spec.group
    return all(check_map_is_automorphism(cg.digraph, coset_map(cg, rng.randrange(G.order)))
               for _ in range(trials))


# -- irreducibility ----------------------------------------------------------

def _s_classes(spec: CosetSpec) -> list[list[int]]:
    G, H = spec.group, spec.H
    cos = [left_coset(G, s, H) for s in spec.S]
    parts: list[list[int]] = []
    placed = [False] * len(spec.S)
    for k in range(len(spec.S)):
        if placed[k]:
            continue
        reach = {left_coset(G, G.mul(h, spec.S[k]), H) for h in H}
        part = [j for j in range(len(spec.S)) if cos[j] in reach]
        for j in part:
            placed[j] = True
        parts.append(part)
    return parts


def is_irreducible(spec: CosetSpec) -> bool:
    return len(_s_classes(spec)) <= 1


def is_edge_transitive(spec: CosetSpec) -> bool:
    return is_irreducible(spec)


def decompose_S(spec: CosetSpec) -> list[CosetSpec]:
    """Split S into the H-orbits of its cosets; each part is irreducible."""
    out = []
    for part in _s_classes(spec):
        names = tuple(spec.s_name(k) for k in part) if spec.names else tuple(f"s{k}" for k in part)
        out.append(CosetSpec(spec.group, spec.H, tuple(spec.S[k] for k in part), names))
    return out


# -- 1-factorizations from cosets --------------------------------------------

@dataclass(frozen=True)
class CosetFactors:
    reps: tuple[int, ...]  # vertex -> representative element
    factors: dict  # element of S -> successor tuple


def theorem1_factors(spec: CosetSpec, D: Sequence[int], r: int | None = None,
                     graph: CosetGraph | None = None) -> CosetFactors:
    """Factors ``F_s`` built from one 1-factor ``D`` of an irreducible part.

    Representatives are adjusted so that ``D = {g(H, rH)}``; for
    ``s = hr`` the factor ``F_s`` is ``{hg(H, rH)}``.  The result is checked
    to be a 1-factorization and :class:`InvariantViolation` is raised if it
    is not (the construction does not guarantee it for every ``D``).
    """
    if not is_irreducible(spec):
        raise NotIrreducible("connection set splits into several H-orbits")
    G, H = spec.group, spec.H
    cg = graph or build_coset_graph(spec, require_strong=False)
    r = spec.S[0] if r is None else r
    rcos = left_coset(G, r, H)
    h_to_r = {}  # s -> h with sH = h r H
    for s in spec.S:
        scos = left_coset(G, s, H)
        h_to_r[s] = next(h for h in H if left_coset(G, G.mul(h, r), H) == scos)

    reps = []
    for v, c in enumerate(cg.cosets):
        f = c[0]
        head = D[v]
        s = next((s for s in spec.S if cg.coset_index[G.mul(f, s)] == head), None)
        if s is None:
            raise ValueError(f"D edge ({v}, {head}) is not an edge of the coset digraph")
        g = G.mul(f, h_to_r[s])
        if cg.coset_index[G.mul(g, r)] != head:
            raise InvariantViolation("representative adjustment failed")
        reps.append(g)
    del rcos

    factors = {}
    for s in spec.S:
        h = h_to_r[s]
        succ = [0] * len(reps)
        for g in reps:
            hg = G.mul(h, g)
            succ[cg.coset_index[hg]] = cg.coset_index[G.mul(hg, r)]
        factors[s] = tuple(succ)
    f = Factorization(cg.digraph, tuple(factors[s] for s in spec.S))
    report = verify_factorization(f)
    if not report:
        raise InvariantViolation(f"factors from this D are not a 1-factorization: {report.problems[0]}")
    return CosetFactors(tuple(reps), factors)


def _component_factor_candidates(cg: CosetGraph, limit: int):
    """1-factors of ``cg``'s digraph, first one from each of the first
    ``limit`` factorizations, then the remaining factors."""
    seen = set()
    for f in itertools.islice(iter_one_factorizations(cg.digraph), limit):
        for succ in f.factors:
            if succ not in seen:
                seen.add(succ)
                yield succ


def coset_factorization(spec: CosetSpec, candidate_limit: int = 200) -> Factorization:
    """Union of conjugated factorizations over the irreducible parts of S.

    Factors are ordered like ``spec.S``.  For each part the first 1-factor
    ``D`` that yields a verified factorization is used.
    """
    whole = build_coset_graph(spec)
    by_s = {}
    for part in decompose_S(spec):
        cg = build_coset_graph(part, require_strong=False)
        for D in _component_factor_candidates(cg, candidate_limit):
            try:
                res = theorem1_factors(part, D, graph=cg)
            except InvariantViolation:
                continue
            by_s.update(res.factors)
            break
        else:
            raise InvariantViolation("no 1-factor of this part gives a 1-factorization")
    f = Factorization(whole.digraph, tuple(by_s[s] for s in spec.S))
    report = verify_factorization(f)
    if not report:
        raise InvariantViolation(f"union of part factorizations is invalid: {report.problems[0]}")
    return f


def _part_factorizations(spec: CosetSpec, candidate_limit: int):
    out = []
    for part in decompose_S(spec):
        cg = build_coset_graph(part, require_strong=False)
        found = []
        for D in _component_factor_candidates(cg, candidate_limit):
            try:
                found.append(theorem1_factors(part, D, graph=cg).factors)
            except InvariantViolation:
                continue
        out.append(found)
    return out


def coset_spanning_factorization(spec: CosetSpec, candidate_limit: int = 200) -> SpanningFactorization:
    """Coset factorization whose BFS word tree from ``H`` is spanning.

    Tries the conjugated factorizations of each part in turn; raises
    :class:`InvariantViolation` if no combination is spanning.
    """
    whole = build_coset_graph(spec)
    options = _part_factorizations(spec, candidate_limit)
    for combo in itertools.product(*options):
        by_s = {}
        for factors in combo:
            by_s.update(factors)
        f = Factorization(whole.digraph, tuple(by_s[s] for s in spec.S))
        if not verify_factorization(f):
            continue
        ws = tree_wordset(f, 0)
        if is_spanning(f, ws):
            return SpanningFactorization(f, ws)
    raise InvariantViolation("no coset factorization of this spec has a spanning BFS tree")


# -- the Petersen example ----------------------------------------------------

def petersen_group() -> tuple[PermGroup, int, int]:
    """Order-20 group ``<alpha, theta>`` as ``x -> 2x`` and ``x -> x+1`` on Z_5.

    Returns ``(group, alpha, theta)`` as element indices.
    """
    alpha = tuple(2 * x % 5 for x in range(5))
    theta = tuple((x + 1) % 5 for x in range(5))
    G = closure([alpha, theta], 5)
    return G, G.index[alpha], G.index[theta]


def petersen_spec() -> CosetSpec:
    G, a, t = petersen_group()
    H = (0, G.power(a, 2))
    return make_spec(G, H, [t, a], ["theta", "alpha"])


def petersen_reps(flawed: Sequence[int] = ()) -> tuple[int, ...]:
    """Representatives ``theta^i`` and ``alpha theta^i`` in vertex order.

    For each ``i`` in ``flawed`` the coset of ``theta^i alpha^2 theta^-1``
    takes that element as its representative instead.
    """
    G, a, t = petersen_group()
    spec = petersen_spec()
    index, cosets = _cosets(G, spec.H)
    reps = [None] * len(cosets)
    for i in range(5):
        for x in (G.power(t, i), G.mul(a, G.power(t, i))):
            reps[index[x]] = x
    for i in flawed:
        x = G.mul(G.mul(G.power(t, i), G.power(a, 2)), G.inv(t))
        reps[index[x]] = x
    return tuple(reps)


# -- file format -------------------------------------------------------------

def _parse_word(token: str, ngens: int, lineno: int):
    letters = []
    for part in token.split():
        if part in ("e", "-"):
            continue
        inverse = part.endswith("'")
        core = part[:-1] if inverse else part
        try:
            k = int(core)
        except ValueError:
            raise ParseError(f"bad generator {part!r}", lineno) from None
        if not 0 <= k < ngens:
            raise ParseError(f"generator {k} out of range", lineno)
        letters.append((k, -1 if inverse else 1))
    return letters


def parse_group_spec(text: str, cap: int = DEFAULT_CLOSURE_CAP) -> CosetSpec:
    """Read a coset spec.

    Line 1 is the degree; then one permutation (image list) per line.
    Lines ``H: w1, w2`` and ``S: w1, w2`` give words over generator indices
    (space separated, ``k'`` for an inverse, ``e`` for the identity); H is
    the subgroup they generate.
    """
    lines = [(i, ln.split("#")[0].strip()) for i, ln in enumerate(text.splitlines(), start=1)]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise ParseError("empty group spec")
    try:
        degree = int(lines[0][1])
    except ValueError:
        raise ParseError("first line must be the degree", lines[0][0]) from None
    gens = []
    h_words = s_words = None
    for lineno, ln in lines[1:]:
        if ln.startswith(("H:", "S:")):
            words = [w for w in ln[2:].split(",") if w.strip()]
            if ln[0] == "H":
                h_words = (lineno, words)
            else:
                s_words = (lineno, words)
            continue
        try:
            perm = [int(x) for x in ln.split()]
        except ValueError:
            raise ParseError("expected a permutation image list", lineno) from None
        if sorted(perm) != list(range(degree)):
            raise ParseError(f"not a permutation of 0..{degree - 1}", lineno)
        gens.append(perm)
    if s_words is None:
        raise ParseError("missing S: line")
    G = closure(gens, degree, cap)
    h_gens = []
    if h_words is not None:
        h_gens = [G.word(_parse_word(w, len(gens), h_words[0])) for w in h_words[1]]
    H = G.subgroup(h_gens)
    S = [G.word(_parse_word(w, len(gens), s_words[0])) for w in s_words[1]]
    names = [w.strip() for w in s_words[1]]
    return make_spec(G, H, S, names)


def format_group_spec(spec: CosetSpec) -> str:
    G = spec.group
    lines = [str(G.degree)]
    lines += [" ".join(map(str, g)) for g in G.generators]
    lines.append("H: " + ", ".join(_element_word(G, h) for h in spec.H if h != 0))
    lines.append("S: " + ", ".join(_element_word(G, s) for s in spec.S))
    return "\n".join(lines) + "\n"


def _element_word(G: PermGroup, x: int) -> str:
    # shortest word by breadth-first search over generators
    if x == 0:
        return "e"
    prev = {0: None}
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for k, g in enumerate(G.generators):
                v = G.mul(u, G.index[g])
                if v not in prev:
                    prev[v] = (u, k)
                    if v == x:
                        word = []
                        while prev[v] is not None:
                            v, k2 = prev[v]
                            word.append(str(k2))
                        return " ".join(reversed(word))
                    nxt.append(v)
        frontier = nxt
    raise InvariantViolation("element not reachable from generators")
