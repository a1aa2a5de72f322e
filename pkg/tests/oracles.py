"""Independent brute-force references used by the tests."""

import itertools

import networkx as nx

from digroupoid.coset import closure
from digroupoid.digraph import validate


def automorphisms(g):
    """All vertex permutations preserving the edge multiset (n <= 8)."""
    target = g.multiplicity
    return [perm for perm in itertools.permutations(range(g.n))
            if all(target.get((perm[u], perm[v]), 0) == c for (u, v), c in target.items())]


def orbit_of_zero(g):
    return {m[0] for m in automorphisms(g)}


def nx_automorphism_count(g):
    d = nx.MultiDiGraph()
    d.add_nodes_from(range(g.n))
    d.add_edges_from(g.edges)
    return sum(1 for _ in nx.algorithms.isomorphism.DiGraphMatcher(d, d).isomorphisms_iter())


def cayley_digraph(perms, gens):
    """Right Cayley digraph of the group generated by ``perms``: x -> x*s."""
    G = closure(perms, len(perms[0]))
    index = G.index
    edges = [(i, G.mul(i, index[tuple(s)])) for i in range(G.order) for s in gens]
    return validate(edges, G.order), G


def spans_directly(factors, words):
    n = len(factors[0])
    for v in range(n):
        ends = set()
        for w in words:
            x = v
            for k in w:
                x = factors[k][x]
            ends.add(x)
        if len(ends) != n:
            return False
    return True


def small_cayley_digraphs():
    """Cyclic groups, the Klein group and S3, with one or two generators."""
    out = []
    for n in range(2, 9):
        c = tuple((i + 1) % n for i in range(n))
        out.append((f"C{n}", [c], [c]))
        if n >= 4:
            c2 = tuple((i + 2) % n for i in range(n))
            out.append((f"C{n}<1,2>", [c], [c, c2]))
        if n >= 3:
            cm = tuple((i - 1) % n for i in range(n))
            out.append((f"C{n}<1,-1>", [c], [c, cm]))
    a, b = (1, 0, 3, 2), (2, 3, 0, 1)
    out.append(("V4<a,b>", [a, b], [a, b]))
    r, s = (1, 2, 0), (1, 0, 2)
    t = (0, 2, 1)
    out.append(("S3<r,s>", [r, s], [r, s]))
    out.append(("S3<s,t>", [s, t], [s, t]))
    out.append(("S3<r,t>", [r, t], [r, t]))
    result = []
    for name, perms, gens in out:
        g, _ = cayley_digraph(perms, gens)
        result.append((name, g))
    return result
