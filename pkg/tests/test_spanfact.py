import random

import pytest
from hypothesis import given, settings, strategies as st

from digroupoid.constructions import alegre_graph, hoffman_singleton_graph, kautz_graph
from digroupoid.coset import coset_spanning_factorization, h_closure, petersen_spec
from digroupoid.digraph import check_map_is_automorphism, random_regular, validate
from digroupoid.factorize import one_factorization, verify_factorization
from digroupoid.spanfact import (
    Schedule, Status, WordSet, find_spanning_factorization,
    greedy_schedule, invariant_factorizations, is_spanning, is_vertex_transitive,
    parse_wordset, format_wordset, schedule_from_json, schedule_to_json,
    semiregular_automorphisms, transporter_maps, tree_wordset, verify_schedule, walk,
)

from oracles import automorphisms, nx_automorphism_count, orbit_of_zero, small_cayley_digraphs, spans_directly


words = st.lists(st.integers(0, 2), max_size=8).map(tuple)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), words, words)
def test_walk_composes(seed, w1, w2):
    g = random_regular(9, 3, random.Random(seed))
    f = one_factorization(g)
    for v in range(g.n):
        assert walk(f, v, w1 + w2) == walk(f, walk(f, v, w1), w2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_tree_wordset_is_prefix_closed_bfs(seed):
    rng = random.Random(seed)
    g = random_regular(rng.randint(3, 15), rng.randint(1, 3), rng)
    f = one_factorization(g)
    ws = tree_wordset(f)
    assert len(ws) == g.n and ws.tree_like
    ends = {walk(f, 0, w) for w in ws}
    assert ends == set(range(g.n))
    assert bool(is_spanning(f, ws)) == spans_directly(f.factors, ws.words)


def test_wordset_rejects_bad_sets():
    with pytest.raises(ValueError):
        WordSet(((0,),))
    with pytest.raises(ValueError):
        WordSet(((), (0,), (0,)))
    with pytest.raises(ValueError):
        WordSet(((), (0, 1)), tree_like=True)


def test_is_spanning_witness():
    g = validate([(0, 1), (1, 2), (2, 3), (3, 0)], 4)
    f = one_factorization(g)
    bad = WordSet(((), (0,), (0, 0), (0, 0, 0, 0)))
    report = is_spanning(f, bad)
    assert not report
    v, w1, w2 = report.witness
    assert walk(f, v, w1) == walk(f, v, w2)


def test_cayley_digraphs_are_transitive():
    for name, g in small_cayley_digraphs():
        verdict = is_vertex_transitive(g)
        assert verdict.status is Status.FOUND, name
        assert all(check_map_is_automorphism(g, m) for m in verdict.generators)


def test_transitivity_agrees_with_brute_force():
    rng = random.Random(99)
    for _ in range(40):
        g = random_regular(rng.randint(3, 7), rng.randint(1, 2), rng)
        expected = len(orbit_of_zero(g)) == g.n
        verdict = is_vertex_transitive(g)
        assert verdict.status is not Status.INCONCLUSIVE
        assert verdict.value is expected


def test_spanning_alone_does_not_imply_transitivity():
    rng = random.Random(4)
    hits = 0
    for _ in range(60):
        g = random_regular(6, 2, rng)
        if len(automorphisms(g)) != 1:
            continue
        res = find_spanning_factorization(g)
        if res.status is Status.FOUND:
            hits += 1
            assert is_vertex_transitive(g).status is Status.NOT_FOUND
    assert hits > 0


def test_engineered_non_transitive_graph():
    b = [2, 3, 0, 1, 5, 4]
    g = validate([(i, (i + 1) % 6) for i in range(6)] + [(i, b[i]) for i in range(6)], 6)
    assert len(orbit_of_zero(g)) < 6
    verdict = is_vertex_transitive(g)
    assert verdict.status is Status.NOT_FOUND
    assert verdict.status.exit_code == 1


def test_budget_gives_inconclusive():
    rng = random.Random(1)
    g = random_regular(12, 3, rng)
    res = find_spanning_factorization(g, budget=1, use_automorphisms=False)
    assert res.status in (Status.FOUND, Status.INCONCLUSIVE)
    if res.status is Status.INCONCLUSIVE:
        assert is_vertex_transitive(g, budget=1).status in (Status.INCONCLUSIVE, Status.NOT_FOUND)


def test_schedule_verifies_on_small_cayley_digraphs():
    for name, g in small_cayley_digraphs():
        res = find_spanning_factorization(g)
        sf = res.spanning
        s = greedy_schedule(sf.wordset)
        assert verify_schedule(sf, s), name
        assert s.T >= max(len(w) for w in sf.wordset)


def test_schedule_rejects_double_booking():
    _, g = small_cayley_digraphs()[5]
    sf = find_spanning_factorization(g).spanning
    s = greedy_schedule(sf.wordset)
    times = dict(s.times)
    keys = sorted(times)
    first = next(k for k in keys if sf.wordset.words[k[0]])
    other = next(k for k in keys if k != first and sf.wordset.words[k[0]][k[1]]
                 == sf.wordset.words[first[0]][first[1]])
    times[other] = times[first]
    assert not verify_schedule(sf, Schedule(times, s.T))


def test_hoffman_singleton_spanning_and_schedule():
    g = hoffman_singleton_graph(5)
    res = find_spanning_factorization(g)
    assert res.status is Status.FOUND
    sf = res.spanning
    assert verify_factorization(sf.factorization)
    assert is_spanning(sf.factorization, sf.wordset)
    s = greedy_schedule(sf.wordset)
    assert verify_schedule(sf, s)
    assert s.T == 13
    assert res.stats["symmetric_route"]["group_order"] == 25


def test_hoffman_singleton_is_transitive():
    g = hoffman_singleton_graph(5)
    verdict = is_vertex_transitive(g)
    assert verdict.status is Status.FOUND
    assert all(check_map_is_automorphism(g, m) for m in verdict.generators)


def test_petersen_schedule():
    sf = coset_spanning_factorization(h_closure(petersen_spec()))
    s = greedy_schedule(sf.wordset)
    assert verify_schedule(sf, s)
    assert s.T == 6


def test_alegre_is_not_transitive():
    g, _ = alegre_graph()
    assert nx_automorphism_count(g) == 5
    verdict = is_vertex_transitive(g, alternate_orders=True)
    assert verdict.status is Status.NOT_FOUND
    assert verdict.stats["exhausted"]


def test_kautz_table_factors_are_not_spanning_but_graph_is_transitive():
    g, f = kautz_graph()
    assert not is_spanning(f, tree_wordset(f))
    assert len(orbit_of_zero(g)) == g.n
    assert is_vertex_transitive(g).status is Status.FOUND
    res = find_spanning_factorization(g)
    assert is_spanning(res.spanning.factorization, res.spanning.wordset)


def test_semiregular_group_is_semiregular():
    g = hoffman_singleton_graph(5)
    group = semiregular_automorphisms(g)
    assert len(group) == 25
    for m in group:
        assert check_map_is_automorphism(g, m)
        if m != tuple(range(g.n)):
            assert all(m[x] != x for x in range(g.n))
    f = next(invariant_factorizations(g, group))
    assert verify_factorization(f)
    for m in group:
        for succ in f.factors:
            assert any(all(other[m[x]] == m[succ[x]] for x in range(g.n)) for other in f.factors)


def test_transporters():
    for name, g in small_cayley_digraphs():
        maps = transporter_maps(g)
        assert all(m is not None and m[0] == v and check_map_is_automorphism(g, m)
                   for v, m in enumerate(maps)), name


def test_text_formats_round_trip():
    _, g = small_cayley_digraphs()[10]
    sf = find_spanning_factorization(g).spanning
    assert parse_wordset(format_wordset(sf.wordset)) == sf.wordset
    s = greedy_schedule(sf.wordset)
    back = schedule_from_json(schedule_to_json(s, sf.wordset))
    assert back == s
