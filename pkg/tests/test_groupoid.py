import random

import pytest
from hypothesis import given, settings, strategies as st

from digroupoid.constructions import (
    KAUTZ_LABELS, example1_table, example2_table, kautz_graph, kautz_table,
)
from digroupoid.digraph import random_regular, validate
from digroupoid.errors import NotGenerated, ParseError
from digroupoid.factorize import one_factorization
from digroupoid.groupoid import (
    AxiomViolation, FullGroupoid, PartialGroupoid, canonical_extension, cayley_graph,
    check_axioms, format_table_csv, full_with_generators, groupoid_from_factorization,
    has_left_cancellation, left_cancellation_witness, make_partial, parse_table_csv,
    tree_like_labeling, vt_check_via_groupoid,
)
from digroupoid.spanfact import Status, is_spanning, walk

from oracles import orbit_of_zero, small_cayley_digraphs


def random_partial_groupoid(rng, max_n=8, max_d=3):
    """Fixed-point-free permutation columns generating every element from e."""
    while True:
        n = rng.randint(2, max_n)
        d = rng.randint(1, max_d)
        cols = []
        for _ in range(d):
            while True:
                p = list(range(n))
                rng.shuffle(p)
                if all(p[x] != x for x in range(n)):
                    break
            cols.append(p)
        seen, stack = {0}, [0]
        while stack:
            u = stack.pop()
            for c in cols:
                if c[u] not in seen:
                    seen.add(c[u])
                    stack.append(c[u])
        if len(seen) == n:
            table = [[c[u] for c in cols] for u in range(n)]
            return make_partial(table, [c[0] for c in cols])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_extension_bridge(seed):
    pg = random_partial_groupoid(random.Random(seed))
    assert check_axioms(pg).valid
    lab = tree_like_labeling(pg)
    fg = canonical_extension(pg)
    for w in range(pg.n):
        col = sorted(fg.table[u][w] for u in range(pg.n))
        assert col == list(range(pg.n))
        for u in range(pg.n):
            assert fg.table[u][w] == walk(pg.columns, u, lab.labels[w])
    assert fg.table[0] == tuple(range(pg.n))
    assert has_left_cancellation(fg) == bool(is_spanning(pg.columns, lab.wordset()))


def test_example1_is_a_canonical_extension():
    labels = [(), (0,), (0, 0), (1,), (1, 0), (1, 0, 0)]
    assert canonical_extension(kautz_table(), labels).table == example1_table().table
    assert canonical_extension(kautz_table()).table != example1_table().table


def test_example_tables():
    assert check_axioms(example1_table()).passed() == {1: True, 2: True, 3: True, 4: True}
    assert not has_left_cancellation(example1_table())
    u, w1, w2 = left_cancellation_witness(example1_table())
    assert w1 != w2 and example1_table().table[u][w1] == example1_table().table[u][w2]
    bad = check_axioms(example2_table())
    assert [k for k, ok in bad.passed().items() if not ok] == [1]
    assert not bad.valid


def test_kautz_round_trip():
    pg = kautz_table()
    cg = cayley_graph(pg)
    lg = groupoid_from_factorization(cg.factorization)
    assert lg.groupoid.table == pg.table
    assert lg.groupoid.gen_ids == pg.gen_ids
    assert lg.labels == tree_like_labeling(pg).labels


def test_round_trip_with_other_root():
    g = random_regular(7, 2, random.Random(8))
    f = one_factorization(g)
    lg = groupoid_from_factorization(f, root=3)
    assert lg.vertex_of[0] == 3
    back = cayley_graph(lg.groupoid)
    relabeled = sorted((lg.vertex_of[u], lg.vertex_of[v]) for u, v in back.digraph.edges)
    assert relabeled == sorted(g.edges)


def test_axiom_violations_are_reported():
    pg = make_partial([[1], [1], [0]], [1])
    report = check_axioms(pg)
    assert not report.passed()[2] and not report.passed()[3]
    with pytest.raises(AxiomViolation):
        pg.require_valid()
    assert report.problems()


def test_axiom_four_is_optional():
    pg = make_partial([[1, 1], [0, 0]], [1, 1])
    report = check_axioms(pg)
    assert report.valid and not report.passed()[4]


def test_unreachable_element():
    pg = make_partial([[1], [0], [3], [2]], [1])
    with pytest.raises(NotGenerated):
        tree_like_labeling(pg)


def test_extension_rejects_bad_labels():
    with pytest.raises(ValueError):
        canonical_extension(kautz_table(), [(), (0,), (0, 0), (1,), (1, 0), (1, 1, 0)])


def test_csv_round_trip():
    pg = kautz_table()
    back = parse_table_csv(format_table_csv(pg))
    assert isinstance(back, PartialGroupoid)
    assert back.table == pg.table and back.gen_ids == pg.gen_ids and back.labels == KAUTZ_LABELS
    fg = example1_table()
    full = parse_table_csv(format_table_csv(fg))
    assert isinstance(full, FullGroupoid) and full.gen_ids == ()
    assert full_with_generators(full, fg.gen_ids) == fg


@pytest.mark.parametrize("text", ["", ",a\ne,x\n", ",s\ne,e,e\n", ",s\ne,e\ne,e\n"])
def test_csv_errors(text):
    with pytest.raises(ParseError):
        parse_table_csv(text)


def test_groupoid_vt_check_agrees_with_oracle():
    for name, g in small_cayley_digraphs():
        verdict = vt_check_via_groupoid(g)
        assert verdict.status is Status.FOUND, name
        assert has_left_cancellation(verdict.groupoid)
    b = [2, 3, 0, 1, 5, 4]
    g = validate([(i, (i + 1) % 6) for i in range(6)] + [(i, b[i]) for i in range(6)], 6)
    assert len(orbit_of_zero(g)) < 6
    assert vt_check_via_groupoid(g).status is Status.NOT_FOUND
    assert vt_check_via_groupoid(g, refine=True).status is Status.NOT_FOUND


def test_kautz_graph_is_cayley_of_its_table():
    g, f = kautz_graph()
    assert f is not None and g.n == 6 and g.d == 2
