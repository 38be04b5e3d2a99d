import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairk.instances import gen_dca_hard, random_finite_metric, random_tree
from fairk.metric_spaces import (
    EdgePoint,
    FiniteMetric,
    InvalidPoint,
    LineMetric,
    MetricError,
    TreeMetric,
    UniformMetric,
    UnsupportedSpace,
    Vertex,
    as_rational,
    diameter,
    distance,
    far_point,
    point_on_path,
    tree_path,
    validate,
)


def path_abc():
    return TreeMetric(["a", "b", "c"], [("a", "b", 3), ("b", "c", 4)])


def star():
    return TreeMetric(["o", "a", "b", "c"], [("o", "a", 1), ("o", "b", 1), ("o", "c", 1)])


def nx_distances(tree):
    g = nx.Graph()
    g.add_nodes_from(tree.vertices)
    for u, v, w in tree.edges:
        g.add_edge(u, v, weight=w)
    return dict(nx.all_pairs_dijkstra_path_length(g))


def random_point(tree, rng):
    if rng.random() < 0.5 or not tree.edges:
        return Vertex(rng.choice(tree.vertices))
    e = rng.randrange(len(tree.edges))
    w = tree.edges[e][2]
    return tree.edge_point(e, w * Fraction(rng.randint(0, 8), 8))


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_rational(0.5)
    assert as_rational("3/4") == Fraction(3, 4)


def test_uniform_distances():
    u = UniformMetric(5)
    assert distance(u, 2, 2) == 0
    assert distance(u, 2, 4) == 1
    assert diameter(UniformMetric(8)) == 1
    assert UniformMetric(3, scale=Fraction(5, 2)).distance(0, 1) == Fraction(5, 2)
    with pytest.raises(InvalidPoint):
        u.distance(0, 5)
    with pytest.raises(MetricError):
        UniformMetric(1)


def test_line_basics():
    line = LineMetric(10)
    assert diameter(line) == 10
    assert distance(line, Fraction(1, 3), 2) == Fraction(5, 3)
    with pytest.raises(InvalidPoint):
        line.check(11)
    with pytest.raises(InvalidPoint):
        line.check(0.5)


def test_tree_distance_simple():
    t = path_abc()
    assert distance(t, Vertex("a"), Vertex("c")) == 7
    assert diameter(t) == 7


def test_edgepoint_canonical():
    t = path_abc()
    assert t.edge_point(0, 0) == Vertex("a")
    assert t.edge_point(0, 3) == Vertex("b")
    assert isinstance(t.edge_point(0, 1), EdgePoint)
    with pytest.raises(InvalidPoint):
        t.check(EdgePoint(0, Fraction(3)))
    with pytest.raises(InvalidPoint):
        t.check(Vertex("zz"))


def test_tree_validation():
    with pytest.raises(MetricError):
        TreeMetric(["a", "b", "c"], [("a", "b", 1)])
    with pytest.raises(MetricError):
        TreeMetric(["a", "b"], [("a", "b", 0)])
    with pytest.raises(MetricError):
        TreeMetric(["a", "b", "c", "d"], [("a", "b", 1), ("b", "a", 1), ("c", "d", 1)])


def test_tree_path_examples():
    t = path_abc()
    a, b, c = Vertex("a"), Vertex("b"), Vertex("c")
    assert tree_path(t, a, a) == [(a, 0)]
    assert tree_path(t, a, c) == [(a, 0), (b, 3), (c, 7)]
    p = t.edge_point(0, 1)
    assert tree_path(t, p, b) == [(p, 0), (b, 2)]


def test_tree_path_needs_tree():
    with pytest.raises(UnsupportedSpace):
        tree_path(UniformMetric(3), 0, 1)


def test_point_on_path_examples():
    t = path_abc()
    a, b, c = Vertex("a"), Vertex("b"), Vertex("c")
    assert point_on_path(t, a, c, a)
    assert point_on_path(t, a, c, b)
    s = star()
    assert not point_on_path(s, Vertex("a"), Vertex("b"), Vertex("c"))
    assert point_on_path(s, Vertex("a"), Vertex("b"), Vertex("o"))


def test_validate_examples():
    assert validate([[0, 1], [1, 0]]) == []
    bad = validate([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert ("triangle", 0, 1, 2) in bad
    assert ("symmetry", 0, 1) in validate([[0, 1], [2, 0]])
    assert ("diagonal", 0) in validate([[1, 1], [1, 0]])
    with pytest.raises(MetricError):
        validate([[0, 1]])
    with pytest.raises(MetricError):
        FiniteMetric([[0, 3, 1], [3, 0, 1], [1, 1, 0]])


def test_finite_metric_closure_is_valid():
    for seed in range(100):
        rng = random.Random(seed)
        m = random_finite_metric(rng, rng.randint(1, 9), den=rng.choice([1, 2, 3]))
        assert validate(m) == []


def test_tree_distance_matches_networkx():
    for seed in range(40):
        rng = random.Random(seed)
        tree = random_tree(rng, rng.randint(1, 50))
        ref = nx_distances(tree)
        for u in tree.vertices:
            for v in tree.vertices:
                assert tree.distance(Vertex(u), Vertex(v)) == ref[u][v]
        assert tree.diameter() == max(max(r.values()) for r in ref.values())


def test_hard_tree_diameter_brute_force():
    inst = gen_dca_hard(4, Fraction(1, 100))
    ref = nx_distances(inst.space)
    assert inst.space.diameter() == max(max(r.values()) for r in ref.values())
    assert inst.space.diameter() == 5 + Fraction(4, 100)


def test_tree_path_reversal_and_metric_axioms():
    for seed in range(60):
        rng = random.Random(seed)
        tree = random_tree(rng, rng.randint(2, 12))
        for _ in range(10):
            p, q, x = (random_point(tree, rng) for _ in range(3))
            fwd = tree.path(p, q)
            back = tree.path(q, p)
            d = tree.distance(p, q)
            assert fwd[0] == (p, 0) and fwd[-1] == (q, d)
            assert [pt for pt, _ in back] == [pt for pt, _ in reversed(fwd)]
            assert [d - c for _, c in back] == [c for _, c in reversed(fwd)]
            assert tree.distance(p, q) == tree.distance(q, p)
            assert tree.distance(p, x) <= tree.distance(p, q) + tree.distance(q, x)
            assert (d == 0) == (p == q)
            for pt, c in fwd:
                assert point_on_path(tree, p, q, pt)
                assert tree.distance(p, pt) == c


def test_along_walks_the_path():
    for seed in range(40):
        rng = random.Random(seed)
        tree = random_tree(rng, rng.randint(2, 10))
        p, q = random_point(tree, rng), random_point(tree, rng)
        d = tree.distance(p, q)
        for j in range(9):
            x = d * Fraction(j, 8)
            y = tree.along(p, q, x)
            assert tree.distance(p, y) == x
            assert tree.distance(y, q) == d - x


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(min_value=0, max_value=20), min_size=3, max_size=3))
def test_line_triangle(pts):
    line = LineMetric(20)
    a, b, c = pts
    assert line.distance(a, c) <= line.distance(a, b) + line.distance(b, c)
    assert line.distance(a, b) == line.distance(b, a)


def test_far_point():
    assert far_point(LineMetric(10), 2) == 10
    assert far_point(LineMetric(10), 7) == 0
    u = UniformMetric(4)
    assert u.distance(1, far_point(u, 1)) == 1
    for seed in range(30):
        rng = random.Random(seed)
        tree = random_tree(rng, rng.randint(2, 15))
        D = tree.diameter()
        a, b = tree.diametral_pair()
        assert tree.distance(a, far_point(tree, a)) == D
        p = random_point(tree, rng)
        assert 2 * tree.distance(p, far_point(tree, p)) >= D
        m = random_finite_metric(rng, rng.randint(2, 7))
        for v in range(m.n):
            assert 2 * m.distance(v, far_point(m, v)) >= m.diameter()
