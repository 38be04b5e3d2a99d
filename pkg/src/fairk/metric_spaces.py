"""Exact metric spaces: line, tree, uniform and general finite metrics.

All lengths are :class:`fractions.Fraction` (or ints, which compare equal).
Points are plain hashable values:

* ``UniformMetric`` / ``FiniteMetric``: integer indices ``0..n-1``.
* ``LineMetric``: a rational coordinate in ``[0, L]``.
* ``TreeMetric``: :class:`Vertex` or :class:`EdgePoint`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Hashable, Iterable, Sequence


class MetricError(ValueError):
    pass


class InvalidPoint(MetricError):
    pass


class UnsupportedSpace(MetricError):
    pass


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot use {x!r} as an exact rational (floats are rejected)")


@dataclass(frozen=True, order=True)
class Vertex:
    id: Hashable

    def __repr__(self):
        return f"Vertex({self.id!r})"


@dataclass(frozen=True, order=True)
class EdgePoint:
    """Interior point of tree edge ``edge`` at ``offset`` from the edge's ``u`` end."""

    edge: int
    offset: Fraction

    def __repr__(self):
        return f"EdgePoint({self.edge}, {self.offset})"


class MetricSpace:
    kind = "abstract"

    def distance(self, p, q) -> Fraction:
        raise NotImplementedError

    def diameter(self) -> Fraction:
        raise NotImplementedError

    def check(self, p):
        """Raise :class:`InvalidPoint` unless ``p`` is a point of this space."""
        raise NotImplementedError

    def sites(self):
        """Finite list of designated points, or None for a continuum."""
        return None

    def is_site(self, p) -> bool:
        sites = self.sites()
        return sites is None or p in set(sites)


class UniformMetric(MetricSpace):
    kind = "uniform"

    def __init__(self, n: int, scale=1):
        if n < 2:
            raise MetricError("uniform metric needs n >= 2 points")
        self.n = int(n)
        self.scale = as_rational(scale)
        if self.scale <= 0:
            raise MetricError("scale must be positive")

    def check(self, p):
        if isinstance(p, bool) or not isinstance(p, int) or not 0 <= p < self.n:
            raise InvalidPoint(f"{p!r} is not a point of uniform({self.n})")

    def distance(self, p, q):
        self.check(p)
        self.check(q)
        return Fraction(0) if p == q else self.scale

    def diameter(self):
        return self.scale

    def sites(self):
        return list(range(self.n))

    def __eq__(self, other):
        return isinstance(other, UniformMetric) and (self.n, self.scale) == (other.n, other.scale)

    def __repr__(self):
        return f"UniformMetric(n={self.n}, scale={self.scale})"


class FiniteMetric(MetricSpace):
    kind = "finite"

    def __init__(self, matrix: Sequence[Sequence], check: bool = True):
        rows = [[as_rational(x) for x in row] for row in matrix]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise MetricError("distance matrix must be square")
        self.n = n
        self.matrix = tuple(tuple(r) for r in rows)
        if check:
            problems = validate(self)
            if problems:
                raise MetricError(f"not a metric: {problems[:5]}")

    def check(self, p):
        if isinstance(p, bool) or not isinstance(p, int) or not 0 <= p < self.n:
            raise InvalidPoint(f"{p!r} is not a point of finite({self.n})")

    def distance(self, p, q):
        self.check(p)
        self.check(q)
        return self.matrix[p][q]

    def diameter(self):
        return max((x for row in self.matrix for x in row), default=Fraction(0))

    def sites(self):
        return list(range(self.n))

    def __eq__(self, other):
        return isinstance(other, FiniteMetric) and self.matrix == other.matrix

    def __repr__(self):
        return f"FiniteMetric(n={self.n})"


def validate(space) -> list[tuple]:
    """List every zero-diagonal, positivity, symmetry and triangle violation.

    Accepts a :class:`FiniteMetric` or a raw square matrix. Violations are
    tuples ``(kind, indices...)``; an empty list means the matrix is a metric.
    """
    m = space.matrix if isinstance(space, FiniteMetric) else [list(r) for r in space]
    n = len(m)
    if any(len(r) != n for r in m):
        raise MetricError("distance matrix must be square")
    out = []
    for a in range(n):
        if m[a][a] != 0:
            out.append(("diagonal", a))
    for a, b in combinations(range(n), 2):
        if m[a][b] != m[b][a]:
            out.append(("symmetry", a, b))
        if m[a][b] <= 0 or m[b][a] <= 0:
            out.append(("positivity", a, b))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if len({a, b, c}) == 3 and a < c and m[a][c] > m[a][b] + m[b][c]:
                    out.append(("triangle", a, b, c))
    return out


class LineMetric(MetricSpace):
    """The segment ``[0, L]``; points are rational coordinates."""

    kind = "line"

    def __init__(self, length):
        self.length = as_rational(length)
        if self.length <= 0:
            raise MetricError("line length must be positive")

    def check(self, p):
        if not isinstance(p, (int, Fraction)) or isinstance(p, bool) or not 0 <= p <= self.length:
            raise InvalidPoint(f"{p!r} is not in [0, {self.length}]")

    def distance(self, p, q):
        self.check(p)
        self.check(q)
        return abs(Fraction(p) - Fraction(q))

    def diameter(self):
        return self.length

    def path(self, p, q):
        return [(p, Fraction(0)), (q, self.distance(p, q))] if p != q else [(p, Fraction(0))]

    def along(self, p, q, x):
        """Point at distance ``x`` from ``p`` on the way to ``q``."""
        p, q = Fraction(p), Fraction(q)
        return p + x if q >= p else p - x

    def __eq__(self, other):
        return isinstance(other, LineMetric) and self.length == other.length

    def __repr__(self):
        return f"LineMetric(L={self.length})"


class TreeMetric(MetricSpace):
    """A finite weighted tree, including every point interior to its edges."""

    kind = "tree"

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable[tuple]):
        self.vertices = tuple(vertices)
        if not self.vertices:
            raise MetricError("tree needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise MetricError("duplicate vertex ids")
        self.edges = tuple((u, v, as_rational(w)) for u, v, w in edges)
        vset = set(self.vertices)
        if len(self.edges) != len(self.vertices) - 1:
            raise MetricError("a tree has exactly |V| - 1 edges")
        self._adj = {v: [] for v in self.vertices}
        self._edge_of = {}
        for e, (u, v, w) in enumerate(self.edges):
            if u not in vset or v not in vset:
                raise MetricError(f"edge {e} references unknown vertex")
            if w <= 0:
                raise MetricError(f"edge {e} has non-positive length")
            if u == v or (u, v) in self._edge_of:
                raise MetricError(f"edge {e} is a loop or duplicate")
            self._adj[u].append((v, e))
            self._adj[v].append((u, e))
            self._edge_of[(u, v)] = e
            self._edge_of[(v, u)] = e
        root = self.vertices[0]
        self._parent = {root: None}
        self._depth = {root: 0}
        self._rootdist = {root: Fraction(0)}
        queue = deque([root])
        while queue:
            a = queue.popleft()
            for b, e in self._adj[a]:
                if b not in self._parent:
                    self._parent[b] = a
                    self._depth[b] = self._depth[a] + 1
                    self._rootdist[b] = self._rootdist[a] + self.edges[e][2]
                    queue.append(b)
        if len(self._parent) != len(self.vertices):
            raise MetricError("tree is not connected")
        self._diam_pair = None

    # -- points ---------------------------------------------------------
    def vertex(self, v) -> Vertex:
        p = Vertex(v)
        self.check(p)
        return p

    def edge_point(self, e: int, offset) -> Vertex | EdgePoint:
        """Canonical point on edge ``e``; the endpoints collapse to vertices."""
        u, v, w = self.edges[e]
        offset = as_rational(offset)
        if not 0 <= offset <= w:
            raise InvalidPoint(f"offset {offset} outside edge {e} of length {w}")
        if offset == 0:
            return Vertex(u)
        if offset == w:
            return Vertex(v)
        return EdgePoint(e, offset)

    def check(self, p):
        if isinstance(p, Vertex):
            if p.id not in self._adj:
                raise InvalidPoint(f"unknown vertex {p.id!r}")
        elif isinstance(p, EdgePoint):
            if not 0 <= p.edge < len(self.edges):
                raise InvalidPoint(f"unknown edge {p.edge}")
            if not 0 < p.offset < self.edges[p.edge][2]:
                raise InvalidPoint(f"{p!r} is not a canonical interior point")
        else:
            raise InvalidPoint(f"{p!r} is not a tree point")

    def sites(self):
        return [Vertex(v) for v in self.vertices]

    def _ends(self, p):
        """(vertex, distance from p) for the vertices bounding p's location."""
        if isinstance(p, Vertex):
            return [(p.id, Fraction(0))]
        u, v, w = self.edges[p.edge]
        return [(u, p.offset), (v, w - p.offset)]

    def _lca(self, a, b):
        da, db = self._depth[a], self._depth[b]
        while da > db:
            a = self._parent[a]
            da -= 1
        while db > da:
            b = self._parent[b]
            db -= 1
        while a != b:
            a, b = self._parent[a], self._parent[b]
        return a

    def vertex_distance(self, a, b) -> Fraction:
        c = self._lca(a, b)
        return self._rootdist[a] + self._rootdist[b] - 2 * self._rootdist[c]

    def _vertex_path(self, a, b):
        c = self._lca(a, b)
        up = [a]
        while up[-1] != c:
            up.append(self._parent[up[-1]])
        down = [b]
        while down[-1] != c:
            down.append(self._parent[down[-1]])
        return up + down[-2::-1]

    def distance(self, p, q):
        self.check(p)
        self.check(q)
        if p == q:
            return Fraction(0)
        if isinstance(p, EdgePoint) and isinstance(q, EdgePoint) and p.edge == q.edge:
            return abs(p.offset - q.offset)
        return min(
            dp + self.vertex_distance(a, b) + dq
            for a, dp in self._ends(p)
            for b, dq in self._ends(q)
        )

    def path(self, p, q):
        """Unique simple path from p to q as ``[(point, cumulative distance), ...]``.

        Every vertex crossed is listed; the endpoints are p and q themselves.
        """
        self.check(p)
        self.check(q)
        if p == q:
            return [(p, Fraction(0))]
        if isinstance(p, EdgePoint) and isinstance(q, EdgePoint) and p.edge == q.edge:
            return [(p, Fraction(0)), (q, abs(p.offset - q.offset))]
        best = None
        for a, dp in self._ends(p):
            for b, dq in self._ends(q):
                d = dp + self.vertex_distance(a, b) + dq
                if best is None or d < best[0]:
                    best = (d, a, b)
        _, a, b = best
        out = []
        acc = Fraction(0)
        if isinstance(p, EdgePoint):
            out.append((p, acc))
            acc += dict(self._ends(p))[a]
        prev = None
        for v in self._vertex_path(a, b):
            if prev is not None:
                acc += self.edges[self._edge_of[(prev, v)]][2]
            out.append((Vertex(v), acc))
            prev = v
        if isinstance(q, EdgePoint):
            acc += dict(self._ends(q))[b]
            out.append((q, acc))
        return out

    def _offset_on(self, p, e):
        u, v, w = self.edges[e]
        if isinstance(p, EdgePoint):
            return p.offset
        return Fraction(0) if p.id == u else w

    def along(self, p, q, x):
        """Point at distance ``x`` from ``p`` along the path to ``q``."""
        path = self.path(p, q)
        if x <= 0:
            return p
        if x >= path[-1][1]:
            return q
        for (a, ca), (b, cb) in zip(path, path[1:]):
            if x == ca:
                return a
            if x == cb:
                return b
            if ca < x < cb:
                if isinstance(a, EdgePoint):
                    e = a.edge
                elif isinstance(b, EdgePoint):
                    e = b.edge
                else:
                    e = self._edge_of[(a.id, b.id)]
                oa, ob = self._offset_on(a, e), self._offset_on(b, e)
                step = x - ca
                return self.edge_point(e, oa + step if ob > oa else oa - step)
        raise AssertionError("unreachable")

    def diametral_pair(self):
        if self._diam_pair is None:
            if len(self.vertices) == 1:
                v = Vertex(self.vertices[0])
                self._diam_pair = (v, v)
            else:
                a = max(self.vertices, key=lambda v: self.vertex_distance(self.vertices[0], v))
                b = max(self.vertices, key=lambda v: self.vertex_distance(a, v))
                self._diam_pair = (Vertex(a), Vertex(b))
        return self._diam_pair

    def diameter(self):
        # tree distance is convex along edges, so the max is attained at vertices
        a, b = self.diametral_pair()
        return self.vertex_distance(a.id, b.id)

    def __eq__(self, other):
        return isinstance(other, TreeMetric) and (self.vertices, self.edges) == (other.vertices, other.edges)

    def __repr__(self):
        return f"TreeMetric(|V|={len(self.vertices)})"


def distance(space: MetricSpace, p, q) -> Fraction:
    return space.distance(p, q)


def diameter(space: MetricSpace) -> Fraction:
    return space.diameter()


def tree_path(space, p, q):
    if not isinstance(space, (TreeMetric, LineMetric)):
        raise UnsupportedSpace(f"paths need a tree or line metric, got {space.kind}")
    return space.path(p, q)


def point_on_path(space, p, q, x) -> bool:
    """True iff x lies on the unique p-q path, endpoints included."""
    return space.distance(p, x) + space.distance(x, q) == space.distance(p, q)


def far_point(space: MetricSpace, p):
    """A point at distance at least diam/2 from ``p``."""
    space.check(p)
    if isinstance(space, LineMetric):
        return space.length if space.length - p >= p else Fraction(0)
    if isinstance(space, UniformMetric):
        return 0 if p != 0 else 1
    if isinstance(space, FiniteMetric):
        return max(range(space.n), key=lambda q: (space.matrix[p][q], -q))
    if isinstance(space, TreeMetric):
        a, b = space.diametral_pair()
        return a if space.distance(p, a) >= space.distance(p, b) else b
    raise UnsupportedSpace(space.kind)
