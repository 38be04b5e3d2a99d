"""Deterministic hard instances and seeded random instance families."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .metric_spaces import (
    FiniteMetric,
    LineMetric,
    MetricError,
    TreeMetric,
    UniformMetric,
    Vertex,
    as_rational,
)


@dataclass(frozen=True)
class Instance:
    space: object
    start: tuple
    requests: tuple
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(self.start))
        object.__setattr__(self, "requests", tuple(self.requests))
        for p in self.start + self.requests:
            self.space.check(p)

    @property
    def k(self) -> int:
        return len(self.start)

    @property
    def T(self) -> int:
        return len(self.requests)


# -- the DCA lower-bound tree ------------------------------------------------

def _dca_hard_tree(k: int, eps: Fraction) -> TreeMetric:
    n = k + 2
    vertices, edges = [], []

    def add(v):
        vertices.append(v)

    for i in range(1, n + 1):
        add(str(i))
    for i in range(1, n):
        add(f"{i}+e")
        add(f"{i + 1}-e")
        edges += [
            (str(i), f"{i}+e", eps),
            (f"{i}+e", f"{i + 1}-e", 1 - 2 * eps),
            (f"{i + 1}-e", str(i + 1), eps),
        ]
    for i in range(1, n + 1):
        add(f"{i}''")
        add(f"{i}'")
        edges += [(str(i), f"{i}''", eps), (f"{i}''", f"{i}'", eps)]
    # spine extensions by 2*eps at both ends, subdivided at eps
    add("1-e")
    add("1-2e")
    add(f"{n}+e")
    add(f"{n}+2e")
    edges += [
        ("1-2e", "1-e", eps),
        ("1-e", "1", eps),
        (str(n), f"{n}+e", eps),
        (f"{n}+e", f"{n}+2e", eps),
    ]
    return TreeMetric(vertices, edges)


def dca_hard_mirror(label: str, k: int) -> str:
    """Left-right reflection x -> (k + 3) - x of a vertex label of the hard tree."""
    m = k + 3
    for suffix in ("''", "'"):
        if label.endswith(suffix):
            return f"{m - int(label[: -len(suffix)])}{suffix}"
    for a, b in (("+2e", "-2e"), ("-2e", "+2e"), ("+e", "-e"), ("-e", "+e")):
        if label.endswith(a):
            return f"{m - int(label[: -len(a)])}{b}"
    return str(m - int(label))


def dca_hard_sweep(k: int, mirrored: bool = False) -> list[str]:
    """Requests of one right sweep, or of its mirror image (a left sweep)."""
    right = [f"{i}'" for i in range(2, k + 1)] + [f"{k + 2}+2e", f"{k + 2}+e"]
    return [dca_hard_mirror(x, k) for x in right] if mirrored else right


def gen_dca_hard(k: int, eps=Fraction(1, 100), r: int = 1) -> Instance:
    """Lower-bound tree for DCA with ``r`` sweeps, alternating right and left.

    Server 1 starts at ``1-e``, the others on spine vertices ``3..k+1``.
    Every right+left pair of sweeps restores the start configuration.
    """
    eps = as_rational(eps)
    if k < 2 or r < 1 or not 0 < eps < Fraction(1, 8):
        raise MetricError("need k >= 2, r >= 1 and 0 < eps < 1/8")
    tree = _dca_hard_tree(k, eps)
    start = [Vertex("1-e")] + [Vertex(str(i)) for i in range(3, k + 2)]
    requests = [Vertex(x) for j in range(r) for x in dca_hard_sweep(k, mirrored=j % 2 == 1)]
    return Instance(tree, start, requests, {"family": "dca-hard", "k": k, "eps": str(eps), "r": r})


def dca_hard_opt_bound(k: int, eps, r: int) -> Fraction:
    """Cost of the explicit offline strategy for the DCA lower-bound instance."""
    eps = as_rational(eps)
    return r * (2 + 8 * eps) + (k - 2) * 2 * eps


# -- the LRU lower-bound sequence ---------------------------------------------

def gen_lru_hard(k: int, m: int) -> Instance:
    """Pages ``alpha=0``, ``beta=1``, ``1..k-1 -> 2..k``; sentinels ``k+1..2k-1``.

    Slot 1 starts on alpha and the remaining slots on sentinel pages that
    are never requested, so each of pages ``1..k-1`` costs one cold miss.
    """
    if k < 2 or m < 1:
        raise MetricError("need k >= 2 and m >= 1")
    alpha, beta = 0, 1
    middle = list(range(2, k + 1))
    sentinels = list(range(k + 1, 2 * k))
    space = UniformMetric(2 * k)
    requests = ([alpha] + middle + [beta] + middle) * m
    start = [alpha] + sentinels
    return Instance(space, start, requests, {"family": "lru-hard", "k": k, "m": m})


# -- seeded random families ----------------------------------------------------

def gen_random_line(seed: int, k: int, T: int, L=10, grid: int = 4) -> Instance:
    """Requests uniform over the grid points ``j/grid`` of ``[0, L]``."""
    rng = random.Random(seed)
    L = as_rational(L)
    n = int(L * grid)
    pts = lambda count: [Fraction(rng.randint(0, n), grid) for _ in range(count)]
    start = sorted(set(pts(k * 4)))[:k]
    while len(start) < k:
        start = sorted(set(start + pts(1)))
    rng.shuffle(start)
    return Instance(
        LineMetric(L), start, pts(T),
        {"family": "random-line", "seed": seed, "k": k, "T": T, "L": str(L)},
    )


def random_tree(rng, n: int, max_len: int = 5, den: int = 2) -> TreeMetric:
    """Uniform random labelled tree via a Pruefer sequence, rational edge lengths."""
    vertices = list(range(n))
    if n == 1:
        return TreeMetric(vertices, [])
    if n == 2:
        return TreeMetric(vertices, [(0, 1, Fraction(rng.randint(den, max_len * den), den))])
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(v for v in range(n) if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [w for w in range(n) if degree[w] == 1]
    edges.append((u, v))
    return TreeMetric(
        vertices,
        [(a, b, Fraction(rng.randint(den, max_len * den), den)) for a, b in edges],
    )


def gen_random_tree(seed: int, k: int, T: int, n: int, max_len: int = 5) -> Instance:
    rng = random.Random(seed)
    tree = random_tree(rng, n, max_len)
    sites = tree.sites()
    start = [rng.choice(sites) for _ in range(k)]
    requests = [rng.choice(sites) for _ in range(T)]
    return Instance(
        tree, start, requests,
        {"family": "random-tree", "seed": seed, "k": k, "T": T, "n": n, "max_len": max_len},
    )


def gen_random_uniform(seed: int, k: int, T: int, n: int, cold: bool = False) -> Instance:
    """Random paging instance on ``n`` pages with distinct start pages.

    With ``cold=True`` the metric gets ``k`` extra sentinel pages holding the
    start configuration, and requests avoid them.
    """
    rng = random.Random(seed)
    if cold:
        space = UniformMetric(n + k)
        start = list(range(n, n + k))
    else:
        if n < k:
            raise MetricError("need n >= k for distinct start pages")
        space = UniformMetric(max(n, 2))
        start = rng.sample(range(n), k)
    requests = [rng.randrange(n) for _ in range(T)]
    return Instance(
        space, start, requests,
        {"family": "random-uniform", "seed": seed, "k": k, "T": T, "n": n, "cold": cold},
    )


def random_finite_metric(rng, n: int, max_w: int = 9, den: int = 1, p_edge: float = 0.5) -> FiniteMetric:
    """Shortest-path closure of a random connected weighted graph."""
    inf = None
    d = [[inf] * n for _ in range(n)]
    for a in range(n):
        d[a][a] = Fraction(0)
    order = list(range(n))
    rng.shuffle(order)
    pairs = [(order[i], order[rng.randrange(i)]) for i in range(1, n)]
    pairs += [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p_edge]
    for a, b in pairs:
        w = Fraction(rng.randint(den, max_w * den), den)
        if d[a][b] is None or w < d[a][b]:
            d[a][b] = d[b][a] = w
    for m in range(n):
        for a in range(n):
            for b in range(n):
                if d[a][m] is not None and d[m][b] is not None:
                    via = d[a][m] + d[m][b]
                    if d[a][b] is None or via < d[a][b]:
                        d[a][b] = via
    return FiniteMetric(d)


def gen_random_finite(seed: int, k: int, T: int, n: int, max_w: int = 9) -> Instance:
    rng = random.Random(seed)
    space = random_finite_metric(rng, n, max_w)
    start = [rng.randrange(n) for _ in range(k)]
    requests = [rng.randrange(n) for _ in range(T)]
    return Instance(
        space, start, requests,
        {"family": "random-finite", "seed": seed, "k": k, "T": T, "n": n},
    )


FAMILIES = {
    "dca-hard": gen_dca_hard,
    "lru-hard": gen_lru_hard,
    "random-line": gen_random_line,
    "random-tree": gen_random_tree,
    "random-uniform": gen_random_uniform,
    "random-finite": gen_random_finite,
}
