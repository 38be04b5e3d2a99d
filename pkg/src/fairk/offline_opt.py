"""Exact offline optimum via min-cost flow, with brute-force and Belady oracles."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .metric_spaces import InvalidPoint
from .schedules import Schedule, ledger_from_schedule


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OptSolution:
    schedule: Schedule
    cost: Fraction
    assignment: tuple = ()  # server serving each request


class _FlowGraph:
    """Residual graph for successive shortest paths with unit capacities."""

    def __init__(self, n):
        self.n = n
        self.adj = [[] for _ in range(n)]  # edge: [to, cap, cost, rev_index]

    def add(self, u, v, cap, cost):
        self.adj[u].append([v, cap, cost, len(self.adj[v])])
        self.adj[v].append([u, 0, -cost, len(self.adj[u]) - 1])

    def min_cost_flow(self, s, t, amount, potential):
        flow = cost = 0
        h = list(potential)
        inf = None
        while flow < amount:
            dist = [inf] * self.n
            prev = [None] * self.n
            dist[s] = 0
            heap = [(0, s)]
            while heap:
                d, u = heapq.heappop(heap)
                if d != dist[u]:
                    continue
                for idx, (v, cap, c, _) in enumerate(self.adj[u]):
                    if cap <= 0:
                        continue
                    nd = d + c + h[u] - h[v]
                    if dist[v] is None or nd < dist[v]:
                        dist[v] = nd
                        prev[v] = (u, idx)
                        heapq.heappush(heap, (nd, v))
            if dist[t] is None:
                raise RuntimeError("not enough augmenting paths")
            for v in range(self.n):
                if dist[v] is not None:
                    h[v] += dist[v]
            v = t
            while v != s:
                u, idx = prev[v]
                e = self.adj[u][idx]
                e[1] -= 1
                self.adj[v][e[3]][1] += 1
                cost += e[2]
                v = u
            flow += 1
        return cost


def _check_sites(space, points):
    for p in points:
        space.check(p)
        if not space.is_site(p):
            raise InvalidPoint(f"request {p!r} is not a site of the space")


def opt_solve(space, start, requests) -> OptSolution:
    """Minimum-cost feasible schedule by the standard min-cost-flow reduction.

    One unit of flow per server threads the requests it serves; arc costs
    are metric distances scaled to integers. Every request node carries a
    large negative bonus so that a minimum-cost flow covers all of them.
    """
    start = tuple(start)
    requests = tuple(requests)
    _check_sites(space, requests)
    for p in start:
        space.check(p)
    k, T = len(start), len(requests)
    if T == 0:
        return OptSolution(Schedule((start,)), Fraction(0), ())

    d = space.distance
    dist_start = [[d(start[i], requests[t]) for t in range(T)] for i in range(k)]
    dist_req = [[d(requests[a], requests[b]) if b > a else None for b in range(T)] for a in range(T)]
    den = 1
    for row in dist_start + dist_req:
        for x in row:
            if x is not None:
                den = lcm(den, Fraction(x).denominator)
    scale = lambda x: int(Fraction(x) * den)
    biggest = max(
        [scale(x) for row in dist_start for x in row]
        + [scale(x) for row in dist_req for x in row if x is not None]
        + [0]
    )
    bonus = (T + k + 1) * biggest + 1

    # node ids: source, sink, starts, then (in_t, out_t) pairs in time order
    S, Z = 0, 1
    st = lambda i: 2 + i
    inn = lambda t: 2 + k + 2 * t
    out = lambda t: 3 + k + 2 * t
    g = _FlowGraph(2 + k + 2 * T)
    for i in range(k):
        g.add(S, st(i), 1, 0)
        for t in range(T):
            g.add(st(i), inn(t), 1, scale(dist_start[i][t]))
        g.add(st(i), Z, 1, 0)
    for t in range(T):
        g.add(inn(t), out(t), 1, -bonus)
        for u in range(t + 1, T):
            g.add(out(t), inn(u), 1, scale(dist_req[t][u]))
        g.add(out(t), Z, 1, 0)

    # the network is a DAG in node-id order except the sink, so one pass
    # in topological order gives exact initial potentials
    order = [S] + [st(i) for i in range(k)]
    for t in range(T):
        order += [inn(t), out(t)]
    order.append(Z)
    pot = [None] * g.n
    pot[S] = 0
    for u in order:
        if pot[u] is None:
            continue
        for v, cap, c, _ in g.adj[u]:
            if cap > 0 and (pot[v] is None or pot[u] + c < pot[v]):
                pot[v] = pot[u] + c
    pot = [0 if x is None else x for x in pot]

    flow_cost = g.min_cost_flow(S, Z, k, pot)
    total = flow_cost + T * bonus
    if not 0 <= total < bonus:
        raise AssertionError("min-cost flow left a request uncovered")

    assignment = [None] * T
    for i in range(k):
        u = st(i)
        while u != Z:
            nxt = next(v for v, cap, c, _ in g.adj[u] if cap == 0 and _is_forward(g, u, v))
            if nxt != Z:
                t = (nxt - 2 - k) // 2
                assignment[t] = i
                nxt = out(t)
            u = nxt
    positions = list(start)
    configs = [tuple(positions)]
    for t, r in enumerate(requests):
        positions[assignment[t]] = r
        configs.append(tuple(positions))
    schedule = Schedule(tuple(configs))
    cost = ledger_from_schedule(space, schedule).total
    if cost != Fraction(total, den):
        raise AssertionError("flow cost and schedule cost disagree")
    return OptSolution(schedule, cost, tuple(assignment))


def _is_forward(g, u, v):
    # forward arcs go up in node id (sink id 1 is reached only forward)
    return v == 1 or v > u


def opt_bruteforce(space, start, requests, budget: int = 2 ** 20) -> Fraction:
    """Exact OPT by dynamic programming over lazy configurations.

    Configurations are multisets of start positions and request points;
    only the serving server moves on a miss. Refuses when ``k**T`` exceeds
    ``budget``.
    """
    start = tuple(start)
    requests = tuple(requests)
    k, T = len(start), len(requests)
    if k ** T > budget:
        raise BudgetExceeded(f"k^T = {k}^{T} exceeds the budget {budget}")
    points = []
    for p in start + requests:
        if p not in points:
            points.append(p)
    index = {p: j for j, p in enumerate(points)}
    d = [[space.distance(a, b) for b in points] for a in points]
    frontier = {tuple(sorted(index[p] for p in start)): Fraction(0)}
    for r in requests:
        x = index[r]
        nxt = {}
        for conf, c in frontier.items():
            if x in conf:
                options = [(conf, c)]
            else:
                options = []
                for j, y in enumerate(conf):
                    if j and conf[j - 1] == y:
                        continue
                    new = tuple(sorted(conf[:j] + conf[j + 1:] + (x,)))
                    options.append((new, c + d[y][x]))
            for new, nc in options:
                if new not in nxt or nc < nxt[new]:
                    nxt[new] = nc
        frontier = nxt
    return min(frontier.values())


def belady_faults(start, requests) -> int:
    """Fault count of farthest-in-future eviction with the cache preloaded."""
    cache = set(start)
    k = len(start)
    faults = 0
    for t, r in enumerate(requests):
        if r in cache:
            continue
        faults += 1
        if len(cache) < k:
            cache.add(r)
            continue

        def next_use(page):
            for u in range(t + 1, len(requests)):
                if requests[u] == page:
                    return u
            return len(requests)

        victim = max(sorted(cache), key=next_use)
        cache.remove(victim)
        cache.add(r)
    return faults
