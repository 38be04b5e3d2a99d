"""Online k-server algorithms behind one serve-step contract, and the runner.

An algorithm is initialised with ``init(space, start)``. For every request the
runner calls ``serve(request)``, which returns movements ``(server, dest)``
applied in order. Algorithms that interleave extra moves (the fairness
wrappers) also implement ``begin``, ``after`` and ``finish`` which return
lists of ``(tag, movements)`` steps.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .metric_spaces import LineMetric, TreeMetric, UniformMetric, UnsupportedSpace
from .schedules import CostLedger, Schedule, Trace, TraceStep


class OnlineAlgorithm:
    name = "abstract"

    def init(self, space, start):
        self.space = space
        self.positions = list(start)
        self.k = len(self.positions)
        return self

    def serve(self, request) -> list:
        raise NotImplementedError

    def begin(self) -> list:
        return []

    def after(self, request) -> list:
        return []

    def finish(self) -> list:
        return []

    def _occupied(self, request):
        for i, p in enumerate(self.positions):
            if p == request:
                return i
        return None

    def _move(self, i, dest):
        self.positions[i] = dest
        return [(i, dest)]


class Greedy(OnlineAlgorithm):
    """Nearest server serves; lowest index on ties."""

    name = "greedy"

    def serve(self, request):
        if self._occupied(request) is not None:
            return []
        d = self.space.distance
        i = min(range(self.k), key=lambda j: (d(self.positions[j], request), j))
        return self._move(i, request)


class Balance(OnlineAlgorithm):
    """Move the server minimising cumulative cost plus distance to the request."""

    name = "balance"

    def init(self, space, start):
        super().init(space, start)
        self.cumulative = [Fraction(0)] * self.k
        return self

    def serve(self, request):
        if self._occupied(request) is not None:
            return []
        d = self.space.distance
        i = min(
            range(self.k),
            key=lambda j: (self.cumulative[j] + d(self.positions[j], request), j),
        )
        self.cumulative[i] += d(self.positions[i], request)
        return self._move(i, request)


class _Paging(OnlineAlgorithm):
    """Shared state for lazy paging rules: slot == server, page == point."""

    def init(self, space, start):
        if not isinstance(space, UniformMetric):
            raise UnsupportedSpace(f"{self.name} needs a uniform metric")
        super().init(space, start)
        self.faults = [0] * self.k
        self.clock = 0
        return self

    def serve(self, request):
        self.space.check(request)
        self.clock += 1
        hit = self._occupied(request)
        if hit is not None:
            self.on_hit(hit)
            return []
        slot = self.evict(request)
        self.faults[slot] += 1
        self.on_load(slot)
        return self._move(slot, request)

    def on_hit(self, slot):
        pass

    def on_load(self, slot):
        pass


class FIFO(_Paging):
    name = "fifo"

    def init(self, space, start):
        super().init(space, start)
        self.queue = list(range(self.k))
        return self

    def evict(self, request):
        return self.queue.pop(0)

    def on_load(self, slot):
        self.queue.append(slot)


class LRU(_Paging):
    name = "lru"

    def init(self, space, start):
        super().init(space, start)
        self.last_used = [0] * self.k
        return self

    def evict(self, request):
        return min(range(self.k), key=lambda s: (self.last_used[s], s))

    def on_hit(self, slot):
        self.last_used[slot] = self.clock

    def on_load(self, slot):
        self.last_used[slot] = self.clock


def lowest_index(unmarked, rng):
    return min(unmarked)


def seeded_random(unmarked, rng):
    return rng.choice(sorted(unmarked))


EVICTION_RULES = {"lowest": lowest_index, "random": seeded_random}


class Marking(_Paging):
    """Generic marking algorithm with a pluggable choice among unmarked slots."""

    name = "marking"

    def __init__(self, rule="lowest", seed=0):
        self.rule_name = rule
        self.rule = EVICTION_RULES[rule] if isinstance(rule, str) else rule
        self.seed = seed

    def init(self, space, start):
        super().init(space, start)
        self.marked = [False] * self.k
        self.rng = random.Random(self.seed)
        self.phase = 1
        self.phase_faults = [[0] * self.k]
        return self

    def evict(self, request):
        if all(self.marked):
            self.marked = [False] * self.k
            self.phase += 1
            self.phase_faults.append([0] * self.k)
        unmarked = [s for s in range(self.k) if not self.marked[s]]
        return self.rule(unmarked, self.rng)

    def on_hit(self, slot):
        self.marked[slot] = True

    def on_load(self, slot):
        self.marked[slot] = True
        self.phase_faults[-1][slot] += 1


def phase_partition(requests, k: int) -> list[list]:
    """Split requests into maximal segments containing at most k distinct pages."""
    phases, current, seen = [], [], set()
    for r in requests:
        if r not in seen and len(seen) == k:
            phases.append(current)
            current, seen = [], set()
        current.append(r)
        seen.add(r)
    if current:
        phases.append(current)
    return phases


class DCA(OnlineAlgorithm):
    """Double coverage on tree and line metrics, simulated event by event.

    Besides positions, keeps per-server convergence/divergence totals
    (meaningful for k == 2) and leftward/rightward totals on lines.
    """

    name = "dca"

    def init(self, space, start):
        if not isinstance(space, (TreeMetric, LineMetric)):
            raise UnsupportedSpace("DCA needs a tree or line metric")
        super().init(space, start)
        for p in self.positions:
            space.check(p)
        # left-to-right rank on a line; co-located servers keep this order
        order = range(self.k)
        if isinstance(space, LineMetric):
            order = sorted(order, key=lambda i: (Fraction(self.positions[i]), i))
        self.rank = [0] * self.k
        for r, i in enumerate(order):
            self.rank[i] = r
        zero = [Fraction(0)] * self.k
        self.con, self.div = list(zero), list(zero)
        self.left, self.right = list(zero), list(zero)
        return self

    def _blocked(self, i, request):
        s = self.space
        here = self.positions[i]
        for j, q in enumerate(self.positions):
            if j == i:
                continue
            if q == here:
                if self._in_front(j, i, request):
                    return True
            elif s.distance(here, q) + s.distance(q, request) == s.distance(here, request):
                return True
        return False

    def _in_front(self, j, i, request):
        """Whether co-located server j leads server i toward the request."""
        if isinstance(self.space, LineMetric):
            toward_right = request > self.positions[i]
            return self.rank[j] > self.rank[i] if toward_right else self.rank[j] < self.rank[i]
        return j < i

    def serve(self, request):
        s = self.space
        s.check(request)
        moves = []
        while self._occupied(request) is None:
            movers = [i for i in range(self.k) if not self._blocked(i, request)]
            delta = None
            for i in movers:
                path = s.path(self.positions[i], request)
                # first vertex strictly ahead, or the request itself
                ahead = next(c for _, c in path[1:] if c > 0)
                delta = ahead if delta is None else min(delta, ahead)
            old = list(self.positions)
            for i in movers:
                self.positions[i] = s.along(old[i], request, delta)
                moves.append((i, self.positions[i]))
            self._account(old, movers, delta)
        return moves

    def _account(self, old, movers, delta):
        if isinstance(self.space, LineMetric):
            for i in movers:
                if self.positions[i] > old[i]:
                    self.right[i] += delta
                else:
                    self.left[i] += delta
        if self.k == 2:
            before = self.space.distance(old[0], old[1])
            after = self.space.distance(self.positions[0], self.positions[1])
            change = after - before
            if len(movers) == 2:
                if change == -2 * delta:
                    self.con[0] += delta
                    self.con[1] += delta
                elif change == 2 * delta:
                    self.div[0] += delta
                    self.div[1] += delta
                else:
                    raise AssertionError("mixed converge/diverge sub-step")
            elif len(movers) == 1:
                (i,) = movers
                if change == -delta:
                    self.con[i] += delta
                elif change == delta:
                    self.div[i] += delta
                else:
                    raise AssertionError("sub-step neither converges nor diverges")


ALGORITHMS = {
    "dca": DCA,
    "fifo": FIFO,
    "lru": LRU,
    "marking": Marking,
    "balance": Balance,
    "greedy": Greedy,
}


def make_algorithm(name: str, **params) -> OnlineAlgorithm:
    try:
        cls = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}")
    return cls(**params)


def run(algorithm: OnlineAlgorithm, space, start, requests):
    """Drive ``algorithm`` over ``requests``; return (Schedule, CostLedger, Trace)."""
    start = tuple(start)
    for p in start:
        space.check(p)
    algorithm.init(space, start)
    k = len(start)
    positions = list(start)
    configs = [tuple(positions)]
    tags = []
    costs = [[] for _ in range(k)]
    trace = Trace(start=start)

    def apply(moves, request, tag):
        segments = {}
        step = [Fraction(0)] * k
        for i, dest in moves:
            space.check(dest)
            length = space.distance(positions[i], dest)
            segments.setdefault(i, []).append((positions[i], dest, length))
            step[i] += length
            positions[i] = dest
        for i in range(k):
            costs[i].append(step[i])
        configs.append(tuple(positions))
        tags.append(tag)
        trace.steps.append(
            TraceStep(len(configs) - 1, request, segments, tuple(step), tuple(positions), tag)
        )

    def apply_extra(steps):
        for tag, moves in steps:
            apply(moves, None, tag)

    apply_extra(algorithm.begin())
    for r in requests:
        space.check(r)
        apply(algorithm.serve(r), r, None)
        if r not in positions:
            raise AssertionError(f"request {r!r} left uncovered by {algorithm.name}")
        apply_extra(algorithm.after(r))
    apply_extra(algorithm.finish())
    schedule = Schedule(tuple(configs), tuple(tags))
    ledger = CostLedger(tuple(tuple(r) for r in costs), tuple(tags))
    return schedule, ledger, trace
