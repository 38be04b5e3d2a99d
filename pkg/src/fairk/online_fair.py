"""Online fairness wrappers: phased random swapping and the cost-padding conversions.

Each wrapper is itself an OnlineAlgorithm around a base algorithm, so it runs
through ``online_core.run``. Extra moves are emitted as tagged steps.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .metric_spaces import as_rational, far_point
from .online_core import OnlineAlgorithm, run
from .schedules import CORRECTION, PHASE_SWAP, TAIL_CORRECTION

__all__ = [
    "DomainError",
    "PhasedSwap",
    "AcceptableToMultiplicative",
    "OnlineAdditive2Diam",
    "EndAwareAdditive",
    "phased_swap_wrap",
    "acceptable_to_multiplicative",
    "online_additive_2diam",
    "end_aware_additive",
    "phase_budget",
    "budget_reached",
    "far_point",
]

PHI_RESOLUTION = 2 ** 32


class DomainError(ValueError):
    pass


def _iroot_ceil(n: int, d: int) -> int:
    """Smallest integer x >= 0 with x**d >= n."""
    if n <= 0:
        return 0
    lo, hi = 0, 1
    while hi ** d < n:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** d >= n:
            hi = mid
        else:
            lo = mid + 1
    return lo


def phase_budget(ell: int, gamma) -> Fraction:
    """phi_ell = ell**gamma; exact when the root is rational, else rounded up.

    A non-integer root is returned as the smallest multiple of
    1/PHI_RESOLUTION whose den-th power reaches ell**num.
    """
    gamma = as_rational(gamma)
    num, den = gamma.numerator, gamma.denominator
    target = ell ** num
    if den == 1:
        return Fraction(target)
    root = _iroot_ceil(target, den)
    if root ** den == target:
        return Fraction(root)
    R = PHI_RESOLUTION
    return Fraction(_iroot_ceil(target * R ** den, den), R)


def budget_reached(spent: Fraction, ell: int, gamma) -> bool:
    """Exact test of spent >= ell**gamma, without evaluating the root."""
    gamma = as_rational(gamma)
    if spent < 0:
        return False
    spent = Fraction(spent)
    num, den = gamma.numerator, gamma.denominator
    # spent**den >= ell**num, cleared of the denominator
    return spent.numerator ** den >= ell ** num * spent.denominator ** den


class _Wrapper(OnlineAlgorithm):
    def __init__(self, base: OnlineAlgorithm):
        self.base = base

    @property
    def name(self):
        return f"{self.tag}({self.base.name})"

    def init(self, space, start):
        super().init(space, start)
        self.diam = space.diameter()
        self.base.init(space, start)
        self.vpos = list(start)
        self.cost = [Fraction(0)] * self.k  # wrapper's own cumulative costs
        self.base_cost = [Fraction(0)] * self.k  # base cumulative costs, base labels
        return self

    def _base_moves(self, request):
        """Serve with the base; return its moves with per-move costs, base labels."""
        out = []
        for v, dest in self.base.serve(request):
            c = self.space.distance(self.vpos[v], dest)
            self.vpos[v] = dest
            self.base_cost[v] += c
            out.append((v, dest, c))
        return out

    def _correct(self, i):
        """Out-and-back to a far point; cost lies in [diam, 2 diam]."""
        here = self.positions[i]
        there = far_point(self.space, here)
        self.cost[i] += 2 * self.space.distance(here, there)
        return [(i, there), (i, here)]


class PhasedSwap(_Wrapper):
    """Random permutation of server identities at t=0 and at each phase end."""

    tag = "phased"

    def __init__(self, base, gamma=1, seed=0):
        super().__init__(base)
        gamma = as_rational(gamma)
        if gamma <= 0:
            raise DomainError("gamma must be positive")
        self.gamma = gamma
        self.seed = seed

    def init(self, space, start):
        super().init(space, start)
        self.rng = random.Random(self.seed)
        self.phys = list(range(self.k))  # virtual label -> physical server
        self.phase = 0
        self.spent = Fraction(0)
        self.phase_costs = []
        self.permutations = []
        return self

    def _swap(self):
        perm = list(range(self.k))
        self.rng.shuffle(perm)
        old = list(self.positions)
        inverse = [0] * self.k
        for i, p in enumerate(perm):
            inverse[p] = i
        moves = []
        for i in range(self.k):
            self.cost[i] += self.space.distance(old[i], old[perm[i]])
            self.positions[i] = old[perm[i]]
            moves.append((i, old[perm[i]]))
        self.phys = [inverse[p] for p in self.phys]
        self.permutations.append(tuple(perm))
        self.phase += 1
        self.spent = Fraction(0)
        self.phase_costs.append(Fraction(0))
        return [(PHASE_SWAP, moves)]

    def begin(self):
        return self._swap()

    def serve(self, request):
        moves = []
        for v, dest, c in self._base_moves(request):
            i = self.phys[v]
            self.cost[i] += c
            self.spent += c
            self.phase_costs[-1] += c
            moves.append(self._move(i, dest)[0])
        return moves

    def after(self, request):
        if budget_reached(self.spent, self.phase, self.gamma):
            return self._swap()
        return []

    @property
    def phase_budgets(self):
        return [phase_budget(j, self.gamma) for j in range(1, self.phase + 1)]


class AcceptableToMultiplicative(_Wrapper):
    """Pad every server that lags the base's running max with out-and-back moves."""

    tag = "acc2mul"

    def init(self, space, start):
        super().init(space, start)
        self.h = Fraction(0)
        return self

    def serve(self, request):
        moves = []
        for v, dest, c in self._base_moves(request):
            self.cost[v] += c
            moves += self._move(v, dest)
        return moves

    def after(self, request):
        self.h = max(self.base_cost)
        moves = []
        for i in range(self.k):
            if self.cost[i] < self.h:
                moves += self._correct(i)
        return [(CORRECTION, moves)] if moves else []

    def finish(self):
        self.h = max(self.base_cost)
        moves = []
        for i in range(self.k):
            if self.cost[i] == self.h:
                moves += self._correct(i)
        return [(TAIL_CORRECTION, moves)] if moves else []


class OnlineAdditive2Diam(_Wrapper):
    """Keep every server within 2 diam of the current maximum."""

    tag = "add-2diam"

    def serve(self, request):
        moves = []
        for v, dest, c in self._base_moves(request):
            self.cost[v] += c
            moves += self._move(v, dest)
        return moves

    def after(self, request):
        moves = []
        while True:
            top = max(self.cost)
            lagging = [i for i in range(self.k) if self.cost[i] < top - 2 * self.diam]
            if not lagging:
                break
            moves += self._correct(min(lagging, key=lambda i: (self.cost[i], i)))
        return [(CORRECTION, moves)] if moves else []


class EndAwareAdditive(_Wrapper):
    """Pad lagging servers after the last request into [c_max - diam, c_max]."""

    tag = "add-end"

    def serve(self, request):
        moves = []
        for v, dest, c in self._base_moves(request):
            self.cost[v] += c
            moves += self._move(v, dest)
        return moves

    def finish(self):
        top = max(self.cost)
        floor = top - self.diam
        moves = []
        for i in range(self.k):
            here = self.positions[i]
            there = far_point(self.space, here)
            leg = self.space.distance(here, there)  # in [diam/2, diam]
            a, b = here, there
            while self.cost[i] < floor:
                self.cost[i] += leg
                moves.append((i, b))
                a, b = b, a
            self.positions[i] = a
        return [(CORRECTION, moves)] if moves else []


def phased_swap_wrap(base, gamma=1, seed=0) -> PhasedSwap:
    return PhasedSwap(base, gamma, seed)


def acceptable_to_multiplicative(base) -> AcceptableToMultiplicative:
    return AcceptableToMultiplicative(base)


def online_additive_2diam(base) -> OnlineAdditive2Diam:
    return OnlineAdditive2Diam(base)


def end_aware_additive(base, space, start, requests):
    """Run ``base`` to completion, then pad; returns (Schedule, CostLedger)."""
    schedule, ledger, _ = run(EndAwareAdditive(base), space, start, requests)
    return schedule, ledger


WRAPPERS = {
    "phased": PhasedSwap,
    "acc2mul": AcceptableToMultiplicative,
    "add-end": EndAwareAdditive,
    "add-2diam": OnlineAdditive2Diam,
}
