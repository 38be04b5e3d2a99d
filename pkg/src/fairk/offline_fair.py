"""Offline (1+eps, beta)-fair transformation by pairwise suffix swaps."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .metric_spaces import as_rational
from .schedules import CostLedger, Schedule, ShapeError, ledger_from_schedule, verify_schedule


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class SwapRecord:
    round: int
    heavy: int
    light: int
    split: int
    penalty_heavy: Fraction
    penalty_light: Fraction
    total_heavy: Fraction
    total_light: Fraction
    max_before: Fraction


@dataclass(frozen=True)
class FairTransformResult:
    schedule: Schedule
    ledger: CostLedger
    swaps: tuple
    beta: Fraction
    epsilon: Fraction
    reference: Fraction
    q: int

    @property
    def max_history(self) -> list:
        """Max server total before each round, then after the last one."""
        return [s.max_before for s in self.swaps] + [max(self.ledger.totals)]


def log_rounds(epsilon, k: int) -> int:
    """Smallest integer q with ((2+2eps)/(2+eps))**q >= k."""
    base = (2 + 2 * epsilon) / (2 + epsilon)
    q, power = 0, Fraction(1)
    while power < k:
        power *= base
        q += 1
    return q


def beta(epsilon, k: int, diam) -> Fraction:
    epsilon = as_rational(epsilon)
    diam = as_rational(diam)
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if k < 1:
        raise DomainError("k must be at least 1")
    return 2 * (1 + epsilon) * diam * (Fraction(3, 2) + log_rounds(epsilon, k))


def split_gap(A, B, z: int) -> Fraction:
    """Signed imbalance after exchanging the suffixes of A and B after index z."""
    return sum(A[:z], Fraction(0)) + sum(B[z:], Fraction(0)) - sum(B[:z], Fraction(0)) - sum(A[z:], Fraction(0))


def find_split(A, B, c, allow_zero: bool = False) -> int:
    """Smallest z in 1..n (0..n with ``allow_zero``) with |split_gap(A, B, z)| <= c."""
    if len(A) != len(B):
        raise ShapeError("sequences must have equal length")
    if not A:
        raise ShapeError("sequences must be non-empty")
    c = as_rational(c)
    for x in list(A) + list(B):
        if not 0 <= x <= c:
            raise ValueError(f"entry {x} outside [0, {c}]")
    n = len(A)
    # running form of split_gap: D_z = D_{z-1} + 2 (A_z - B_z)
    gap = sum(B, Fraction(0)) - sum(A, Fraction(0))
    if allow_zero and abs(gap) <= c:
        return 0
    for z in range(1, n + 1):
        gap += 2 * (A[z - 1] - B[z - 1])
        if abs(gap) <= c:
            return z
    raise AssertionError("no balanced split exists; entries must lie in [0, c]")


def swap_suffix(space, schedule: Schedule, ledger: CostLedger, i: int, j: int, z: int):
    """Exchange servers i and j at every step after z; step z+1 pays the transition.

    Returns ``(schedule, ledger, (penalty_i, penalty_j))``.
    """
    T = schedule.steps
    if i == j:
        raise ValueError("need two distinct servers")
    if not 0 <= z < T:
        raise ValueError(f"split index {z} outside [0, {T})")
    configs = [list(c) for c in schedule.configs]
    for t in range(z + 1, T + 1):
        configs[t][i], configs[t][j] = configs[t][j], configs[t][i]
    costs = [list(r) for r in ledger.costs]
    for t in range(z, T):
        costs[i][t], costs[j][t] = costs[j][t], costs[i][t]
    pi = space.distance(configs[z][i], configs[z + 1][i])
    pj = space.distance(configs[z][j], configs[z + 1][j])
    costs[i][z], costs[j][z] = pi, pj
    new_schedule = Schedule(tuple(map(tuple, configs)), schedule.tags)
    new_ledger = CostLedger(tuple(map(tuple, costs)), ledger.tags)
    return new_schedule, new_ledger, (pi, pj)


def _argmax(values):
    return max(range(len(values)), key=lambda i: (values[i], -i))


def _argmin(values):
    return min(range(len(values)), key=lambda i: (values[i], i))


def fair_transform(space, opt, epsilon, requests=None, reference=None) -> FairTransformResult:
    """Rebalance a feasible schedule until max server cost <= (1+eps) w / k + beta.

    ``opt`` is an OptSolution (or a Schedule); ``reference`` defaults to its
    cost. Pass ``requests`` to have feasibility of the input checked.
    """
    epsilon = as_rational(epsilon)
    schedule = getattr(opt, "schedule", opt)
    ledger = ledger_from_schedule(space, schedule)
    if requests is not None and verify_schedule(space, schedule, requests):
        raise ValueError("input schedule is infeasible")
    w = ledger.total if reference is None else as_rational(reference)
    if reference is None and hasattr(opt, "cost"):
        w = opt.cost
    k = schedule.k
    diam = space.diameter()
    q = log_rounds(epsilon, k) if epsilon > 0 else 0
    b = beta(epsilon, k, diam) if diam > 0 else Fraction(0)
    bound = (1 + epsilon) * w / k + b
    if ledger.total / k > bound:
        # swaps never lower the total, so the mean alone already breaks the bound
        raise DomainError(f"reference {w} is too small: mean server cost {ledger.total / k} exceeds the bound {bound}")
    swaps = []
    r = 0
    while max(ledger.totals) > bound:
        totals = ledger.totals
        heavy, light = _argmax(totals), _argmin(totals)
        z = find_split(ledger.costs[heavy], ledger.costs[light], diam, allow_zero=True)
        schedule, ledger, (ph, pl) = swap_suffix(space, schedule, ledger, heavy, light, z)
        new = ledger.totals
        r += 1
        swaps.append(SwapRecord(r, heavy, light, z, ph, pl, new[heavy], new[light], max(totals)))
        if r > max(4 * k * (q + 1), 1000):
            raise AssertionError("fair transform failed to converge")
    result = FairTransformResult(schedule, ledger, tuple(swaps), b, epsilon, w, q)
    if reference is None and hasattr(opt, "cost"):
        problems = check_claims(space, result)
        if problems:
            raise AssertionError("; ".join(problems))
    return result


def check_claims(space, result: FairTransformResult) -> list[str]:
    """Invariants a transform of an optimal schedule must satisfy; [] when all hold."""
    out = []
    k = result.schedule.k
    eps, w = result.epsilon, result.reference
    h = result.max_history
    if any(a <= b for a, b in zip(h, h[1:])):
        out.append("max cost did not strictly decrease every round")
    if eps > 0:
        factor = (2 + eps) / (2 + 2 * eps)
        if any(h[r + k] > factor * h[r] for r in range(len(h) - k)):
            out.append("max cost fell by less than (2+eps)/(2+2eps) over k rounds")
        if len(result.swaps) > k * result.q:
            out.append(f"{len(result.swaps)} swaps exceed k*q = {k * result.q}")
    if max(result.ledger.totals) > (1 + eps) * w / k + result.beta:
        out.append("final max cost above (1+eps) w/k + beta")
    if result.ledger.total > w + 2 * space.diameter() * len(result.swaps):
        out.append("total cost grew by more than 2 diam per swap")
    diam = space.diameter()
    for s in result.swaps:
        if s.penalty_heavy > diam or s.penalty_light > diam:
            out.append(f"round {s.round}: swap penalty above diam")
    return out
