"""Schedules, per-server cost ledgers, traces and feasibility checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

# Trace event tags for steps that do not serve a request.
PHASE_SWAP = "phase-swap"
CORRECTION = "correction"
TAIL_CORRECTION = "tail-correction"
SWAP = "swap"


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class Schedule:
    """Server positions ``configs[0..T']``.

    ``tags[t-1]`` is None when step ``t`` serves the next request, otherwise
    the event tag of an extra step (swap, correction). A schedule without
    extra steps has ``tags`` all None and ``T' == len(requests)``.
    """

    configs: tuple
    tags: tuple = None

    def __post_init__(self):
        configs = tuple(tuple(c) for c in self.configs)
        if not configs:
            raise ShapeError("a schedule holds at least the start configuration")
        k = len(configs[0])
        if k < 1 or any(len(c) != k for c in configs):
            raise ShapeError("every configuration must have the same k >= 1 servers")
        object.__setattr__(self, "configs", configs)
        tags = self.tags
        if tags is None:
            tags = (None,) * (len(configs) - 1)
        tags = tuple(tags)
        if len(tags) != len(configs) - 1:
            raise ShapeError("need one tag per step")
        object.__setattr__(self, "tags", tags)

    @property
    def k(self) -> int:
        return len(self.configs[0])

    @property
    def steps(self) -> int:
        return len(self.configs) - 1

    @property
    def T(self) -> int:
        """Number of request-serving steps."""
        return sum(1 for tag in self.tags if tag is None)

    def request_steps(self) -> list[int]:
        return [t for t, tag in enumerate(self.tags, start=1) if tag is None]

    def trajectory(self, i: int) -> list:
        return [c[i] for c in self.configs]


@dataclass(frozen=True)
class CostLedger:
    """``costs[i][t-1]`` is the distance server ``i`` moves at step ``t``."""

    costs: tuple
    tags: tuple = None

    def __post_init__(self):
        costs = tuple(tuple(Fraction(x) for x in row) for row in self.costs)
        if not costs:
            raise ShapeError("ledger needs k >= 1 servers")
        n = len(costs[0])
        if any(len(r) != n for r in costs):
            raise ShapeError("ragged ledger")
        if any(x < 0 for r in costs for x in r):
            raise ValueError("per-step costs must be non-negative")
        object.__setattr__(self, "costs", costs)
        tags = (None,) * n if self.tags is None else tuple(self.tags)
        if len(tags) != n:
            raise ShapeError("need one tag per step")
        object.__setattr__(self, "tags", tags)

    @property
    def k(self) -> int:
        return len(self.costs)

    @property
    def steps(self) -> int:
        return len(self.costs[0])

    @property
    def totals(self) -> tuple:
        return tuple(sum(r, Fraction(0)) for r in self.costs)

    @property
    def total(self) -> Fraction:
        return sum(self.totals, Fraction(0))

    def cumulative(self, i: int) -> list:
        out, acc = [], Fraction(0)
        for x in self.costs[i]:
            acc += x
            out.append(acc)
        return out

    def step_totals(self) -> list:
        return [sum(col, Fraction(0)) for col in zip(*self.costs)]

    def request_cost(self) -> Fraction:
        """Cost incurred on request-serving steps only."""
        return sum(
            (x for r in self.costs for x, tag in zip(r, self.tags) if tag is None),
            Fraction(0),
        )

    @classmethod
    def from_totals(cls, totals: Sequence) -> "CostLedger":
        return cls(tuple((Fraction(x),) for x in totals))


@dataclass(frozen=True)
class TraceStep:
    t: int
    request: Any
    segments: dict  # server -> [(from, to, length), ...]
    step_costs: tuple
    config: tuple
    tag: Optional[str] = None
    info: dict = field(default_factory=dict)


@dataclass
class Trace:
    start: tuple
    steps: list = field(default_factory=list)

    def segment_total(self) -> Fraction:
        return sum(
            (seg[2] for s in self.steps for segs in s.segments.values() for seg in segs),
            Fraction(0),
        )


def ledger_from_schedule(space, schedule: Schedule) -> CostLedger:
    configs = schedule.configs
    costs = [
        [space.distance(a[i], b[i]) for a, b in zip(configs, configs[1:])]
        for i in range(schedule.k)
    ]
    return CostLedger(tuple(tuple(r) for r in costs), schedule.tags)


def verify_schedule(space, schedule: Schedule, requests: Sequence) -> list[int]:
    """Return every request index ``t`` (1-based) left uncovered; [] means feasible."""
    steps = schedule.request_steps()
    if len(steps) != len(requests):
        raise ShapeError(
            f"schedule serves {len(steps)} requests but the sequence has {len(requests)}"
        )
    bad = []
    for t, (step, r) in enumerate(zip(steps, requests), start=1):
        if not any(space.distance(p, r) == 0 for p in schedule.configs[step]):
            bad.append(t)
    return bad
