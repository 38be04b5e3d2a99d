import random
from fractions import Fraction

import pytest

from fairk.instances import gen_random_line, gen_random_tree
from fairk.metric_spaces import LineMetric, UniformMetric
from fairk.online_core import DCA, Greedy, run
from fairk.schedules import CostLedger, Schedule, ShapeError, ledger_from_schedule, verify_schedule


def test_stationary_schedule_has_zero_ledger():
    s = Schedule([(0, 1)] * 4)
    led = ledger_from_schedule(UniformMetric(3), s)
    assert led.totals == (0, 0)
    assert led.total == 0


def test_single_server_line():
    s = Schedule([(0,), (3,), (1,)])
    led = ledger_from_schedule(LineMetric(5), s)
    assert led.costs == ((3, 2),)
    assert led.total == 5
    assert led.cumulative(0) == [3, 5]


def test_two_servers_uniform():
    s = Schedule([(0, 1), (2, 1), (2, 0)])
    led = ledger_from_schedule(UniformMetric(3), s)
    assert led.costs == ((1, 0), (0, 1))
    assert led.total == 2
    assert led.step_totals() == [1, 1]


def test_shape_errors():
    with pytest.raises(ShapeError):
        Schedule([(0, 1), (0,)])
    with pytest.raises(ShapeError):
        Schedule([])
    with pytest.raises(ShapeError):
        CostLedger(((1, 2), (1,)))
    with pytest.raises(ValueError):
        CostLedger(((Fraction(-1),),))
    with pytest.raises(ShapeError):
        verify_schedule(UniformMetric(3), Schedule([(0,), (1,)]), [1, 2])


def test_verify_reports_uncovered_steps():
    u = UniformMetric(4)
    s = Schedule([(0, 1), (2, 1), (2, 1), (2, 3)])
    assert verify_schedule(u, s, [2, 1, 3]) == []
    assert verify_schedule(u, s, [2, 1, 0]) == [3]
    assert verify_schedule(u, Schedule([(0, 1)]), []) == []


def test_extra_steps_are_skipped_by_verification():
    u = UniformMetric(4)
    s = Schedule([(0, 1), (2, 1), (1, 2)], tags=(None, "swap"))
    assert s.T == 1 and s.steps == 2
    assert s.request_steps() == [1]
    assert verify_schedule(u, s, [2]) == []
    led = ledger_from_schedule(u, s)
    assert led.total == 3
    assert led.request_cost() == 1


def test_ledger_matches_trace_segments():
    for seed in range(30):
        inst = gen_random_tree(seed, 3, 30, 8) if seed % 2 else gen_random_line(seed, 3, 30)
        schedule, ledger, trace = run(DCA(), inst.space, inst.start, inst.requests)
        assert trace.segment_total() == ledger.total
        assert ledger_from_schedule(inst.space, schedule).total <= ledger.total
        for step in trace.steps:
            for i, segs in step.segments.items():
                assert sum(seg[2] for seg in segs) == step.step_costs[i]
        configs = [trace.start] + [s.config for s in trace.steps]
        assert tuple(configs) == schedule.configs


def test_relabelling_preserves_feasibility_and_totals():
    for seed in range(20):
        inst = gen_random_line(seed, 4, 25)
        schedule, ledger, _ = run(Greedy(), inst.space, inst.start, inst.requests)
        perm = list(range(4))
        random.Random(seed).shuffle(perm)
        relabelled = Schedule([tuple(c[p] for p in perm) for c in schedule.configs])
        assert verify_schedule(inst.space, relabelled, inst.requests) == []
        assert sorted(ledger_from_schedule(inst.space, relabelled).totals) == sorted(ledger.totals)


def test_from_totals():
    led = CostLedger.from_totals([3, Fraction(1, 2)])
    assert led.totals == (3, Fraction(1, 2))
    assert led.k == 2
