import random
from fractions import Fraction

import pytest

from fairk.instances import gen_random_line, gen_random_tree, gen_random_uniform
from fairk.metric_spaces import LineMetric, UniformMetric
from fairk.online_core import DCA, FIFO, Greedy, run
from fairk.online_fair import (
    AcceptableToMultiplicative,
    DomainError,
    EndAwareAdditive,
    OnlineAdditive2Diam,
    PhasedSwap,
    budget_reached,
    end_aware_additive,
    phase_budget,
)
from fairk.schedules import CORRECTION, PHASE_SWAP, TAIL_CORRECTION, verify_schedule


def test_phase_budget_exact_forms():
    assert phase_budget(5, 1) == 5
    assert phase_budget(3, 2) == 9
    assert phase_budget(4, Fraction(1, 2)) == 2
    assert phase_budget(27, Fraction(2, 3)) == 9
    phi = phase_budget(2, Fraction(1, 2))
    assert phi ** 2 >= 2
    assert (phi - Fraction(1, 2 ** 32)) ** 2 < 2


def test_budget_reached_is_exact():
    assert budget_reached(Fraction(2), 4, Fraction(1, 2))
    assert not budget_reached(Fraction(2) - Fraction(1, 10 ** 9), 4, Fraction(1, 2))
    assert budget_reached(Fraction(3, 2), 2, Fraction(1, 2))  # 9/4 >= 2
    assert not budget_reached(Fraction(7, 5), 2, Fraction(1, 2))  # 49/25 < 2


def test_gamma_domain():
    with pytest.raises(DomainError):
        PhasedSwap(Greedy(), gamma=0)


def test_single_server_phased_is_base():
    inst = gen_random_line(1, 1, 50)
    w = PhasedSwap(Greedy(), 1, seed=4)
    _, led, trace = run(w, inst.space, inst.start, inst.requests)
    _, base, _ = run(Greedy(), inst.space, inst.start, inst.requests)
    assert led.totals == base.totals
    assert any(s.tag == PHASE_SWAP for s in trace.steps)


def test_phased_swap_permutes_positions():
    for seed in range(20):
        inst = gen_random_uniform(seed, 4, 200, 7)
        w = PhasedSwap(FIFO(), 1, seed=seed)
        sched, led, trace = run(w, inst.space, inst.start, inst.requests)
        assert verify_schedule(inst.space, sched, inst.requests) == []
        for t, tag in enumerate(sched.tags, start=1):
            if tag == PHASE_SWAP:
                assert sorted(sched.configs[t - 1]) == sorted(sched.configs[t])
        assert sum(1 for s in trace.steps if s.tag == PHASE_SWAP) == w.phase


def test_phased_is_oblivious_to_labels():
    for seed in range(20):
        inst = gen_random_line(seed, 3, 80)
        _, base, _ = run(DCA(), inst.space, inst.start, inst.requests)
        _, led, _ = run(PhasedSwap(DCA(), 2, seed=seed), inst.space, inst.start, inst.requests)
        served = [c for c, tag in zip(led.step_totals(), led.tags) if tag is None]
        assert served == base.step_totals()


def test_phase_sandwich_and_swap_cost():
    for seed in range(40):
        rng = random.Random(seed)
        k = rng.randint(1, 5)
        inst = [gen_random_line(seed, k, 150), gen_random_uniform(seed, k, 150, k + 3)][seed % 2]
        gamma = [1, 2, Fraction(1, 2), Fraction(3, 2)][seed % 4]
        w = PhasedSwap(Greedy(), gamma, seed=seed)
        _, led, _ = run(w, inst.space, inst.start, inst.requests)
        diam = inst.space.diameter()
        base = sum(w.base_cost)
        phi = w.phase_budgets
        m = w.phase
        assert sum(phi[: m - 1]) <= base <= sum(p + diam for p in phi)
        assert led.total <= base + m * k * diam


def test_phased_seed_determinism():
    inst = gen_random_uniform(9, 3, 100, 6)
    a = run(PhasedSwap(FIFO(), 1, seed=7), inst.space, inst.start, inst.requests)[1]
    b = run(PhasedSwap(FIFO(), 1, seed=7), inst.space, inst.start, inst.requests)[1]
    assert a == b


def test_acc2mul_single_server():
    inst = gen_random_line(2, 1, 30)
    w = AcceptableToMultiplicative(Greedy())
    _, led, trace = run(w, inst.space, inst.start, inst.requests)
    h, diam = w.h, inst.space.diameter()
    assert h + diam <= led.totals[0] <= h + 2 * diam
    tags = [s.tag for s in trace.steps if s.tag]
    assert tags == [TAIL_CORRECTION]


def test_acc2mul_interval():
    for seed in range(40):
        rng = random.Random(seed)
        k = rng.randint(1, 5)
        inst = [gen_random_line(seed, k, 60), gen_random_uniform(seed, k, 60, k + 2), gen_random_tree(seed, k, 60, 7)][seed % 3]
        w = AcceptableToMultiplicative(Greedy())
        sched, led, _ = run(w, inst.space, inst.start, inst.requests)
        diam = inst.space.diameter()
        assert verify_schedule(inst.space, sched, inst.requests) == []
        for c in led.totals:
            assert max(w.h, diam) <= c <= 2 * w.h + 2 * diam
        if min(led.totals) > 0:
            assert max(led.totals) / min(led.totals) <= 4


def test_add2diam_keeps_gap_after_every_request():
    for seed in range(30):
        rng = random.Random(seed)
        k = rng.randint(1, 5)
        inst = [gen_random_line(seed, k, 80), gen_random_uniform(seed, k, 80, k + 2)][seed % 2]
        w = OnlineAdditive2Diam(Greedy())
        sched, led, _ = run(w, inst.space, inst.start, inst.requests)
        _, base, _ = run(Greedy(), inst.space, inst.start, inst.requests)
        diam = inst.space.diameter()
        cum = [led.cumulative(i) for i in range(k)]
        base_cum = [sum(col) for col in zip(*[base.cumulative(i) for i in range(k)])] if base.steps else []
        served = 0
        for t in range(led.steps):
            done = t + 1 == led.steps or led.tags[t + 1] is None
            if led.tags[t] is None:
                served += 1
            if done and served:
                col = [c[t] for c in cum]
                assert max(col) - min(col) <= 2 * diam
                assert max(col) <= base_cum[served - 1]
        assert led.total <= k * base.total
        assert verify_schedule(inst.space, sched, inst.requests) == []


def test_end_aware_balanced_base_untouched():
    _, base, _ = run(Greedy(), UniformMetric(3), (0, 1), [0, 1])
    _, led = end_aware_additive(Greedy(), UniformMetric(3), (0, 1), [0, 1])
    assert led == base


def test_end_aware_pads_into_window():
    for seed in range(30):
        rng = random.Random(seed)
        k = rng.randint(1, 5)
        inst = [gen_random_line(seed, k, 60), gen_random_uniform(seed, k, 60, k + 2), gen_random_tree(seed, k, 60, 6)][seed % 3]
        sched, led = end_aware_additive(Greedy(), inst.space, inst.start, inst.requests)
        _, base, _ = run(Greedy(), inst.space, inst.start, inst.requests)
        diam = inst.space.diameter()
        cmax = max(base.totals)
        assert max(led.totals) == cmax
        assert max(led.totals) - min(led.totals) <= diam
        assert led.total <= k * cmax
        assert verify_schedule(inst.space, sched, inst.requests) == []
        assert set(sched.tags) <= {None, CORRECTION}


def test_end_aware_spec_example():
    # costs (100, 0) with diam 10: server 1 shuttles between 0 and 1, server 2 idles at 10
    line = LineMetric(10)
    req = [1, 0] * 50
    w = EndAwareAdditive(Greedy())
    _, led, trace = run(w, line, (0, 10), req)
    assert led.totals[0] == 100
    assert 90 <= led.totals[1] <= 100
    assert trace.steps[-1].tag == CORRECTION
