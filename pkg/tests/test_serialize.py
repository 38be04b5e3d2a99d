import json
from fractions import Fraction

import pytest

from conftest import mixed_instance
from fairk import serialize as ser
from fairk.fairness_audit import audit
from fairk.instances import gen_dca_hard, gen_random_line, gen_random_tree, gen_random_uniform
from fairk.offline_fair import fair_transform
from fairk.offline_opt import opt_solve
from fairk.online_core import DCA, Greedy, run
from fairk.online_fair import PhasedSwap


def roundtrip(obj):
    return json.loads(json.dumps(obj))


def test_rationals():
    assert ser.rat_to_json(Fraction(3)) == 3
    doc = ser.rat_to_json(Fraction(1, 3))
    assert doc["num"] == 1 and doc["den"] == 3
    assert ser.rat_from_json({"num": 1, "den": 3, "decimal": 99.0}) == Fraction(1, 3)
    assert ser.rat_from_json(7) == 7
    assert ser.rat_from_json("5/2") == Fraction(5, 2)
    with pytest.raises(ser.FormatError):
        ser.rat_from_json(0.5)
    with pytest.raises(ser.FormatError):
        ser.rat_to_json(0.5)


def test_instances_roundtrip():
    cases = [mixed_instance(s, t_max=10) for s in range(20)] + [gen_dca_hard(3, Fraction(1, 100), 2)]
    for inst in cases:
        back = ser.instance_from_json(roundtrip(ser.instance_to_json(inst)))
        assert back == inst
        assert back.space == inst.space


def test_edge_points_roundtrip():
    inst = gen_random_tree(2, 3, 30, 6)
    sched, led, trace = run(DCA(), inst.space, inst.start, inst.requests)
    assert ser.schedule_from_json(inst.space, roundtrip(ser.schedule_to_json(sched))) == sched
    back = ser.trace_from_jsonl(inst.space, ser.trace_to_jsonl(trace))
    assert back.start == trace.start
    assert back.steps == trace.steps


def test_ledger_and_report_roundtrip():
    inst = gen_random_uniform(3, 3, 60, 5)
    _, led, _ = run(PhasedSwap(Greedy(), 1, seed=2), inst.space, inst.start, inst.requests)
    assert ser.ledger_from_json(roundtrip(ser.ledger_to_json(led))) == led
    for rep in (audit(led, "alg-total", 1), audit([4, 0], "opt", Fraction(3, 2), opt_cost=3)):
        assert ser.report_from_json(roundtrip(ser.report_to_json(rep))) == rep


def test_opt_and_transform_roundtrip():
    inst = gen_random_line(5, 2, 12)
    sol = opt_solve(inst.space, inst.start, inst.requests)
    assert ser.opt_from_json(inst.space, roundtrip(ser.opt_to_json(sol))) == sol
    res = fair_transform(inst.space, sol, Fraction(1, 2))
    assert ser.transform_from_json(inst.space, roundtrip(ser.transform_to_json(res))) == res
    s, _, _ = run(Greedy(), inst.space, inst.start, inst.requests * 20)


def test_curves_csv():
    inst = gen_random_line(1, 2, 10)
    _, led, _ = run(Greedy(), inst.space, inst.start, inst.requests)
    text = ser.curves_csv(led)
    assert text.splitlines()[0] == "step,tag,server_1,server_2"
    tags, curves = ser.read_curves_csv(text)
    assert curves[0][1:] == led.cumulative(0)
    assert curves[1][-1] == led.totals[1]
    assert tags == list(led.tags)


def test_bad_space_kind():
    with pytest.raises(ser.FormatError):
        ser.space_from_json({"kind": "torus"})
