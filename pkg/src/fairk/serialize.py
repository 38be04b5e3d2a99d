"""JSON, JSON-lines and CSV formats for instances, schedules, ledgers and reports.

Rationals are written as ints when integral, else as ``{"num", "den"}`` with
a ``decimal`` convenience field that readers ignore.
"""
from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

from .fairness_audit import FairnessReport
from .instances import Instance
from .metric_spaces import (
    EdgePoint,
    FiniteMetric,
    LineMetric,
    TreeMetric,
    UniformMetric,
    Vertex,
)
from .offline_fair import FairTransformResult, SwapRecord
from .offline_opt import OptSolution
from .schedules import CostLedger, Schedule, Trace, TraceStep


class FormatError(ValueError):
    pass


# -- scalars -------------------------------------------------------------------

def rat_to_json(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        raise FormatError(f"refusing to serialise float {x!r}")
    x = Fraction(x)
    if x.denominator == 1:
        return x.numerator
    return {"num": x.numerator, "den": x.denominator, "decimal": float(x)}


def rat_from_json(obj):
    if obj == "inf":
        return math.inf
    if isinstance(obj, bool):
        raise FormatError("booleans are not rationals")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    if isinstance(obj, dict) and "num" in obj and "den" in obj:
        if not isinstance(obj["num"], int) or not isinstance(obj["den"], int) or obj["den"] == 0:
            raise FormatError(f"bad rational {obj!r}")
        return Fraction(obj["num"], obj["den"])
    raise FormatError(f"not a rational: {obj!r}")


def _opt(f, x):
    return None if x is None else f(x)


# -- spaces and points ---------------------------------------------------------

def space_to_json(space) -> dict:
    if isinstance(space, LineMetric):
        return {"kind": "line", "length": rat_to_json(space.length)}
    if isinstance(space, UniformMetric):
        return {"kind": "uniform", "n": space.n, "scale": rat_to_json(space.scale)}
    if isinstance(space, FiniteMetric):
        return {"kind": "finite", "matrix": [[rat_to_json(x) for x in r] for r in space.matrix]}
    if isinstance(space, TreeMetric):
        return {
            "kind": "tree",
            "vertices": list(space.vertices),
            "edges": [[u, v, rat_to_json(w)] for u, v, w in space.edges],
        }
    raise FormatError(f"cannot serialise {space!r}")


def space_from_json(obj):
    kind = obj.get("kind") if isinstance(obj, dict) else None
    if kind == "line":
        return LineMetric(rat_from_json(obj["length"]))
    if kind == "uniform":
        return UniformMetric(obj["n"], rat_from_json(obj.get("scale", 1)))
    if kind == "finite":
        return FiniteMetric([[rat_from_json(x) for x in r] for r in obj["matrix"]])
    if kind == "tree":
        return TreeMetric(obj["vertices"], [(u, v, rat_from_json(w)) for u, v, w in obj["edges"]])
    raise FormatError(f"unknown space kind {kind!r}")


def point_to_json(p):
    if isinstance(p, Vertex):
        return {"vertex": p.id}
    if isinstance(p, EdgePoint):
        return {"edge": p.edge, "offset": rat_to_json(p.offset)}
    if isinstance(p, Fraction):
        return rat_to_json(p)
    return p


def point_from_json(space, obj):
    if isinstance(space, TreeMetric):
        if "vertex" in obj:
            p = Vertex(obj["vertex"])
        else:
            p = space.edge_point(obj["edge"], rat_from_json(obj["offset"]))
    elif isinstance(space, LineMetric):
        p = rat_from_json(obj)
    else:
        p = obj
    space.check(p)
    return p


# -- composite documents ---------------------------------------------------------

def instance_to_json(inst: Instance) -> dict:
    return {
        "space": space_to_json(inst.space),
        "start": [point_to_json(p) for p in inst.start],
        "requests": [point_to_json(p) for p in inst.requests],
        "provenance": inst.provenance,
    }


def instance_from_json(obj) -> Instance:
    space = space_from_json(obj["space"])
    return Instance(
        space,
        [point_from_json(space, p) for p in obj["start"]],
        [point_from_json(space, p) for p in obj["requests"]],
        obj.get("provenance", {}),
    )


def schedule_to_json(s: Schedule) -> dict:
    return {
        "k": s.k,
        "configs": [[point_to_json(p) for p in c] for c in s.configs],
        "tags": list(s.tags),
    }


def schedule_from_json(space, obj) -> Schedule:
    return Schedule(
        tuple(tuple(point_from_json(space, p) for p in c) for c in obj["configs"]),
        tuple(obj["tags"]),
    )


def ledger_to_json(led: CostLedger) -> dict:
    return {
        "k": led.k,
        "costs": [[rat_to_json(x) for x in r] for r in led.costs],
        "tags": list(led.tags),
        "totals": [rat_to_json(x) for x in led.totals],
        "total": rat_to_json(led.total),
    }


def ledger_from_json(obj) -> CostLedger:
    if "costs" not in obj:
        raise FormatError("ledger document needs a 'costs' field")
    return CostLedger(
        tuple(tuple(rat_from_json(x) for x in r) for r in obj["costs"]),
        tuple(obj["tags"]) if "tags" in obj else None,
    )


_REPORT_RATS = ("total", "w", "alpha", "beta_residual", "additive_gap", "multiplicative_ratio", "egalitarian")
_REPORT_OPT_RATS = ("opt_cost", "acceptable_ratio", "competitive_ratio")


def report_to_json(rep: FairnessReport) -> dict:
    out = {"k": rep.k, "totals": [rat_to_json(x) for x in rep.totals], "baseline": rep.baseline}
    for name in _REPORT_RATS:
        out[name] = rat_to_json(getattr(rep, name))
    for name in _REPORT_OPT_RATS:
        out[name] = _opt(rat_to_json, getattr(rep, name))
    return out


def report_from_json(obj) -> FairnessReport:
    kw = {name: rat_from_json(obj[name]) for name in _REPORT_RATS}
    kw.update({name: _opt(rat_from_json, obj.get(name)) for name in _REPORT_OPT_RATS})
    return FairnessReport(
        k=obj["k"],
        totals=tuple(rat_from_json(x) for x in obj["totals"]),
        baseline=obj["baseline"],
        **kw,
    )


def opt_to_json(sol: OptSolution) -> dict:
    return {
        "cost": rat_to_json(sol.cost),
        "assignment": list(sol.assignment),
        "schedule": schedule_to_json(sol.schedule),
    }


def opt_from_json(space, obj) -> OptSolution:
    return OptSolution(
        schedule_from_json(space, obj["schedule"]),
        rat_from_json(obj["cost"]),
        tuple(obj.get("assignment", ())),
    )


def swap_to_json(s: SwapRecord) -> dict:
    return {
        "round": s.round,
        "heavy": s.heavy,
        "light": s.light,
        "split": s.split,
        "penalty_heavy": rat_to_json(s.penalty_heavy),
        "penalty_light": rat_to_json(s.penalty_light),
        "total_heavy": rat_to_json(s.total_heavy),
        "total_light": rat_to_json(s.total_light),
        "max_before": rat_to_json(s.max_before),
    }


def swap_from_json(obj) -> SwapRecord:
    ints = ("round", "heavy", "light", "split")
    return SwapRecord(**{k: (v if k in ints else rat_from_json(v)) for k, v in obj.items()})


def transform_to_json(res: FairTransformResult) -> dict:
    return {
        "epsilon": rat_to_json(res.epsilon),
        "beta": rat_to_json(res.beta),
        "reference": rat_to_json(res.reference),
        "q": res.q,
        "swaps": [swap_to_json(s) for s in res.swaps],
        "schedule": schedule_to_json(res.schedule),
        "ledger": ledger_to_json(res.ledger),
    }


def transform_from_json(space, obj) -> FairTransformResult:
    return FairTransformResult(
        schedule_from_json(space, obj["schedule"]),
        ledger_from_json(obj["ledger"]),
        tuple(swap_from_json(s) for s in obj["swaps"]),
        rat_from_json(obj["beta"]),
        rat_from_json(obj["epsilon"]),
        rat_from_json(obj["reference"]),
        obj["q"],
    )


# -- traces and curves -------------------------------------------------------------

def trace_to_jsonl(trace: Trace) -> str:
    lines = [json.dumps({"start": [point_to_json(p) for p in trace.start]})]
    for s in trace.steps:
        rec = {
            "t": s.t,
            "request": _opt(point_to_json, s.request),
            "segments": {
                str(i): [[point_to_json(a), point_to_json(b), rat_to_json(d)] for a, b, d in segs]
                for i, segs in sorted(s.segments.items())
            },
            "step_costs": [rat_to_json(x) for x in s.step_costs],
            "config": [point_to_json(p) for p in s.config],
            "tag": s.tag,
        }
        if s.info:
            rec["info"] = s.info
        lines.append(json.dumps(rec))
    return "\n".join(lines) + "\n"


def trace_from_jsonl(space, text: str) -> Trace:
    rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not rows or "start" not in rows[0]:
        raise FormatError("trace must open with a start record")
    pt = lambda o: point_from_json(space, o)
    trace = Trace(tuple(pt(p) for p in rows[0]["start"]))
    for r in rows[1:]:
        trace.steps.append(TraceStep(
            r["t"],
            None if r["request"] is None else pt(r["request"]),
            {int(i): [(pt(a), pt(b), rat_from_json(d)) for a, b, d in segs] for i, segs in r["segments"].items()},
            tuple(rat_from_json(x) for x in r["step_costs"]),
            tuple(pt(p) for p in r["config"]),
            r["tag"],
            r.get("info", {}),
        ))
    return trace


def curves_csv(ledger: CostLedger) -> str:
    """Cumulative per-server cost after every step, one row per step."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "tag"] + [f"server_{i + 1}" for i in range(ledger.k)])
    cums = [ledger.cumulative(i) for i in range(ledger.k)]
    w.writerow([0, ""] + [0] * ledger.k)
    for t in range(ledger.steps):
        w.writerow([t + 1, ledger.tags[t] or ""] + [str(c[t]) for c in cums])
    return buf.getvalue()


def read_curves_csv(text: str) -> tuple[list, list[list[Fraction]]]:
    rows = list(csv.reader(io.StringIO(text)))
    body = rows[1:]
    tags = [r[1] or None for r in body[1:]]
    k = len(rows[0]) - 2
    return tags, [[Fraction(r[2 + i]) for r in body] for i in range(k)]


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"
