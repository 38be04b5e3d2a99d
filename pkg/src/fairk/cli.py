"""Command-line interface: gen, opt, run, transform, audit and experiment.

Exit status 0 on success, 1 when a checked invariant fails, 2 on bad usage
or malformed input.
"""
from __future__ import annotations

import argparse
import csv
import inspect
import io
import itertools
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import serialize as ser
from .fairness_audit import (
    BASELINES,
    alpha_beta_residual,
    audit,
    baseline_value,
    summary,
)
from .instances import FAMILIES, dca_hard_opt_bound
from .metric_spaces import MetricError, as_rational
from .offline_fair import check_claims, fair_transform
from .offline_opt import opt_solve
from .online_core import ALGORITHMS, make_algorithm, run
from .online_fair import WRAPPERS, PhasedSwap
from .schedules import ledger_from_schedule, verify_schedule


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    pass


# -- helpers ---------------------------------------------------------------------

def _rational(text):
    try:
        return as_rational(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}")


def _write(path, text):
    """Write atomically: a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}")


def _load_instance(path):
    try:
        return ser.instance_from_json(_read_json(path))
    except (KeyError, TypeError, MetricError, ser.FormatError) as exc:
        raise UsageError(f"malformed instance {path}: {exc}")


def _show(x):
    x = Fraction(x)
    return str(x) if x.denominator == 1 else f"{x} (~{float(x):.4f})"


def generate(family: str, params: dict):
    try:
        gen = FAMILIES[family]
    except KeyError:
        raise UsageError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    sig = inspect.signature(gen)
    unknown = set(params) - set(sig.parameters)
    if unknown:
        raise UsageError(f"family {family} takes no parameter(s) {sorted(unknown)}")
    missing = [n for n, p in sig.parameters.items() if p.default is p.empty and n not in params]
    if missing:
        raise UsageError(f"family {family} needs {missing}")
    try:
        return gen(**params)
    except (MetricError, ValueError) as exc:
        raise UsageError(str(exc))


def parse_wrap(spec: str | None):
    """``phased:gamma=G,seed=S`` | ``acc2mul`` | ``add-end`` | ``add-2diam``."""
    if not spec:
        return None, {}
    name, _, rest = spec.partition(":")
    if name not in WRAPPERS:
        raise UsageError(f"unknown wrapper {name!r}; choose from {sorted(WRAPPERS)}")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise UsageError(f"wrapper option {item!r} must look like key=value")
        if name != "phased" or key not in ("gamma", "seed"):
            raise UsageError(f"wrapper {name} has no option {key!r}")
        try:
            params[key] = int(val) if key == "seed" else as_rational(val)
        except ValueError:
            raise UsageError(f"bad value for {key}: {val!r}")
    return name, params


def build_algorithm(alg: str, wrap: str | None = None, seed: int = 0, rule: str = "lowest"):
    if alg not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {alg!r}; choose from {sorted(ALGORITHMS)}")
    base = make_algorithm(alg, rule=rule, seed=seed) if alg == "marking" else make_algorithm(alg)
    name, params = parse_wrap(wrap)
    if name is None:
        return base
    if name == "phased":
        params.setdefault("seed", seed)
        return PhasedSwap(base, **params)
    return WRAPPERS[name](base)


def execute(inst, alg, wrap=None, seed=0, rule="lowest"):
    algorithm = build_algorithm(alg, wrap, seed, rule)
    try:
        schedule, ledger, trace = run(algorithm, inst.space, inst.start, inst.requests)
    except MetricError as exc:
        raise UsageError(str(exc))
    if verify_schedule(inst.space, schedule, inst.requests):
        raise InvariantViolation("schedule leaves requests uncovered")
    return algorithm, schedule, ledger, trace


# -- subcommands -------------------------------------------------------------------

GEN_FLAGS = ("k", "T", "n", "m", "r", "L", "eps", "seed", "max_len", "grid", "max_w", "cold")


def cmd_gen(args):
    params = {f: getattr(args, f) for f in GEN_FLAGS if getattr(args, f) not in (None, False)}
    inst = generate(args.family, params)
    _write(args.out, ser.dumps(ser.instance_to_json(inst)))
    print(f"{args.family}: k={inst.k}, T={inst.T}, diam={_show(inst.space.diameter())} -> {args.out}")


def cmd_opt(args):
    inst = _load_instance(args.input)
    try:
        sol = opt_solve(inst.space, inst.start, inst.requests)
    except MetricError as exc:
        raise UsageError(str(exc))
    if args.out:
        _write(args.out, ser.dumps(ser.opt_to_json(sol)))
    if args.ledger:
        _write(args.ledger, ser.dumps(ser.ledger_to_json(ledger_from_schedule(inst.space, sol.schedule))))
    print(f"OPT = {_show(sol.cost)}")


def cmd_run(args):
    inst = _load_instance(args.input)
    algorithm, schedule, ledger, trace = execute(inst, args.alg, args.wrap, args.seed, args.rule)
    if args.trace:
        _write(args.trace, ser.trace_to_jsonl(trace))
    if args.ledger:
        _write(args.ledger, ser.dumps(ser.ledger_to_json(ledger)))
    if args.schedule:
        _write(args.schedule, ser.dumps(ser.schedule_to_json(schedule)))
    if args.curves:
        _write(args.curves, ser.curves_csv(ledger))
    if args.plot:
        from .plotting import plot_curves
        Path(args.plot).parent.mkdir(parents=True, exist_ok=True)
        plot_curves(ledger, args.plot, title=algorithm.name)
    print(f"{algorithm.name}: T={inst.T}, steps={ledger.steps}, total={_show(ledger.total)}")
    for i, c in enumerate(ledger.totals, start=1):
        print(f"  server {i}: {_show(c)}")
    if isinstance(algorithm, PhasedSwap):
        print(f"  phases m = {algorithm.phase}")


def cmd_transform(args):
    inst = _load_instance(args.input)
    sol = opt_solve(inst.space, inst.start, inst.requests)
    source = sol
    if args.schedule:
        try:
            source = ser.schedule_from_json(inst.space, _read_json(args.schedule))
        except (KeyError, MetricError, ser.FormatError) as exc:
            raise UsageError(f"malformed schedule: {exc}")
    reference = args.reference
    try:
        res = fair_transform(inst.space, source, args.epsilon, requests=inst.requests, reference=reference)
    except ValueError as exc:
        raise UsageError(str(exc))
    problems = check_claims(inst.space, res) if source is sol and reference is None else []
    if verify_schedule(inst.space, res.schedule, inst.requests):
        problems.append("transformed schedule is infeasible")
    if args.out:
        _write(args.out, ser.dumps(ser.transform_to_json(res)))
    print(f"OPT = {_show(sol.cost)}, reference w = {_show(res.reference)}, beta = {_show(res.beta)}")
    print(f"swaps: {len(res.swaps)} (bound k*q = {inst.k * res.q})")
    print(f"max server cost: {_show(max(res.ledger.totals))}, "
          f"guard (1+eps) w/k + beta = {_show((1 + res.epsilon) * res.reference / inst.k + res.beta)}")
    if problems:
        raise InvariantViolation("; ".join(problems))


def cmd_audit(args):
    if args.ensemble:
        return _audit_ensemble(args)
    if not args.ledger:
        raise UsageError("audit needs --ledger (or --ensemble N with --in and --alg)")
    try:
        ledger = ser.ledger_from_json(_read_json(args.ledger))
    except (ser.FormatError, ValueError, TypeError) as exc:
        raise UsageError(f"malformed ledger: {exc}")
    opt_cost = args.opt_cost
    if opt_cost is None and args.input:
        inst = _load_instance(args.input)
        opt_cost = opt_solve(inst.space, inst.start, inst.requests).cost
    try:
        rep = audit(ledger, args.baseline, args.alpha, opt_cost, args.value)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.out:
        _write(args.out, ser.dumps(ser.report_to_json(rep)))
    print(summary(rep))


def _audit_ensemble(args):
    if not (args.input and args.alg):
        raise UsageError("--ensemble needs --in and --alg")
    inst = _load_instance(args.input)
    diam = inst.space.diameter()
    opt_cost = args.opt_cost
    if opt_cost is None and args.baseline in ("opt", "k-times-opt"):
        opt_cost = opt_solve(inst.space, inst.start, inst.requests).cost
    rows, hits = [], 0
    for seed in range(args.seed, args.seed + args.ensemble):
        algorithm, _, ledger, _ = execute(inst, args.alg, args.wrap, seed, args.rule)
        m = getattr(algorithm, "phase", 0)
        beta = args.beta + args.beta_phases * m * diam
        w = baseline_value(args.baseline, ledger, opt_cost, args.value)
        residual = alpha_beta_residual(ledger, w, args.alpha)
        ok = residual <= beta
        hits += ok
        rows.append([seed, m, str(ledger.total), str(max(ledger.totals)), str(residual), str(beta), int(ok)])
    freq = Fraction(hits, args.ensemble)
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["seed", "phases", "total", "max_server", "beta_residual", "beta", "fair"])
        w.writerows(rows)
        _write(args.out, buf.getvalue())
    print(f"ensemble of {args.ensemble} seeds: fraction (alpha={_show(args.alpha)}, beta) fair = "
          f"{hits}/{args.ensemble} = {float(freq):.4f}")


# -- experiments -------------------------------------------------------------------

CONFIG_KEYS = {"instances", "algorithms", "audit", "output", "workers"}
INSTANCE_KEYS = {"family", "file", "params"}
ALGORITHM_KEYS = {"alg", "wrap", "rule", "seeds"}
AUDIT_KEYS = {"alpha", "baseline", "value", "beta", "beta_phases", "opt"}
OUTPUT_KEYS = {"csv", "curves_dir", "figures", "summary"}

CSV_COLUMNS = [
    "instance", "family", "k", "T", "diam", "alg", "wrap", "seed",
    "total", "max_server", "min_server", "server_1", "additive_gap", "beta_residual",
    "multiplicative_ratio", "egalitarian", "opt", "server_1_over_opt",
    "opt_bound", "server_1_over_opt_bound", "phases", "swaps", "fair",
]


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise UsageError(f"{where} must be a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        raise UsageError(f"unknown key(s) {sorted(unknown)} in {where}")


def _expand(params: dict) -> list[dict]:
    """Cartesian product over list-valued parameters."""
    keys = sorted(params)
    values = [params[k] if isinstance(params[k], list) else [params[k]] for k in keys]
    return [dict(zip(keys, combo)) for combo in itertools.product(*values)]


def _params(raw: dict) -> dict:
    out = {}
    for k, v in raw.items():
        if k in ("eps", "L"):
            v = [str(x) for x in v] if isinstance(v, list) else str(v)
            v = [as_rational(x) for x in v] if isinstance(v, list) else as_rational(v)
        out[k] = v
    return out


def load_config(obj) -> dict:
    _check_keys(obj, CONFIG_KEYS, "config")
    insts = obj.get("instances", [])
    algs = obj.get("algorithms", [])
    if not isinstance(insts, list) or not isinstance(algs, list):
        raise UsageError("'instances' and 'algorithms' must be lists")
    for i, spec in enumerate(insts):
        _check_keys(spec, INSTANCE_KEYS, f"instances[{i}]")
        if ("family" in spec) == ("file" in spec):
            raise UsageError(f"instances[{i}] needs exactly one of 'family' or 'file'")
    for i, spec in enumerate(algs):
        _check_keys(spec, ALGORITHM_KEYS, f"algorithms[{i}]")
        if spec.get("alg") not in ALGORITHMS:
            raise UsageError(f"algorithms[{i}]: unknown algorithm {spec.get('alg')!r}")
        parse_wrap(spec.get("wrap"))
    aud = obj.get("audit", {})
    _check_keys(aud, AUDIT_KEYS, "audit")
    if aud.get("baseline", "alg-total") not in BASELINES:
        raise UsageError(f"audit.baseline must be one of {BASELINES}")
    out = obj.get("output", {})
    _check_keys(out, OUTPUT_KEYS, "output")
    if "csv" not in out:
        raise UsageError("output.csv is required")
    workers = obj.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise UsageError("workers must be a positive integer")
    return {"instances": insts, "algorithms": algs, "audit": aud, "output": out, "workers": workers}


def _cells(cfg, base_dir: Path):
    instances = []
    for spec in cfg["instances"]:
        if "file" in spec:
            path = Path(spec["file"])
            instances.append(("file", _load_instance(path if path.is_absolute() else base_dir / path)))
            continue
        for params in _expand(_params(spec.get("params", {}))):
            instances.append((spec["family"], generate(spec["family"], params)))
    cells = []
    for n, (family, inst) in enumerate(instances):
        for spec in cfg["algorithms"]:
            seeds = spec.get("seeds", [0])
            seeds = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
            for seed in seeds:
                cells.append((len(cells), n, family, inst, spec, seed))
    return cells


def _run_cell(cell, aud, curves_dir, figures):
    index, n, family, inst, spec, seed = cell
    algorithm, _, ledger, _ = execute(inst, spec["alg"], spec.get("wrap"), seed, spec.get("rule", "lowest"))
    opt_cost = None
    if aud.get("opt") or aud.get("baseline") in ("opt", "k-times-opt"):
        opt_cost = opt_solve(inst.space, inst.start, inst.requests).cost
    baseline = aud.get("baseline", "alg-total")
    value = as_rational(str(aud["value"])) if "value" in aud else None
    rep = audit(ledger, baseline, as_rational(str(aud.get("alpha", 1))), opt_cost, value)
    diam = inst.space.diameter()
    m = getattr(algorithm, "phase", 0)
    beta = as_rational(str(aud.get("beta", 0))) + as_rational(str(aud.get("beta_phases", 0))) * m * diam
    bound = None
    if family == "dca-hard":
        p = inst.provenance
        bound = dca_hard_opt_bound(p["k"], as_rational(p["eps"]), p["r"])
    c1 = ledger.totals[0]
    div = lambda a, b: "" if b in (None, 0) else str(a / b)
    row = {
        "instance": n, "family": family, "k": inst.k, "T": inst.T, "diam": str(diam),
        "alg": spec["alg"], "wrap": spec.get("wrap") or "", "seed": seed,
        "total": str(ledger.total), "max_server": str(max(ledger.totals)),
        "min_server": str(min(ledger.totals)), "server_1": str(c1),
        "additive_gap": str(rep.additive_gap), "beta_residual": str(rep.beta_residual),
        "multiplicative_ratio": "inf" if isinstance(rep.multiplicative_ratio, float) else str(rep.multiplicative_ratio),
        "egalitarian": str(rep.egalitarian), "opt": "" if opt_cost is None else str(opt_cost),
        "server_1_over_opt": div(c1, opt_cost), "opt_bound": "" if bound is None else str(bound),
        "server_1_over_opt_bound": div(c1, bound), "phases": m,
        "swaps": sum(1 for t in ledger.tags if t is not None and t.endswith("swap")),
        "fair": int(rep.beta_residual <= beta),
    }
    if curves_dir is not None:
        stem = f"cell{index:04d}_{family}_{spec['alg']}_s{seed}"
        _write(curves_dir / f"{stem}.csv", ser.curves_csv(ledger))
        if figures:
            from .plotting import plot_curves
            plot_curves(ledger, curves_dir / f"{stem}.png", title=f"{family} / {algorithm.name} / seed {seed}")
    return row


def run_experiment(cfg, base_dir: Path = Path(".")):
    out = cfg["output"]
    csv_path = Path(out["csv"])
    curves_dir = Path(out["curves_dir"]) if out.get("curves_dir") else None
    figures = bool(out.get("figures", False))
    cells = _cells(cfg, base_dir)
    args = (cfg["audit"], curves_dir, figures)
    if cfg["workers"] > 1 and len(cells) > 1:
        with ProcessPoolExecutor(cfg["workers"]) as pool:
            rows = list(pool.map(_run_cell, cells, *[[a] * len(cells) for a in args]))
    else:
        rows = [_run_cell(c, *args) for c in cells]
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _write(csv_path, buf.getvalue())
    fair = sum(r["fair"] for r in rows)
    line = f"runs={len(rows)} fair={fair} frequency={fair / len(rows):.4f}" if rows else "runs=0"
    if out.get("summary"):
        _write(out["summary"], line + "\n")
    if figures and rows:
        _grid_figure(rows, csv_path)
    return rows, line


def _grid_figure(rows, csv_path):
    """Server-1/OPT-bound ratio against k when the grid covers several k."""
    pts = sorted({(r["k"], Fraction(r["server_1_over_opt_bound"])) for r in rows if r["server_1_over_opt_bound"]})
    if len({k for k, _ in pts}) > 1:
        from .plotting import plot_column
        plot_column([k for k, _ in pts], [v for _, v in pts], csv_path.with_suffix(".ratio.png"),
                    "k", "server 1 cost / OPT upper bound")


def cmd_experiment(args):
    cfg = load_config(_read_json(args.config))
    if args.out:
        cfg["output"]["csv"] = args.out
    if args.workers:
        cfg["workers"] = args.workers
    rows, line = run_experiment(cfg, Path(args.config).parent)
    print(line)


# -- entry point -----------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="fairk", description="Fairness tools for the k-server problem.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--family", required=True, choices=sorted(FAMILIES))
    for flag in ("k", "T", "n", "m", "r", "seed", "grid", "max-len", "max-w"):
        g.add_argument(f"--{flag}", type=int)
    g.add_argument("--L", type=_rational)
    g.add_argument("--eps", type=_rational)
    g.add_argument("--cold", action="store_true")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("opt", help="solve the offline optimum")
    o.add_argument("--in", dest="input", required=True)
    o.add_argument("--out")
    o.add_argument("--ledger")
    o.set_defaults(func=cmd_opt)

    r = sub.add_parser("run", help="run an online algorithm, optionally wrapped")
    r.add_argument("--alg", required=True, choices=sorted(ALGORITHMS))
    r.add_argument("--wrap", help="phased:gamma=G,seed=S | acc2mul | add-end | add-2diam")
    r.add_argument("--rule", default="lowest", choices=["lowest", "random"])
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--trace")
    r.add_argument("--ledger")
    r.add_argument("--schedule")
    r.add_argument("--curves", help="cumulative-cost CSV")
    r.add_argument("--plot", help="cumulative-cost figure (png, pdf, svg)")
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("transform", help="offline fair transformation")
    t.add_argument("--in", dest="input", required=True)
    t.add_argument("--epsilon", type=_rational, required=True)
    t.add_argument("--schedule", help="input schedule JSON (default: OPT)")
    t.add_argument("--reference", type=_rational, help="reference cost w (default: OPT)")
    t.add_argument("--out")
    t.set_defaults(func=cmd_transform)

    a = sub.add_parser("audit", help="fairness report for a ledger or a seeded ensemble")
    a.add_argument("--ledger")
    a.add_argument("--baseline", default="alg-total", choices=BASELINES)
    a.add_argument("--value", type=_rational)
    a.add_argument("--alpha", type=_rational, default=Fraction(1))
    a.add_argument("--opt-cost", type=_rational)
    a.add_argument("--in", dest="input")
    a.add_argument("--ensemble", type=int)
    a.add_argument("--alg", choices=sorted(ALGORITHMS))
    a.add_argument("--wrap")
    a.add_argument("--rule", default="lowest", choices=["lowest", "random"])
    a.add_argument("--seed", type=int, default=0, help="first seed of the ensemble")
    a.add_argument("--beta", type=_rational, default=Fraction(0))
    a.add_argument("--beta-phases", type=_rational, default=Fraction(0),
                   help="add this many diam per phase to beta")
    a.add_argument("--out")
    a.set_defaults(func=cmd_audit)

    e = sub.add_parser("experiment", help="run a JSON-configured grid")
    e.add_argument("config")
    e.add_argument("--out", help="override output.csv")
    e.add_argument("--workers", type=int)
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"fairk: error: {exc}", file=sys.stderr)
        return 2
    except (InvariantViolation, AssertionError) as exc:
        print(f"fairk: invariant violated: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
