"""Fairness measures computed from a cost ledger against a reference baseline."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .metric_spaces import as_rational
from .schedules import CostLedger

INFINITE = math.inf
BASELINES = ("opt", "alg-total", "k-times-opt", "value")


class DomainError(ValueError):
    pass


class UndefinedRatio(ArithmeticError):
    pass


def _totals(ledger) -> tuple:
    if isinstance(ledger, CostLedger):
        return ledger.totals
    return tuple(as_rational(x) for x in ledger)


def alpha_beta_residual(ledger, w, alpha=1) -> Fraction:
    """Smallest beta for which the ledger is (alpha, beta)-fair w.r.t. ``w``."""
    alpha, w = as_rational(alpha), as_rational(w)
    if alpha < 1:
        raise DomainError("alpha must be at least 1")
    if w < 0:
        raise DomainError("baseline must be non-negative")
    c = _totals(ledger)
    return max(Fraction(0), max(c) - alpha * w / len(c))


def additive_gap(ledger) -> Fraction:
    c = _totals(ledger)
    return max(c) - min(c)


def multiplicative_ratio(ledger) -> Union[Fraction, float]:
    """max/min of server totals; inf when the min is 0 but the max is not."""
    c = _totals(ledger)
    hi, lo = max(c), min(c)
    if hi == 0:
        return Fraction(1)
    if lo == 0:
        return INFINITE
    return hi / lo


def acceptable_ratio(ledger, opt_cost) -> Fraction:
    opt_cost = as_rational(opt_cost)
    hi = max(_totals(ledger))
    if opt_cost == 0:
        if hi == 0:
            return Fraction(0)
        raise UndefinedRatio("OPT is 0 but the ledger is not")
    if opt_cost < 0:
        raise DomainError("OPT cost must be non-negative")
    return hi / opt_cost


def egalitarian_cost(ledger) -> Fraction:
    return max(_totals(ledger))


def baseline_value(kind: str, ledger, opt_cost=None, value=None) -> Fraction:
    c = _totals(ledger)
    if kind == "alg-total":
        return sum(c, Fraction(0))
    if kind in ("opt", "k-times-opt"):
        if opt_cost is None:
            raise DomainError(f"baseline {kind!r} needs an OPT cost")
        return as_rational(opt_cost) * (len(c) if kind == "k-times-opt" else 1)
    if kind == "value":
        if value is None:
            raise DomainError("baseline 'value' needs an explicit number")
        return as_rational(value)
    raise DomainError(f"unknown baseline {kind!r}; choose from {BASELINES}")


@dataclass(frozen=True)
class FairnessReport:
    k: int
    totals: tuple
    total: Fraction
    baseline: str
    w: Fraction
    alpha: Fraction
    beta_residual: Fraction
    additive_gap: Fraction
    multiplicative_ratio: Union[Fraction, float]
    egalitarian: Fraction
    opt_cost: Optional[Fraction] = None
    acceptable_ratio: Optional[Fraction] = None
    competitive_ratio: Optional[Union[Fraction, float]] = None


def audit(ledger, baseline: str = "alg-total", alpha=1, opt_cost=None, value=None) -> FairnessReport:
    c = _totals(ledger)
    total = sum(c, Fraction(0))
    alpha = as_rational(alpha)
    w = baseline_value(baseline, c, opt_cost, value)
    acc = comp = None
    if opt_cost is not None:
        opt_cost = as_rational(opt_cost)
        acc = acceptable_ratio(c, opt_cost) if (opt_cost > 0 or total == 0) else None
        if opt_cost > 0:
            comp = total / opt_cost
        else:
            comp = Fraction(1) if total == 0 else INFINITE
    return FairnessReport(
        k=len(c),
        totals=tuple(c),
        total=total,
        baseline=baseline,
        w=w,
        alpha=alpha,
        beta_residual=alpha_beta_residual(c, w, alpha),
        additive_gap=additive_gap(c),
        multiplicative_ratio=multiplicative_ratio(c),
        egalitarian=egalitarian_cost(c),
        opt_cost=opt_cost,
        acceptable_ratio=acc,
        competitive_ratio=comp,
    )


def ensemble_frequency(ledgers, alpha, beta, baseline: str = "alg-total", opt_cost=None, value=None) -> Fraction:
    """Fraction of seeded runs whose ledger is (alpha, beta)-fair w.r.t. the baseline."""
    ledgers = list(ledgers)
    if not ledgers:
        return Fraction(0)
    beta = as_rational(beta)
    hits = sum(
        1 for led in ledgers
        if alpha_beta_residual(led, baseline_value(baseline, led, opt_cost, value), alpha) <= beta
    )
    return Fraction(hits, len(ledgers))


def summary(report: FairnessReport) -> str:
    def show(x):
        if x is None:
            return "-"
        if isinstance(x, float):
            return "inf"
        x = Fraction(x)
        return str(x) if x.denominator == 1 else f"{x} (~{float(x):.4f})"

    lines = [
        f"k = {report.k}, total = {show(report.total)}",
        f"server totals: {', '.join(show(x) for x in report.totals)}",
        f"baseline {report.baseline} = {show(report.w)}, alpha = {show(report.alpha)}",
        f"beta residual:        {show(report.beta_residual)}",
        f"additive gap:         {show(report.additive_gap)}",
        f"multiplicative ratio: {show(report.multiplicative_ratio)}",
        f"egalitarian cost:     {show(report.egalitarian)}",
    ]
    if report.opt_cost is not None:
        lines += [
            f"OPT:                  {show(report.opt_cost)}",
            f"acceptable ratio:     {show(report.acceptable_ratio)}",
            f"competitive ratio:    {show(report.competitive_ratio)}",
        ]
    return "\n".join(lines)
