"""The functional S(t) whose excess over 1 rules out positive
non-increasing solutions.

    S(t) = sum_{u in N(g(t), t)} sum_k a_k(u) prod_{r in N(h_k(u), g(t))} (1 - sum_i a_i(r))

``g`` is the running supremum of the delays, either an exact expression
supplied by the user or the grid approximation from ``running_sup``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..engine import EquationSpec
from ..expr import Expression, evaluate
from .groenwall import set_N, set_size
from .verdict import Tag, Verdict

__all__ = ["s_value", "s_scan", "ScanResult"]


def _g_at(g, t: float) -> float:
    if isinstance(g, Expression):
        return evaluate(g, t)
    return float(g(t))


def _inner_product(spec: EquationSpec, s: float, gt: float) -> float:
    if s > gt or set_size(s, gt) == 0:
        return 1.0
    return math.prod(1.0 - spec.coefficient_sum(r) for r in set_N(s, gt))


def s_value(spec: EquationSpec, g, t: float) -> float:
    if t < 1:
        raise ValueError(f"S(t) needs t >= 1, got {t!r}")
    gt = _g_at(g, t)
    if gt > t:
        raise ValueError(f"g({t!r}) = {gt!r} exceeds t")
    total = 0.0
    for u in set_N(gt, t):
        for a, h in spec.terms:
            total += evaluate(a, u) * _inner_product(spec, evaluate(h, u), gt)
    return total


@dataclass
class ScanResult:
    sup: float
    argmax: float
    verdict: Verdict
    values: list


def _iterates_positive(spec: EquationSpec, t: float, t_to: float, Q: int = 16) -> bool:
    count = max(0, int(math.floor((t_to - t) * Q)))
    for j in range(count + 1):
        s = t + j / Q
        for h in spec.delays:
            inner = evaluate(h, s)
            for h2 in spec.delays:
                if evaluate(h2, inner) <= 0:
                    return False
    return True


def s_scan(spec: EquationSpec, g, t_from: float, t_to: float, step: float = 1.0) -> ScanResult:
    """Scan S on ``t_from, t_from + step, ..., <= t_to``.

    A witness is a scanned t with S(t) > 1 after which every iterate
    h_k(h_j(s)) stays positive on the scanned range.  The largest valid
    witness value is reported.  Without one the result is Inconclusive:
    the theorem's hypothesis is a limsup and this is a finite horizon.
    """
    count = int(math.floor((t_to - t_from) / step + 1e-9))
    values = []
    for i in range(count + 1):
        t = t_from + i * step
        values.append((t, s_value(spec, g, t)))
    sup_t, sup_v = max(values, key=lambda p: (p[1], -p[0])) if values else (t_from, 0.0)
    witnesses = [(t, v) for t, v in values if v > 1 and _iterates_positive(spec, t, t_to)]
    caveat = "finite-horizon proxy for the limsup condition"
    g_kind = "expression" if isinstance(g, Expression) else "grid running sup"
    if witnesses:
        wt, wv = max(witnesses, key=lambda p: (p[1], -p[0]))
        verdict = Verdict(
            Tag.NO_POSITIVE_NONINCREASING, "S-functional (no positive non-increasing solutions)",
            {"t": repr(wt), "S": repr(wv), "g": g_kind, "g_at_t": repr(_g_at(g, wt)),
             "scan": f"[{t_from!r}, {t_to!r}] step {step!r}",
             "delay_iterates_positive_until": repr(t_to)},
            [caveat + "; a single witness with positive delay iterates suffices for the contradiction"])
    else:
        verdict = Verdict(Tag.INCONCLUSIVE, "S-functional (no positive non-increasing solutions)",
                          {"sup_S": repr(sup_v), "argmax_t": repr(sup_t), "g": g_kind,
                           "scan": f"[{t_from!r}, {t_to!r}] step {step!r}"},
                          [caveat])
    return ScanResult(sup_v, sup_t, verdict, values)
