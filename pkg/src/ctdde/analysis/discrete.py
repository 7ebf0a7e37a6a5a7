"""Sufficient oscillation tests for discrete comparison equations and the
pipelines that feed them rigorous envelopes.

The comparison equation is ``y(n+1) - y(n) + sum_k p_k y(n - sigma_k) = 0``
with lower coefficient bounds ``p_k`` and delay lower bounds ``sigma_k``.
If all its solutions oscillate, the continuous-time equation has no
positive solution with a positive infimum on every bounded segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..engine import EquationSpec
from ..envelope import DEFAULT_ALPHA_GRID, RIGOROUS, compute_envelopes
from ..expr import evaluate
from .verdict import Tag, Verdict

__all__ = [
    "DiscreteTestInput", "discrete_oscillation_test", "critical_factor", "threshold",
    "thm2_verdict", "lemma_constant_delay_tests", "constant_delays",
]

# guards the float-only geometric-mean test against rounding at the boundary
_GM_MARGIN = 1e-12


def critical_factor(sigma) -> Fraction | float:
    """(sigma+1)^(sigma+1) / sigma^sigma, with 0^0 = 1; exact for integer sigma."""
    if float(sigma).is_integer():
        s = int(sigma)
        return Fraction((s + 1) ** (s + 1), s ** s if s else 1)
    s = float(sigma)
    return (s + 1) ** (s + 1) / s ** s


def threshold(sigma) -> Fraction | float:
    """sigma^sigma / (sigma+1)^(sigma+1)."""
    c = critical_factor(sigma)
    return 1 / c


@dataclass(frozen=True)
class DiscreteTestInput:
    p: tuple
    sigma: tuple
    seq_a: tuple | None = None     # single-delay sequence data a(n), n = seq_start, ...
    seq_h: tuple | None = None     # integer delays h(n) <= n
    seq_start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(self.p))
        object.__setattr__(self, "sigma", tuple(self.sigma))
        if len(self.p) != len(self.sigma):
            raise ValueError("p and sigma must have the same length")
        if any(not (q > 0) for q in self.p):
            raise ValueError(f"coefficient bounds must be positive, got {self.p}")
        if any(s < 0 for s in self.sigma):
            raise ValueError(f"delays must be nonnegative, got {self.sigma}")
        if (self.seq_a is None) != (self.seq_h is None):
            raise ValueError("seq_a and seq_h go together")
        if self.seq_a is not None and len(self.seq_a) != len(self.seq_h):
            raise ValueError("seq_a and seq_h must have the same length")


def _sum_test(inp: DiscreteTestInput):
    total = Fraction(0)
    exact = True
    for q, s in zip(inp.p, inp.sigma):
        c = critical_factor(s)
        exact = exact and isinstance(c, Fraction)
        total += Fraction(q) * Fraction(c)
    return total, exact


def _geometric_test(inp: DiscreteTestInput) -> float:
    m = len(inp.p)
    sigma = sum(float(s) for s in inp.sigma) / m
    gm = math.exp(sum(math.log(float(q)) for q in inp.p) / m)
    return m * gm * float(critical_factor(sigma))


def _running_sum_test(inp: DiscreteTestInput):
    best = (0.0, None)
    g = None
    a = [float(v) for v in inp.seq_a]
    for i, h in enumerate(inp.seq_h):
        n = inp.seq_start + i
        g = h if g is None else max(g, h)
        if g > n:
            raise ValueError(f"delay h({n}) = {h} exceeds n")
        if g < inp.seq_start:
            continue
        total = math.fsum(a[g - inp.seq_start: i + 1])
        if total > best[0]:
            best = (total, n)
    return best


def discrete_oscillation_test(inp: DiscreteTestInput) -> Verdict:
    """Oscillatory if any sufficient test fires (strict inequalities), else Inconclusive."""
    evidence = {"p": _fmt(inp.p), "sigma": _fmt(inp.sigma)}
    value, exact = _sum_test(inp)
    evidence["sum_test"] = repr(float(value))
    if value > 1:
        evidence["fired"] = "sum_test"
        evidence["sum_test_exact"] = "true" if exact else "false"
        return Verdict(Tag.OSCILLATORY, "weighted-sum oscillation test", evidence)
    gm = _geometric_test(inp)
    evidence["geometric_mean_test"] = repr(gm)
    if gm > 1 + _GM_MARGIN:
        evidence["fired"] = "geometric_mean_test"
        return Verdict(Tag.OSCILLATORY, "geometric-mean oscillation test", evidence)
    if inp.seq_a is not None:
        total, n = _running_sum_test(inp)
        evidence["running_sum_test"] = repr(total)
        if total > 1:
            evidence["fired"] = "running_sum_test"
            evidence["running_sum_n"] = n
            return Verdict(Tag.OSCILLATORY, "running-sum test over [g(n), n]", evidence,
                           ["finite-horizon proxy for the limsup condition"])
    return Verdict(Tag.INCONCLUSIVE, "discrete oscillation tests", evidence)


def _fmt(values) -> str:
    return "[" + ", ".join(repr(float(v)) if not isinstance(v, int) else str(v) for v in values) + "]"


def thm2_verdict(spec: EquationSpec, n_from: int, n_to: int, alpha_grid=DEFAULT_ALPHA_GRID) -> Verdict:
    """Comparison-equation pipeline over shifts ``alpha``.

    For each alpha the rigorous envelope gives p_k = min_n a_low[k][n] and
    sigma_k = min_n (n - hf_high[k][n]).  Two comparison equations are
    tried: one term per k, and a single term with coefficient
    min_n sum_k a_low[k][n] and delay min_k sigma_k (valid because a
    positive comparison solution is eventually non-increasing).
    """
    tried = []
    for alpha in alpha_grid:
        env = compute_envelopes(spec, n_from, n_to, alpha, RIGOROUS)
        p = [min(env.lower(k, n) for n in env.ns) for k in range(spec.m)]
        sigma = [min(n - env.floor_high(k, n) for n in env.ns) for k in range(spec.m)]
        if min(sigma) < 0:
            tried.append(f"alpha={float(alpha)!r}: delay floor ahead of n")
            continue
        candidates = []
        keep = [(q, s) for q, s in zip(p, sigma) if q > 0]
        if keep:
            candidates.append(("per_term", DiscreteTestInput([q for q, _ in keep], [s for _, s in keep])))
        agg = min(env.lower_sum(n) for n in env.ns)
        if agg > 0 and spec.m > 1:
            candidates.append(("aggregate", DiscreteTestInput([float(agg)], [min(sigma)])))
        for name, inp in candidates:
            v = discrete_oscillation_test(inp)
            tried.append(f"alpha={float(alpha)!r} {name}: {v.evidence.get('sum_test')}")
            if v.tag is Tag.OSCILLATORY:
                ev = {"alpha": repr(float(alpha)), "comparison": name,
                      "n_range": f"[{n_from}, {n_to}]", **v.evidence}
                ev["min_sum_a_low"] = repr(float(agg))
                ev["threshold_at_sigma"] = repr(float(threshold(min(sigma))))
                # the weaker delay bound sigma = 1 as a second reading
                ev["sum_test_at_sigma_1"] = repr(float(agg * critical_factor(1)))
                return Verdict(Tag.NO_POSITIVE_UNDER_COND5,
                               "comparison with an oscillatory discrete equation (shifted envelopes)",
                               ev, ["envelopes checked on the stated n range only"])
    return Verdict(Tag.INCONCLUSIVE, "comparison with an oscillatory discrete equation",
                   {"n_range": f"[{n_from}, {n_to}]", "alphas_tried": len(tried),
                    "last": tried[-1] if tried else "none"})


def constant_delays(spec: EquationSpec, t_from: float, t_to: float, Q: int = 16):
    """Delays sigma_k with h_k(t) = t - sigma_k on the grid, or raise ValueError."""
    out = []
    count = int(round((t_to - t_from) * Q))
    for k, h in enumerate(spec.delays, start=1):
        gaps = [(t_from + j / Q) - evaluate(h, t_from + j / Q) for j in range(count + 1)]
        lo, hi = min(gaps), max(gaps)
        if hi - lo > 1e-12 or lo <= 0:
            raise ValueError(f"h_{k} is not t - sigma with constant sigma > 0 on the range")
        sigma = (lo + hi) / 2
        out.append(int(round(sigma)) if abs(sigma - round(sigma)) <= 1e-12 else sigma)
    return out


def lemma_constant_delay_tests(spec: EquationSpec, n_from: int, n_to: int) -> Verdict:
    """Constant-delay oscillation (weighted-sum / geometric-mean) and the
    single-delay non-oscillation threshold a(t) <= sigma^sigma/(sigma+1)^(sigma+1)."""
    sigmas = constant_delays(spec, n_from, n_to + 1)
    env = compute_envelopes(spec, n_from, n_to, 0, RIGOROUS)
    p = [min(env.lower(k, n) for n in env.ns) for k in range(spec.m)]
    evidence = {"sigma": _fmt(sigmas), "n_range": f"[{n_from}, {n_to}]"}
    keep = [(q, s) for q, s in zip(p, sigmas) if q > 0]
    if keep:
        v = discrete_oscillation_test(DiscreteTestInput([q for q, _ in keep], [s for _, s in keep]))
        if v.tag is Tag.OSCILLATORY:
            return Verdict(Tag.OSCILLATORY, "constant-delay oscillation test (inf a_k bounds)",
                           {**evidence, **v.evidence},
                           ["coefficient infima taken over the stated n range"])
    if spec.m == 1:
        thr = threshold(sigmas[0])
        worst = max(env.upper(0, n) for n in env.ns)
        evidence["a_high_max"] = repr(worst)
        evidence["threshold"] = repr(float(thr))
        if Fraction(worst) <= Fraction(thr):
            return Verdict(Tag.NON_OSCILLATORY, "constant-delay non-oscillation threshold",
                           evidence, ["eventual inequality checked on the scanned horizon only"])
    return Verdict(Tag.INCONCLUSIVE, "constant-delay tests", evidence)
