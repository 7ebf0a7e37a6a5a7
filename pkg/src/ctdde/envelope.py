"""Per-unit-interval envelopes of coefficients and delay floors.

For each integer ``n`` and term ``k`` the table holds lower/upper bounds
of ``a_k`` and of ``floor(h_k)`` over ``[n + alpha, n + 1 + alpha)``.
Rigorous tables come from interval enclosures and are safe to feed into
theorem checks; sampled tables are grid extrema and only good for
diagnostics (a grid minimum overestimates the infimum).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .engine import EquationSpec
from .expr import EvalError, Expression, evaluate
from .interval import Interval, eval_interval
from .trajectory import DEFAULT_Q

__all__ = [
    "EnvelopeTable", "EnvelopeError", "RunningSup", "RIGOROUS", "SAMPLED",
    "compute_envelopes", "running_sup", "DEFAULT_ALPHA_GRID",
]

RIGOROUS = "rigorous"
SAMPLED = "sampled"
DEFAULT_ALPHA_GRID = tuple(Fraction(j, 16) for j in range(16))


class EnvelopeError(ValueError):
    pass


@dataclass
class EnvelopeTable:
    """Arrays are indexed ``[k, n - n_from]`` with ``k`` counted from 0."""

    n_from: int
    n_to: int
    alpha: Fraction
    mode: str
    a_low: np.ndarray
    a_high: np.ndarray
    hf_low: np.ndarray
    hf_high: np.ndarray

    @property
    def m(self) -> int:
        return self.a_low.shape[0]

    @property
    def ns(self) -> range:
        return range(self.n_from, self.n_to + 1)

    def _i(self, n: int) -> int:
        if not self.n_from <= n <= self.n_to:
            raise IndexError(f"n={n} outside [{self.n_from}, {self.n_to}]")
        return n - self.n_from

    def lower(self, k: int, n: int) -> float:
        return float(self.a_low[k, self._i(n)])

    def upper(self, k: int, n: int) -> float:
        return float(self.a_high[k, self._i(n)])

    def floor_low(self, k: int, n: int) -> int:
        return int(self.hf_low[k, self._i(n)])

    def floor_high(self, k: int, n: int) -> int:
        return int(self.hf_high[k, self._i(n)])

    def lower_sum(self, n: int) -> Fraction:
        """Exact sum over k of the lower coefficient bounds at ``n``."""
        return sum((Fraction(self.lower(k, n)) for k in range(self.m)), Fraction(0))

    def rows(self):
        for n in self.ns:
            for k in range(self.m):
                yield (n, k + 1, self.lower(k, n), self.upper(k, n),
                       self.floor_low(k, n), self.floor_high(k, n))

    def write_csv(self, target, header: bool = True) -> None:
        """Write to a path, or append to an open text file (several alphas in one file)."""
        if hasattr(target, "write"):
            self._write(target, header)
            return
        with open(target, "w", newline="") as fh:
            self._write(fh, header)

    def _write(self, fh, header: bool) -> None:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(["n", "k", "a_low", "a_high", "hf_low", "hf_high", "mode", "alpha"])
        for n, k, lo, hi, flo, fhi in self.rows():
            w.writerow([n, k, repr(lo), repr(hi), flo, fhi, self.mode, repr(float(self.alpha))])


def _alpha(alpha) -> Fraction:
    a = Fraction(alpha)
    if not 0 <= a < 1:
        raise EnvelopeError(f"alpha must lie in [0, 1), got {alpha!r}")
    return a


def compute_envelopes(spec: EquationSpec, n_from: int, n_to: int, alpha=0,
                      mode: str = RIGOROUS, Q: int = DEFAULT_Q) -> EnvelopeTable:
    """Envelope table for ``n = n_from..n_to`` (inclusive)."""
    alpha = _alpha(alpha)
    if n_to < n_from:
        raise EnvelopeError(f"empty range [{n_from}, {n_to}]")
    N = n_to - n_from + 1
    shape = (spec.m, N)
    a_low, a_high = np.empty(shape), np.empty(shape)
    hf_low, hf_high = np.empty(shape, dtype=np.int64), np.empty(shape, dtype=np.int64)
    # h_k(t) <= t < n + 1 + alpha, so floor(h_k) is at most this
    slack = 0 if alpha == 0 else 1
    for i, n in enumerate(range(n_from, n_to + 1)):
        for k, (a, h) in enumerate(spec.terms):
            try:
                if mode == RIGOROUS:
                    lo, hi, flo, fhi = _rigorous(a, h, n, alpha)
                elif mode == SAMPLED:
                    lo, hi, flo, fhi = _sampled(a, h, n, alpha, Q)
                else:
                    raise EnvelopeError(f"unknown mode {mode!r}")
            except EvalError as exc:
                raise EnvelopeError(f"term {k + 1}, n={n}: {exc}") from exc
            if mode == RIGOROUS:
                fhi = min(fhi, n + slack)
            if fhi > n + slack:
                raise EnvelopeError(
                    f"term {k + 1}, n={n}: floor of delay reaches {fhi} > {n + slack}, h_k(t) <= t fails")
            a_low[k, i], a_high[k, i] = lo, hi
            hf_low[k, i], hf_high[k, i] = flo, fhi
    return EnvelopeTable(n_from, n_to, alpha, mode, a_low, a_high, hf_low, hf_high)


def _rigorous(a: Expression, h: Expression, n: int, alpha: Fraction):
    x = Interval.half_open(n + alpha, n + 1 + alpha)
    ea = eval_interval(a, x)
    eh = eval_interval(h, x)
    fhi = math.floor(eh.hi)
    if eh.hi_open and eh.hi.denominator == 1:
        fhi -= 1
    return ea.lo_float(), ea.hi_float(), math.floor(eh.lo), fhi


def _sampled(a: Expression, h: Expression, n: int, alpha: Fraction, Q: int):
    base = n + float(alpha)
    ts = [base + j / Q for j in range(Q)]
    av = [evaluate(a, t) for t in ts]
    hv = [math.floor(evaluate(h, t)) for t in ts]
    return min(av), max(av), min(hv), max(hv)


@dataclass
class RunningSup:
    """Grid running maxima ``g_k(t) = max_{s <= t} h_k(s)`` and their max ``g``."""

    t_from: float
    Q: int
    ts: np.ndarray
    g_k: np.ndarray          # shape (m, len(ts))
    g: np.ndarray = field(init=False)

    def __post_init__(self):
        self.g = self.g_k.max(axis=0)

    def _index(self, t: float) -> int:
        j = math.floor((t - self.t_from) * self.Q + 1e-9)
        if j < 0 or j >= len(self.ts):
            raise ValueError(f"t={t!r} outside the running-sup grid "
                             f"[{self.ts[0]!r}, {self.ts[-1]!r}]")
        return j

    def __call__(self, t: float) -> float:
        return float(self.g[self._index(t)])

    def term(self, k: int, t: float) -> float:
        return float(self.g_k[k, self._index(t)])


def running_sup(spec: EquationSpec, t_to: float, Q: int = DEFAULT_Q, t_from: float = 0.0) -> RunningSup:
    count = int(round((t_to - t_from) * Q)) + 1
    ts = t_from + np.arange(count) / Q
    g_k = np.empty((spec.m, count))
    for k, h in enumerate(spec.delays):
        vals = np.array([evaluate(h, float(t)) for t in ts])
        g_k[k] = np.maximum.accumulate(vals)
    return RunningSup(t_from, Q, ts, g_k)
