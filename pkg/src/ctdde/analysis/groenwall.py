"""Integer-spaced point sets and the Gronwall-type decay bound.

``N(s, t) = {s + j : j >= 0, s + j <= t - 1}`` and
``M(s, t) = {t - j : j >= 1, t - j >= s}``.  Both have ``floor(t - s)``
elements (none when ``t < s + 1``).  For a positive non-increasing
solution, ``x(t) <= x(s) * prod_{r in set} (1 - sum_k a_k(r))``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..engine import EquationSpec
from ..trajectory import DEFAULT_Q, Trajectory
from .verdict import Tag, Verdict

log = logging.getLogger(__name__)

__all__ = [
    "GridSet", "set_N", "set_M", "set_size", "GroenwallProduct", "groenwall_product",
    "groenwall_bound", "GroenwallCheck", "check_groenwall", "factor_barrier",
    "barrier_verdict",
]


@dataclass(frozen=True)
class GridSet:
    base: float
    elements: tuple
    flavor: str

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def set_size(s: float, t: float) -> int:
    """Number of elements of N(s, t) (equivalently M(s, t)), computed exactly."""
    gap = Fraction(t) - Fraction(s)
    return math.floor(gap) if gap >= 1 else 0


def set_N(s: float, t: float) -> GridSet:
    if s > t:
        raise ValueError(f"set_N needs s <= t, got s={s!r}, t={t!r}")
    n = set_size(s, t)
    return GridSet(s, tuple(s + j for j in range(n)), "N")


def set_M(s: float, t: float) -> GridSet:
    if s > t:
        raise ValueError(f"set_M needs s <= t, got s={s!r}, t={t!r}")
    n = set_size(s, t)
    return GridSet(s, tuple(t - j for j in range(n, 0, -1)), "M")


_SETS = {"N": set_N, "M": set_M}


@dataclass
class GroenwallProduct:
    value: float
    points: tuple
    factors: tuple
    nonpositive: tuple = field(default=())  # points whose factor is <= 0


def groenwall_product(spec: EquationSpec, s: float, t: float, flavor: str = "N") -> GroenwallProduct:
    if not 0 <= s <= t:
        raise ValueError(f"need 0 <= s <= t, got s={s!r}, t={t!r}")
    points = _SETS[flavor](s, t).elements
    factors = tuple(1.0 - spec.coefficient_sum(r) for r in points)
    value = math.prod(factors)
    bad = tuple(r for r, f in zip(points, factors) if f <= 0)
    return GroenwallProduct(value, points, factors, bad)


def groenwall_bound(spec: EquationSpec, s: float, t: float, flavor: str = "N") -> float:
    """Product over the set of (1 - sum_k a_k(r)); the empty product is 1."""
    return groenwall_product(spec, s, t, flavor).value


@dataclass
class GroenwallCheck:
    skipped: bool
    warning: str = ""
    checked: int = 0
    violations: list = field(default_factory=list)  # (s, t, flavor, x_t, bound)


def _monotone_positive(traj: Trajectory, c: float, d: float) -> str:
    prev = None
    for t, v in traj.samples(c, d + 1e-12):
        if v <= 0:
            return f"trajectory not positive at t={t!r}"
        if prev is not None and v > prev[1]:
            return f"trajectory increases between t={prev[0]!r} and t={t!r}"
        prev = (t, v)
    return ""


def check_groenwall(traj: Trajectory, spec: EquationSpec, pairs, tol: float = 1e-9) -> GroenwallCheck:
    """Test both bounds on every ``(s, t)`` pair.

    The bound only applies to positive non-increasing solutions, so the
    trajectory is checked for that first over the span of the pairs;
    if it fails the whole check is skipped.  ``tol`` is relative to x(s).
    """
    pairs = [(float(s), float(t)) for s, t in pairs]
    if not pairs:
        return GroenwallCheck(skipped=False)
    lo = min(s for s, _ in pairs)
    hi = max(t for _, t in pairs)
    problem = _monotone_positive(traj, lo, hi)
    if problem:
        log.warning("Gronwall check skipped: %s", problem)
        return GroenwallCheck(skipped=True, warning=problem)
    out = GroenwallCheck(skipped=False)
    for s, t in pairs:
        xs, xt = traj.value_at(s), traj.value_at(t)
        for flavor in ("N", "M"):
            bound = xs * groenwall_bound(spec, s, t, flavor)
            out.checked += 1
            if xt > bound + tol * abs(xs):
                out.violations.append((s, t, flavor, xt, bound))
    return out


def factor_barrier(spec: EquationSpec, t_from: float, t_to: float, Q: int = DEFAULT_Q):
    """First grid point r in [t_from, t_to] with sum_k a_k(r) >= 1, else None.

    At such r a positive non-increasing solution would give
    x(r+1) <= x(r) (1 - sum_k a_k(r)) <= 0.
    """
    count = int(round((t_to - t_from) * Q))
    for j in range(count + 1):
        r = t_from + j / Q
        if spec.coefficient_sum(r) >= 1:
            return r
    return None


def barrier_verdict(spec: EquationSpec, t_from: float, t_to: float, Q: int = DEFAULT_Q) -> Verdict:
    r = factor_barrier(spec, t_from, t_to, Q)
    if r is None:
        return Verdict(Tag.INCONCLUSIVE, "factor barrier",
                       {"range": f"[{t_from!r}, {t_to!r}]", "grid_Q": Q})
    return Verdict(Tag.NO_POSITIVE_NONINCREASING, "factor barrier (one-step decay factor)",
                   {"r": repr(r), "coefficient_sum": repr(spec.coefficient_sum(r)),
                    "factor": repr(1 - spec.coefficient_sum(r))},
                   ["excludes solutions that are positive and non-increasing on [min h(r), r+1]"])
