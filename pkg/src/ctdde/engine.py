"""Forward simulation of x(t+1) = x(t) - sum_k a_k(t) x(h_k(t)).

The history occupies ``[H, 1)``; every later piece is produced one unit
step at a time from pieces that already exist, since ``h_k(t) <= t``.
Delayed arguments that miss the grid are resolved by
``Trajectory.value_at`` (intra-piece linear interpolation), which is
exact for solutions that are affine in ``{t}`` on each piece and first
order accurate otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from gmpy2 import mpq

from .expr import EvalError, Expression, NotRational, evaluate, evaluate_exact, parse
from .interval import Interval, eval_interval
from .trajectory import COMPUTED, DEFAULT_Q, HISTORY, GridSpec, Trajectory

__all__ = [
    "EquationSpec", "InitialCondition", "SimConfig", "SimulationError",
    "DelayUnderflowError", "ConstraintViolation", "NonFiniteError",
    "simulate", "residual", "detect_oscillation", "check_condition5",
    "OscillationReport", "Condition5Report", "INTERPOLATION_POLICY",
]

INTERPOLATION_POLICY = "intra-piece linear interpolation, linear extrapolation past the last sample"


class SimulationError(RuntimeError):
    pass


class DelayUnderflowError(SimulationError):
    pass


class ConstraintViolation(SimulationError):
    pass


class NonFiniteError(SimulationError):
    pass


def _as_expr(e) -> Expression:
    return parse(e) if isinstance(e, str) else e


@dataclass(frozen=True)
class EquationSpec:
    """Terms ``(a_k, h_k)`` of the equation, plus a label."""

    terms: tuple
    label: str = ""

    def __post_init__(self):
        terms = tuple((_as_expr(a), _as_expr(h)) for a, h in self.terms)
        if not terms:
            raise ValueError("an equation needs at least one term")
        object.__setattr__(self, "terms", terms)

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def coefficients(self):
        return [a for a, _ in self.terms]

    @property
    def delays(self):
        return [h for _, h in self.terms]

    def coefficient_sum(self, t: float) -> float:
        return math.fsum(evaluate(a, t) for a, _ in self.terms)


@dataclass(frozen=True)
class InitialCondition:
    history: Expression
    start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "history", _as_expr(self.history))
        if int(self.start) != self.start or self.start > 0:
            raise ValueError(f"history start must be an integer <= 0, got {self.start!r}")
        object.__setattr__(self, "start", int(self.start))


@dataclass(frozen=True)
class SimConfig:
    T: int = 30
    grid: GridSpec = field(default_factory=GridSpec)

    def __post_init__(self):
        if float(self.T) != int(self.T) or self.T <= 1:
            raise ValueError(f"horizon T must be an integer > 1, got {self.T!r}")
        object.__setattr__(self, "T", int(self.T))


def simulate(spec: EquationSpec, init: InitialCondition, cfg: SimConfig) -> Trajectory:
    """Trajectory on ``[H, T+1)``: history on ``[H, 1)``, recurrence after."""
    Q = cfg.grid.Q
    H = init.start
    hist = init.history
    try:
        traj = Trajectory.from_function(lambda s: evaluate(hist, s), H, 1, Q, HISTORY)
    except EvalError as exc:
        raise SimulationError(f"history not evaluable: {exc}") from exc

    terms = spec.terms
    for n in range(0, cfg.T):
        current = traj.piece(n)
        new = []
        for j in range(Q):
            t = n + j / Q
            total = 0.0
            for k, (a, h) in enumerate(terms, start=1):
                try:
                    ak = evaluate(a, t)
                    hk = evaluate(h, t)
                except EvalError as exc:
                    raise SimulationError(f"term {k} at t={t!r}: {exc}") from exc
                if ak < 0:
                    raise ConstraintViolation(f"a_{k}({t!r}) = {ak!r} < 0")
                if hk > t:
                    raise ConstraintViolation(f"h_{k}({t!r}) = {hk!r} > t")
                if hk < H:
                    raise DelayUnderflowError(
                        f"h_{k}({t!r}) = {hk!r} is below the history start {H}")
                total += ak * traj.value_at(hk)
            value = float(current[j]) - total
            if not math.isfinite(value):
                raise NonFiniteError(f"x({t + 1!r}) is not finite")
            new.append(value)
        traj.append(new, COMPUTED)
    return traj


def residual(spec: EquationSpec, candidate, samples, exact: bool = True) -> float:
    """Max over ``samples`` of |x(t+1) - x(t) + sum_k a_k(t) x(h_k(t))|.

    With ``exact`` (the default) every term is enclosed by interval
    arithmetic at the sample point, so floor/frac/rational parts are exact
    and the returned number is a rigorous upper bound.  Plain float
    evaluation loses ``x(h(t))`` completely once ``t - h(t)`` drops below
    the spacing of floats near ``t``.
    """
    x = _as_expr(candidate)
    worst = 0.0
    for t in samples:
        t = float(t)
        if exact:
            try:
                worst = max(worst, _residual_enclosure(spec, x, t))
                continue
            except EvalError:
                pass
        r = evaluate(x, t + 1) - evaluate(x, t)
        for a, h in spec.terms:
            r += evaluate(a, t) * evaluate(x, evaluate(h, t))
        worst = max(worst, abs(r))
    return worst


def _residual_enclosure(spec: EquationSpec, x: Expression, t: float) -> float:
    try:
        q = mpq(t)
        r = evaluate_exact(x, q + 1) - evaluate_exact(x, q)
        for a, h in spec.terms:
            r += evaluate_exact(a, q) * evaluate_exact(x, evaluate_exact(h, q))
        return Interval.point(Fraction(abs(r))).hi_float()
    except NotRational:
        pass
    pt = Interval.point(t)
    r = eval_interval(x, Interval.point(Fraction(t) + 1)) - eval_interval(x, pt)
    for a, h in spec.terms:
        r = r + eval_interval(a, pt) * eval_interval(x, eval_interval(h, pt))
    return Interval.point(max(abs(r.lo), abs(r.hi))).hi_float()


@dataclass
class OscillationReport:
    start: float
    end: float
    window_start: float
    sign_events: list
    eventually_positive: bool
    eventually_negative: bool
    oscillatory_within_horizon: bool

    @property
    def first_event(self):
        return self.sign_events[0] if self.sign_events else None

    def as_items(self):
        first = self.first_event
        return [
            ("horizon", f"[{self.start!r}, {self.end!r})"),
            ("horizon_limited", "true"),
            ("window_start", repr(self.window_start)),
            ("sign_events", len(self.sign_events)),
            ("first_sign_event", "none" if first is None else f"({first[0]!r}, {first[1]!r})"),
            ("eventually_positive", _b(self.eventually_positive)),
            ("eventually_negative", _b(self.eventually_negative)),
            ("oscillatory_within_horizon", _b(self.oscillatory_within_horizon)),
        ]


def _b(flag: bool) -> str:
    return "true" if flag else "false"


def detect_oscillation(traj: Trajectory, start: float = 0.0) -> OscillationReport:
    """Finite-horizon sign diagnostics; windows are the last 20% of the range."""
    end = traj.end
    window = start + 0.8 * (end - start)
    events = traj.sign_events(start, end)
    tail = [v for _, v in traj.samples(window, end)]
    return OscillationReport(
        start=start,
        end=end,
        window_start=window,
        sign_events=events,
        eventually_positive=bool(tail) and all(v > 0 for v in tail),
        eventually_negative=bool(tail) and all(v < 0 for v in tail),
        oscillatory_within_horizon=any(e[1] >= window for e in events),
    )


@dataclass
class Condition5Report:
    minima: list            # y(n): smallest sample of piece n
    left_limits: list       # extrapolated x(n+1-) from the last two samples
    cond5_suspect: bool
    first_below_tol: int | None
    first_vanishing_limit: int | None
    tolerance: float
    decay_ratio: float | None  # geometric mean of y(n+1)/y(n) over the range

    def as_items(self):
        def opt(v):
            return "none" if v is None else v
        return [
            ("cond5_suspect", _b(self.cond5_suspect)),
            ("cond5_first_n_below_tol", opt(self.first_below_tol)),
            ("cond5_first_n_vanishing_left_limit", opt(self.first_vanishing_limit)),
            ("cond5_tolerance", repr(self.tolerance)),
            ("cond5_min_y", repr(min(self.minima))),
            ("cond5_decay_ratio", "none" if self.decay_ratio is None else repr(self.decay_ratio)),
        ]


def check_condition5(traj: Trajectory, horizon_n: int, tol: float = 1e-12) -> Condition5Report:
    """Per-interval minima y(n) over ``[n, n+1)`` for ``n = 0..horizon_n-1``.

    A positive trajectory is flagged when some y(n) falls below ``tol``
    or when a piece heads to zero at its right end (extrapolated left
    limit below ``tol`` relative to the piece scale); either means the
    positive infimum on bounded segments is in doubt.
    """
    minima, limits = [], []
    below = vanishing = None
    positive = True
    for n in range(horizon_n):
        vals = traj.piece(n)
        y = float(vals.min())
        limit = float(vals[-1] + (vals[-1] - vals[-2]))
        minima.append(y)
        limits.append(limit)
        positive = positive and y > 0
        if below is None and y < tol:
            below = n
        if vanishing is None and limit <= tol * float(abs(vals).max()):
            vanishing = n
    ratio = None
    if len(minima) > 1 and minima[0] > 0 and minima[-1] > 0:
        ratio = (minima[-1] / minima[0]) ** (1.0 / (len(minima) - 1))
    suspect = positive and (below is not None or vanishing is not None)
    return Condition5Report(minima, limits, suspect, below, vanishing, tol, ratio)
