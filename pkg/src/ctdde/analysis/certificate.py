"""Certificates ``(u, V)`` for a positive solution trapped between two
non-increasing sequences, and the solution they produce.

Conditions checked, for n in the envelope range:

* u, V positive and non-increasing;
* u(n) <= V(n)                                              (n >= 0)
* u(n+1) <= u(n) - sum_k a_high[k][n] * V(hf_low[k][n])
* V(n+1) >= V(n) - sum_k a_low[k][n]  * u(hf_high[k][n])

All comparisons are exact rational arithmetic on the given float values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..engine import EquationSpec, InitialCondition, SimConfig, simulate
from ..envelope import EnvelopeTable, RIGOROUS, compute_envelopes
from ..expr import Compare, Const, Expression, NotRational, Piecewise, Var, evaluate, evaluate_exact, parse
from ..trajectory import DEFAULT_Q, GridSpec
from .verdict import Tag, Verdict

__all__ = [
    "Certificate", "CertificateError", "CertificateResult", "verify_certificate",
    "BoundsReport", "construct_bounded_solution", "certificate_verdict",
]


class CertificateError(ValueError):
    pass


def _exact(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    f = float(v)
    if not math.isfinite(f):
        raise CertificateError(f"non-finite certificate value {v!r}")
    return Fraction(f)


class _Seq:
    """A sequence over the integers given by a list (n = 0..len-1) or an
    expression in ``t`` sampled at integers; ``tail`` covers n < 0.  The tail
    ``"extend"`` evaluates the expression at negative n as well."""

    def __init__(self, source, tail=None, name: str = "u"):
        self.name = name
        if isinstance(source, str):
            source = parse(source)
        self.expr = source if isinstance(source, Expression) else None
        self.values = None if self.expr is not None else tuple(_exact(v) for v in source)
        if self.values is not None and not self.values:
            raise CertificateError(f"{name} is empty")
        self.extend = tail == "extend"
        if self.extend and self.expr is None:
            raise CertificateError(f"{name}: tail 'extend' needs an expression")
        self.tail = None if tail is None or self.extend else _exact(tail)

    @property
    def horizon(self) -> float:
        return math.inf if self.expr is not None else len(self.values) - 1

    def _raw(self, n: int) -> Fraction:
        if self.expr is None:
            if n > self.horizon:
                raise CertificateError(f"{self.name}({n}) is beyond the certificate horizon {self.horizon}")
            return self.values[n]
        try:
            return Fraction(evaluate_exact(self.expr, n))
        except NotRational:
            return _exact(evaluate(self.expr, n))

    def __call__(self, n: int) -> Fraction:
        n = int(n)
        if n < 0 and self.expr is not None and self.extend:
            return self._raw(n)
        if n < 0:
            return self.tail if self.tail is not None else self._raw(0)
        return self._raw(n)

    def text(self) -> str:
        if self.expr is not None:
            return str(self.expr)
        return "[" + ", ".join(repr(float(v)) for v in self.values) + "]"


@dataclass
class Certificate:
    """Positive non-increasing ``u <= V``.  Tails default to ``u(0)``, ``V(0)``;
    a number fixes them and ``"extend"`` continues an expression below 0."""

    u: object
    V: object
    u_tail: object = None
    V_tail: object = None
    _u: _Seq = field(init=False, repr=False)
    _V: _Seq = field(init=False, repr=False)

    def __post_init__(self):
        self._u = _Seq(self.u, self.u_tail, "u")
        self._V = _Seq(self.V, self.V_tail, "V")

    @classmethod
    def from_expressions(cls, u: str, V: str, u_tail=None, V_tail=None) -> "Certificate":
        return cls(parse(u), parse(V), u_tail, V_tail)

    def u_at(self, n: int) -> Fraction:
        return self._u(n)

    def V_at(self, n: int) -> Fraction:
        return self._V(n)

    @property
    def horizon(self) -> float:
        return min(self._u.horizon, self._V.horizon)

    def describe(self) -> dict:
        return {"u": self._u.text(), "V": self._V.text()}


@dataclass
class CertificateResult:
    passed: bool
    condition: str = ""        # "positivity", "monotonicity", "15", "16", "17" or "domain"
    index: int | None = None
    detail: str = ""
    slack16: list = field(default_factory=list)   # (n, exact slack) with slack >= 0 meaning satisfied
    slack17: list = field(default_factory=list)

    def min_slack(self, which: str = "16") -> Fraction | None:
        rows = self.slack16 if which == "16" else self.slack17
        return min((s for _, s in rows), default=None)


def verify_certificate(cert: Certificate, env: EnvelopeTable) -> CertificateResult:
    if env.mode != RIGOROUS:
        raise CertificateError("certificates must be checked against rigorous envelopes")
    lo_index = min(0, int(env.hf_low.min()))
    hi_index = env.n_to + 1
    res = CertificateResult(passed=False)
    try:
        u = {n: cert.u_at(n) for n in range(lo_index, hi_index + 1)}
        V = {n: cert.V_at(n) for n in range(lo_index, hi_index + 1)}
    except CertificateError as exc:
        res.condition, res.detail = "domain", str(exc)
        return res

    for n in range(lo_index, hi_index + 1):
        if u[n] <= 0 or V[n] <= 0:
            res.condition, res.index = "positivity", n
            res.detail = f"u({n}) = {float(u[n])!r}, V({n}) = {float(V[n])!r}"
            return res
    for n in range(lo_index, hi_index):
        if u[n + 1] > u[n] or V[n + 1] > V[n]:
            res.condition, res.index = "monotonicity", n
            res.detail = f"sequence increases from n={n} to n={n + 1}"
            return res
    for n in range(0, hi_index + 1):
        if u[n] > V[n]:
            res.condition, res.index = "15", n
            res.detail = f"u({n}) = {float(u[n])!r} > V({n}) = {float(V[n])!r}"
            return res

    for n in env.ns:
        if n < 0:
            continue
        drop_hi = sum((Fraction(env.upper(k, n)) * V[env.floor_low(k, n)] for k in range(env.m)), Fraction(0))
        drop_lo = sum((Fraction(env.lower(k, n)) * u[env.floor_high(k, n)] for k in range(env.m)), Fraction(0))
        res.slack16.append((n, u[n] - drop_hi - u[n + 1]))
        res.slack17.append((n, V[n + 1] - (V[n] - drop_lo)))
    for cond, rows in (("16", res.slack16), ("17", res.slack17)):
        for n, s in rows:
            if s < 0:
                res.condition, res.index = cond, n
                res.detail = f"condition ({cond}) fails by {float(-s)!r} at n={n}"
                return res
    res.passed = True
    return res


@dataclass
class BoundsReport:
    rows: list            # (n, piece_min, piece_max, u(n), V(n))
    violations: list      # n values outside [u(n) - tol, V(n) + tol]
    history_start: int
    tol: float

    @property
    def ok(self) -> bool:
        return not self.violations


def _step_history(values: dict) -> Expression:
    """piecewise(t < H+1 : phi(H) ; ... ; otherwise : phi(0))."""
    ns = sorted(values)
    branches = tuple((Compare("<", Var(), Const(float(n + 1))), Const(float(values[n]))) for n in ns[:-1])
    last = Const(float(values[ns[-1]]))
    return Piecewise(branches, last) if branches else last


def construct_bounded_solution(spec: EquationSpec, cert: Certificate, T: int,
                               Q: int = DEFAULT_Q, phi=None, tol: float = 1e-9):
    """Simulate with history ``phi(floor(t))`` on ``[H, 1)`` (``phi`` defaults to u)
    and compare each piece ``[n, n+1)``, n = 0..T, with ``[u(n), V(n)]``."""
    env = compute_envelopes(spec, 0, T, 0, RIGOROUS)
    H = min(0, int(env.hf_low.min()))
    pick = phi if phi is not None else cert.u_at
    hist = {n: pick(n) for n in range(H, 1)}
    for n, v in hist.items():
        if not cert.u_at(n) <= _exact(v) <= cert.V_at(n):
            raise CertificateError(f"phi({n}) = {float(v)!r} is outside [u({n}), V({n})]")
    traj = simulate(spec, InitialCondition(_step_history(hist), H), SimConfig(T, GridSpec(Q)))
    rows, bad = [], []
    for n in range(0, T + 1):
        piece = traj.piece(n)
        lo, hi = float(piece.min()), float(piece.max())
        un, Vn = float(cert.u_at(n)), float(cert.V_at(n))
        rows.append((n, lo, hi, un, Vn))
        if lo < un - tol or hi > Vn + tol:
            bad.append(n)
    return traj, BoundsReport(rows, bad, H, tol)


def certificate_verdict(spec: EquationSpec, cert: Certificate, n_from: int, n_to: int) -> Verdict:
    env = compute_envelopes(spec, n_from, n_to, 0, RIGOROUS)
    res = verify_certificate(cert, env)
    evidence = {**cert.describe(), "n_range": f"[{n_from}, {n_to}]"}
    if not res.passed:
        evidence.update({"failed_condition": res.condition, "index": res.index, "detail": res.detail})
        return Verdict(Tag.INCONCLUSIVE, "certificate (u, V) for a bounded positive solution", evidence)
    evidence["min_slack_16"] = repr(float(res.min_slack("16")))
    evidence["min_slack_17"] = repr(float(res.min_slack("17")))
    return Verdict(Tag.POSITIVE_SOLUTION_EXISTS,
                   "certificate (u, V) for a bounded positive solution", evidence,
                   ["conditions checked on the stated n range only"])
