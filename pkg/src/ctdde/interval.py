"""Rigorous interval enclosures of expressions.

Endpoints are exact rationals.  Arithmetic on them (``+ - * /``, floor,
frac, integer powers) is therefore exact; transcendental functions are
enclosed with mpmath's directed-rounding interval kernels and converted
back to rationals without loss.  Each endpoint may be marked open, which
is what lets ``floor(t)`` over ``[n, n+1)`` come out as ``[n, n]``.

The extension is the natural one: every node is enclosed independently,
so results may be wider than the true range but always contain it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath.libmp import from_rational, round_ceiling, round_floor
from mpmath.libmp import libmpi

from .expr import (Binary, Compare, Const, EvalError, Expression, Logic,
                   Piecewise, Unary, Var)

__all__ = ["Interval", "IntervalDivisionError", "eval_interval", "condition_interval"]

PREC = 96


class IntervalDivisionError(EvalError):
    def __init__(self, message: str, where: "Interval"):
        self.where = where
        super().__init__(f"{message}: {where}")


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError(f"interval endpoint must be finite, got {x!r}")
    return Fraction(x)


@dataclass(frozen=True)
class Interval:
    """Closed-or-half-open real interval with exact rational endpoints."""

    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        lo, hi = _q(self.lo), _q(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo > hi or (lo == hi and (self.lo_open or self.hi_open)):
            raise ValueError(f"empty interval {self}")

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x)

    @classmethod
    def half_open(cls, lo, hi) -> "Interval":
        return cls(lo, hi, False, True)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def lo_float(self) -> float:
        """Largest float not above ``lo``."""
        return _round_down(self.lo)

    def hi_float(self) -> float:
        """Smallest float not below ``hi``."""
        return _round_up(self.hi)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = _q(x)
        if tol:
            return self.lo - Fraction(tol) <= x <= self.hi + Fraction(tol)
        above = x > self.lo or (x == self.lo and not self.lo_open)
        below = x < self.hi or (x == self.hi and not self.hi_open)
        return above and below

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{float(self.lo)!r}, {float(self.hi)!r}{right}"

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo, self.hi_open, self.lo_open)

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi,
                        self.lo_open or other.lo_open, self.hi_open or other.hi_open)

    def __sub__(self, other: "Interval") -> "Interval":
        return self + (-other)

    def scale(self, c: Fraction) -> "Interval":
        if c == 0:
            return Interval(0, 0)
        if c > 0:
            return Interval(self.lo * c, self.hi * c, self.lo_open, self.hi_open)
        return Interval(self.hi * c, self.lo * c, self.hi_open, self.lo_open)

    def __mul__(self, other: "Interval") -> "Interval":
        if other.is_point:
            return self.scale(other.lo)
        if self.is_point:
            return other.scale(self.lo)
        products = [a * b for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        # open endpoints are dropped here: closed is always a valid enclosure
        return Interval(min(products), max(products))

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise IntervalDivisionError("possible division by zero", self)
        return Interval(1 / self.hi, 1 / self.lo, self.hi_open, self.lo_open)

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.is_point:
            if other.lo == 0:
                raise IntervalDivisionError("division by zero", other)
            return self.scale(1 / other.lo)
        return self * other.reciprocal()

    def union(self, other: "Interval") -> "Interval":
        if self.lo < other.lo:
            lo, lo_open = self.lo, self.lo_open
        elif other.lo < self.lo:
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open and other.lo_open
        if self.hi > other.hi:
            hi, hi_open = self.hi, self.hi_open
        elif other.hi > self.hi:
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open and other.hi_open
        return Interval(lo, hi, lo_open, hi_open)


def _round_down(q: Fraction) -> float:
    f = float(q)
    if Fraction(f) > q:
        f = math.nextafter(f, -math.inf)
    return f


def _round_up(q: Fraction) -> float:
    f = float(q)
    if Fraction(f) < q:
        f = math.nextafter(f, math.inf)
    return f


# ---------------------------------------------------------------------------
# elementary functions

def _floor_hi(x: Interval) -> int:
    if x.hi_open and x.hi.denominator == 1:
        return int(x.hi) - 1
    return math.floor(x.hi)


def _floor(x: Interval) -> Interval:
    return Interval(math.floor(x.lo), _floor_hi(x))


def _frac(x: Interval) -> Interval:
    k = math.floor(x.lo)
    if _floor_hi(x) == k:
        return Interval(x.lo - k, x.hi - k, x.lo_open, x.hi_open)
    return Interval(0, 1, False, True)


def _abs(x: Interval) -> Interval:
    if x.lo >= 0:
        return x
    if x.hi <= 0:
        return -x
    return Interval(0, max(-x.lo, x.hi))


def _to_mpi(x: Interval):
    lo = from_rational(x.lo.numerator, x.lo.denominator, PREC, round_floor)
    hi = from_rational(x.hi.numerator, x.hi.denominator, PREC, round_ceiling)
    return lo, hi


def _from_mpf(v) -> Fraction:
    sign, man, exp, bc = v
    if not man:
        if exp or bc:
            raise EvalError("non-finite value in interval enclosure")
        return Fraction(0)
    q = Fraction(int(man)) * (Fraction(2) ** exp)
    return -q if sign else q


def _from_mpi(v) -> Interval:
    return Interval(_from_mpf(v[0]), _from_mpf(v[1]))


def _transcendental(name: str, x: Interval) -> Interval:
    v = _to_mpi(x)
    if name == "sin":
        r = libmpi.mpi_sin(v, PREC)
    elif name == "cos":
        r = libmpi.mpi_cos(v, PREC)
    else:
        r = libmpi.mpi_exp(v, PREC)
    out = _from_mpi(r)
    if name != "exp":
        out = Interval(max(out.lo, -1), min(out.hi, 1))
    return out


def _int_power(x: Interval, n: int) -> Interval:
    if n == 0:
        return Interval(1, 1)
    if n < 0:
        return _int_power(x.reciprocal(), -n)
    a, b = x.lo ** n, x.hi ** n
    if n % 2:
        return Interval(a, b, x.lo_open, x.hi_open)
    if x.lo >= 0:
        return Interval(a, b, x.lo_open, x.hi_open)
    if x.hi <= 0:
        return Interval(b, a, x.hi_open, x.lo_open)
    return Interval(0, max(a, b))


def _power(x: Interval, y: Interval) -> Interval:
    if y.is_point and y.lo.denominator == 1:
        return _int_power(x, int(y.lo))
    if x.lo <= 0:
        if x.lo == 0 and not x.lo_open and y.lo > 0 and x.hi == 0:
            return Interval(0, 0)
        raise EvalError(f"non-integer power needs a positive base, base encloses {x}")
    log_x = libmpi.mpi_log(_to_mpi(x), PREC)
    r = libmpi.mpi_exp(libmpi.mpi_mul(_to_mpi(y), log_x, PREC), PREC)
    return _from_mpi(r)


# ---------------------------------------------------------------------------
# tree walk

def _enclose(e, x: Interval) -> Interval:
    if isinstance(e, Const):
        return Interval.point(e.value)
    if isinstance(e, Var):
        return x
    if isinstance(e, Binary):
        a = _enclose(e.left, x)
        b = _enclose(e.right, x)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            return a / b
        return _power(a, b)
    if isinstance(e, Unary):
        a = _enclose(e.arg, x)
        if e.op == "neg":
            return -a
        if e.op == "floor":
            return _floor(a)
        if e.op == "frac":
            return _frac(a)
        if e.op == "abs":
            return _abs(a)
        return _transcendental(e.op, a)
    if isinstance(e, Piecewise):
        acc = None
        for cond, value in e.branches:
            verdict = condition_interval(cond, x)
            if verdict is False:
                continue
            enc = _enclose(value, x)
            acc = enc if acc is None else acc.union(enc)
            if verdict is True:
                return acc
        enc = _enclose(e.otherwise, x)
        return enc if acc is None else acc.union(enc)
    raise TypeError(f"not an expression node: {e!r}")


def _less(a: Interval, b: Interval, strict: bool):
    """True if a < b (or <=) holds for every pair, False if it fails for
    every pair, None otherwise."""
    if strict:
        if a.hi < b.lo or (a.hi == b.lo and (a.hi_open or b.lo_open)):
            return True
        if a.lo >= b.hi:
            return False
        return None
    if a.hi <= b.lo:
        return True
    if a.lo > b.hi or (a.lo == b.hi and (a.lo_open or b.hi_open)):
        return False
    return None


def condition_interval(c, x: Interval):
    """Three-valued truth of condition ``c`` over ``x``: True, False or None."""
    if isinstance(c, Compare):
        a = _enclose(c.left, x)
        b = _enclose(c.right, x)
        if c.op == "<":
            return _less(a, b, True)
        if c.op == "<=":
            return _less(a, b, False)
        if c.op == ">":
            return _less(b, a, True)
        return _less(b, a, False)
    if isinstance(c, Logic):
        left = condition_interval(c.left, x)
        right = condition_interval(c.right, x)
        if c.op == "and":
            if left is False or right is False:
                return False
            return True if (left and right) else None
        if left is True or right is True:
            return True
        return False if (left is False and right is False) else None
    raise TypeError(f"not a condition: {c!r}")


def eval_interval(e: Expression, x) -> Interval:
    """Enclosure of ``{e(t) : t in x}``.

    ``x`` may be an Interval or a ``(lo, hi)`` pair (closed).
    Raises IntervalDivisionError when a divisor's enclosure touches zero.
    """
    if not isinstance(x, Interval):
        x = Interval(*x)
    return _enclose(e, x)
