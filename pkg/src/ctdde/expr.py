"""Expression trees in one real variable ``t``.

Coefficients, delayed arguments, history functions and closed-form
reference solutions are all written in this small language, e.g.::

    floor(t) - 0.5^floor(t) * (1 - frac(t))
    piecewise(frac(t) < 0.5 : t ; floor(t) <= 4 : t - 1 ; otherwise : t - 0.5)

Precedence, tightest first: ``^`` (right associative), unary ``-``,
``* /``, ``+ -``.  Trees are immutable; ``to_text`` output re-parses to a
structurally equal tree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from gmpy2 import mpq

__all__ = [
    "Expression", "Const", "Var", "Unary", "Binary", "Compare", "Logic",
    "Piecewise", "Condition", "ExprError", "ParseError", "EvalError",
    "parse", "to_text", "evaluate", "evaluate_exact", "NotRational", "FUNCTIONS",
]

FUNCTIONS = ("floor", "frac", "sin", "cos", "exp", "abs")
BINARY_OPS = ("+", "-", "*", "/", "^")
COMPARE_OPS = ("<", "<=", ">", ">=")
NAMED_CONSTANTS = {"pi": math.pi, "e": math.e}
KEYWORDS = ("piecewise", "otherwise", "and", "or")


class ExprError(ValueError):
    """Base class for expression errors."""


class ParseError(ExprError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        pointer = f"\n  {text}\n  {' ' * pos}^"
        super().__init__(f"{message} at position {pos}{pointer}")


class EvalError(ExprError):
    """Raised when point evaluation leaves the reals (division by zero,
    0 to a negative power, domain errors, overflow or NaN)."""


class Expression:
    """Base class for expression nodes."""

    __slots__ = ()

    def __call__(self, t: float) -> float:
        return evaluate(self, t)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Const(Expression):
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v):
            raise ExprError(f"non-finite constant {self.value!r}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class Var(Expression):
    pass


@dataclass(frozen=True)
class Unary(Expression):
    op: str  # "neg" or one of FUNCTIONS
    arg: Expression

    def __post_init__(self):
        if self.op != "neg" and self.op not in FUNCTIONS:
            raise ExprError(f"unknown unary operator {self.op!r}")


@dataclass(frozen=True)
class Binary(Expression):
    op: str
    left: Expression
    right: Expression

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ExprError(f"unknown binary operator {self.op!r}")


@dataclass(frozen=True)
class Compare:
    op: str
    left: Expression
    right: Expression

    def __post_init__(self):
        if self.op not in COMPARE_OPS:
            raise ExprError(f"unknown comparison {self.op!r}")


@dataclass(frozen=True)
class Logic:
    op: str  # "and" | "or"
    left: "Condition"
    right: "Condition"

    def __post_init__(self):
        if self.op not in ("and", "or"):
            raise ExprError(f"unknown connective {self.op!r}")


Condition = Union[Compare, Logic]


@dataclass(frozen=True)
class Piecewise(Expression):
    branches: tuple  # tuple of (Condition, Expression)
    otherwise: Expression

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(tuple(b) for b in self.branches))
        if self.otherwise is None:
            raise ExprError("piecewise requires an 'otherwise' branch")


T = Var()


# ---------------------------------------------------------------------------
# printing

def _fmt_number(v: float) -> str:
    if v < 0 or (v == 0 and math.copysign(1.0, v) < 0):
        return f"(-{repr(-v)})"
    return repr(v)


def to_text(e) -> str:
    """Render ``e`` (expression or condition) so that ``parse`` inverts it."""
    if isinstance(e, Const):
        return _fmt_number(e.value)
    if isinstance(e, Var):
        return "t"
    if isinstance(e, Unary):
        if e.op == "neg":
            if isinstance(e.arg, Const):
                return f"(-({to_text(e.arg)}))"
            return f"(-{to_text(e.arg)})"
        return f"{e.op}({to_text(e.arg)})"
    if isinstance(e, Binary):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Compare):
        return f"{to_text(e.left)} {e.op} {to_text(e.right)}"
    if isinstance(e, Logic):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Piecewise):
        parts = [f"{to_text(c)} : {to_text(v)}" for c, v in e.branches]
        parts.append(f"otherwise : {to_text(e.otherwise)}")
        return "piecewise(" + " ; ".join(parts) + ")"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|\*\*|[-+*/^()<>:;])"
    r")"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "op" and value == "**":
            value = "^"
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ParseError(message, self.text, tok[2])

    def accept(self, value):
        if self.tok[0] in ("op", "name") and self.tok[1] == value:
            self.i += 1
            return True
        return False

    def expect(self, value):
        if not self.accept(value):
            found = self.tok[1] or "end of input"
            raise self.error(f"expected {value!r}, found {found!r}")

    def parse(self) -> Expression:
        e = self.expr()
        if self.tok[0] != "end":
            raise self.error(f"unexpected token {self.tok[1]!r}")
        return e

    def expr(self) -> Expression:
        left = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.tok[1]
            self.i += 1
            left = Binary(op, left, self.term())
        return left

    def term(self) -> Expression:
        left = self.unary()
        while self.tok[0] == "op" and self.tok[1] in ("*", "/"):
            op = self.tok[1]
            self.i += 1
            left = Binary(op, left, self.unary())
        return left

    def unary(self) -> Expression:
        if self.accept("-"):
            literal = self.tok[0] == "num"
            arg = self.unary()
            # "-2.5" is a negative constant; "-(2.5)" stays a negation node
            if literal and isinstance(arg, Const):
                return Const(-arg.value)
            return Unary("neg", arg)
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.accept("^"):
            return Binary("^", base, self.unary())
        return base

    def atom(self) -> Expression:
        kind, value, pos = self.tok
        if kind == "num":
            self.i += 1
            return Const(float(value))
        if kind == "op" and value == "(":
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            self.i += 1
            if value == "t":
                return T
            if value in NAMED_CONSTANTS:
                return Const(NAMED_CONSTANTS[value])
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(value, arg)
            if value == "piecewise":
                return self.piecewise()
            raise ParseError(f"unknown identifier {value!r}", self.text, pos)
        raise self.error(f"unexpected token {value or 'end of input'!r}")

    def piecewise(self) -> Piecewise:
        start = self.tokens[self.i - 1]
        self.expect("(")
        branches = []
        while True:
            if self.accept("otherwise"):
                self.expect(":")
                other = self.expr()
                self.expect(")")
                return Piecewise(tuple(branches), other)
            cond = self.condition()
            self.expect(":")
            branches.append((cond, self.expr()))
            if self.accept(";"):
                continue
            if self.tok[1] == ")":
                raise self.error("piecewise is missing its 'otherwise' branch", start)
            raise self.error(f"expected ';' or ')', found {self.tok[1]!r}")

    def condition(self):
        left = self.conjunction()
        while self.accept("or"):
            left = Logic("or", left, self.conjunction())
        return left

    def conjunction(self):
        left = self.cond_atom()
        while self.accept("and"):
            left = Logic("and", left, self.cond_atom())
        return left

    def cond_atom(self):
        if self.tok[1] == "(":
            # "(" may open either a grouped condition or an arithmetic operand
            save = self.i
            self.i += 1
            try:
                cond = self.condition()
                self.expect(")")
                if self.tok[1] not in COMPARE_OPS:
                    return cond
            except ParseError:
                pass
            self.i = save
        left = self.expr()
        op = self.tok[1]
        if self.tok[0] != "op" or op not in COMPARE_OPS:
            raise self.error(f"expected a comparison operator, found {op or 'end of input'!r}")
        self.i += 1
        return Compare(op, left, self.expr())


def parse(text: str) -> Expression:
    """Parse ``text`` into an expression tree.

    Raises ParseError (with the offending position) on syntax errors,
    unknown identifiers, or a piecewise without ``otherwise``.
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression", text or "", 0)
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# point evaluation

def _power(base: float, exponent: float) -> float:
    if exponent.is_integer():
        if base == 0 and exponent < 0:
            raise EvalError("0 raised to a negative power")
        return base ** int(exponent)
    if base < 0:
        raise EvalError(f"negative base {base!r} with non-integer exponent {exponent!r}")
    if base == 0:
        if exponent < 0:
            raise EvalError("0 raised to a negative power")
        return 0.0
    return base ** exponent


def _eval(e, t: float) -> float:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return t
    if isinstance(e, Binary):
        a = _eval(e.left, t)
        b = _eval(e.right, t)
        op = e.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0:
                raise EvalError(f"division by zero at t={t!r}")
            return a / b
        return _power(a, b)
    if isinstance(e, Unary):
        a = _eval(e.arg, t)
        op = e.op
        if op == "neg":
            return -a
        if op == "floor":
            return float(math.floor(a))
        if op == "frac":
            return a - math.floor(a)
        if op == "sin":
            return math.sin(a)
        if op == "cos":
            return math.cos(a)
        if op == "exp":
            return math.exp(a)
        return abs(a)
    if isinstance(e, Piecewise):
        for cond, value in e.branches:
            if _holds(cond, t):
                return _eval(value, t)
        return _eval(e.otherwise, t)
    raise TypeError(f"not an expression node: {e!r}")


def _holds(c, t: float) -> bool:
    if isinstance(c, Compare):
        a = _eval(c.left, t)
        b = _eval(c.right, t)
        if c.op == "<":
            return a < b
        if c.op == "<=":
            return a <= b
        if c.op == ">":
            return a > b
        return a >= b
    if c.op == "and":
        return _holds(c.left, t) and _holds(c.right, t)
    return _holds(c.left, t) or _holds(c.right, t)


def evaluate(e: Expression, t: float) -> float:
    """Value of ``e`` at ``t``; never returns NaN or infinity."""
    try:
        v = _eval(e, float(t))
    except OverflowError as exc:
        raise EvalError(f"overflow at t={t!r}") from exc
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, EvalError):
            raise
        raise EvalError(f"{exc} at t={t!r}") from exc
    if not math.isfinite(v):
        raise EvalError(f"non-finite value {v!r} at t={t!r}")
    return v


# ---------------------------------------------------------------------------
# exact rational evaluation

class NotRational(ExprError):
    """The expression needs a transcendental function or a non-integer power."""


def _exact(e, t):
    if isinstance(e, Const):
        return mpq(e.value)
    if isinstance(e, Var):
        return t
    if isinstance(e, Binary):
        a = _exact(e.left, t)
        b = _exact(e.right, t)
        op = e.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0:
                raise EvalError(f"division by zero at t={float(t)!r}")
            return a / b
        if b.denominator != 1 or abs(b) > 4096:
            raise NotRational("non-integer or very large exponent")
        if a == 0 and b < 0:
            raise EvalError("0 raised to a negative power")
        return a ** int(b)
    if isinstance(e, Unary):
        a = _exact(e.arg, t)
        op = e.op
        if op == "neg":
            return -a
        if op == "floor":
            return mpq(math.floor(a))
        if op == "frac":
            return a - math.floor(a)
        if op == "abs":
            return abs(a)
        raise NotRational(op)
    if isinstance(e, Piecewise):
        for cond, value in e.branches:
            if _holds_exact(cond, t):
                return _exact(value, t)
        return _exact(e.otherwise, t)
    raise TypeError(f"not an expression node: {e!r}")


def _holds_exact(c, t) -> bool:
    if isinstance(c, Compare):
        a = _exact(c.left, t)
        b = _exact(c.right, t)
        if c.op == "<":
            return a < b
        if c.op == "<=":
            return a <= b
        if c.op == ">":
            return a > b
        return a >= b
    if c.op == "and":
        return _holds_exact(c.left, t) and _holds_exact(c.right, t)
    return _holds_exact(c.left, t) or _holds_exact(c.right, t)


def evaluate_exact(e: Expression, t):
    """Exact rational value of ``e`` at rational ``t`` (floats are taken at
    their exact binary value).  Raises NotRational when ``e`` leaves the
    rationals."""
    return _exact(e, mpq(t))
