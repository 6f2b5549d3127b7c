"""
Exact scalar arithmetic for the r-matrix engine.

A Scalar is a rational function of the dynamical variables l1..ln with
Gaussian-rational coefficients, stored as a pair (real part, imaginary part)
of elements of the sympy field QQ(l1..ln) under graded-lexicographic order.
Every value is immutable and canonical: equality is exact, hashing goes
through the canonical printed form, and the printer emits the same grammar
the parser reads.

The module also provides ScalarMatrix (exact elimination over the
rational-function field) and the Pratt parser shared by the scalar, jet and
enveloping-algebra expression languages.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import Rational
from sympy.polys.domains import QQ
from sympy.polys.fields import field
from sympy.polys.orderings import grlex

from .exceptions import (
    DivisionByZeroError,
    ExpressionError,
    ParseError,
    PoleError,
    VariableIndexError,
)

logger = logging.getLogger(__name__)

ScalarLike = Union["Scalar", int, Fraction, Rational]


@lru_cache(maxsize=None)
def lambda_field(nvars: int):
    """Return the cached field QQ(l1..ln), n >= 1, ordered by grlex."""
    nvars = max(1, nvars)
    names = ",".join(f"l{i}" for i in range(1, nvars + 1))
    return field(names, QQ, grlex)[0]


def _to_qq(value) -> Any:
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, Rational):
        return QQ(int(value.p), int(value.q))
    if isinstance(value, int):
        return QQ(value)
    return QQ.convert(value)


def _promote(element, target):
    """Embed a field element into a field with at least as many variables."""
    if element.field is target:
        return element
    width = target.ngens - element.field.ngens
    pad = (0,) * width
    ring = target.ring
    numer = ring.from_dict({m + pad: c for m, c in element.numer.items()})
    denom = ring.from_dict({m + pad: c for m, c in element.denom.items()})
    return target.new(numer, denom)


def _ground_value(element) -> Optional[Any]:
    """The rational value of a constant field element, else None."""
    numer, denom = element.numer, element.denom
    if not numer:
        return QQ.zero
    if numer.is_ground and denom.is_ground:
        return numer.LC / denom.LC
    return None


class Scalar:
    """
    Rational function of l1..ln over the Gaussian rationals.

    Attributes:
        nvars: Number of variables of the ambient field (at least 1)
    """

    __slots__ = ("_re", "_im", "_text", "_const")

    def __init__(self, re_part, im_part=None):
        if im_part is not None and re_part.field is not im_part.field:
            target = re_part.field if re_part.field.ngens >= im_part.field.ngens else im_part.field
            re_part, im_part = _promote(re_part, target), _promote(im_part, target)
        if im_part is not None and not im_part.numer:
            im_part = None
        self._re = re_part
        self._im = im_part
        self._text = None
        self._const = None

    # Construction

    @classmethod
    def from_value(cls, value: ScalarLike, nvars: int = 1) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        K = lambda_field(nvars)
        return cls(K.ground_new(_to_qq(value)))

    @classmethod
    def gaussian(cls, re_value, im_value, nvars: int = 1) -> "Scalar":
        K = lambda_field(nvars)
        return cls(K.ground_new(_to_qq(re_value)), K.ground_new(_to_qq(im_value)))

    @classmethod
    def variable(cls, index: int, nvars: Optional[int] = None) -> "Scalar":
        """The variable l<index> (1-based) in a field with nvars variables."""
        nvars = index if nvars is None else nvars
        if index < 1 or index > nvars:
            raise VariableIndexError(f"variable l{index} outside l1..l{nvars}")
        K = lambda_field(nvars)
        return cls(K.gens[index - 1])

    @classmethod
    def imaginary_unit(cls, nvars: int = 1) -> "Scalar":
        return cls.gaussian(0, 1, nvars)

    @classmethod
    def coerce(cls, value: ScalarLike) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, (int, Fraction, Rational)):
            return _constant(value)
        raise TypeError(f"cannot interpret {type(value).__name__} as a Scalar")

    # Introspection

    @property
    def nvars(self) -> int:
        return self._re.field.ngens

    @property
    def real(self) -> "Scalar":
        return Scalar(self._re)

    @property
    def imag(self) -> "Scalar":
        return Scalar(self._im) if self._im is not None else Scalar(self._re.field.zero)

    def is_zero(self) -> bool:
        return not self._re.numer and self._im is None

    def __bool__(self) -> bool:
        return not self.is_zero()

    def constant_value(self) -> Optional[Tuple[Any, Any]]:
        """(re, im) as QQ values when the Scalar is free of variables, else None."""
        if self._const is None:
            re_value = _ground_value(self._re)
            im_value = QQ.zero if self._im is None else _ground_value(self._im)
            if re_value is None or im_value is None:
                self._const = False
            else:
                self._const = (re_value, im_value)
        return self._const or None

    def is_constant(self) -> bool:
        return self.constant_value() is not None

    def is_real(self) -> bool:
        return self._im is None

    def as_fraction(self) -> Fraction:
        """The value as a Fraction; only valid for real constants."""
        value = self.constant_value()
        if value is None or value[1]:
            raise ExpressionError(f"{self} is not a real constant")
        return Fraction(int(value[0].numerator), int(value[0].denominator))

    def variables(self) -> Tuple[int, ...]:
        """1-based indices of variables that occur."""
        used = set()
        for part in (self._re, self._im):
            if part is None:
                continue
            for poly in (part.numer, part.denom):
                for monom in poly.keys():
                    used.update(i + 1 for i, e in enumerate(monom) if e)
        return tuple(sorted(used))

    # Arithmetic

    def _pair(self, other: "Scalar"):
        if self._re.field is other._re.field:
            return self, other
        if self.nvars >= other.nvars:
            K = self._re.field
            return self, Scalar(_promote(other._re, K), None if other._im is None else _promote(other._im, K))
        K = other._re.field
        return Scalar(_promote(self._re, K), None if self._im is None else _promote(self._im, K)), other

    def __add__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        a, b = self._pair(other)
        im = _add_parts(a._im, b._im)
        return Scalar(a._re + b._re, im)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self._re, None if self._im is None else -self._im)

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        a, b = self._pair(other)
        if a._im is None and b._im is None:
            return Scalar(a._re * b._re)
        if a._im is None:
            return Scalar(a._re * b._re, a._re * b._im)
        if b._im is None:
            return Scalar(a._re * b._re, a._im * b._re)
        return Scalar(a._re * b._re - a._im * b._im, a._re * b._im + a._im * b._re)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise DivisionByZeroError("division by the zero polynomial")
        if self._im is None:
            return Scalar(1 / self._re)
        norm = self._re * self._re + self._im * self._im
        return Scalar(self._re / norm, -self._im / norm)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = _constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conjugate(self) -> "Scalar":
        return Scalar(self._re, None if self._im is None else -self._im)

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        a, b = self._pair(other)
        if (a._re - b._re).numer:
            return False
        return _parts_equal(a._im, b._im)

    def __hash__(self):
        return hash(self.canonical())

    # Calculus

    def diff(self, index: int) -> "Scalar":
        """Partial derivative in l<index> (1-based)."""
        if index < 1:
            raise VariableIndexError(f"variable index {index} must be positive")
        if index > self.nvars:
            return Scalar(self._re.field.zero)
        gen = self._re.field.gens[index - 1]
        re_part = self._re.diff(gen)
        im_part = None if self._im is None else self._im.diff(gen)
        return Scalar(re_part, im_part)

    def subs(self, point: Union[Sequence[ScalarLike], Dict[int, ScalarLike]]) -> "Scalar":
        """
        Substitute rational values for variables.

        A sequence substitutes l1..lk (k = len(point)); a mapping substitutes
        the given 1-based indices only.
        """
        if isinstance(point, dict):
            chosen = {
                index: _to_qq(v.as_fraction() if isinstance(v, Scalar) else v)
                for index, v in point.items()
            }
        else:
            chosen = {
                index + 1: _to_qq(v.as_fraction() if isinstance(v, Scalar) else v)
                for index, v in enumerate(point)
            }
        values = [chosen[i] for i in sorted(chosen)]
        parts = []
        for part in (self._re, self._im):
            if part is None:
                parts.append(None)
                continue
            gens = part.field.gens
            pairs = [
                (gens[index - 1].to_poly(), value)
                for index, value in sorted(chosen.items())
                if index <= len(gens)
            ]
            numer = part.numer.subs(pairs) if pairs else part.numer
            denom = part.denom.subs(pairs) if pairs else part.denom
            if not denom:
                raise PoleError(f"{self} has a pole at {tuple(str(v) for v in values)}")
            parts.append(part.field.new(numer, denom))
        return Scalar(parts[0], parts[1])

    # Printing

    def canonical(self) -> str:
        if self._text is None:
            self._text = _format_scalar(self)
        return self._text

    def __str__(self):
        return self.canonical()

    def __repr__(self):
        return f"Scalar({self.canonical()!r})"


def _add_parts(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _parts_equal(a, b) -> bool:
    if a is None or b is None:
        other = b if a is None else a
        return other is None or not other.numer
    return not (a - b).numer


@lru_cache(maxsize=4096)
def _constant(value) -> Scalar:
    return Scalar.from_value(value)


ZERO = Scalar.from_value(0)
ONE = Scalar.from_value(1)


def scalar(value: ScalarLike) -> Scalar:
    """Coerce ints, Fractions and sympy Rationals to Scalars."""
    return Scalar.coerce(value)


def diff_scalar(s: Scalar, index: int, num_vars: Optional[int] = None) -> Scalar:
    """
    Exact partial derivative of a Scalar.

    Args:
        s: The Scalar to differentiate
        index: 1-based variable index
        num_vars: Declared number of variables; defaults to the width of s

    Raises:
        VariableIndexError: If index is outside 1..num_vars
    """
    if num_vars is None:
        num_vars = s.nvars
    if not 1 <= index <= num_vars:
        raise VariableIndexError(f"variable index {index} outside 1..{num_vars}")
    return s.diff(index)


# Canonical printer


def _format_rational(q) -> str:
    p, d = int(q.numerator), int(q.denominator)
    return str(p) if d == 1 else f"{p}/{d}"


def _format_monomial(monom: Tuple[int, ...]) -> str:
    factors = []
    for i, e in enumerate(monom):
        if e == 1:
            factors.append(f"l{i + 1}")
        elif e > 1:
            factors.append(f"l{i + 1}^{e}")
    return "*".join(factors)


def _format_term(re_c, im_c, monom_text: str) -> str:
    if not im_c:
        coeff = _format_rational(re_c)
        if not monom_text:
            return coeff
        if coeff == "1":
            return monom_text
        if coeff == "-1":
            return "-" + monom_text
        return f"{coeff}*{monom_text}"
    if not re_c:
        coeff = _format_rational(im_c)
        if coeff == "1":
            base = "i"
        elif coeff == "-1":
            base = "-i"
        else:
            base = f"{coeff}*i"
        return f"{base}*{monom_text}" if monom_text else base
    imag = _format_rational(im_c)
    sign = "-" if imag.startswith("-") else "+"
    imag = imag.lstrip("-")
    imag_text = "i" if imag == "1" else f"{imag}*i"
    coeff = f"({_format_rational(re_c)}{sign}{imag_text})"
    return f"{coeff}*{monom_text}" if monom_text else coeff


def _join_terms(terms: List[str]) -> str:
    text = terms[0]
    for term in terms[1:]:
        text += term if term.startswith("-") else "+" + term
    return text


def _format_polynomial(re_poly, im_poly) -> Tuple[str, int]:
    """Return (text, number of terms) of re_poly + i*im_poly, grlex-descending."""
    monoms = set(re_poly.keys()) | set(im_poly.keys())
    if not monoms:
        return "0", 1
    ordered = sorted(monoms, key=lambda m: (sum(m), m), reverse=True)
    terms = [
        _format_term(re_poly.get(m, QQ.zero), im_poly.get(m, QQ.zero), _format_monomial(m))
        for m in ordered
    ]
    return _join_terms(terms), len(terms)


def _format_scalar(s: Scalar) -> str:
    re_part = s._re
    im_part = s._im if s._im is not None else re_part.field.zero
    denom = re_part.denom.lcm(im_part.denom).monic()
    re_num = re_part.numer * denom.exquo(re_part.denom)
    im_num = im_part.numer * denom.exquo(im_part.denom)
    num_text, num_terms = _format_polynomial(re_num, im_num)
    if denom == denom.ring.one:
        return num_text
    den_text, den_terms = _format_polynomial(denom, denom.ring.zero)
    if num_terms > 1:
        num_text = f"({num_text})"
    if den_terms > 1 or "*" in den_text or "/" in den_text:
        den_text = f"({den_text})"
    return f"{num_text}/{den_text}"


# Expression parsing


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


_TOKEN_RE = re.compile(
    r"(?P<number>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()])"
)


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            tokens.append(Token("end", "", pos))
            return tokens
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        tokens.append(Token(match.lastgroup, match.group(), pos))
        pos = match.end()


class ExpressionParser:
    """
    Pratt parser for the shared expression grammar.

    Atoms are numbers (integers or finite decimals) and names. Names are
    resolved by the caller-supplied resolver, numbers by the constant
    factory, and operators are applied through the values' own arithmetic,
    so the same grammar serves Scalars, jets and enveloping-algebra
    elements. The exponent of ``^`` must be a non-negative integer literal;
    ``^`` is right-associative.
    """

    BINDING = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
    UNARY = 30
    MAX_EXPONENT = 1000

    def __init__(
        self,
        text: str,
        resolve_name: Callable[[str, int], Any],
        constant: Callable[[Fraction], Any],
    ):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0
        self.resolve_name = resolve_name
        self.constant = constant

    def parse(self) -> Any:
        if self.peek().kind == "end":
            raise ParseError("empty expression", 0)
        value = self.expression(0)
        token = self.peek()
        if token.kind != "end":
            raise ParseError(f"unexpected {token.text!r}", token.position)
        return value

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def binding_power(self, token: Token) -> int:
        if token.kind == "op":
            return self.BINDING.get(token.text, 0)
        return 0

    def expression(self, rbp: int) -> Any:
        left = self.nud(self.advance())
        while rbp < self.binding_power(self.peek()):
            left = self.led(self.advance(), left)
        return left

    def nud(self, token: Token) -> Any:
        if token.kind == "number":
            return self.constant(Fraction(token.text))
        if token.kind == "name":
            return self.resolve_name(token.text, token.position)
        if token.kind == "op" and token.text == "(":
            value = self.expression(0)
            closing = self.advance()
            if closing.kind != "op" or closing.text != ")":
                raise ParseError("expected ')'", closing.position)
            return value
        if token.kind == "op" and token.text == "-":
            return self._apply(lambda v: -v, token, self.expression(self.UNARY))
        if token.kind == "op" and token.text == "+":
            return self.expression(self.UNARY)
        if token.kind == "end":
            raise ParseError("unexpected end of expression", token.position)
        raise ParseError(f"unexpected {token.text!r}", token.position)

    def led(self, token: Token, left: Any) -> Any:
        op = token.text
        if op == "^":
            exponent = self.integer_exponent()
            return self._apply(lambda v: v ** exponent, token, left)
        right = self.expression(self.BINDING[op])
        if op == "+":
            return self._apply(lambda v: v + right, token, left)
        if op == "-":
            return self._apply(lambda v: v - right, token, left)
        if op == "*":
            return self._apply(lambda v: v * right, token, left)
        return self._apply(lambda v: v / right, token, left)

    def integer_exponent(self) -> int:
        token = self.advance()
        if token.kind != "number" or not token.text.isdigit():
            raise ParseError("exponent must be a non-negative integer literal", token.position)
        value = int(token.text)
        if value > self.MAX_EXPONENT:
            raise ParseError(f"exponent exceeds {self.MAX_EXPONENT}", token.position)
        nxt = self.peek()
        if nxt.kind == "op" and nxt.text == "^":
            self.advance()
            value = value ** self.integer_exponent()
            if value > self.MAX_EXPONENT:
                raise ParseError(f"exponent exceeds {self.MAX_EXPONENT}", token.position)
        return value

    @staticmethod
    def _apply(fn: Callable[[Any], Any], token: Token, value: Any) -> Any:
        try:
            return fn(value)
        except ExpressionError as exc:
            if exc.position is None:
                raise type(exc)(str(exc), token.position) from exc
            raise


_LAMBDA_NAME = re.compile(r"l(\d+)")


def scalar_atom_resolver(num_vars: int) -> Callable[[str, int], Scalar]:
    """Resolver for the names ``i`` and ``l1..l<num_vars>``."""
    width = max(1, num_vars)

    def resolve(name: str, position: int) -> Scalar:
        if name == "i":
            return Scalar.imaginary_unit(width)
        match = _LAMBDA_NAME.fullmatch(name)
        if match:
            index = int(match.group(1))
            if not 1 <= index <= num_vars:
                raise VariableIndexError(
                    f"variable l{index} outside l1..l{num_vars}", position
                )
            return Scalar.variable(index, width)
        raise ParseError(f"unknown name {name!r}", position)

    return resolve


def parse_scalar(text: str, num_vars: int) -> Scalar:
    """
    Parse a scalar expression into a canonical Scalar.

    Args:
        text: Expression over rationals, ``i``, ``l1..l<num_vars>``, + - * / ^
        num_vars: Number of dynamical variables

    Returns:
        Scalar: The canonical value

    Raises:
        ParseError: On a syntax error (with position)
        DivisionByZeroError: On division by the zero polynomial
        VariableIndexError: On a variable outside the declared range
    """
    width = max(1, num_vars)
    parser = ExpressionParser(
        text,
        scalar_atom_resolver(num_vars),
        lambda q: Scalar.from_value(q, width),
    )
    return parser.parse()


# Linear algebra


@dataclass(frozen=True)
class ScalarMatrix:
    """Dense matrix of Scalars with exact elimination."""

    rows: int
    cols: int
    entries: Tuple[Tuple[Scalar, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[ScalarLike]]) -> "ScalarMatrix":
        data = tuple(tuple(Scalar.coerce(x) for x in row) for row in rows)
        ncols = len(data[0]) if data else 0
        if any(len(row) != ncols for row in data):
            raise ValueError("rows must have equal length")
        return cls(len(data), ncols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ScalarMatrix":
        return cls(rows, cols, tuple(tuple(ZERO for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "ScalarMatrix":
        return cls(n, n, tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    def __getitem__(self, key: Tuple[int, int]) -> Scalar:
        i, j = key
        return self.entries[i][j]

    def row(self, i: int) -> Tuple[Scalar, ...]:
        return self.entries[i]

    def column(self, j: int) -> Tuple[Scalar, ...]:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> "ScalarMatrix":
        return ScalarMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else ())

    def __matmul__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        columns = [other.column(j) for j in range(other.cols)]
        data = []
        for row in self.entries:
            out = []
            for col in columns:
                total = ZERO
                for a, b in zip(row, col):
                    if a and b:
                        total = total + a * b
                out.append(total)
            data.append(tuple(out))
        return ScalarMatrix(self.rows, other.cols, tuple(data))

    def __add__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        return ScalarMatrix(
            self.rows,
            self.cols,
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
        )

    def __neg__(self) -> "ScalarMatrix":
        return ScalarMatrix(self.rows, self.cols, tuple(tuple(-a for a in r) for r in self.entries))

    def __sub__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        return self + (-other)

    def is_zero(self) -> bool:
        return all(not a for row in self.entries for a in row)

    def map(self, fn: Callable[[Scalar], Scalar]) -> "ScalarMatrix":
        return ScalarMatrix(self.rows, self.cols, tuple(tuple(fn(a) for a in r) for r in self.entries))

    def stack(self, other: "ScalarMatrix") -> "ScalarMatrix":
        if self.cols != other.cols and self.rows and other.rows:
            raise ValueError("column counts differ")
        return ScalarMatrix(self.rows + other.rows, max(self.cols, other.cols), self.entries + other.entries)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ScalarMatrix":
        return ScalarMatrix(
            len(rows), len(cols), tuple(tuple(self.entries[i][j] for j in cols) for i in rows)
        )

    def rank(self) -> int:
        """Rank by fraction-free (Bareiss) elimination."""
        m = [list(row) for row in self.entries]
        rank = 0
        previous = ONE
        for col in range(self.cols):
            pivot_row = next((r for r in range(rank, self.rows) if m[r][col]), None)
            if pivot_row is None:
                continue
            m[rank], m[pivot_row] = m[pivot_row], m[rank]
            pivot = m[rank][col]
            for r in range(rank + 1, self.rows):
                factor = m[r][col]
                for c in range(col + 1, self.cols):
                    value = m[r][c] * pivot
                    if factor and m[rank][c]:
                        value = value - factor * m[rank][c]
                    m[r][c] = value / previous if value else ZERO
                m[r][col] = ZERO
            previous = pivot
            rank += 1
            if rank == self.rows:
                break
        return rank

    def rref(self) -> Tuple["ScalarMatrix", Tuple[int, ...]]:
        """Reduced row echelon form and pivot columns (Gauss-Jordan)."""
        m = [list(row) for row in self.entries]
        pivots = []
        r = 0
        for col in range(self.cols):
            pivot_row = next((i for i in range(r, self.rows) if m[i][col]), None)
            if pivot_row is None:
                continue
            m[r], m[pivot_row] = m[pivot_row], m[r]
            inv = m[r][col].inverse()
            m[r] = [a * inv if a else ZERO for a in m[r]]
            for i in range(self.rows):
                if i != r and m[i][col]:
                    factor = m[i][col]
                    m[i] = [a - factor * b if b else a for a, b in zip(m[i], m[r])]
            pivots.append(col)
            r += 1
            if r == self.rows:
                break
        return ScalarMatrix(self.rows, self.cols, tuple(tuple(row) for row in m)), tuple(pivots)

    def inverse(self) -> Optional["ScalarMatrix"]:
        if self.rows != self.cols:
            return None
        n = self.rows
        augmented = ScalarMatrix(
            n,
            2 * n,
            tuple(row + ScalarMatrix.identity(n).entries[i] for i, row in enumerate(self.entries)),
        )
        reduced, pivots = augmented.rref()
        if tuple(pivots[:n]) != tuple(range(n)) or len(pivots) < n:
            return None
        return reduced.submatrix(range(n), range(n, 2 * n))

    def nullspace(self) -> List[Tuple[Scalar, ...]]:
        """Basis of the right kernel, one free variable set to 1 per vector."""
        reduced, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for f in free:
            vector = [ZERO] * self.cols
            vector[f] = ONE
            for i, p in enumerate(pivots):
                vector[p] = -reduced[i, f]
            basis.append(tuple(vector))
        return basis

    def solve(self, rhs: Sequence[ScalarLike]) -> Optional[Tuple[Scalar, ...]]:
        """One solution x of M x = rhs (free variables zero), or None."""
        if len(rhs) != self.rows:
            raise ValueError("right-hand side has the wrong length")
        augmented = ScalarMatrix(
            self.rows,
            self.cols + 1,
            tuple(row + (Scalar.coerce(b),) for row, b in zip(self.entries, rhs)),
        )
        reduced, pivots = augmented.rref()
        if pivots and pivots[-1] == self.cols:
            return None
        solution = [ZERO] * self.cols
        for i, p in enumerate(pivots):
            solution[p] = reduced[i, self.cols]
        return tuple(solution)

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(a) for a in row) + "]" for row in self.entries) + "]"


def matrix_rank_inverse(m: ScalarMatrix) -> Tuple[int, Optional[ScalarMatrix]]:
    """
    Exact rank and, when square and nonsingular, the inverse.

    Singularity is a normal outcome: the inverse is None.
    """
    rank = m.rank()
    inverse = m.inverse() if m.rows == m.cols and rank == m.rows else None
    return rank, inverse
