"""
Truncated jets of functions on h* x G at (l, identity).

A GJet is a polynomial in the exponential coordinates x1..xn of G, truncated
at a fixed degree, with Scalar coefficients carrying the dependence on l.
Every operator used on functions is left-invariant with coefficients in l,
so jets at the identity are enough.
"""

import logging
import re
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from .exceptions import DegreeError, DivisionByZeroError, ExpressionError, ParseError, VariableIndexError
from .liealg import LieAlgebra
from .symexpr import ONE, ZERO, ExpressionParser, Scalar, ScalarLike, scalar_atom_resolver

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]


@lru_cache(maxsize=None)
def dexp_coefficients(degree: int) -> Tuple[Scalar, ...]:
    """Taylor coefficients of z / (1 - exp(-z)) up to z^degree."""
    z = sympy.Symbol("z")
    expansion = sympy.series(z / (1 - sympy.exp(-z)), z, 0, degree + 1).removeO()
    return tuple(Scalar.coerce(sympy.Rational(expansion.coeff(z, k))) for k in range(degree + 1))


class JetSpace:
    """
    Jets of degree <= degree on h* x G near the identity.

    Attributes:
        algebra: The Lie algebra of G
        degree: Truncation degree in x
        num_vars: Number of dynamical variables l
    """

    def __init__(self, algebra: LieAlgebra, degree: int):
        if degree < 0:
            raise DegreeError(f"jet degree must be non-negative, got {degree}")
        self.algebra = algebra
        self.degree = degree
        self.dim = algebra.dim
        self.num_vars = algebra.cartan_dim
        self._fields: Optional[List[Dict[int, "GJet"]]] = None

    def __eq__(self, other):
        return isinstance(other, JetSpace) and other.algebra == self.algebra and other.degree == self.degree

    def __hash__(self):
        return hash(("jets", self.algebra, self.degree))

    def __repr__(self):
        return f"<JetSpace {self.algebra.name or '?'} degree {self.degree}>"

    @property
    def zero_exponents(self) -> Exponents:
        return (0,) * self.dim

    @property
    def fields(self) -> List[Dict[int, "GJet"]]:
        """fields[a][b]: coefficient of d/dx^b in the left-invariant field e_a."""
        if self._fields is None:
            self._fields = _dexp_fields(self)
        return self._fields

    def zero(self) -> "GJet":
        return GJet(self)

    def constant(self, value: ScalarLike) -> "GJet":
        return GJet(self, {self.zero_exponents: value})

    def variable(self, index: int) -> "GJet":
        """The coordinate x<index + 1>."""
        if not 0 <= index < self.dim:
            raise VariableIndexError(f"coordinate x{index + 1} outside x1..x{self.dim}")
        exps = [0] * self.dim
        exps[index] = 1
        return GJet(self, {tuple(exps): ONE})

    def monomial(self, exponents: Sequence[int], coefficient: ScalarLike = 1) -> "GJet":
        return GJet(self, {tuple(exponents): coefficient})

    def monomials(self, degree: Optional[int] = None) -> List[Exponents]:
        """All exponent vectors of total degree <= degree, graded then lexicographic."""
        top = self.degree if degree is None else degree
        result: List[Exponents] = []
        for total in range(top + 1):
            result.extend(_compositions(total, self.dim))
        return result


def _compositions(total: int, parts: int) -> List[Exponents]:
    if parts == 0:
        return [()] if total == 0 else []
    if parts == 1:
        return [(total,)]
    result = []
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            result.append((first,) + rest)
    return result


class GJet:
    """Truncated polynomial sum c_alpha(l) x^alpha."""

    __slots__ = ("space", "_terms")

    def __init__(self, space: JetSpace, terms: Optional[Mapping[Exponents, ScalarLike]] = None):
        self.space = space
        clean: Dict[Exponents, Scalar] = {}
        for exps, value in (terms or {}).items():
            if len(exps) != space.dim:
                raise DegreeError(f"exponents {exps} do not match dimension {space.dim}")
            if sum(exps) > space.degree:
                continue
            value = Scalar.coerce(value)
            if value:
                total = clean.get(exps)
                total = value if total is None else total + value
                if total:
                    clean[exps] = total
                else:
                    clean.pop(exps)
        self._terms = clean

    def _new(self, terms: Dict[Exponents, Scalar]) -> "GJet":
        jet = GJet.__new__(GJet)
        jet.space = self.space
        jet._terms = terms
        return jet

    def items(self):
        return self._terms.items()

    def coefficient(self, exponents: Sequence[int]) -> Scalar:
        return self._terms.get(tuple(exponents), ZERO)

    def value_at_identity(self) -> Scalar:
        return self.coefficient(self.space.zero_exponents)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_pure_group(self) -> bool:
        """True when no coefficient depends on l."""
        return all(not value.variables() for value in self._terms.values())

    def is_pure_lambda(self) -> bool:
        return all(not any(exps) for exps in self._terms)

    def truncate(self, degree: int) -> "GJet":
        return self._new({e: v for e, v in self._terms.items() if sum(e) <= degree})

    def low_degree_equal(self, other: "GJet", degree: int) -> bool:
        return (self - other).truncate(degree).is_zero()

    # Arithmetic

    def __add__(self, other):
        if not isinstance(other, GJet):
            try:
                other = self.space.constant(Scalar.coerce(other))
            except TypeError:
                return NotImplemented
        terms = dict(self._terms)
        for exps, value in other._terms.items():
            total = terms.get(exps)
            total = value if total is None else total + value
            if total:
                terms[exps] = total
            else:
                terms.pop(exps, None)
        return self._new(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -v for e, v in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, GJet):
            try:
                other = self.space.constant(Scalar.coerce(other))
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor: Scalar) -> "GJet":
        if not factor:
            return self._new({})
        terms = {}
        for exps, value in self._terms.items():
            product = value * factor
            if product:
                terms[exps] = product
        return self._new(terms)

    def __mul__(self, other):
        if not isinstance(other, GJet):
            try:
                return self.scale(Scalar.coerce(other))
            except TypeError:
                return NotImplemented
        top = self.space.degree
        terms: Dict[Exponents, Scalar] = {}
        for ea, va in self._terms.items():
            da = sum(ea)
            for eb, vb in other._terms.items():
                if da + sum(eb) > top:
                    continue
                exps = tuple(x + y for x, y in zip(ea, eb))
                total = terms.get(exps)
                value = va * vb
                total = value if total is None else total + value
                if total:
                    terms[exps] = total
                else:
                    terms.pop(exps, None)
        return self._new(terms)

    def __rmul__(self, other):
        try:
            return self.scale(Scalar.coerce(other))
        except TypeError:
            return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, GJet):
            if not other.is_pure_lambda():
                raise ExpressionError("division by a jet that depends on x")
            other = other.value_at_identity()
        other = Scalar.coerce(other)
        if not other:
            raise DivisionByZeroError("division of a jet by zero")
        return self.scale(other.inverse())

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = self.space.constant(ONE)
        for _ in range(exponent):
            result = result * self
        return result

    # Derivatives

    def partial(self, index: int) -> "GJet":
        """d/dx<index + 1>."""
        terms: Dict[Exponents, Scalar] = {}
        for exps, value in self._terms.items():
            power = exps[index]
            if power:
                lowered = list(exps)
                lowered[index] -= 1
                terms[tuple(lowered)] = value * power
        return self._new(terms)

    def field(self, index: int) -> "GJet":
        """The left-invariant field e_index applied to the jet."""
        result = self._new({})
        for b, coefficient in self.space.fields[index].items():
            derivative = self.partial(b)
            if derivative:
                result = result + coefficient * derivative
        return result

    def lambda_derivative(self, index: int) -> "GJet":
        """d/dl<index> (1-based) of the coefficients."""
        terms = {}
        for exps, value in self._terms.items():
            derivative = value.diff(index)
            if derivative:
                terms[exps] = derivative
        return self._new(terms)

    def frame_derivative(self, index: int) -> "GJet":
        """X_index in the frame of M: d/dl for index < l, then the fields."""
        l = self.space.num_vars
        if index < l:
            return self.lambda_derivative(index + 1)
        return self.field(index - l)

    # Output

    def __eq__(self, other):
        if isinstance(other, GJet):
            return (self - other).is_zero()
        try:
            return (self - Scalar.coerce(other)).is_zero()
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset((e, str(v)) for e, v in self._terms.items()))

    def format(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps in sorted(self._terms, key=lambda e: (sum(e), tuple(-x for x in e))):
            value = self._terms[exps]
            mono = "*".join(
                f"x{i + 1}" if p == 1 else f"x{i + 1}^{p}" for i, p in enumerate(exps) if p
            )
            text = str(value)
            if not mono:
                parts.append(text)
            elif value == ONE:
                parts.append(mono)
            elif value == -ONE:
                parts.append(f"-{mono}")
            else:
                parts.append(f"({text})*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"GJet({self.format()})"


def _dexp_fields(space: JetSpace) -> List[Dict[int, GJet]]:
    """
    e_a = sum_b M_ba(x) d/dx^b with M(x) = psi(ad_x), psi(z) = z / (1 - exp(-z)).
    """
    g = space.algebra
    n = g.dim
    top = space.degree
    ad = [[space.zero() for _ in range(n)] for _ in range(n)]
    for a in range(n):
        xa = space.variable(a)
        for b in range(n):
            for c, value in g.bracket_basis(a, b).items():
                ad[c][b] = ad[c][b] + xa * value
    coefficients = dexp_coefficients(top)
    identity = [[space.constant(ONE) if i == j else space.zero() for j in range(n)] for i in range(n)]
    total = [[identity[i][j] * coefficients[0] for j in range(n)] for i in range(n)]
    power = identity
    for k in range(1, top + 1):
        power = _matrix_product(power, ad)
        if all(not entry for row in power for entry in row):
            break
        if coefficients[k]:
            total = [[total[i][j] + power[i][j] * coefficients[k] for j in range(n)] for i in range(n)]
    fields = []
    for a in range(n):
        fields.append({b: total[b][a] for b in range(n) if total[b][a]})
    logger.debug(f"left-invariant fields for {g.name or '?'} to degree {top}")
    return fields


def _matrix_product(left: List[List[GJet]], right: List[List[GJet]]) -> List[List[GJet]]:
    n = len(left)
    result = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = left[i][0].space.zero()
            for k in range(n):
                if left[i][k] and right[k][j]:
                    entry = entry + left[i][k] * right[k][j]
            row.append(entry)
        result.append(row)
    return result


def left_invariant_fields(g: LieAlgebra, degree: int) -> List[Dict[int, GJet]]:
    """
    Left-invariant fields of G in exponential coordinates as jet-valued matrices.

    Args:
        g: The Lie algebra
        degree: Jet truncation degree

    Returns:
        List[Dict[int, GJet]]: entry a maps b to the coefficient of d/dx^b in e_a
    """
    return JetSpace(g, degree).fields


def field_bracket_violations(space: JetSpace) -> List[Tuple[int, int]]:
    """
    Pairs (a, b) with [e_a, e_b] x^c != sum c_ab^d e_d x^c below the top degree.

    On coordinates the brackets of the fields are first-order, so testing
    on x1..xn checks the full vector fields.
    """
    g = space.algebra
    violations = []
    check_degree = space.degree - 1
    for a in range(space.dim):
        for b in range(a + 1, space.dim):
            for c in range(space.dim):
                xc = space.variable(c)
                lhs = xc.field(b).field(a) - xc.field(a).field(b)
                rhs = space.zero()
                for d, value in g.bracket_basis(a, b).items():
                    rhs = rhs + xc.field(d) * value
                if not lhs.low_degree_equal(rhs, check_degree):
                    violations.append((a, b))
                    break
    return violations


_COORDINATE = re.compile(r"x(\d+)")


def parse_jet(text: str, space: JetSpace) -> GJet:
    """
    Parse a jet expression over rationals, i, l1..l<l> and x1..x<n>.

    Raises:
        ParseError: On a syntax error or unknown name (with position)
        VariableIndexError: On a coordinate or variable outside its range
    """
    scalar_names = scalar_atom_resolver(space.num_vars)
    width = max(1, space.num_vars)

    def resolve(name: str, position: int) -> GJet:
        match = _COORDINATE.fullmatch(name)
        if match:
            index = int(match.group(1))
            if not 1 <= index <= space.dim:
                raise VariableIndexError(f"coordinate x{index} outside x1..x{space.dim}", position)
            return space.variable(index - 1)
        return space.constant(scalar_names(name, position))

    parser = ExpressionParser(
        text,
        resolve,
        lambda q: space.constant(Scalar.from_value(q, width)),
    )
    value = parser.parse()
    if not isinstance(value, GJet):
        raise ParseError(f"{text!r} is not a jet expression", 0)
    return value
