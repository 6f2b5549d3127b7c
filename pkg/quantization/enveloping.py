"""
Universal enveloping algebras in the PBW basis.

PBWAlgebra straightens products of ordered monomials through the structure
constants of a Lie algebra, or of the tangent algebroid, whose coordinate
derivatives are central generators placed first. UEATensor is an element of
the n-fold tensor power with Scalar coefficients and an hbar grading;
FrameOperator is a single differential operator on h* x G, coefficients on
the left, composed with the Leibniz rule.
"""

import logging
from itertools import product as cartesian
from math import comb
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exceptions import (
    AlgebraMismatchError,
    ConsistencyError,
    DegreeError,
    DivisionByZeroError,
    ExpressionError,
    NonUnitalError,
    ParseError,
)
from .symexpr import ONE, ZERO, ExpressionParser, Scalar, ScalarLike, scalar_atom_resolver

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]


class PBWAlgebra:
    """
    U(lie) with the ordered basis of lie; coordinate derivatives, when lie is
    the tangent algebroid, come first and are central.
    """

    def __init__(self, lie):
        self.lie = lie
        self.dim = lie.dim
        self.labels = tuple(lie.labels)
        offset = getattr(lie, "offset", 0)
        algebra = getattr(lie, "algebra", lie)
        self.algebra = algebra
        self.derivations = tuple(range(offset))
        self.cartan = tuple(offset + i for i in range(algebra.cartan_dim))
        self.num_vars = algebra.cartan_dim
        self._times: Dict[Tuple[Monomial, int], Dict[Monomial, Scalar]] = {}
        self._products: Dict[Tuple[Monomial, Monomial], Dict[Monomial, Scalar]] = {}

    def __eq__(self, other):
        return isinstance(other, PBWAlgebra) and other.lie == self.lie

    def __hash__(self):
        return hash(("pbw", self.lie))

    def __repr__(self):
        return f"<PBWAlgebra {', '.join(self.labels)}>"

    @property
    def one(self) -> Monomial:
        return (0,) * self.dim

    def generator(self, index: int, power: int = 1) -> Monomial:
        if not 0 <= index < self.dim:
            raise DegreeError(f"generator {index} outside 0..{self.dim - 1}")
        mono = [0] * self.dim
        mono[index] = power
        return tuple(mono)

    @staticmethod
    def degree(mono: Monomial) -> int:
        return sum(mono)

    def times_generator(self, mono: Monomial, j: int) -> Dict[Monomial, Scalar]:
        """mono * x_j in normal order."""
        key = (mono, j)
        cached = self._times.get(key)
        if cached is not None:
            return cached
        last = max((i for i, e in enumerate(mono) if e), default=-1)
        result: Dict[Monomial, Scalar] = {}
        if last <= j:
            grown = list(mono)
            grown[j] += 1
            result[tuple(grown)] = ONE
        else:
            prefix = list(mono)
            prefix[last] -= 1
            prefix = tuple(prefix)
            # prefix x_last x_j = prefix x_j x_last + prefix [x_last, x_j]
            for m, c in self.times_generator(prefix, j).items():
                for m2, c2 in self.times_generator(m, last).items():
                    _accumulate(result, m2, c * c2)
            for k, value in self.lie.bracket_basis(last, j).items():
                for m, c in self.times_generator(prefix, k).items():
                    _accumulate(result, m, c * value)
        self._times[key] = result
        return result

    def multiply_monomials(self, a: Monomial, b: Monomial) -> Dict[Monomial, Scalar]:
        key = (a, b)
        cached = self._products.get(key)
        if cached is not None:
            return cached
        current: Dict[Monomial, Scalar] = {a: ONE}
        for j, power in enumerate(b):
            for _ in range(power):
                step: Dict[Monomial, Scalar] = {}
                for m, c in current.items():
                    for m2, c2 in self.times_generator(m, j).items():
                        _accumulate(step, m2, c * c2)
                current = step
        self._products[key] = current
        return current

    def multiply(self, u: Mapping[Monomial, Scalar], v: Mapping[Monomial, Scalar]) -> Dict[Monomial, Scalar]:
        result: Dict[Monomial, Scalar] = {}
        for a, ca in u.items():
            for b, cb in v.items():
                for m, c in self.multiply_monomials(a, b).items():
                    _accumulate(result, m, ca * cb * c)
        return result

    @staticmethod
    def coproduct_monomial(mono: Monomial) -> List[Tuple[Monomial, Monomial, int]]:
        """Delta(x^a) = sum_b prod binom(a_i, b_i) x^b (x) x^(a-b)."""
        terms = []
        for split in cartesian(*(range(e + 1) for e in mono)):
            weight = 1
            for e, s in zip(mono, split):
                weight *= comb(e, s)
            terms.append((tuple(split), tuple(e - s for e, s in zip(mono, split)), weight))
        return terms

    @staticmethod
    def counit_monomial(mono: Monomial) -> int:
        return 0 if any(mono) else 1

    def format_monomial(self, mono: Monomial) -> str:
        parts = []
        for label, power in zip(self.labels, mono):
            if power == 1:
                parts.append(label)
            elif power:
                parts.append(f"{label}^{power}")
        return "*".join(parts) or "1"

    def restricted(self, target: "PBWAlgebra") -> Callable[[Monomial], Monomial]:
        """Map dropping the derivation slots onto the PBW algebra of g."""
        offset = len(self.derivations)
        if target.dim != self.dim - offset:
            raise AlgebraMismatchError("target algebra does not match the non-derivation part")
        return lambda mono: mono[offset:]


def _accumulate(target: Dict, key, value: Scalar) -> None:
    if not value:
        return
    total = target.get(key)
    total = value if total is None else total + value
    if total:
        target[key] = total
    else:
        target.pop(key, None)


# Multi-leg elements


class UEATensor:
    """
    Element sum_k hbar^k sum c(l) u_1 (x) .. (x) u_n of U^(x)n[[hbar]], truncated at hbar^cap.

    Keys are (k, m_1, .., m_n) with PBW monomials m_i. Products are legwise
    with coefficients multiplied pointwise in l.
    """

    __slots__ = ("pbw", "legs", "cap", "_terms")

    def __init__(self, pbw: PBWAlgebra, legs: int, cap: int, terms: Optional[Mapping[Tuple, ScalarLike]] = None):
        self.pbw = pbw
        self.legs = legs
        self.cap = cap
        clean: Dict[Tuple, Scalar] = {}
        for key, value in (terms or {}).items():
            if len(key) != legs + 1:
                raise DegreeError(f"key {key} does not have {legs} legs")
            if key[0] <= cap:
                _accumulate(clean, key, Scalar.coerce(value))
        self._terms = clean

    def _new(self, terms: Dict[Tuple, Scalar], legs: Optional[int] = None, cap: Optional[int] = None) -> "UEATensor":
        tensor = UEATensor.__new__(UEATensor)
        tensor.pbw = self.pbw
        tensor.legs = self.legs if legs is None else legs
        tensor.cap = self.cap if cap is None else cap
        tensor._terms = {k: v for k, v in terms.items() if k[0] <= tensor.cap}
        return tensor

    # Construction

    @classmethod
    def one(cls, pbw: PBWAlgebra, legs: int = 1, cap: int = 0) -> "UEATensor":
        return cls(pbw, legs, cap, {(0,) + (pbw.one,) * legs: ONE})

    @classmethod
    def zero(cls, pbw: PBWAlgebra, legs: int = 1, cap: int = 0) -> "UEATensor":
        return cls(pbw, legs, cap)

    @classmethod
    def monomial(
        cls,
        pbw: PBWAlgebra,
        monomials: Sequence[Monomial],
        coefficient: ScalarLike = 1,
        hbar: int = 0,
        cap: int = 0,
    ) -> "UEATensor":
        return cls(pbw, len(monomials), max(cap, hbar), {(hbar,) + tuple(monomials): coefficient})

    @classmethod
    def generator(cls, pbw: PBWAlgebra, index: int, legs: int = 1, leg: int = 0, cap: int = 0) -> "UEATensor":
        monos = [pbw.one] * legs
        monos[leg] = pbw.generator(index)
        return cls(pbw, legs, cap, {(0,) + tuple(monos): ONE})

    @classmethod
    def from_bivector(cls, pbw: PBWAlgebra, r, cap: int = 0, hbar: int = 0) -> "UEATensor":
        """x ^ y as x (x) y - y (x) x; r lives on the algebra of pbw."""
        offset = len(pbw.derivations)
        terms: Dict[Tuple, Scalar] = {}
        for (a, b), value in r.items():
            xa = pbw.generator(offset + a)
            xb = pbw.generator(offset + b)
            _accumulate(terms, (hbar, xa, xb), value)
            _accumulate(terms, (hbar, xb, xa), -value)
        return cls(pbw, 2, max(cap, hbar), terms)

    # Access

    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def coefficient(self, hbar: int, *monomials: Monomial) -> Scalar:
        return self._terms.get((hbar,) + tuple(monomials), ZERO)

    def order(self, hbar: int) -> "UEATensor":
        """The hbar^k part, moved to hbar^0."""
        return self._new(
            {(0,) + key[1:]: value for key, value in self._terms.items() if key[0] == hbar},
            cap=max(self.cap, 0),
        )

    def leading(self) -> "UEATensor":
        return self.order(0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_one(self) -> bool:
        return self._terms == {(0,) + (self.pbw.one,) * self.legs: ONE}

    def max_degree(self) -> int:
        return max((sum(map(sum, key[1:])) for key in self._terms), default=0)

    # Arithmetic

    def _check(self, other: "UEATensor") -> None:
        if not isinstance(other, UEATensor):
            raise TypeError(f"expected UEATensor, got {type(other).__name__}")
        if other.legs != self.legs or other.pbw is not self.pbw and other.pbw != self.pbw:
            raise AlgebraMismatchError(
                f"cannot combine {self.legs}-leg and {other.legs}-leg tensors of different algebras"
            )

    def __add__(self, other: "UEATensor") -> "UEATensor":
        self._check(other)
        cap = min(self.cap, other.cap)
        terms = dict(self._terms)
        for key, value in other._terms.items():
            _accumulate(terms, key, value)
        return self._new(terms, cap=cap)

    def __neg__(self) -> "UEATensor":
        return self._new({k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "UEATensor") -> "UEATensor":
        return self + (-other)

    def scale(self, factor: ScalarLike) -> "UEATensor":
        factor = Scalar.coerce(factor)
        terms: Dict[Tuple, Scalar] = {}
        for key, value in self._terms.items():
            _accumulate(terms, key, value * factor)
        return self._new(terms)

    def times_hbar(self, power: int = 1) -> "UEATensor":
        return self._new({(key[0] + power,) + key[1:]: v for key, v in self._terms.items()})

    def with_cap(self, cap: int) -> "UEATensor":
        return self._new(dict(self._terms), cap=cap)

    def __mul__(self, other):
        if not isinstance(other, UEATensor):
            try:
                return self.scale(Scalar.coerce(other))
            except TypeError:
                return NotImplemented
        self._check(other)
        cap = min(self.cap, other.cap)
        pbw = self.pbw
        terms: Dict[Tuple, Scalar] = {}
        for ka, va in self._terms.items():
            for kb, vb in other._terms.items():
                k = ka[0] + kb[0]
                if k > cap:
                    continue
                partial: List[Tuple[Tuple[Monomial, ...], Scalar]] = [((), va * vb)]
                for leg in range(self.legs):
                    step = []
                    for monos, c in partial:
                        for m, cm in pbw.multiply_monomials(ka[1 + leg], kb[1 + leg]).items():
                            step.append((monos + (m,), c * cm))
                    partial = step
                for monos, c in partial:
                    _accumulate(terms, (k,) + monos, c)
        return self._new(terms, cap=cap)

    def __rmul__(self, other):
        try:
            return self.scale(Scalar.coerce(other))
        except TypeError:
            return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, UEATensor):
            unit = (0,) + (self.pbw.one,) * other.legs
            if set(other.keys()) - {unit}:
                raise ExpressionError("division by an element that is not a scalar")
            other = other.coefficient(0, *unit[1:])
        try:
            factor = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if not factor:
            raise DivisionByZeroError("division of an enveloping algebra element by zero")
        return self.scale(factor.inverse())

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = UEATensor.one(self.pbw, self.legs, self.cap)
        for _ in range(exponent):
            result = result * self
        return result

    def commutator(self, other: "UEATensor") -> "UEATensor":
        return self * other - other * self

    def inverse(self) -> "UEATensor":
        """
        Geometric-series inverse of 1 + O(hbar).

        Raises:
            NonUnitalError: If the hbar^0 part is not 1 (x) .. (x) 1
        """
        if not self.leading().is_one():
            raise NonUnitalError("leading term is not 1; the series cannot be inverted")
        one = UEATensor.one(self.pbw, self.legs, self.cap)
        tail = one - self
        result = one
        power = one
        for _ in range(self.cap):
            power = power * tail
            if power.is_zero():
                break
            result = result + power
        return result

    # Coefficient calculus

    def diff(self, index: int) -> "UEATensor":
        """d/dl<index> of the coefficients (1-based)."""
        terms: Dict[Tuple, Scalar] = {}
        for key, value in self._terms.items():
            _accumulate(terms, key, value.diff(index))
        return self._new(terms)

    def subs(self, point: Sequence[ScalarLike]) -> "UEATensor":
        return self._new({k: v.subs(point) for k, v in self._terms.items() if v.subs(point)})

    def map_coefficients(self, fn: Callable[[Scalar], Scalar]) -> "UEATensor":
        terms: Dict[Tuple, Scalar] = {}
        for key, value in self._terms.items():
            _accumulate(terms, key, fn(value))
        return self._new(terms)

    # Leg manipulation

    def permute(self, order: Sequence[int]) -> "UEATensor":
        """Leg i of the result is leg order[i] of self (a flip is (1, 0))."""
        if sorted(order) != list(range(self.legs)):
            raise DegreeError(f"{order} is not a permutation of {self.legs} legs")
        return self._new({(key[0],) + tuple(key[1 + o] for o in order): v for key, v in self._terms.items()})

    def flip(self) -> "UEATensor":
        return self.permute((1, 0))

    def embed(self, legs: int, positions: Sequence[int]) -> "UEATensor":
        """Place leg i at position positions[i] of a legs-fold tensor, 1 elsewhere."""
        if len(positions) != self.legs:
            raise DegreeError("one position per leg is required")
        terms = {}
        for key, value in self._terms.items():
            monos = [self.pbw.one] * legs
            for i, p in enumerate(positions):
                monos[p] = key[1 + i]
            terms[(key[0],) + tuple(monos)] = value
        return self._new(terms, legs=legs)

    def coproduct(self, leg: int = 0) -> "UEATensor":
        """Apply Delta to one leg, splitting it into positions leg, leg + 1."""
        terms: Dict[Tuple, Scalar] = {}
        for key, value in self._terms.items():
            monos = key[1:]
            for left, right, weight in PBWAlgebra.coproduct_monomial(monos[leg]):
                new_key = (key[0],) + monos[:leg] + (left, right) + monos[leg + 1:]
                _accumulate(terms, new_key, value * weight)
        return self._new(terms, legs=self.legs + 1)

    def counit(self, leg: int = 0) -> "UEATensor":
        """Apply epsilon to one leg, removing it."""
        terms: Dict[Tuple, Scalar] = {}
        for key, value in self._terms.items():
            monos = key[1:]
            if PBWAlgebra.counit_monomial(monos[leg]):
                _accumulate(terms, (key[0],) + monos[:leg] + monos[leg + 1:], value)
        if self.legs == 1:
            # A scalar series is kept as a 1-leg tensor in the unit.
            return self._new({(k[0], self.pbw.one): v for k, v in terms.items()}, legs=1)
        return self._new(terms, legs=self.legs - 1)

    def cartan_factor(self, leg: int, exponents: Sequence[int]) -> "UEATensor":
        """The tensor with h^exponents in one leg and 1 elsewhere."""
        mono = [0] * self.pbw.dim
        for i, e in zip(self.pbw.cartan, exponents):
            mono[i] = e
        monos = [self.pbw.one] * self.legs
        monos[leg] = tuple(mono)
        return self._new({(0,) + tuple(monos): ONE})

    def shift(self, leg: int, sign: int) -> "UEATensor":
        """
        Taylor expansion of X(l + sign * hbar/2 * h^(leg)):
        sum_mu (sign/2)^|mu| hbar^|mu| / mu! (d^mu X) h^mu in the given leg.
        """
        l = self.pbw.num_vars
        result = self
        current = self
        half = Scalar.coerce(sign) / 2
        for n in range(1, self.cap + 1):
            step = self._new({})
            for i in range(l):
                exponents = [0] * l
                exponents[i] = 1
                step = step + current.diff(i + 1) * self.cartan_factor(leg, exponents)
            current = step.times_hbar(1).scale(half / n)
            if current.is_zero():
                break
            result = result + current
        return result

    def restrict(self, target: PBWAlgebra) -> "UEATensor":
        """
        Drop the derivation slots onto U(g).

        Raises:
            ConsistencyError: If some term still carries a coordinate derivative
        """
        offset = len(self.pbw.derivations)
        terms: Dict[Tuple, Scalar] = {}
        for key, value in self._terms.items():
            if any(any(m[:offset]) for m in key[1:]):
                raise ConsistencyError(
                    "restrict", f"term {self.format_key(key)} has a derivative in l"
                )
            terms[(key[0],) + tuple(m[offset:] for m in key[1:])] = value
        tensor = UEATensor(target, self.legs, self.cap)
        tensor._terms = terms
        return tensor

    def extend(self, target: PBWAlgebra) -> "UEATensor":
        """Embed U(g) tensors into the tensor powers of the algebroid enveloping algebra."""
        pad = (0,) * len(target.derivations)
        tensor = UEATensor(target, self.legs, self.cap)
        tensor._terms = {(k[0],) + tuple(pad + m for m in k[1:]): v for k, v in self._terms.items()}
        return tensor

    # Output

    def format_key(self, key: Tuple) -> str:
        body = " (x) ".join(self.pbw.format_monomial(m) for m in key[1:])
        return f"hbar^{key[0]} {body}" if key[0] else body

    def to_dict(self) -> Dict[str, str]:
        return {self.format_key(key): str(value) for key, value in sorted(self._terms.items())}

    def __eq__(self, other):
        if not isinstance(other, UEATensor):
            return NotImplemented
        return self.legs == other.legs and (self - other).is_zero()

    def __hash__(self):
        return hash((self.legs, frozenset((k, str(v)) for k, v in self._terms.items())))

    def __repr__(self):
        return f"UEATensor(legs={self.legs}, cap={self.cap}, {self.to_dict()})"


# A single-leg element of U(g)[[hbar]].
PBWElement = UEATensor


def pbw_mul(u: UEATensor, v: UEATensor) -> UEATensor:
    return u * v


def coproduct(u: UEATensor) -> UEATensor:
    return u.coproduct(0)


def counit(u: UEATensor) -> UEATensor:
    return u.counit(0)


def counit_scalar(u: UEATensor, hbar: int = 0) -> Scalar:
    """epsilon(u) at one hbar order, for single-leg u."""
    return u.counit(0).coefficient(hbar, u.pbw.one)


# Differential operators on h* x G


class FrameOperator:
    """
    sum c(l) d^beta e^a: PBW monomials over the tangent algebroid with
    l-dependent coefficients on the left.

    Coordinate derivatives pass through coefficients by the Leibniz rule and
    commute with the left-invariant fields; the fields do not see l.
    """

    __slots__ = ("pbw", "_terms")

    def __init__(self, pbw: PBWAlgebra, terms: Optional[Mapping[Monomial, ScalarLike]] = None):
        self.pbw = pbw
        clean: Dict[Monomial, Scalar] = {}
        for mono, value in (terms or {}).items():
            _accumulate(clean, tuple(mono), Scalar.coerce(value))
        self._terms = clean

    def _new(self, terms: Dict[Monomial, Scalar]) -> "FrameOperator":
        op = FrameOperator.__new__(FrameOperator)
        op.pbw = self.pbw
        op._terms = terms
        return op

    @classmethod
    def identity(cls, pbw: PBWAlgebra) -> "FrameOperator":
        return cls(pbw, {pbw.one: ONE})

    @classmethod
    def generator(cls, pbw: PBWAlgebra, index: int) -> "FrameOperator":
        return cls(pbw, {pbw.generator(index): ONE})

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __add__(self, other: "FrameOperator") -> "FrameOperator":
        terms = dict(self._terms)
        for mono, value in other._terms.items():
            _accumulate(terms, mono, value)
        return self._new(terms)

    def __neg__(self) -> "FrameOperator":
        return self._new({m: -v for m, v in self._terms.items()})

    def __sub__(self, other: "FrameOperator") -> "FrameOperator":
        return self + (-other)

    def __mul__(self, other):
        # Multiplication by a function of l; composition is @.
        if isinstance(other, FrameOperator):
            return NotImplemented
        try:
            factor = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        terms: Dict[Monomial, Scalar] = {}
        for mono, value in self._terms.items():
            _accumulate(terms, mono, value * factor)
        return self._new(terms)

    __rmul__ = __mul__

    def __matmul__(self, other: "FrameOperator") -> "FrameOperator":
        pbw = self.pbw
        offset = len(pbw.derivations)
        terms: Dict[Monomial, Scalar] = {}
        for m1, c1 in self._terms.items():
            beta = m1[:offset]
            rest = m1[offset:]
            for m2, c2 in other._terms.items():
                for gamma in cartesian(*(range(b + 1) for b in beta)):
                    weight = 1
                    derived = c2
                    for i, (b, g) in enumerate(zip(beta, gamma)):
                        weight *= comb(b, g)
                        for _ in range(g):
                            derived = derived.diff(i + 1)
                    if not derived:
                        continue
                    left = tuple(b - g for b, g in zip(beta, gamma)) + rest
                    for m, c in pbw.multiply_monomials(left, m2).items():
                        _accumulate(terms, m, c1 * derived * c * weight)
        return self._new(terms)

    def frame_derivative(self, index: int) -> "FrameOperator":
        """X_index composed on the left."""
        return FrameOperator.generator(self.pbw, index) @ self

    def tensor(self, other: "FrameOperator") -> UEATensor:
        """The bidifferential operator (f, g) -> (self f)(other g)."""
        terms: Dict[Tuple, Scalar] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                _accumulate(terms, (0, m1, m2), c1 * c2)
        tensor = UEATensor(self.pbw, 2, 0)
        tensor._terms = terms
        return tensor

    def apply(self, jet):
        """Apply to a jet (anything with frame_derivative, + and Scalar scaling)."""
        total = None
        for mono, value in self._terms.items():
            current = jet
            for index in reversed(range(self.pbw.dim)):
                for _ in range(mono[index]):
                    current = current.frame_derivative(index)
            term = current * value
            total = term if total is None else total + term
        return total if total is not None else jet * ZERO

    def __eq__(self, other):
        if not isinstance(other, FrameOperator):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset((m, str(v)) for m, v in self._terms.items()))

    def to_dict(self) -> Dict[str, str]:
        return {self.pbw.format_monomial(m): str(v) for m, v in sorted(self._terms.items())}

    def __repr__(self):
        return f"FrameOperator({self.to_dict()})"


def apply_bidifferential(operator: UEATensor, f, g, hbar: int):
    """The hbar^k part of a 2-leg operator tensor applied to two jets."""
    pbw = operator.pbw
    total = None
    for key, value in operator.items():
        if key[0] != hbar:
            continue
        left = FrameOperator(pbw, {key[1]: ONE}).apply(f)
        right = FrameOperator(pbw, {key[2]: ONE}).apply(g)
        term = (left * right) * value
        total = term if total is None else total + term
    return total if total is not None else f * ZERO


def exponential(generator: UEATensor, scale: ScalarLike = 1) -> UEATensor:
    """exp(scale * hbar * generator) for a generator of hbar order zero."""
    scale = Scalar.coerce(scale)
    result = UEATensor.one(generator.pbw, generator.legs, generator.cap)
    power = result
    for n in range(1, generator.cap + 1):
        power = (power * generator).times_hbar(1).scale(scale / n)
        if power.is_zero():
            break
        result = result + power
    return result


def parse_pbw(text: str, pbw: PBWAlgebra, cap: int) -> UEATensor:
    """
    Parse a single-leg element of U[[hbar]] such as ``1 + hbar*h^2``.

    Names are the basis labels of pbw, ``hbar``, ``i`` and ``l1..l<l>``;
    products are taken in the enveloping algebra.

    Raises:
        ParseError: On a syntax error or unknown name (with position)
        VariableIndexError: On a variable outside its range
    """
    scalar_names = scalar_atom_resolver(pbw.num_vars)
    width = max(1, pbw.num_vars)
    index_of = {label: i for i, label in enumerate(pbw.labels)}
    unit = UEATensor.one(pbw, 1, cap)

    def resolve(name: str, position: int) -> UEATensor:
        if name in index_of:
            return UEATensor.generator(pbw, index_of[name], cap=cap)
        if name == "hbar":
            if cap < 1:
                raise ParseError("hbar does not survive a cap of 0", position)
            return unit.times_hbar(1)
        return unit.scale(scalar_names(name, position))

    parser = ExpressionParser(text, resolve, lambda q: unit.scale(Scalar.from_value(q, width)))
    return parser.parse()
