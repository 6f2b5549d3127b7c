"""
Truncated Weyl-bundle calculus over the invariant frame of M.

A WeylElement is a finite sum of terms c * hbar^k * y^alpha * theta^J where
y^A are the fiber coordinates dual to the frame, theta^J a wedge of frame
covectors and c a coefficient: a Scalar, a GJet, a FrameOperator or a
bidifferential operator tensor. Coefficients only need addition, negation,
multiplication by Scalars and, for covariant derivatives, a frame
derivative. Total degree is 2k + |alpha|; every element is truncated at
the caps of its bundle.

Conventions: a o b = sum_k (hbar/2)^k / k! pi^{i1 j1}..pi^{ik jk} d^k a d^k b,
delta = theta^A ^ d/dy^A, and the Abelian connection is
D = -delta + d_nabla + (1/hbar)[gamma, .] with Weyl curvature
Omega = omega - R + delta gamma - d_nabla gamma - (1/hbar) gamma^2.
"""

import logging
import operator
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .dynr import DynamicalR
from .enveloping import FrameOperator, PBWAlgebra, UEATensor
from .exceptions import (
    CapTooSmallError,
    ConsistencyError,
    ConvergenceError,
    DegreeError,
    MissingConnectionError,
    WeylCurvatureError,
)
from .geom import CurvatureTensor, FrameConnection, FrameForm, FrameGeometry, symplectic_data
from .liealg import exterior_sign
from .symexpr import ONE, ZERO, Scalar, ScalarLike

logger = logging.getLogger(__name__)

Key = Tuple[int, Tuple[int, ...], Tuple[int, ...]]
HALF = Scalar.coerce(1) / 2


@dataclass(frozen=True)
class WeylCaps:
    """
    Truncation caps: hbar-order <= hbar and total degree 2k + |alpha| <= degree.
    """

    hbar: int
    degree: int

    @classmethod
    def for_order(cls, order: int, hbar_slack: int = 1, degree_slack: int = 3) -> "WeylCaps":
        """Caps for star products modulo hbar^(order + 1)."""
        return cls(order + hbar_slack, 2 * order + degree_slack)

    @staticmethod
    def minimum(order: int) -> Tuple[int, int]:
        return (order, 2 * order)

    def require(self, order: int) -> None:
        """
        Raises:
            CapTooSmallError: If these caps cannot support a star product of the given order
        """
        hbar, degree = self.minimum(order)
        if self.hbar < hbar or self.degree < degree:
            raise CapTooSmallError(
                f"caps (hbar={self.hbar}, degree={self.degree}) too small for order {order}",
                (hbar, degree),
            )

    def to_dict(self) -> Dict[str, int]:
        return {"hbar": self.hbar, "degree": self.degree}


def _add(target: Dict, key, value) -> None:
    if not value:
        return
    total = target.get(key)
    total = value if total is None else total + value
    if total:
        target[key] = total
    else:
        target.pop(key, None)


class WeylBundle:
    """
    The Weyl bundle of (M, omega) with a symplectic connection and fixed caps.

    Holds the fiberwise Poisson matrix, the Christoffel symbols arranged for
    covariant derivatives, and a cache of Moyal contraction patterns.
    """

    def __init__(self, geometry: FrameGeometry, connection: FrameConnection, caps: WeylCaps):
        self.geometry = geometry
        self.connection = connection
        self.caps = caps
        self.size = geometry.size
        self.frame = geometry.frame
        pi = geometry.poisson
        self._poisson = [
            (i, j, pi[i, j]) for i in range(self.size) for j in range(self.size) if pi[i, j]
        ]
        # _lowering[A][B] = [(C, Gamma_AC^B)]: nabla_A y^B = -sum Gamma_AC^B y^C.
        self._lowering: List[Dict[int, List[Tuple[int, Scalar]]]] = []
        for a in range(self.size):
            table: Dict[int, List[Tuple[int, Scalar]]] = {}
            for c in range(self.size):
                for b, value in connection.gamma(a, c).items():
                    table.setdefault(b, []).append((c, value))
            self._lowering.append(table)
        self._contractions: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Dict[Tuple[int, Tuple[int, ...]], Scalar]] = {}

    @property
    def zero_alpha(self) -> Tuple[int, ...]:
        return (0,) * self.size

    def unit(self, index: int) -> Tuple[int, ...]:
        alpha = [0] * self.size
        alpha[index] = 1
        return tuple(alpha)

    def is_cartan(self, index: int) -> bool:
        return self.geometry.is_cartan_direction(index)

    def contractions(self, alpha: Tuple[int, ...], beta: Tuple[int, ...]) -> Dict[Tuple[int, Tuple[int, ...]], Scalar]:
        """
        (k, remaining monomial) -> weight of the k-fold contracted part of y^alpha o y^beta,
        including (hbar/2)^k / k! and all pi factors.
        """
        key = (alpha, beta)
        cached = self._contractions.get(key)
        if cached is not None:
            return cached
        result: Dict[Tuple[int, Tuple[int, ...]], Scalar] = {
            (0, tuple(a + b for a, b in zip(alpha, beta))): ONE
        }
        current: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Scalar] = {(alpha, beta): ONE}
        k = 0
        while current:
            k += 1
            step: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Scalar] = {}
            factor = Scalar.coerce(1) / (2 * k)
            for (pa, pb), weight in current.items():
                for i, j, pij in self._poisson:
                    if pa[i] and pb[j]:
                        na = pa[:i] + (pa[i] - 1,) + pa[i + 1:]
                        nb = pb[:j] + (pb[j] - 1,) + pb[j + 1:]
                        _add(step, (na, nb), weight * pij * (pa[i] * pb[j]) * factor)
            current = step
            for (pa, pb), weight in current.items():
                _add(result, (k, tuple(a + b for a, b in zip(pa, pb))), weight)
        self._contractions[key] = result
        return result

    def coefficient_derivative(self, index: int, value):
        if isinstance(value, Scalar):
            return self.frame.anchor(index, value)
        return value.frame_derivative(index)


class WeylElement:
    """Sparse section of W (x) Lambda over the frame, truncated at the bundle caps."""

    __slots__ = ("bundle", "_terms")

    def __init__(self, bundle: WeylBundle, terms: Optional[Mapping[Key, Any]] = None):
        self.bundle = bundle
        caps = bundle.caps
        clean: Dict[Key, Any] = {}
        for (k, alpha, forms), value in (terms or {}).items():
            if len(alpha) != bundle.size:
                raise DegreeError(f"monomial {alpha} does not match frame size {bundle.size}")
            if k > caps.hbar or 2 * k + sum(alpha) > caps.degree:
                continue
            if any(not 0 <= f < bundle.size for f in forms):
                raise DegreeError(f"form index outside the frame in {forms}")
            sorted_forms, sign = exterior_sign(tuple(forms))
            if sorted_forms is None:
                continue
            if isinstance(value, int):
                value = Scalar.coerce(value)
            _add(clean, (k, tuple(alpha), sorted_forms), value if sign == 1 else -value)
        self._terms = clean

    def _new(self, terms: Dict[Key, Any]) -> "WeylElement":
        element = WeylElement.__new__(WeylElement)
        element.bundle = self.bundle
        element._terms = terms
        return element

    # Construction

    @classmethod
    def zero(cls, bundle: WeylBundle) -> "WeylElement":
        return cls(bundle)

    @classmethod
    def scalar(cls, bundle: WeylBundle, value, hbar: int = 0) -> "WeylElement":
        """A y-free 0-form: value at hbar^k."""
        return cls(bundle, {(hbar, bundle.zero_alpha, ()): value})

    @classmethod
    def y(cls, bundle: WeylBundle, index: int, coefficient: ScalarLike = 1) -> "WeylElement":
        return cls(bundle, {(0, bundle.unit(index), ()): Scalar.coerce(coefficient)})

    @classmethod
    def from_form(cls, bundle: WeylBundle, form: FrameForm, hbar: int = 0) -> "WeylElement":
        return cls(bundle, {(hbar, bundle.zero_alpha, key): value for key, value in form.items()})

    # Access

    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def coefficient(self, hbar: int, alpha: Sequence[int], forms: Sequence[int] = ()):
        return self._terms.get((hbar, tuple(alpha), tuple(forms)), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    @staticmethod
    def term_degree(key: Key) -> int:
        return 2 * key[0] + sum(key[1])

    def min_degree(self) -> Optional[int]:
        return min((self.term_degree(k) for k in self._terms), default=None)

    def max_degree(self) -> Optional[int]:
        return max((self.term_degree(k) for k in self._terms), default=None)

    def form_degrees(self) -> Tuple[int, ...]:
        return tuple(sorted({len(k[2]) for k in self._terms}))

    def truncate(self, degree: int) -> "WeylElement":
        return self._new({k: v for k, v in self._terms.items() if self.term_degree(k) <= degree})

    def sigma(self) -> Dict[int, Any]:
        """The y-free 0-form part, by hbar order."""
        zero = self.bundle.zero_alpha
        return {k: v for (k, alpha, forms), v in self._terms.items() if alpha == zero and not forms}

    # Arithmetic

    def __add__(self, other: "WeylElement") -> "WeylElement":
        terms = dict(self._terms)
        for key, value in other._terms.items():
            _add(terms, key, value)
        return self._new(terms)

    def __neg__(self) -> "WeylElement":
        return self._new({k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "WeylElement") -> "WeylElement":
        return self + (-other)

    def scale(self, factor: ScalarLike) -> "WeylElement":
        factor = Scalar.coerce(factor)
        terms: Dict[Key, Any] = {}
        for key, value in self._terms.items():
            _add(terms, key, value * factor)
        return self._new(terms)

    def times_hbar(self, power: int = 1) -> "WeylElement":
        caps = self.bundle.caps
        terms = {}
        for (k, alpha, forms), value in self._terms.items():
            key = (k + power, alpha, forms)
            if key[0] <= caps.hbar and self.term_degree(key) <= caps.degree:
                terms[key] = value
        return self._new(terms)

    def map_coefficients(self, fn: Callable[[Any], Any]) -> "WeylElement":
        terms: Dict[Key, Any] = {}
        for key, value in self._terms.items():
            _add(terms, key, fn(value))
        return self._new(terms)

    def has_cartan_dependence(self) -> bool:
        """True when some term uses a fiber variable or covector dual to a Cartan direction."""
        for _, alpha, forms in self._terms:
            for index in range(self.bundle.size):
                if self.bundle.is_cartan(index) and (alpha[index] or index in forms):
                    return True
        return False

    def __eq__(self, other):
        if not isinstance(other, WeylElement):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset((k, str(v)) for k, v in self._terms.items()))

    def format(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (k, alpha, forms), value in sorted(self._terms.items(), key=lambda kv: (self.term_degree(kv[0]), kv[0])):
            factors = []
            if k:
                factors.append("hbar" if k == 1 else f"hbar^{k}")
            factors.extend(
                f"y{i}" if p == 1 else f"y{i}^{p}" for i, p in enumerate(alpha) if p
            )
            if forms:
                factors.append("^".join(f"th{f}" for f in forms))
            parts.append(f"({value})" + ("*" + "*".join(factors) if factors else ""))
        return " + ".join(parts)

    def __repr__(self):
        return f"WeylElement({self.format()})"


def _check_same_bundle(a: WeylElement, b: WeylElement) -> None:
    if a.bundle is not b.bundle:
        if a.bundle.caps != b.bundle.caps:
            raise CapTooSmallError(
                f"cap mismatch {a.bundle.caps} vs {b.bundle.caps}",
                (max(a.bundle.caps.hbar, b.bundle.caps.hbar), max(a.bundle.caps.degree, b.bundle.caps.degree)),
            )
        if a.bundle.geometry is not b.bundle.geometry:
            raise ConsistencyError("moyal", "elements live over different geometries")


def moyal(
    a: WeylElement,
    b: WeylElement,
    product: Callable[[Any, Any], Any] = operator.mul,
    degree: Optional[int] = None,
) -> WeylElement:
    """
    Fiberwise Moyal product with forms multiplied by wedge, truncated at the caps
    (or at a lower total degree).

    Raises:
        CapTooSmallError: If the two elements were built with different caps
    """
    _check_same_bundle(a, b)
    bundle = a.bundle
    caps = bundle.caps
    top = caps.degree if degree is None else min(degree, caps.degree)
    terms: Dict[Key, Any] = {}
    for (ka, alpha, fa), ca in a._terms.items():
        da = 2 * ka + sum(alpha)
        for (kb, beta, fb), cb in b._terms.items():
            if da + 2 * kb + sum(beta) > top or ka + kb > caps.hbar:
                continue
            forms, sign = exterior_sign(fa + fb)
            if forms is None:
                continue
            coefficient = product(ca, cb)
            if not coefficient:
                continue
            for (k, remaining), weight in bundle.contractions(alpha, beta).items():
                total_k = ka + kb + k
                if total_k > caps.hbar:
                    continue
                _add(terms, (total_k, remaining, forms), coefficient * (weight * sign))
    return a._new(terms)


def commutator_over_hbar(a: WeylElement, b: WeylElement, degree: Optional[int] = None) -> WeylElement:
    """
    (1/hbar)(a o b - (-1)^(pq) b o a) for homogeneous form degrees, which is
    twice the odd-contraction part of a o b divided by hbar. Coefficient
    products must commute.
    """
    _check_same_bundle(a, b)
    bundle = a.bundle
    caps = bundle.caps
    top = caps.degree if degree is None else min(degree, caps.degree)
    terms: Dict[Key, Any] = {}
    for (ka, alpha, fa), ca in a._terms.items():
        da = 2 * ka + sum(alpha)
        if not any(alpha):
            continue
        for (kb, beta, fb), cb in b._terms.items():
            if not any(beta) or da + 2 * kb + sum(beta) - 2 > top:
                continue
            forms, sign = exterior_sign(fa + fb)
            if forms is None:
                continue
            coefficient = ca * cb
            if not coefficient:
                continue
            for (k, remaining), weight in bundle.contractions(alpha, beta).items():
                if k % 2 == 0:
                    continue
                total_k = ka + kb + k - 1
                if total_k > caps.hbar:
                    continue
                _add(terms, (total_k, remaining, forms), coefficient * (weight * (2 * sign)))
    return a._new(terms)


def sigma_product(
    a: WeylElement,
    b: WeylElement,
    product: Callable[[Any, Any], Any] = operator.mul,
    hbar_cap: Optional[int] = None,
) -> Dict[int, Any]:
    """sigma(a o b) for 0-forms, computed from fully contracted pairs only."""
    _check_same_bundle(a, b)
    bundle = a.bundle
    cap = bundle.caps.hbar if hbar_cap is None else hbar_cap
    zero = bundle.zero_alpha
    result: Dict[int, Any] = {}
    by_degree: Dict[int, List[Tuple[Key, Any]]] = {}
    for key, value in b._terms.items():
        if not key[2]:
            by_degree.setdefault(sum(key[1]), []).append((key, value))
    for (ka, alpha, fa), ca in a._terms.items():
        if fa:
            continue
        m = sum(alpha)
        for (kb, beta, _), cb in by_degree.get(m, ()):
            total_k = ka + kb + m
            if total_k > cap:
                continue
            weight = bundle.contractions(alpha, beta).get((m, zero))
            if not weight:
                continue
            coefficient = product(ca, cb)
            if coefficient:
                _add(result, total_k, coefficient * weight)
    return result


def delta_op(a: WeylElement) -> WeylElement:
    """delta a = sum_A theta^A ^ d a / d y^A."""
    terms: Dict[Key, Any] = {}
    for (k, alpha, forms), value in a._terms.items():
        for index, power in enumerate(alpha):
            if not power:
                continue
            new_forms, sign = exterior_sign((index,) + forms)
            if new_forms is None:
                continue
            lowered = alpha[:index] + (power - 1,) + alpha[index + 1:]
            _add(terms, (k, lowered, new_forms), value * Scalar.coerce(power * sign))
    return a._new(terms)


def delta_inv(a: WeylElement) -> WeylElement:
    """delta^-1 a = (1/(p+q)) sum_A y^A (X_A interior a) on terms of y-degree p and form degree q."""
    terms: Dict[Key, Any] = {}
    caps = a.bundle.caps
    for (k, alpha, forms), value in a._terms.items():
        p, q = sum(alpha), len(forms)
        if p + q == 0 or q == 0:
            continue
        if 2 * k + p + 1 > caps.degree:
            continue
        weight = Scalar.coerce(1) / (p + q)
        for position, index in enumerate(forms):
            sign = -1 if position % 2 else 1
            raised = alpha[:index] + (alpha[index] + 1,) + alpha[index + 1:]
            rest = forms[:position] + forms[position + 1:]
            _add(terms, (k, raised, rest), value * (weight * sign))
    return a._new(terms)


def covariant_derivative(a: WeylElement, index: int) -> WeylElement:
    """
    nabla_{X_index} a: frame derivative of coefficients, with fiber variables
    and covectors transported as covectors.
    """
    bundle = a.bundle
    lowering = bundle._lowering[index]
    terms: Dict[Key, Any] = {}
    for (k, alpha, forms), value in a._terms.items():
        derivative = bundle.coefficient_derivative(index, value)
        if derivative:
            _add(terms, (k, alpha, forms), derivative)
        for b, power in enumerate(alpha):
            if not power:
                continue
            for c, gamma in lowering.get(b, ()):
                moved = list(alpha)
                moved[b] -= 1
                moved[c] += 1
                _add(terms, (k, tuple(moved), forms), value * (-gamma * power))
        for position, b in enumerate(forms):
            for c, gamma in lowering.get(b, ()):
                replaced, sign = exterior_sign(forms[:position] + (c,) + forms[position + 1:])
                if replaced is not None:
                    _add(terms, (k, alpha, replaced), value * (-gamma * sign))
    return a._new(terms)


def covariant_d(a: WeylElement) -> WeylElement:
    """d_nabla a = sum_A theta^A ^ nabla_A a (the connection is torsion-free)."""
    terms: Dict[Key, Any] = {}
    for index in range(a.bundle.size):
        for (k, alpha, forms), value in covariant_derivative(a, index)._terms.items():
            new_forms, sign = exterior_sign((index,) + forms)
            if new_forms is not None:
                _add(terms, (k, alpha, new_forms), value if sign == 1 else -value)
    return a._new(terms)


def curvature_element(bundle: WeylBundle, tensor: CurvatureTensor) -> WeylElement:
    """R = 1/4 sum R_{CD,AB} y^C y^D theta^A ^ theta^B."""
    quarter = Scalar.coerce(1) / 4
    terms: Dict[Key, Any] = {}
    for (c, d, a, b), value in tensor.lowered.items():
        forms, sign = exterior_sign((a, b))
        if forms is None:
            continue
        alpha = [0] * bundle.size
        alpha[c] += 1
        alpha[d] += 1
        _add(terms, (0, tuple(alpha), forms), value * (quarter * sign))
    return WeylElement(bundle)._new(terms)


@dataclass
class FedosovData:
    """
    Input and solved state of the Fedosov construction.

    Attributes:
        geometry: Frame geometry with nondegenerate omega
        connection: Symplectic torsion-free connection preserving the Cartan fields
        curvature: Its curvature tensor
        caps: Truncation caps
        weyl_curvature: omega_1, omega_2, ... with Omega = omega + sum hbar^i omega_i
        gamma: The solved Abelian connection term, once solve_gamma has run
    """

    geometry: FrameGeometry
    connection: FrameConnection
    curvature: CurvatureTensor
    caps: WeylCaps
    weyl_curvature: List[FrameForm] = field(default_factory=list)
    gamma: Optional[WeylElement] = None
    bundle: WeylBundle = field(init=False, repr=False)

    def __post_init__(self):
        self.bundle = WeylBundle(self.geometry, self.connection, self.caps)

    @property
    def frame(self):
        return self.geometry.frame

    def omega_element(self) -> WeylElement:
        return WeylElement.from_form(self.bundle, self.geometry.symplectic_form())

    def curvature_element(self) -> WeylElement:
        return curvature_element(self.bundle, self.curvature)

    def weyl_curvature_element(self) -> WeylElement:
        """sum_{i >= 1} hbar^i omega_i."""
        total = WeylElement.zero(self.bundle)
        for i, form in enumerate(self.weyl_curvature, start=1):
            total = total + WeylElement.from_form(self.bundle, form, hbar=i)
        return total

    def with_caps(self, caps: WeylCaps) -> "FedosovData":
        return FedosovData(self.geometry, self.connection, self.curvature, caps, list(self.weyl_curvature))


def fedosov_data(
    R: DynamicalR,
    base_point: Sequence[ScalarLike],
    caps: WeylCaps,
    weyl_curvature: Iterable[FrameForm] = (),
) -> FedosovData:
    """Build geometry, symplectic connection and curvature for one r-matrix."""
    data = symplectic_data(R, base_point)
    return FedosovData(data.geometry, data.connection, data.curvature, caps, list(weyl_curvature))


def validate_weyl_curvature(data: FedosovData) -> None:
    """
    Raises:
        WeylCurvatureError: If some omega_i is not a closed 2-form annihilated by the Cartan fields
    """
    geometry = data.geometry
    for i, form in enumerate(data.weyl_curvature, start=1):
        if form.degree != 2:
            raise WeylCurvatureError(f"omega_{i} has degree {form.degree}, expected 2")
        if form.d():
            raise WeylCurvatureError(f"omega_{i} is not closed: d omega_{i} = {form.d().to_dict()}")
        for index in range(geometry.num_vars, 2 * geometry.num_vars):
            if form.interior(index):
                raise WeylCurvatureError(
                    f"omega_{i} is not annihilated by {geometry.labels[index]}"
                )


def _gamma_step(gamma0: WeylElement, gamma: WeylElement) -> WeylElement:
    square = commutator_over_hbar(gamma, gamma).scale(HALF)
    return gamma0 + delta_inv(covariant_d(gamma) + square)


def solve_gamma(data: FedosovData) -> WeylElement:
    """
    Solve delta gamma = R + d_nabla gamma + (1/hbar) gamma^2 + sum hbar^i omega_i
    with delta^-1 gamma = 0 by iteration from gamma_0 = delta^-1(R + sum hbar^i omega_i).

    Raises:
        WeylCurvatureError: If the Weyl curvature input is invalid
        ConvergenceError: If one more iteration changes gamma within the caps
        ConsistencyError: If a post-condition of the construction fails
    """
    validate_weyl_curvature(data)
    gamma0 = delta_inv(data.curvature_element() + data.weyl_curvature_element())
    gamma = gamma0
    steps = 0
    for steps in range(1, data.caps.degree + 1):
        following = _gamma_step(gamma0, gamma)
        logger.debug(f"gamma iteration {steps}: {len(following)} terms")
        if following == gamma:
            break
        gamma = following
    if _gamma_step(gamma0, gamma) != gamma:
        raise ConvergenceError(f"gamma did not stabilise after {steps} iterations")
    data.gamma = gamma

    problems = []
    if delta_inv(gamma):
        problems.append("delta^-1 gamma != 0")
    if gamma and gamma.min_degree() < 3:
        problems.append(f"gamma has a term of degree {gamma.min_degree()} < 3")
    if weyl_curvature_residual(data):
        problems.append("curvature equation fails below the top degree")
    if gamma.has_cartan_dependence():
        problems.append("gamma involves Cartan fiber variables or covectors")
    for index in range(data.geometry.num_vars, 2 * data.geometry.num_vars):
        if covariant_derivative(gamma, index):
            problems.append(f"nabla along {data.geometry.labels[index]} does not kill gamma")
    if problems:
        data.gamma = None
        raise ConsistencyError("solve_gamma", "; ".join(problems))
    logger.info(f"gamma solved with {len(gamma)} terms at caps {data.caps.to_dict()}")
    return gamma


def weyl_curvature_residual(data: FedosovData) -> WeylElement:
    """
    omega - R + delta gamma - d_nabla gamma - (1/hbar) gamma^2 - Omega, below the top degree.

    Raises:
        MissingConnectionError: If gamma has not been solved
    """
    gamma = _require_gamma(data)
    square = commutator_over_hbar(gamma, gamma).scale(HALF)
    residual = (
        delta_op(gamma)
        - data.curvature_element()
        - covariant_d(gamma)
        - square
        - data.weyl_curvature_element()
    )
    return residual.truncate(data.caps.degree - 1)


def _require_gamma(data: FedosovData) -> WeylElement:
    if data.gamma is None:
        raise MissingConnectionError("solve_gamma must run before lifting or star products")
    return data.gamma


class AbelianConnection:
    """
    D = -delta + d_nabla + (1/hbar)[gamma, .].

    Results are exact up to total degree ``reliable_degree``; above it the
    truncation of the inputs is visible.
    """

    def __init__(self, data: FedosovData):
        self.data = data
        self.gamma = _require_gamma(data)
        self.reliable_degree = data.caps.degree - 1

    def __call__(self, a: WeylElement, degree: Optional[int] = None) -> WeylElement:
        """D a, optionally truncated at a total degree below the cap."""
        result = -delta_op(a) + covariant_d(a) + commutator_over_hbar(self.gamma, a, degree=degree)
        return result if degree is None else result.truncate(degree)


def abelian_connection(data: FedosovData) -> AbelianConnection:
    return AbelianConnection(data)


def parallel_lift(value, data: FedosovData, degree: Optional[int] = None) -> WeylElement:
    """
    The unique flat section with sigma = value, by a = a_0 + delta^-1(d_nabla a + (1/hbar)[gamma, a]).

    Args:
        value: Scalar, GJet or FrameOperator, or a dict hbar-order -> such value
        data: Solved Fedosov data
        degree: Truncation degree (defaults to the degree cap)

    Raises:
        MissingConnectionError: If gamma has not been solved
        ConvergenceError: If one more iteration changes the lift
    """
    gamma = _require_gamma(data)
    bundle = data.bundle
    top = data.caps.degree if degree is None else min(degree, data.caps.degree)
    if isinstance(value, dict):
        base = WeylElement.zero(bundle)
        for k, part in value.items():
            base = base + WeylElement.scalar(bundle, part, hbar=k)
    else:
        base = WeylElement.scalar(bundle, value)
    base = base.truncate(top)

    def step(current: WeylElement) -> WeylElement:
        inner = covariant_d(current) + commutator_over_hbar(gamma, current, degree=top)
        return (base + delta_inv(inner)).truncate(top)

    lift = base
    for _ in range(top):
        following = step(lift)
        if following == lift:
            break
        lift = following
    if step(lift) != lift:
        raise ConvergenceError(f"parallel lift did not stabilise below degree {top}")
    logger.debug(f"parallel lift with {len(lift)} terms at degree {top}")
    return lift


def star(a0, b0, data: FedosovData, order: int) -> Dict[int, Any]:
    """
    a0 * b0 = sigma(lift(a0) o lift(b0)) modulo hbar^(order + 1).

    Args:
        a0, b0: Scalars or GJets, or dicts hbar-order -> value
        data: Solved Fedosov data
        order: hbar order K

    Returns:
        Dict[int, Any]: hbar-order -> coefficient

    Raises:
        CapTooSmallError: If the caps cannot support the requested order
    """
    data.caps.require(order)
    degree = 2 * order
    left = parallel_lift(a0, data, degree)
    right = parallel_lift(b0, data, degree)
    return sigma_product(left, right, hbar_cap=order)


def universal_lift(data: FedosovData, pbw: PBWAlgebra, degree: int) -> WeylElement:
    """The parallel lift of the identity operator: lift(f) is this with coefficients applied to f."""
    return parallel_lift(FrameOperator.identity(pbw), data, degree)


def star_operator(data: FedosovData, order: int, pbw: Optional[PBWAlgebra] = None) -> UEATensor:
    """
    The star product as a bidifferential operator in the frame: a 2-leg tensor
    over the enveloping algebra of the tangent algebroid, coefficients in l.

    Raises:
        CapTooSmallError: If the caps cannot support the requested order
    """
    data.caps.require(order)
    pbw = pbw or PBWAlgebra(data.frame)
    lift = universal_lift(data, pbw, 2 * order)
    series = sigma_product(lift, lift, product=lambda left, right: left.tensor(right), hbar_cap=order)
    total = UEATensor.zero(pbw, 2, order)
    for k, part in series.items():
        total = total + part.with_cap(order).times_hbar(k)
    logger.info(f"star operator to order {order} with {len(list(total.keys()))} terms")
    return total
