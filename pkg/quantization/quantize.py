"""
Quantizations F(l) in U(g) (x) U(g)[[hbar]] and their checks.

The star product of a solved Fedosov connection is extracted as a
bidifferential operator in the frame of M; composing it with
Theta^-1 = exp(-hbar theta), theta = 1/2 sum_i (h_i (x) d_i - d_i (x) h_i),
leaves an operator without coordinate derivatives, which is F. Shifts
X(l + s hbar/2 h^(j)) are the Taylor series of UEATensor.shift.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .dynr import DynamicalR
from .enveloping import PBWAlgebra, UEATensor, apply_bidifferential, exponential
from .exceptions import (
    AlgebraMismatchError,
    CapTooSmallError,
    ConsistencyError,
    EquivalenceError,
    NonUnitalError,
    PairingError,
    WeightError,
)
from .fedosov import FedosovData, WeylElement, parallel_lift, sigma_product, star, star_operator
from .jets import GJet, JetSpace
from .symexpr import Scalar, ScalarMatrix

logger = logging.getLogger(__name__)

HALF = Scalar.coerce(1) / 2


def _require_algebroid(pbw: PBWAlgebra) -> None:
    if not pbw.derivations:
        raise AlgebraMismatchError("theta needs the enveloping algebra of the tangent algebroid")


def theta_generator(pbw: PBWAlgebra, cap: int) -> UEATensor:
    """theta = 1/2 sum_i (h_i (x) d/dl_i - d/dl_i (x) h_i) at hbar^0."""
    _require_algebroid(pbw)
    total = UEATensor.zero(pbw, 2, cap)
    for i, h in enumerate(pbw.cartan):
        d = pbw.derivations[i]
        total = total + UEATensor.generator(pbw, h, 2, 0, cap) * UEATensor.generator(pbw, d, 2, 1, cap)
        total = total - UEATensor.generator(pbw, d, 2, 0, cap) * UEATensor.generator(pbw, h, 2, 1, cap)
    return total.scale(HALF)


def theta(pbw: PBWAlgebra, cap: int, sign: int = 1) -> UEATensor:
    """Theta = exp(sign * hbar * theta) modulo hbar^(cap + 1)."""
    return exponential(theta_generator(pbw, cap), sign)


def theta_apply(f: GJet, g: GJet, order: int, pbw: PBWAlgebra) -> Dict[int, GJet]:
    """Theta(f, g) by hbar order; h_i acts as the Cartan fields, d_i on the l-dependence."""
    operator = theta(pbw, order)
    return {k: apply_bidifferential(operator, f, g, k) for k in range(order + 1)}


def theta_cocycle_residual(pbw: PBWAlgebra, cap: int) -> UEATensor:
    """[(Delta (x) id) Theta] Theta^12 - [(id (x) Delta) Theta] Theta^23."""
    operator = theta(pbw, cap)
    left = operator.coproduct(0) * operator.embed(3, (0, 1))
    right = operator.coproduct(1) * operator.embed(3, (1, 2))
    return left - right


# Extraction


def extract_F(data: FedosovData, order: int, operator: Optional[UEATensor] = None) -> UEATensor:
    """
    F = (star operator) Theta^-1, restricted to U(g) (x) U(g).

    Args:
        data: Solved Fedosov data
        order: hbar order K
        operator: A precomputed star_operator(data, order)

    Returns:
        UEATensor: F modulo hbar^(order + 1)

    Raises:
        CapTooSmallError: If the caps cannot support the order
        ConsistencyError: If a coordinate derivative survives the composition
    """
    operator = operator if operator is not None else star_operator(data, order)
    twist = (operator.with_cap(order) * theta(operator.pbw, order, sign=-1)).restrict(PBWAlgebra(data.geometry.algebra))
    if not twist.leading().is_one():
        raise ConsistencyError("extract_F", f"F_0 = {twist.leading().to_dict()} is not 1 (x) 1")
    logger.info(f"extracted F to order {order} with {len(list(twist.keys()))} terms")
    return twist


def pairing_matrix(space: JetSpace, pbw: PBWAlgebra, degree: int) -> ScalarMatrix:
    """P[u, alpha] = (u x^alpha)(identity) over PBW monomials u and jet monomials of degree <= degree."""
    monomials = space.monomials(degree)
    rows = []
    for u in monomials:
        row = []
        for alpha in monomials:
            jet = space.monomial(alpha)
            for index in reversed(range(pbw.dim)):
                for _ in range(u[index]):
                    jet = jet.field(index)
            row.append(jet.value_at_identity())
        rows.append(row)
    return ScalarMatrix.from_rows(rows)


def extract_F_by_pairing(data: FedosovData, order: int, jet_degree: Optional[int] = None) -> UEATensor:
    """
    F from the star product of monomial jets, by solving the pairing
    between U(g) (x) U(g) and jets at the identity.

    Raises:
        CapTooSmallError: If the jet degree is below 2 * order
        PairingError: If the pairing matrix is singular
    """
    data.caps.require(order)
    degree = 2 * order
    jet_degree = degree if jet_degree is None else jet_degree
    if jet_degree < degree:
        raise CapTooSmallError(f"jet degree {jet_degree} below {degree}", (order, degree))
    g = data.geometry.algebra
    space = JetSpace(g, jet_degree)
    pbw = PBWAlgebra(g)
    monomials = space.monomials(degree)
    pairing = pairing_matrix(space, pbw, degree)
    inverse = pairing.inverse()
    if inverse is None:
        raise PairingError(f"pairing matrix of size {len(monomials)} is singular at jet degree {jet_degree}")

    lifts: List[WeylElement] = []
    for alpha in monomials:
        lift = parallel_lift(space.monomial(alpha), data, degree)
        lifts.append(lift.map_coefficients(lambda jet: jet.value_at_identity()))
    size = len(monomials)
    values = [[[Scalar.coerce(0)] * size for _ in range(size)] for _ in range(order + 1)]
    for i, left in enumerate(lifts):
        for j, right in enumerate(lifts):
            for k, value in sigma_product(left, right, hbar_cap=order).items():
                values[k][i][j] = value

    terms: Dict[tuple, Scalar] = {}
    inverse_t = inverse.transpose()
    for k in range(order + 1):
        solved = inverse_t @ ScalarMatrix.from_rows(values[k]) @ inverse
        for i, u in enumerate(monomials):
            for j, v in enumerate(monomials):
                if solved[i, j]:
                    terms[(k, u, v)] = solved[i, j]
    logger.info(f"pairing extraction of size {size} to order {order}")
    return UEATensor(pbw, 2, order, terms)


# Checks on F


@dataclass
class QuantizationResiduals:
    """
    Residuals of the quantization axioms, all zero for a quantization of r.

    Attributes:
        weight: [h_i (x) 1 + 1 (x) h_i, F] for each Cartan generator
        normal_left: (epsilon (x) id) F - 1
        normal_right: (id (x) epsilon) F - 1
        quantization: F_1 - F_1^21 - r
        cocycle: The shifted cocycle residual
    """

    weight: List[UEATensor]
    normal_left: UEATensor
    normal_right: UEATensor
    quantization: UEATensor
    cocycle: UEATensor
    order: int = 0
    checks: Dict[str, bool] = field(init=False)

    def __post_init__(self):
        self.checks = {
            "weight": not any(self.weight),
            "normal": not self.normal_left and not self.normal_right,
            "quantization": not self.quantization,
            "shifted_cocycle": not self.cocycle,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "passed": self.passed,
            "checks": dict(self.checks),
            "weight": [w.to_dict() for w in self.weight],
            "normal_left": self.normal_left.to_dict(),
            "normal_right": self.normal_right.to_dict(),
            "quantization": self.quantization.to_dict(),
            "shifted_cocycle": self.cocycle.to_dict(),
        }


def _cartan_sum(pbw: PBWAlgebra, index: int, legs: int, cap: int) -> UEATensor:
    total = UEATensor.zero(pbw, legs, cap)
    for leg in range(legs):
        total = total + UEATensor.generator(pbw, index, legs, leg, cap)
    return total


def weight_residuals(X: UEATensor) -> List[UEATensor]:
    """[sum_legs h_i, X] for every Cartan generator."""
    return [_cartan_sum(X.pbw, h, X.legs, X.cap).commutator(X) for h in X.pbw.cartan]


def shifted_cocycle_residual(F: UEATensor) -> UEATensor:
    """(Delta (x) id)F F^12(l - hbar/2 h^(3)) - (id (x) Delta)F F^23(l + hbar/2 h^(1))."""
    left = F.coproduct(0) * F.embed(3, (0, 1)).shift(2, -1)
    right = F.coproduct(1) * F.embed(3, (1, 2)).shift(0, 1)
    return left - right


def quantization_check(F: UEATensor, R: DynamicalR, order: Optional[int] = None) -> QuantizationResiduals:
    """
    Residuals of the four quantization axioms modulo hbar^(order + 1).

    Args:
        F: Two-leg element of U(g) (x) U(g)[[hbar]]
        R: The classical r-matrix
        order: Truncation order (defaults to the cap of F)
    """
    if order is not None:
        F = F.with_cap(min(order, F.cap))
    pbw = F.pbw
    one = UEATensor.one(pbw, 1, F.cap)
    first = F.order(1) if F.cap >= 1 else UEATensor.zero(pbw, 2, 0)
    r_tensor = UEATensor.from_bivector(pbw, R.r, cap=first.cap)
    residuals = QuantizationResiduals(
        weight=weight_residuals(F),
        normal_left=F.counit(0) - one,
        normal_right=F.counit(1) - one,
        quantization=first - first.flip() - r_tensor,
        cocycle=shifted_cocycle_residual(F),
        order=F.cap,
    )
    logger.info(f"quantization check at order {F.cap}: {residuals.checks}")
    return residuals


def r_matrix_from_twist(F: UEATensor) -> UEATensor:
    """
    R = (F^21)^-1 F^12.

    Raises:
        NonUnitalError: If F is not 1 (x) 1 at hbar^0
    """
    return F.flip().inverse() * F


def qdybe_residual(F: UEATensor, order: Optional[int] = None) -> UEATensor:
    """
    R^12(l + hbar/2 h^(3)) R^13(l - hbar/2 h^(2)) R^23(l + hbar/2 h^(1))
    - R^23(l - hbar/2 h^(1)) R^13(l + hbar/2 h^(2)) R^12(l - hbar/2 h^(3))
    with R = (F^21)^-1 F^12.
    """
    if order is not None:
        F = F.with_cap(min(order, F.cap))
    R = r_matrix_from_twist(F)

    def placed(positions, shifted_leg, sign):
        return R.embed(3, positions).shift(shifted_leg, sign)

    lhs = placed((0, 1), 2, 1) * placed((0, 2), 1, -1) * placed((1, 2), 0, 1)
    rhs = placed((1, 2), 0, -1) * placed((0, 2), 1, 1) * placed((0, 1), 2, -1)
    return lhs - rhs


# Equivalence


def validate_equivalence_element(T: UEATensor) -> None:
    """
    Raises:
        EquivalenceError: Unless T is a single-leg zero-weight element with T = 1 mod hbar and epsilon(T) = 1
    """
    if T.legs != 1:
        raise EquivalenceError(f"T must have one leg, got {T.legs}")
    if not T.leading().is_one():
        raise EquivalenceError(f"T is not 1 modulo hbar: {T.leading().to_dict()}")
    if T.counit(0) != UEATensor.one(T.pbw, 1, T.cap):
        raise EquivalenceError(f"epsilon(T) = {T.counit(0).to_dict()} is not 1")
    if any(weight_residuals(T)):
        raise EquivalenceError("T does not have zero weight")


def shifted_pair(T: UEATensor) -> UEATensor:
    """T_1(l - hbar/2 h^(2)) T_2(l + hbar/2 h^(1))."""
    return T.embed(2, (0,)).shift(1, -1) * T.embed(2, (1,)).shift(0, 1)


def equivalence_transform(
    F: UEATensor,
    T: UEATensor,
    order: Optional[int] = None,
    dynamical: Optional[DynamicalR] = None,
) -> UEATensor:
    """
    E = (Delta T)^-1 F T_1(l - hbar/2 h^(2)) T_2(l + hbar/2 h^(1)).

    When dynamical is given, E must pass quantization_check whenever F does.

    Raises:
        EquivalenceError: If T violates the conditions on an equivalence
        ConsistencyError: If E fails a check that F passes
    """
    cap = F.cap if order is None else min(order, F.cap)
    F = F.with_cap(cap)
    T = T.with_cap(cap)
    validate_equivalence_element(T)
    try:
        inverse = T.coproduct(0).inverse()
    except NonUnitalError as exc:
        raise EquivalenceError(str(exc)) from exc
    E = inverse * F * shifted_pair(T)
    if dynamical is not None and quantization_check(F, dynamical).passed:
        after = quantization_check(E, dynamical)
        if not after.passed:
            failed = [name for name, ok in after.checks.items() if not ok]
            raise ConsistencyError("equivalence_transform", f"E fails {', '.join(failed)}")
    return E


def ad_theta(X: UEATensor, leg: int) -> UEATensor:
    """
    [theta, X] for a two-leg X commuting with the Cartan generators in each
    leg whose l-dependence sits in one leg:
    1/2 sum_i ((h_i (x) 1) d_i^(2) X - (d_i^(1) X)(1 (x) h_i)).

    Raises:
        WeightError: If X does not commute with h_i in each leg
    """
    pbw = X.pbw
    for h in pbw.cartan:
        for position in range(2):
            generator = UEATensor.generator(pbw, h, 2, position, X.cap)
            if generator.commutator(X):
                raise WeightError(f"X does not commute with {pbw.labels[h]} in leg {position + 1}")
    total = UEATensor.zero(pbw, 2, X.cap)
    for i, h in enumerate(pbw.cartan):
        derivative = X.diff(i + 1)
        if leg == 1:
            total = total + UEATensor.generator(pbw, h, 2, 0, X.cap) * derivative
        else:
            total = total - derivative * UEATensor.generator(pbw, h, 2, 1, X.cap)
    return total.scale(HALF)


def theta_conjugate(X: UEATensor, leg: int) -> UEATensor:
    """Theta X Theta^-1 = sum_n hbar^n / n! ad_theta^n X up to the cap of X."""
    result = X
    current = X
    for n in range(1, X.cap + 1):
        current = ad_theta(current, leg).times_hbar(1).scale(Scalar.coerce(1) / n)
        if current.is_zero():
            break
        result = result + current
    return result


def conjugation_residuals(T: UEATensor) -> Dict[str, UEATensor]:
    """
    Identities for a zero-weight T: Theta(T (x) 1)Theta^-1 = T_1(l - hbar/2 h^(2)),
    Theta(1 (x) T)Theta^-1 = T_2(l + hbar/2 h^(1)) and
    Theta(T (x) T)Theta^-1 = T_1(l - hbar/2 h^(2)) T_2(l + hbar/2 h^(1)).
    """
    left = T.embed(2, (0,))
    right = T.embed(2, (1,))
    conjugated_left = theta_conjugate(left, 0)
    conjugated_right = theta_conjugate(right, 1)
    return {
        "left": conjugated_left - left.shift(1, -1),
        "right": conjugated_right - right.shift(0, 1),
        "product": conjugated_left * conjugated_right - shifted_pair(T),
    }


# Checks on the star product


def series_difference(a: Dict[int, Any], b: Dict[int, Any]) -> Dict[int, Any]:
    """a - b by hbar order, dropping zero orders."""
    result = {}
    for k in set(a) | set(b):
        if k in a and k in b:
            value = a[k] - b[k]
        elif k in a:
            value = a[k]
        else:
            value = -b[k]
        if value:
            result[k] = value
    return result


def associativity_defect(f: GJet, g: GJet, h: GJet, data: FedosovData, order: int, degree: int) -> Dict[int, GJet]:
    """(f * g) * h - f * (g * h), with jets compared below the given degree."""
    fg = star(f, g, data, order)
    gh = star(g, h, data, order)
    left = star(fg, h, data, order)
    right = star(f, gh, data, order)
    defect = series_difference(left, right)
    return {k: v.truncate(degree) for k, v in defect.items() if v.truncate(degree)}


def compatibility_residuals(
    f_lambda: GJet, g: GJet, data: FedosovData, order: int, degree: int
) -> Dict[str, Dict[int, GJet]]:
    """
    Mixed-argument laws of a compatible star product, for f_lambda a function of l:
    f * g = Theta(f, g), g * f = Theta(g, f) and f * f' = f f' for l-functions.
    """
    pbw = PBWAlgebra(data.frame)
    residuals = {
        "left": series_difference(star(f_lambda, g, data, order), theta_apply(f_lambda, g, order, pbw)),
        "right": series_difference(star(g, f_lambda, data, order), theta_apply(g, f_lambda, order, pbw)),
        "pointwise": series_difference(star(f_lambda, f_lambda, data, order), {0: f_lambda * f_lambda}),
    }
    return {
        name: {k: v.truncate(degree) for k, v in series.items() if v.truncate(degree)}
        for name, series in residuals.items()
    }


def operator_star(operator: UEATensor, f: GJet, g: GJet, order: int) -> Dict[int, GJet]:
    """Apply an extracted star operator to two jets."""
    return {k: apply_bidifferential(operator, f, g, k) for k in range(order + 1)}
