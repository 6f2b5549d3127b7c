import pytest

from quantization.dynr import TangentAlgebroid
from quantization.enveloping import PBWAlgebra, UEATensor, apply_bidifferential, exponential, parse_pbw
from quantization.exceptions import AlgebraMismatchError, EquivalenceError, NonUnitalError
from quantization.fedosov import star, star_operator
from quantization.jets import JetSpace, parse_jet
from quantization.liealg import LieAlgebra
from quantization.quantize import (
    associativity_defect,
    compatibility_residuals,
    conjugation_residuals,
    equivalence_transform,
    extract_F,
    extract_F_by_pairing,
    operator_star,
    qdybe_residual,
    quantization_check,
    r_matrix_from_twist,
    series_difference,
    shifted_cocycle_residual,
    theta,
    theta_apply,
    theta_cocycle_residual,
    weight_residuals,
)
from quantization.symexpr import parse_scalar


def operator_product(operator, a, b, order):
    """Series product of two jet series through a bidifferential operator."""
    result = {}
    for i, left in a.items():
        for j, right in b.items():
            for k in range(order + 1 - i - j):
                term = apply_bidifferential(operator, left, right, k)
                total = i + j + k
                result[total] = result[total] + term if total in result else term
    return result


def operator_associativity_defect(operator, f, g, h, order, degree):
    left = operator_product(operator, operator_product(operator, {0: f}, {0: g}, order), {0: h}, order)
    right = operator_product(operator, {0: f}, operator_product(operator, {0: g}, {0: h}, order), order)
    defect = series_difference(left, right)
    return {k: v.truncate(degree) for k, v in defect.items() if v.truncate(degree)}


@pytest.fixture(scope="module")
def heisenberg_twist(heisenberg_fedosov_k2):
    return extract_F(heisenberg_fedosov_k2, 2)


@pytest.fixture(scope="module")
def abelian_twist(abelian_fedosov_k2):
    return extract_F(abelian_fedosov_k2, 2)


@pytest.fixture(scope="module")
def algebroid_pbw(heisenberg):
    return PBWAlgebra(TangentAlgebroid(heisenberg))


class TestTheta:
    """Tests for Theta = exp(hbar theta) on the tangent algebroid."""

    def test_cocycle(self, algebroid_pbw):
        assert theta_cocycle_residual(algebroid_pbw, 3).is_zero()

    def test_inverse(self, algebroid_pbw):
        assert (theta(algebroid_pbw, 3) * theta(algebroid_pbw, 3, sign=-1)).is_one()

    def test_requires_algebroid(self, heisenberg):
        with pytest.raises(AlgebraMismatchError):
            theta(PBWAlgebra(heisenberg), 2)

    def test_apply(self, algebroid_pbw, heisenberg_jets):
        l1 = heisenberg_jets.constant(parse_scalar("l1", 1))
        x1 = parse_jet("x1", heisenberg_jets)
        result = theta_apply(l1, x1, 2, algebroid_pbw)
        assert result[0] == parse_jet("l1*x1", heisenberg_jets)
        assert result[1] == heisenberg_jets.constant(parse_scalar("-1/2", 1))
        assert result[2].is_zero()


class TestExtractF:
    """Tests for F extracted from the Fedosov star product."""

    def test_flat_twist_is_exponential(self, abelian_twist, abelian_model):
        pbw = abelian_twist.pbw
        r = UEATensor.from_bivector(pbw, abelian_model.dynamical.r, cap=2)
        assert abelian_twist == exponential(r, parse_scalar("1/2", 1))

    def test_leading_term(self, heisenberg_twist):
        assert heisenberg_twist.leading().is_one()

    def test_first_order(self, heisenberg_twist, heisenberg_model):
        first = heisenberg_twist.order(1)
        r = UEATensor.from_bivector(first.pbw, heisenberg_model.dynamical.r)
        assert first - first.flip() == r

    def test_precomputed_operator(self, heisenberg_fedosov_k1):
        operator = star_operator(heisenberg_fedosov_k1, 1)
        assert extract_F(heisenberg_fedosov_k1, 1, operator) == extract_F(heisenberg_fedosov_k1, 1)

    def test_pairing_extraction_agrees(self, heisenberg_fedosov_k1):
        assert extract_F_by_pairing(heisenberg_fedosov_k1, 1) == extract_F(heisenberg_fedosov_k1, 1)


class TestQuantizationCheck:
    """Tests for the four quantization axioms."""

    def test_heisenberg(self, heisenberg_twist, heisenberg_model):
        residuals = quantization_check(heisenberg_twist, heisenberg_model.dynamical)
        assert residuals.passed, residuals.to_dict()
        assert residuals.order == 2

    def test_abelian(self, abelian_twist, abelian_model):
        assert quantization_check(abelian_twist, abelian_model.dynamical).passed

    def test_lower_order(self, heisenberg_twist, heisenberg_model):
        residuals = quantization_check(heisenberg_twist, heisenberg_model.dynamical, order=1)
        assert residuals.passed
        assert residuals.order == 1

    def test_wrong_r_is_detected(self, heisenberg_twist, heisenberg_r):
        residuals = quantization_check(heisenberg_twist, heisenberg_r("2/l1"))
        assert not residuals.checks["quantization"]
        assert residuals.checks["shifted_cocycle"]
        assert not residuals.passed

    def test_broken_normalization_is_detected(self, heisenberg_twist, heisenberg_model):
        pbw = heisenberg_twist.pbw
        e1 = UEATensor.generator(pbw, 1, legs=2, leg=0, cap=2).times_hbar(1)
        residuals = quantization_check(heisenberg_twist + e1, heisenberg_model.dynamical)
        assert not residuals.checks["normal"]

    def test_unshifted_cocycle_fails(self, heisenberg_twist):
        left = heisenberg_twist.coproduct(0) * heisenberg_twist.embed(3, (0, 1))
        right = heisenberg_twist.coproduct(1) * heisenberg_twist.embed(3, (1, 2))
        assert not (left - right).is_zero()
        assert shifted_cocycle_residual(heisenberg_twist).is_zero()

    def test_weight(self, heisenberg_twist):
        assert not any(weight_residuals(heisenberg_twist))


class TestQDYBE:
    """Tests for the quantum dynamical Yang-Baxter equation."""

    def test_heisenberg(self, heisenberg_twist):
        assert qdybe_residual(heisenberg_twist).is_zero()

    def test_abelian(self, abelian_twist):
        assert qdybe_residual(abelian_twist).is_zero()

    def test_r_matrix_first_order(self, heisenberg_twist, heisenberg_model):
        R = r_matrix_from_twist(heisenberg_twist)
        assert R.leading().is_one()
        assert R.order(1) == UEATensor.from_bivector(R.pbw, heisenberg_model.dynamical.r)

    def test_requires_unital_twist(self, heisenberg_twist):
        with pytest.raises(NonUnitalError):
            r_matrix_from_twist(heisenberg_twist.scale(2))

    def test_reversed_shift_pattern_fails(self, heisenberg_twist):
        R = r_matrix_from_twist(heisenberg_twist)

        def placed(positions, shifted_leg, sign):
            return R.embed(3, positions).shift(shifted_leg, sign)

        lhs = placed((0, 1), 2, -1) * placed((0, 2), 1, 1) * placed((1, 2), 0, -1)
        rhs = placed((1, 2), 0, 1) * placed((0, 2), 1, -1) * placed((0, 1), 2, 1)
        residual = lhs - rhs
        assert residual.order(1).is_zero()
        assert not residual.order(2).is_zero()


class TestEquivalence:
    """Tests for equivalences F -> (Delta T)^-1 F T_1 T_2."""

    def element(self, twist, text):
        return parse_pbw(text, twist.pbw, twist.cap)

    def test_transform_preserves_quantization(self, heisenberg_twist, heisenberg_model):
        T = self.element(heisenberg_twist, "1 + hbar*l1*h^2 + hbar^2*e1")
        E = equivalence_transform(heisenberg_twist, T, dynamical=heisenberg_model.dynamical)
        assert quantization_check(E, heisenberg_model.dynamical).passed
        assert qdybe_residual(E).is_zero()

    def test_identity(self, heisenberg_twist):
        T = self.element(heisenberg_twist, "1")
        assert equivalence_transform(heisenberg_twist, T) == heisenberg_twist

    def test_conjugation_identities(self, heisenberg_twist):
        T = self.element(heisenberg_twist, "1 + hbar*l1^2*h + hbar^2*e2*e1")
        residuals = conjugation_residuals(T)
        assert all(value.is_zero() for value in residuals.values())

    @pytest.mark.parametrize("text", ["2 + hbar*h", "1 + hbar", "e1"])
    def test_invalid_elements(self, heisenberg_twist, text):
        with pytest.raises(EquivalenceError):
            equivalence_transform(heisenberg_twist, self.element(heisenberg_twist, text))

    def test_weight_of_T(self):
        g = LieAlgebra.from_entries(["h", "e"], 1, [(0, 1, 1, 1)])
        pbw = PBWAlgebra(g)
        F = UEATensor.one(pbw, 2, 1)
        with pytest.raises(EquivalenceError):
            equivalence_transform(F, parse_pbw("1 + hbar*e", pbw, 1))


class TestStarChecks:
    """Tests for checks on the star product of jets."""

    def test_associativity(self, heisenberg_fedosov_k1, heisenberg_jets):
        f = parse_jet("x2 + l1*x3", heisenberg_jets)
        g = parse_jet("x3^2", heisenberg_jets)
        h = parse_jet("x1 + x2*x3", heisenberg_jets)
        assert associativity_defect(f, g, h, heisenberg_fedosov_k1, 1, 2) == {}

    def test_compatibility(self, heisenberg_fedosov_k1, heisenberg_jets):
        f_lambda = heisenberg_jets.constant(parse_scalar("l1^2", 1))
        g = parse_jet("x1*x2 + x3", heisenberg_jets)
        residuals = compatibility_residuals(f_lambda, g, heisenberg_fedosov_k1, 1, 3)
        assert residuals == {"left": {}, "right": {}, "pointwise": {}}

    def test_associativity_at_second_order(self, heisenberg_fedosov_k2, heisenberg_jets):
        f = parse_jet("x2 + x1*x3", heisenberg_jets)
        g = parse_jet("x3^2", heisenberg_jets)
        h = parse_jet("x2*x3", heisenberg_jets)
        assert associativity_defect(f, g, h, heisenberg_fedosov_k2, 2, 2) == {}

    def test_cocycle_residual_tracks_associativity(self, heisenberg_twist, heisenberg_fedosov_k2, heisenberg_jets):
        data = heisenberg_fedosov_k2
        pbw = PBWAlgebra(data.frame)
        x2 = parse_jet("x2", heisenberg_jets)
        x3 = parse_jet("x3", heisenberg_jets)
        perturbation = UEATensor.monomial(heisenberg_twist.pbw, [(0, 1, 1), (0, 1, 0)], hbar=2, cap=2)

        operator = heisenberg_twist.extend(pbw) * theta(pbw, 2)
        assert shifted_cocycle_residual(heisenberg_twist).is_zero()
        assert operator_associativity_defect(operator, x2, x3, x2, 2, 2) == {}
        assert associativity_defect(x2, x3, x2, data, 2, 2) == {}

        perturbed = heisenberg_twist + perturbation
        operator = perturbed.extend(pbw) * theta(pbw, 2)
        residual = shifted_cocycle_residual(perturbed)
        defect = operator_associativity_defect(operator, x2, x3, x2, 2, 2)
        assert not residual.is_zero()
        assert set(defect) == {2}
        assert residual.order(1).is_zero()

    def test_compatibility_on_random_jets(self, heisenberg_fedosov_k1, heisenberg_jets, random_jet, random_lambda_function):
        for _ in range(5):
            f_lambda = heisenberg_jets.constant(random_lambda_function())
            g = random_jet(lambda_dependent=True)
            residuals = compatibility_residuals(f_lambda, g, heisenberg_fedosov_k1, 1, 3)
            assert residuals == {"left": {}, "right": {}, "pointwise": {}}

    def test_operator_star_matches_direct_star(self, heisenberg_fedosov_k1, heisenberg_jets):
        f = parse_jet("x2^2 + l1*x1", heisenberg_jets)
        g = parse_jet("x3 + x1*x3", heisenberg_jets)
        operator = star_operator(heisenberg_fedosov_k1, 1)
        difference = series_difference(operator_star(operator, f, g, 1), star(f, g, heisenberg_fedosov_k1, 1))
        assert all(value.truncate(3).is_zero() for value in difference.values())

    def test_series_difference(self):
        assert series_difference({0: 1, 1: 2}, {0: 1, 2: 3}) == {1: 2, 2: -3}


def test_twist_applied_to_jets_reproduces_star(heisenberg_fedosov_k1):
    g = heisenberg_fedosov_k1.geometry.algebra
    jets = JetSpace(g, 6)
    F = extract_F(heisenberg_fedosov_k1, 1)
    operator = star_operator(heisenberg_fedosov_k1, 1)
    restricted = operator.with_cap(1) * theta(operator.pbw, 1, sign=-1)
    assert restricted.restrict(PBWAlgebra(g)) == F
    x2 = parse_jet("x2", jets)
    assert operator_star(operator, x2, x2, 1)[0] == parse_jet("x2^2", jets)
