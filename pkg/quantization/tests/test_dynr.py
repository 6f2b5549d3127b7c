from itertools import combinations

import pytest

from quantization.dynr import (
    DynamicalR,
    GaugeElement,
    adjoint_group_action,
    cdybe_residual,
    delta_r,
    gauge_transform,
    is_r_matrix,
    lambda_self_bracket,
    leafwise_obstruction,
    rank_flags,
    restrict_to_g1,
    validate_gauge,
    zero_weight_residual,
)
from quantization.exceptions import (
    GaugeError,
    NotAnRMatrixError,
    NotSplittableError,
    SingularPointError,
    WeightError,
)
from quantization.liealg import LieAlgebra, MultiVector
from quantization.symexpr import ONE, Scalar, parse_scalar


def solvable_r(f, a=1):
    g = LieAlgebra.from_entries(["h", "e"], 1, [(0, 1, 0, a)] if a else [], "solvable")
    return DynamicalR(g, MultiVector.basis(g, 0, 1, coefficient=parse_scalar(f, 1)))


def random_coefficient(rng):
    return parse_scalar(f"{rng.randint(-3, 3)} + {rng.randint(-2, 2)}*l1", 1) / parse_scalar(
        f"{rng.randint(1, 3)} + l1^2", 1
    )


def random_cochain(rng, algebra, degree):
    coefficients = {
        key: random_coefficient(rng)
        for key in combinations(range(algebra.dim), degree)
        if rng.random() < 0.7
    }
    return MultiVector(algebra, degree, coefficients)


class TestCdybeResidual:
    """Tests for the classical dynamical Yang-Baxter residual."""

    @pytest.mark.parametrize("f", ["1/l1", "l1^2", "1/(1+l1)"])
    def test_solvable_family(self, f):
        assert cdybe_residual(solvable_r(f)).is_zero()

    def test_heisenberg_solution(self, heisenberg_r):
        assert cdybe_residual(heisenberg_r("1/l1")).is_zero()

    def test_heisenberg_negative_control(self, heisenberg, heisenberg_r):
        residual = cdybe_residual(heisenberg_r("l1"))
        assert residual == MultiVector.basis(heisenberg, 0, 1, 2, coefficient=parse_scalar("1+l1^2", 1))

    def test_model_files(self, heisenberg_model, abelian_model, solvable_model, nonsolution_model):
        assert is_r_matrix(heisenberg_model.dynamical)
        assert is_r_matrix(abelian_model.dynamical)
        assert is_r_matrix(solvable_model.dynamical)
        assert not is_r_matrix(nonsolution_model.dynamical)


class TestZeroWeightResidual:
    """Tests for [h_i, r] = 0."""

    def test_heisenberg(self, heisenberg_r):
        assert not any(zero_weight_residual(heisenberg_r("1/l1")))

    def test_solvable(self):
        assert not any(zero_weight_residual(solvable_r("1/l1", a=3)))

    def test_so2_action_is_a_nontrivial_zero(self):
        g = LieAlgebra.from_entries(["h", "e1", "e2"], 1, [(0, 1, 2, 1), (0, 2, 1, -1)])
        R = DynamicalR(g, MultiVector.basis(g, 1, 2))
        assert not any(zero_weight_residual(R))

    def test_weight_violation(self):
        g = LieAlgebra.from_entries(["h", "e1", "e2"], 1, [(0, 1, 1, 1), (0, 2, 2, 1)])
        R = DynamicalR(g, MultiVector.basis(g, 1, 2))
        assert zero_weight_residual(R)[0] == MultiVector.basis(g, 1, 2, coefficient=2)


class TestLambdaSelfBracket:
    """Tests for the bracket [Lambda, Lambda] on the tangent algebroid."""

    def test_heisenberg_solution(self, heisenberg_r):
        assert lambda_self_bracket(heisenberg_r("1/l1")).is_zero()

    def test_solvable(self):
        assert lambda_self_bracket(solvable_r("1/l1")).is_zero()

    def test_heisenberg_negative_control(self, heisenberg_r):
        R = heisenberg_r("l1")
        algebroid = R.algebroid()
        expected = MultiVector.basis(algebroid, 1, 2, 3, coefficient=parse_scalar("2+2*l1^2", 1))
        assert lambda_self_bracket(R) == expected

    def test_agrees_with_simple_residuals_on_perturbations(self, rng, heisenberg):
        base = MultiVector.basis(heisenberg, 1, 2, coefficient=parse_scalar("1/l1", 1))
        for _ in range(10):
            perturbation = random_cochain(rng, heisenberg, 2)
            R = DynamicalR(heisenberg, base + perturbation)
            assert lambda_self_bracket(R).is_zero() == is_r_matrix(R)

    def test_weight_violation_shows_up(self):
        g = LieAlgebra.from_entries(["h", "e1", "e2"], 1, [(0, 1, 1, 1), (0, 2, 2, 1)])
        R = DynamicalR(g, MultiVector.basis(g, 1, 2))
        assert not lambda_self_bracket(R).is_zero()


class TestRankFlags:
    """Tests for rank, nondegeneracy and splittability."""

    def test_solvable_rank_zero(self):
        flags = rank_flags(solvable_r("1/l1", a=2))
        assert (flags.rank, flags.nondegenerate, flags.splittable) == (0, False, False)

    def test_solvable_with_abelian_algebra_is_not_splittable(self):
        # the b-row f e is not in the span of the zero c-block even for a = 0
        flags = rank_flags(solvable_r("1/l1", a=0))
        assert not flags.splittable

    def test_heisenberg(self, heisenberg_r):
        flags = rank_flags(heisenberg_r("1/l1"))
        assert (flags.rank, flags.nondegenerate, flags.splittable) == (2, True, True)

    def test_zero_is_splittable(self, heisenberg):
        flags = rank_flags(DynamicalR.zero(heisenberg))
        assert flags.rank == 0
        assert flags.splittable
        assert not flags.nondegenerate

    def test_central_extension_is_degenerate_and_splittable(self, central_model):
        flags = rank_flags(central_model.dynamical)
        assert (flags.rank, flags.nondegenerate, flags.splittable) == (2, False, True)

    def test_requires_r_matrix(self, heisenberg_r):
        with pytest.raises(NotAnRMatrixError):
            rank_flags(heisenberg_r("l1"))

    def test_to_dict(self, heisenberg_r):
        data = rank_flags(heisenberg_r("1/l1")).to_dict()
        assert data["rank"] == 2
        assert len(data["c"]) == 2
        assert data["c"][0][0] == "0"
        assert data["b"] == [["0", "0"]]


class TestRestrictToG1:
    """Tests for restriction to the subalgebra where r is nondegenerate."""

    def test_nondegenerate_is_identity(self, heisenberg_r):
        restricted = restrict_to_g1(heisenberg_r("1/l1"), [2])
        assert restricted.algebra.dim == 3
        assert restricted.r.coefficient(1, 2) == parse_scalar("1/l1", 1)

    def test_zero_restricts_to_cartan(self, heisenberg):
        restricted = restrict_to_g1(DynamicalR.zero(heisenberg), [1])
        assert restricted.algebra.dim == 1
        assert restricted.r.is_zero()
        assert rank_flags(restricted).nondegenerate

    def test_central_extension(self, central_model, heisenberg):
        restricted = restrict_to_g1(central_model.dynamical, [1])
        assert restricted.algebra.labels == ("h", "e1", "e2")
        assert restricted.algebra.canonical_entries() == heisenberg.canonical_entries()
        assert restricted.r.coefficient(1, 2) == parse_scalar("1/l1", 1)
        assert rank_flags(restricted).nondegenerate

    def test_not_splittable(self):
        with pytest.raises(NotSplittableError):
            restrict_to_g1(solvable_r("1/l1"), [1])

    def test_pole_is_singular(self, central_model):
        with pytest.raises(SingularPointError):
            restrict_to_g1(central_model.dynamical, [0])

    def test_wrong_number_of_coordinates(self, central_model):
        with pytest.raises(SingularPointError):
            restrict_to_g1(central_model.dynamical, [1, 2])


class TestGaugeTransform:
    """Tests for gauge transformations r -> r_g."""

    def test_zero_with_constant_gauge(self, heisenberg):
        gauge = GaugeElement({1: Scalar.coerce(3)})
        assert gauge_transform(DynamicalR.zero(heisenberg), gauge).r.is_zero()

    def test_heisenberg_example(self, heisenberg, heisenberg_r):
        gauge = GaugeElement({1: parse_scalar("l1", 1)}, nilpotency=2)
        transformed = gauge_transform(heisenberg_r("1/l1"), gauge)
        expected = MultiVector.basis(heisenberg, 1, 2, coefficient=parse_scalar("1/l1", 1)) + MultiVector.basis(
            heisenberg, 1, 0, coefficient=2
        )
        assert transformed.r == expected
        assert cdybe_residual(transformed).is_zero()
        assert rank_flags(transformed).rank == rank_flags(heisenberg_r("1/l1")).rank == 2

    def test_model_file_gauge(self, gauge_model):
        transformed = gauge_transform(gauge_model.dynamical, gauge_model.gauge)
        assert is_r_matrix(transformed)

    def test_gauge_must_centralize_cartan(self):
        g = LieAlgebra.from_entries(["h", "e"], 1, [(0, 1, 1, 1)])
        with pytest.raises(GaugeError):
            validate_gauge(g, GaugeElement({1: ONE}))

    def test_gauge_must_be_nilpotent(self):
        g = LieAlgebra.from_entries(
            ["h", "x", "y", "z"], 1, [(1, 2, 3, 1), (2, 3, 1, 1), (3, 1, 2, 1)]
        )
        with pytest.raises(GaugeError):
            validate_gauge(g, GaugeElement({1: ONE}), limit=6)

    def test_declared_nilpotency_too_small(self, heisenberg):
        with pytest.raises(GaugeError):
            validate_gauge(heisenberg, GaugeElement({1: ONE}, nilpotency=1))

    def test_nilpotency_search(self, heisenberg):
        assert validate_gauge(heisenberg, GaugeElement({1: ONE})) == 2


class TestDeltaR:
    """Tests for the complex delta_r."""

    def test_heisenberg_vector(self, heisenberg, heisenberg_r):
        result = delta_r(heisenberg_r("1/l1"), MultiVector.basis(heisenberg, 1))
        assert result == MultiVector.basis(heisenberg, 1, 0, coefficient=parse_scalar("-1/l1", 1))

    def test_constant_scalar(self, heisenberg, heisenberg_r):
        assert delta_r(heisenberg_r("1/l1"), MultiVector.constant(heisenberg, 5)).is_zero()

    def test_weight_is_checked(self):
        g = LieAlgebra.from_entries(["h", "e"], 1, [(0, 1, 1, 1)])
        R = DynamicalR.zero(g)
        with pytest.raises(WeightError):
            delta_r(R, MultiVector.basis(g, 1))
        assert delta_r(R, MultiVector.basis(g, 1), check_weight=False).is_zero()

    def test_squares_to_zero(self, rng, heisenberg, heisenberg_r):
        R = heisenberg_r("1/l1")
        for _ in range(10):
            for degree in (0, 1, 2):
                tau = random_cochain(rng, heisenberg, degree)
                assert delta_r(R, delta_r(R, tau)).is_zero()

    def test_gauge_equivariance(self, rng, heisenberg, heisenberg_r):
        R = heisenberg_r("1/l1")
        gauge = GaugeElement({1: parse_scalar("l1", 1)}, nilpotency=2)
        transformed = gauge_transform(R, gauge)
        for _ in range(5):
            for degree in (1, 2):
                tau = random_cochain(rng, heisenberg, degree)
                left = delta_r(transformed, adjoint_group_action(gauge, tau))
                right = adjoint_group_action(gauge, delta_r(R, tau))
                assert left == right


class TestLeafwiseObstruction:
    """The invariant leafwise connection condition for the two-dimensional family."""

    def test_solution_of_riccati_equation(self):
        assert leafwise_obstruction(solvable_r("-1/l1")).is_zero()

    def test_generic_function(self):
        assert leafwise_obstruction(solvable_r("l1^2")) == parse_scalar("l1^4 - 2*l1", 1)

    def test_abelian_case(self):
        assert leafwise_obstruction(solvable_r("l1", a=0)).is_zero()
