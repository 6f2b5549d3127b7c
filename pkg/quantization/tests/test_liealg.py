from itertools import combinations

import pytest

from quantization.exceptions import AlgebraMismatchError, DegreeError
from quantization.liealg import (
    LieAlgebra,
    MultiVector,
    adjoint_action,
    relative_cochain_basis,
    relative_cohomology_dim,
    relative_differential,
    schouten_bracket,
    validate_lie_algebra,
    wedge,
)
from quantization.symexpr import parse_scalar


@pytest.fixture
def solvable():
    """[h, e] = 2 h."""
    return LieAlgebra.from_entries(["h", "e"], 1, [(0, 1, 0, 2)], "solvable")


@pytest.fixture
def extended():
    """A four-dimensional algebra with [h, e1] = e1, [h, e2] = -e2, [e1, e2] = k."""
    return LieAlgebra.from_entries(
        ["h", "e1", "e2", "k"],
        1,
        [(0, 1, 1, 1), (0, 2, 2, -1), (1, 2, 3, 1)],
        "extended",
    )


def random_multivector(rng, algebra, degree):
    coefficients = {}
    for key in combinations(range(algebra.dim), degree):
        if rng.random() < 0.6:
            coefficients[key] = rng.randint(-3, 3)
    return MultiVector(algebra, degree, coefficients)


def sign(exponent):
    return -1 if exponent % 2 else 1


class TestValidateLieAlgebra:
    """Tests for the Lie algebra axioms check."""

    def test_heisenberg_is_valid(self, heisenberg):
        diagnostics = validate_lie_algebra(heisenberg)
        assert diagnostics.is_valid
        assert diagnostics.to_dict() == {"jacobi": [], "antisymmetry": [], "abelian": [], "non_constant": []}

    def test_abelian_is_valid(self, abelian):
        assert validate_lie_algebra(abelian).is_valid

    def test_non_abelian_cartan_part(self):
        g = LieAlgebra.from_entries(["h", "e"], 2, [(0, 1, 0, 3)])
        diagnostics = validate_lie_algebra(g)
        assert diagnostics.abelian == [(0, 1)]
        assert not diagnostics.is_valid

    def test_self_bracket_is_antisymmetry_violation(self):
        g = LieAlgebra.from_entries(["h", "e"], 1, [(0, 0, 1, 1)])
        assert (0, 0) in validate_lie_algebra(g).antisymmetry

    def test_inconsistent_pair_is_antisymmetry_violation(self):
        g = LieAlgebra.from_entries(["x", "y"], 0, [(0, 1, 0, 1), (1, 0, 0, 1)])
        assert validate_lie_algebra(g).antisymmetry == [(0, 1)]

    def test_jacobi_violation(self):
        g = LieAlgebra.from_entries(["x", "y", "z"], 0, [(0, 1, 2, 1), (0, 2, 0, 1)])
        assert validate_lie_algebra(g).jacobi == [(0, 1, 2)]

    def test_lambda_dependent_structure_constant(self):
        g = LieAlgebra.from_entries(["h", "e"], 1, [(0, 1, 1, parse_scalar("l1", 1))])
        assert validate_lie_algebra(g).non_constant == [(0, 1)]

    def test_so3_is_valid(self):
        g = LieAlgebra.from_entries(
            ["x", "y", "z"], 1, [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)]
        )
        assert validate_lie_algebra(g).is_valid


class TestMultiVector:
    """Tests for the sparse exterior algebra."""

    def test_keys_must_increase(self, heisenberg):
        with pytest.raises(DegreeError):
            MultiVector(heisenberg, 2, {(2, 1): 1})

    def test_basis_sorts_with_sign(self, heisenberg):
        assert MultiVector.basis(heisenberg, 2, 1) == MultiVector.basis(heisenberg, 1, 2, coefficient=-1)
        assert MultiVector.basis(heisenberg, 1, 1).is_zero()

    def test_zero_coefficients_are_absent(self, heisenberg):
        u = MultiVector(heisenberg, 1, {(0,): 1}) - MultiVector(heisenberg, 1, {(0,): 1})
        assert list(u.keys()) == []

    def test_format_and_dict(self, heisenberg):
        r = MultiVector.basis(heisenberg, 1, 2, coefficient=parse_scalar("1/l1", 1))
        assert r.to_dict() == {"e1^e2": "1/l1"}

    def test_algebra_mismatch(self, heisenberg, abelian):
        with pytest.raises(AlgebraMismatchError):
            MultiVector.basis(heisenberg, 0) + MultiVector.basis(abelian, 0)


class TestWedge:
    """Tests for the exterior product."""

    def test_square_of_vector(self, heisenberg):
        h = MultiVector.basis(heisenberg, 0)
        assert wedge(h, h).is_zero()

    def test_associative_monomial(self, heisenberg):
        h, e1, e2 = (MultiVector.basis(heisenberg, i) for i in range(3))
        assert wedge(wedge(h, e1), e2) == MultiVector.basis(heisenberg, 0, 1, 2)
        assert wedge(h, wedge(e1, e2)) == MultiVector.basis(heisenberg, 0, 1, 2)

    def test_scalar_bilinearity(self, solvable):
        f = parse_scalar("l1^2", 1)
        h, e = MultiVector.basis(solvable, 0), MultiVector.basis(solvable, 1)
        assert wedge(h.scale(f), e) == wedge(h, e).scale(f)

    def test_graded_commutativity(self, rng, extended):
        for p, q in ((1, 1), (1, 2), (2, 2)):
            u, v = random_multivector(rng, extended, p), random_multivector(rng, extended, q)
            assert wedge(u, v) == wedge(v, u).scale(sign(p * q))

    def test_odd_degree_square_vanishes(self, rng, extended):
        for degree in (1, 3):
            u = random_multivector(rng, extended, degree)
            assert wedge(u, u).is_zero()

    def test_degree_beyond_dimension(self, heisenberg):
        top = MultiVector.basis(heisenberg, 0, 1, 2)
        assert wedge(top, MultiVector.basis(heisenberg, 0)).is_zero()


class TestSchoutenBracket:
    """Tests for the Schouten bracket on the exterior algebra."""

    def test_degree_one_is_lie_bracket(self, solvable):
        h, e = MultiVector.basis(solvable, 0), MultiVector.basis(solvable, 1)
        assert schouten_bracket(h, e) == h.scale(2)

    def test_solvable_bivector_square(self, solvable):
        he = MultiVector.basis(solvable, 0, 1)
        assert schouten_bracket(he, he).is_zero()

    def test_heisenberg_bivector_square(self, heisenberg):
        r = MultiVector.basis(heisenberg, 1, 2)
        assert schouten_bracket(r, r) == MultiVector.basis(heisenberg, 0, 1, 2, coefficient=2)

    def test_coefficients_are_not_differentiated(self, heisenberg):
        f = parse_scalar("1/l1", 1)
        r = MultiVector.basis(heisenberg, 1, 2, coefficient=f)
        assert schouten_bracket(r, r) == MultiVector.basis(heisenberg, 0, 1, 2, coefficient=2 * f * f)

    def test_degree_one_action_is_derivation(self, rng, extended):
        for degree in (1, 2, 3):
            u = random_multivector(rng, extended, degree)
            for index in range(extended.dim):
                x = MultiVector.basis(extended, index)
                assert schouten_bracket(x, u) == adjoint_action({index: x.coefficient(index)}, u)

    def test_graded_antisymmetry(self, rng, extended):
        for p, q in ((1, 2), (2, 2), (2, 3), (1, 3)):
            a, b = random_multivector(rng, extended, p), random_multivector(rng, extended, q)
            assert schouten_bracket(a, b) == schouten_bracket(b, a).scale(-sign((p - 1) * (q - 1)))

    def test_graded_jacobi(self, rng, extended):
        for degrees in ((1, 1, 2), (1, 2, 2), (2, 2, 2), (1, 2, 3)):
            a, b, c = (random_multivector(rng, extended, d) for d in degrees)
            p, q, s = degrees
            total = (
                schouten_bracket(schouten_bracket(a, b), c).scale(sign((p - 1) * (s - 1)))
                + schouten_bracket(schouten_bracket(b, c), a).scale(sign((q - 1) * (p - 1)))
                + schouten_bracket(schouten_bracket(c, a), b).scale(sign((s - 1) * (q - 1)))
            )
            assert total.is_zero()

    def test_algebra_mismatch(self, heisenberg, abelian):
        with pytest.raises(AlgebraMismatchError):
            schouten_bracket(MultiVector.basis(heisenberg, 0), MultiVector.basis(abelian, 1))


class TestRelativeCohomology:
    """Tests for relative Chevalley-Eilenberg cohomology dimensions."""

    def test_heisenberg_degree_two(self, heisenberg):
        dims = relative_cohomology_dim(heisenberg, 2)
        assert (dims.cochains, dims.cohomology) == (1, 1)

    def test_abelian_degree_two(self, abelian):
        assert relative_cohomology_dim(abelian, 2).cohomology == 1

    def test_degree_zero_is_constants(self, heisenberg, abelian, extended):
        for g in (heisenberg, abelian, extended):
            assert relative_cohomology_dim(g, 0).cohomology == 1

    def test_invariance_cuts_cochains(self, extended):
        # h acts on m = span{e1, e2, k} with weights 1, -1, 0
        assert relative_cohomology_dim(extended, 1).cochains == 1
        assert relative_cohomology_dim(extended, 2).cochains == 1

    def test_degree_out_of_range(self, heisenberg):
        with pytest.raises(DegreeError):
            relative_cohomology_dim(heisenberg, 3)
        with pytest.raises(DegreeError):
            relative_cohomology_dim(heisenberg, -1)

    def test_differential_squares_to_zero(self, heisenberg, abelian, extended):
        for g in (heisenberg, abelian, extended):
            top = g.dim - g.cartan_dim
            for k in range(1, top):
                invariant = relative_cochain_basis(g, k - 1)
                square = relative_differential(g, k) @ relative_differential(g, k - 1) @ invariant
                assert square.is_zero()

    def test_to_dict(self, heisenberg):
        assert relative_cohomology_dim(heisenberg, 2).to_dict() == {"degree": 2, "cochains": 1, "cohomology": 1}
