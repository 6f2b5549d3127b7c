import pytest

from quantization.dynr import TangentAlgebroid
from quantization.enveloping import (
    FrameOperator,
    PBWAlgebra,
    UEATensor,
    apply_bidifferential,
    coproduct,
    counit,
    counit_scalar,
    exponential,
    parse_pbw,
    pbw_mul,
)
from quantization.exceptions import (
    AlgebraMismatchError,
    ConsistencyError,
    ExpressionError,
    NonUnitalError,
    ParseError,
)
from quantization.liealg import LieAlgebra, MultiVector
from quantization.symexpr import ONE, parse_scalar


@pytest.fixture(scope="module")
def pbw(heisenberg):
    return PBWAlgebra(heisenberg)


@pytest.fixture(scope="module")
def algebroid_pbw(heisenberg):
    return PBWAlgebra(TangentAlgebroid(heisenberg))


@pytest.fixture(scope="module")
def so3_pbw():
    g = LieAlgebra.from_entries(["h", "x", "y"], 1, [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)], "so3")
    return PBWAlgebra(g)


def element(pbw, text, cap=3):
    return parse_pbw(text, pbw, cap)


class TestPBWAlgebra:
    """Tests for normal ordering in U(g)."""

    def test_straightening(self, pbw):
        product = pbw.multiply_monomials(pbw.generator(2), pbw.generator(1))
        assert product == {(0, 1, 1): ONE, (1, 0, 0): -ONE}

    def test_ordered_product_is_concatenation(self, pbw):
        assert pbw.multiply_monomials(pbw.generator(1), pbw.generator(2)) == {(0, 1, 1): ONE}

    def test_commutator_is_bracket(self, pbw):
        e1 = UEATensor.generator(pbw, 1)
        e2 = UEATensor.generator(pbw, 2)
        assert e1.commutator(e2) == UEATensor.generator(pbw, 0)

    def test_associativity(self, so3_pbw, rng):
        for _ in range(5):
            a, b, c = (tuple(rng.randint(0, 2) for _ in range(3)) for _ in range(3))
            left = so3_pbw.multiply(so3_pbw.multiply({a: ONE}, {b: ONE}), {c: ONE})
            right = so3_pbw.multiply({a: ONE}, so3_pbw.multiply({b: ONE}, {c: ONE}))
            assert {k: v for k, v in left.items() if v} == {k: v for k, v in right.items() if v}

    def test_format_monomial(self, pbw):
        assert pbw.format_monomial((2, 0, 1)) == "h^2*e2"
        assert pbw.format_monomial(pbw.one) == "1"

    def test_algebroid_derivations_are_central(self, algebroid_pbw):
        assert algebroid_pbw.derivations == (0,)
        assert algebroid_pbw.cartan == (1,)
        product = algebroid_pbw.multiply_monomials(algebroid_pbw.generator(3), algebroid_pbw.generator(0))
        assert product == {(1, 0, 0, 1): ONE}


class TestUEATensor:
    """Tests for multi-leg elements with an hbar grading."""

    def test_parse(self, pbw):
        u = element(pbw, "1 + hbar*h^2", cap=2)
        assert u.coefficient(0, pbw.one) == ONE
        assert u.coefficient(1, (2, 0, 0)) == ONE
        assert element(pbw, "e2*e1") == element(pbw, "e1*e2 - h")

    def test_division_by_scalars(self, pbw):
        assert element(pbw, "e1/2 + l1*h/l1") == element(pbw, "(1/2)*e1 + h")
        with pytest.raises(ExpressionError):
            element(pbw, "h/e1")

    def test_parse_errors(self, pbw):
        with pytest.raises(ParseError):
            parse_pbw("1 + hbar", pbw, 0)
        with pytest.raises(ParseError):
            parse_pbw("1 + k", pbw, 2)

    def test_cap_truncates(self, pbw):
        u = element(pbw, "hbar^2*e1", cap=1)
        assert u.is_zero()

    def test_inverse(self, pbw):
        u = element(pbw, "1 + hbar*e1 + hbar^2*l1*h", cap=3)
        assert (u * u.inverse()).is_one()
        assert (u.inverse() * u).is_one()

    def test_inverse_requires_unit(self, pbw):
        with pytest.raises(NonUnitalError):
            element(pbw, "2 + hbar*e1").inverse()

    def test_coproduct_of_square(self, pbw):
        square = element(pbw, "e1^2").coproduct()
        e1 = pbw.generator(1)
        assert square.coefficient(0, pbw.generator(1, 2), pbw.one) == ONE
        assert square.coefficient(0, e1, e1) == 2
        assert square.coefficient(0, pbw.one, pbw.generator(1, 2)) == ONE

    def test_coproduct_is_multiplicative(self, pbw):
        u = element(pbw, "e2 + l1*h")
        v = element(pbw, "e1^2 + e1")
        assert (u * v).coproduct() == u.coproduct() * v.coproduct()

    def test_counit(self, pbw):
        u = element(pbw, "3 + hbar*e1 + hbar^2*l1")
        assert counit_scalar(u) == 3
        assert counit_scalar(u, 2) == parse_scalar("l1", 1)
        assert counit_scalar(u, 1) == 0

    def test_module_operations(self, pbw):
        e1 = UEATensor.generator(pbw, 1)
        e2 = UEATensor.generator(pbw, 2)
        h = UEATensor.generator(pbw, 0)
        assert pbw_mul(e2, e1) == e1 * e2 - h
        primitive = UEATensor.generator(pbw, 1, legs=2, leg=0) + UEATensor.generator(pbw, 1, legs=2, leg=1)
        assert coproduct(e1) == primitive
        assert counit(e1).is_zero()
        assert counit_scalar(UEATensor.one(pbw) + (e1 * e2).scale(3)) == 1

    def test_from_bivector(self, pbw, heisenberg):
        r = UEATensor.from_bivector(pbw, MultiVector.basis(heisenberg, 1, 2, coefficient=parse_scalar("1/l1", 1)))
        e1, e2 = pbw.generator(1), pbw.generator(2)
        assert r.coefficient(0, e1, e2) == parse_scalar("1/l1", 1)
        assert r.flip() == -r

    def test_embed(self, pbw):
        e1 = element(pbw, "e1")
        embedded = e1.embed(3, [1])
        assert embedded.coefficient(0, pbw.one, pbw.generator(1), pbw.one) == ONE

    def test_mismatched_legs(self, pbw):
        with pytest.raises(AlgebraMismatchError):
            element(pbw, "e1") + element(pbw, "e1").coproduct()

    def test_shift(self, pbw):
        x = element(pbw, "l1^2", cap=2)
        assert x.shift(0, 1) == element(pbw, "l1^2 + hbar*l1*h + hbar^2*h^2/4", cap=2)
        assert x.shift(0, -1) == element(pbw, "l1^2 - hbar*l1*h + hbar^2*h^2/4", cap=2)

    def test_exponential(self, pbw):
        e1 = element(pbw, "e1", cap=2)
        assert exponential(e1) == element(pbw, "1 + hbar*e1 + hbar^2*e1^2/2", cap=2)

    def test_restrict_and_extend(self, pbw, algebroid_pbw):
        u = parse_pbw("e1*e2 + hbar*h", algebroid_pbw, 2)
        restricted = u.restrict(pbw)
        assert restricted == parse_pbw("e1*e2 + hbar*h", pbw, 2)
        assert restricted.extend(algebroid_pbw) == u

    def test_restrict_rejects_derivatives(self, pbw, algebroid_pbw):
        with pytest.raises(ConsistencyError):
            UEATensor.generator(algebroid_pbw, 0).restrict(pbw)


class TestFrameOperator:
    """Tests for differential operators on h* x G."""

    def test_leibniz(self, algebroid_pbw):
        d = FrameOperator.generator(algebroid_pbw, 0)
        l1 = parse_scalar("l1", 1)
        multiply = FrameOperator.identity(algebroid_pbw) * l1
        expected = FrameOperator(algebroid_pbw, {algebroid_pbw.generator(0): l1, algebroid_pbw.one: 1})
        assert d @ multiply == expected

    def test_fields_ignore_coefficients(self, algebroid_pbw):
        e1 = FrameOperator.generator(algebroid_pbw, 2)
        multiply = FrameOperator.identity(algebroid_pbw) * parse_scalar("l1", 1)
        assert e1 @ multiply == e1 * parse_scalar("l1", 1)

    def test_composition_straightens(self, algebroid_pbw):
        e1 = FrameOperator.generator(algebroid_pbw, 2)
        e2 = FrameOperator.generator(algebroid_pbw, 3)
        assert e2 @ e1 - e1 @ e2 == -FrameOperator.generator(algebroid_pbw, 1)

    def test_apply_to_jets(self, algebroid_pbw, heisenberg_jets):
        from quantization.jets import parse_jet

        jet = parse_jet("l1*x2^2", heisenberg_jets)
        operator = FrameOperator.generator(algebroid_pbw, 0) @ FrameOperator.generator(algebroid_pbw, 2)
        assert operator.apply(jet) == parse_jet("2*x2", heisenberg_jets)

    def test_bidifferential(self, algebroid_pbw, heisenberg_jets):
        from quantization.jets import parse_jet

        e1 = FrameOperator.generator(algebroid_pbw, 2)
        e2 = FrameOperator.generator(algebroid_pbw, 3)
        operator = e1.tensor(e2)
        f = parse_jet("x2", heisenberg_jets)
        g = parse_jet("x3", heisenberg_jets)
        assert apply_bidifferential(operator, f, g, 0) == 1
        assert apply_bidifferential(operator, f, g, 1).is_zero()
