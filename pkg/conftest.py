import random
from pathlib import Path

import pytest

from quantization.dynr import DynamicalR
from quantization.fedosov import WeylCaps, fedosov_data, solve_gamma
from quantization.jets import JetSpace
from quantization.liealg import LieAlgebra, MultiVector
from quantization.services import ModelLoader
from quantization.symexpr import parse_scalar

MODEL_DIR = Path(__file__).resolve().parent / "quantization" / "model_files"


def load_example(name):
    return ModelLoader.load(MODEL_DIR / f"{name}.json")


# Model file fixtures
@pytest.fixture(scope="session")
def model_dir():
    """Directory of the shipped example models."""
    return MODEL_DIR


@pytest.fixture(scope="session")
def abelian_model():
    """Abelian R^3 with r = e1^e2."""
    return load_example("abelian")


@pytest.fixture(scope="session")
def heisenberg_model():
    """Heisenberg algebra [e1, e2] = h with r = (1/l1) e1^e2."""
    return load_example("heisenberg")


@pytest.fixture(scope="session")
def solvable_model():
    """Two-dimensional [h, e] = h with r = l1^2 h^e."""
    return load_example("solvable")


@pytest.fixture(scope="session")
def nonsolution_model():
    """Heisenberg with r = l1 e1^e2, which does not solve the CDYBE."""
    return load_example("heisenberg_nonsolution")


@pytest.fixture(scope="session")
def central_model():
    """Heisenberg plus a central generator k; r is degenerate but splittable."""
    return load_example("heisenberg_central_k")


@pytest.fixture(scope="session")
def gauge_model():
    """Heisenberg with the gauge element exp(l1 e1)."""
    return load_example("gauge_demo")


# Algebra fixtures
@pytest.fixture(scope="session")
def heisenberg():
    """The Heisenberg algebra built directly from structure constants."""
    return LieAlgebra.from_entries(["h", "e1", "e2"], 1, [(1, 2, 0, 1)], "heisenberg")


@pytest.fixture(scope="session")
def abelian():
    return LieAlgebra.from_entries(["h", "e1", "e2"], 1, [], "abelian")


@pytest.fixture
def heisenberg_r(heisenberg):
    """Factory for f(l) e1^e2 on the Heisenberg algebra."""

    def build(text):
        return DynamicalR(heisenberg, MultiVector.basis(heisenberg, 1, 2, coefficient=parse_scalar(text, 1)))

    return build


@pytest.fixture(scope="session")
def heisenberg_jets(heisenberg):
    """Jets of degree 6 on h* x H."""
    return JetSpace(heisenberg, 6)


@pytest.fixture
def rng():
    """Seeded random generator so randomized checks are reproducible."""
    return random.Random(20240611)


@pytest.fixture
def random_jet(rng, heisenberg_jets):
    """Factory for random Heisenberg jets of degree <= 3, optionally with l-dependent coefficients."""
    monomials = heisenberg_jets.monomials(3)

    def build(terms=3, lambda_dependent=False):
        jet = heisenberg_jets.zero()
        for _ in range(terms):
            if lambda_dependent:
                coefficient = parse_scalar(f"{rng.randint(1, 4)}*l1 + {rng.randint(-3, 3)}", 1)
            else:
                coefficient = parse_scalar(str(rng.choice([-3, -2, -1, 1, 2, 3])), 1)
            jet = jet + heisenberg_jets.monomial(rng.choice(monomials), coefficient)
        return jet

    return build


@pytest.fixture
def random_lambda_function(rng):
    """Factory for random rational functions of l1."""

    def build():
        return parse_scalar(f"{rng.randint(1, 4)}*l1^2 + {rng.randint(-3, 3)}*l1 + {rng.randint(1, 3)}/l1", 1)

    return build


# Solved Fedosov data
def solved(model, order, weyl_curvature=None):
    forms = model.weyl_curvature if weyl_curvature is None else weyl_curvature
    data = fedosov_data(model.dynamical, model.resolved_base_point(), WeylCaps.for_order(order), forms)
    solve_gamma(data)
    return data


@pytest.fixture(scope="session")
def heisenberg_fedosov_k1(heisenberg_model):
    """Solved Fedosov data for the Heisenberg model at order 1."""
    return solved(heisenberg_model, 1)


@pytest.fixture(scope="session")
def heisenberg_fedosov_k2(heisenberg_model):
    """Solved Fedosov data for the Heisenberg model at order 2."""
    return solved(heisenberg_model, 2)


@pytest.fixture(scope="session")
def abelian_fedosov_k2(abelian_model):
    """Solved Fedosov data for the flat abelian model at order 2."""
    return solved(abelian_model, 2)
