"""
Model generators for performance testing.

Builds model file dicts of growing size that ModelLoader.load_dict accepts,
so the engine can be timed on families instead of single examples.
"""

from typing import Any, Dict, List


class ModelGenerator:
    """Generator for families of Lie algebras with known r-matrices."""

    @staticmethod
    def heisenberg(pairs: int, coefficient: str = "1/l1") -> Dict[str, Any]:
        """
        Heisenberg algebra with ``pairs`` pairs [e_i, f_i] = h and
        r = coefficient * sum e_i ^ f_i.

        Args:
            pairs: Number of pairs n; the algebra has dimension 2n + 1
            coefficient: Scalar in l1 multiplying every pair

        Returns:
            Model file dict
        """
        if pairs < 1:
            raise ValueError("need at least one pair")
        labels = ["h"] + [f"e{i}" for i in range(1, pairs + 1)] + [f"f{i}" for i in range(1, pairs + 1)]
        brackets = [{"i": i, "j": pairs + i, "k": 0, "c": "1"} for i in range(1, pairs + 1)]
        r = [{"i": i, "j": pairs + i, "coeff": coefficient} for i in range(1, pairs + 1)]
        return {
            "name": f"heisenberg_{pairs}",
            "dim": len(labels),
            "cartan_dim": 1,
            "basis": labels,
            "brackets": brackets,
            "r": r,
        }

    @staticmethod
    def abelian(pairs: int, cartan_dim: int = 1) -> Dict[str, Any]:
        """Abelian algebra with a constant r = sum e_i ^ f_i."""
        cartan = [f"h{a}" for a in range(1, cartan_dim + 1)]
        labels = cartan + [f"e{i}" for i in range(1, pairs + 1)] + [f"f{i}" for i in range(1, pairs + 1)]
        r = [
            {"i": cartan_dim + i, "j": cartan_dim + pairs + i, "coeff": "1"}
            for i in range(pairs)
        ]
        return {
            "name": f"abelian_{cartan_dim}_{pairs}",
            "dim": len(labels),
            "cartan_dim": cartan_dim,
            "basis": labels,
            "brackets": [],
            "r": r,
        }

    @staticmethod
    def solvable(coefficient: str = "l1^2") -> Dict[str, Any]:
        """Two-dimensional [h, e] = h with r = coefficient * h ^ e."""
        return {
            "name": "solvable",
            "dim": 2,
            "cartan_dim": 1,
            "basis": ["h", "e"],
            "brackets": [{"i": 0, "j": 1, "k": 0, "c": "1"}],
            "r": [{"i": 0, "j": 1, "coeff": coefficient}],
        }

    @classmethod
    def family(cls, name: str, sizes: List[int], **kwargs) -> List[Dict[str, Any]]:
        """Models of one family for each size."""
        builder = getattr(cls, name, None)
        if builder is None or name == "family":
            raise ValueError(f"unknown model family {name!r}")
        return [builder(size, **kwargs) for size in sizes]


class JetGenerator:
    """Jet expressions of growing degree for star product timings."""

    @staticmethod
    def monomial_sum(dim: int, degree: int) -> str:
        """Sum of x_i^degree over the fiber coordinates x1..x<dim>."""
        return " + ".join(f"x{i}^{degree}" for i in range(1, dim + 1))
