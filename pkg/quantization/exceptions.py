from typing import Any, Dict, Optional, Sequence, Tuple


class RMatrixError(Exception):
    """Base exception for the r-matrix engine."""

    pass


# Expressions


class ExpressionError(RMatrixError):
    """Raised when a scalar or jet expression cannot be evaluated."""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ParseError(ExpressionError):
    """Raised on a syntax error in an expression string."""

    pass


class DivisionByZeroError(ExpressionError):
    """Raised when dividing by the zero polynomial."""

    pass


class VariableIndexError(ExpressionError):
    """Raised when a variable index is outside the declared range."""

    pass


class PoleError(ExpressionError):
    """Raised when substituting a point where a denominator vanishes."""

    pass


# Lie algebras and multivectors


class AlgebraMismatchError(RMatrixError):
    """Raised when combining objects that live on different algebras."""

    pass


class DegreeError(RMatrixError):
    """Raised when a degree or index is out of range."""

    pass


class InvalidAlgebraError(RMatrixError):
    """Raised when structure constants fail the Lie algebra axioms."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


# Dynamical r-matrices


class NotAnRMatrixError(RMatrixError):
    """Raised when CDYBE or zero-weight residuals are nonzero."""

    pass


class NotSplittableError(RMatrixError):
    """Raised when r cannot be restricted to a nondegenerate subalgebra."""

    pass


class SingularPointError(RMatrixError):
    """Raised when a base point is a pole or a rank-drop point."""

    pass


class GaugeError(RMatrixError):
    """Raised when a gauge element is not nilpotent or not H-centralizing."""

    pass


class WeightError(RMatrixError):
    """Raised when a cochain is required to have zero weight but does not."""

    pass


# Geometry


class DegenerateStructureError(RMatrixError):
    """Raised when the Poisson bivector cannot be inverted."""

    pass


class NonReductiveComplementError(RMatrixError):
    """Raised when a complement is not stable under the Cartan part."""

    pass


# Fedosov calculus


class WeylCurvatureError(RMatrixError):
    """Raised when a Weyl curvature term is not closed or not horizontal."""

    pass


class CapTooSmallError(RMatrixError):
    """Raised when truncation caps cannot support the requested order."""

    def __init__(self, message: str, required: Tuple[int, int]):
        self.required = required
        super().__init__(f"{message}; required caps (hbar, degree) >= {required}")


class ConvergenceError(RMatrixError):
    """Raised when an iteration has not stabilised within its caps."""

    pass


class MissingConnectionError(RMatrixError):
    """Raised when a lift is requested before the abelian connection is solved."""

    pass


# Quantization


class PairingError(RMatrixError):
    """Raised when the jet pairing system is singular."""

    pass


class EquivalenceError(RMatrixError):
    """Raised when a gauge element T violates the equivalence conditions."""

    pass


class NonUnitalError(RMatrixError):
    """Raised when a twist does not start with 1 at order zero."""

    pass


class ConsistencyError(RMatrixError):
    """Raised when an asserted post-condition of a construction fails."""

    def __init__(self, check: str, detail: str = ""):
        self.check = check
        self.detail = detail
        super().__init__(f"{check}: {detail}" if detail else check)


# Model files


class SchemaError(RMatrixError):
    """Raised when a model file does not match the schema."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)

    @classmethod
    def from_nested(cls, errors: Any, prefix: Sequence[str] = ()) -> "SchemaError":
        """Build from a nested DRF error structure, naming the first failing field."""
        path, message = _first_error(errors, list(prefix))
        return cls(path, message)


def _first_error(errors: Any, prefix: list) -> Tuple[str, str]:
    if isinstance(errors, dict):
        for key in sorted(errors, key=str):
            if not errors[key]:
                continue
            if isinstance(key, int) and prefix:
                return _first_error(errors[key], prefix[:-1] + [f"{prefix[-1]}[{key}]"])
            part = "" if key == "non_field_errors" else str(key)
            return _first_error(errors[key], prefix + ([part] if part else []))
    if isinstance(errors, list):
        if errors and all(not isinstance(e, (dict, list)) for e in errors):
            return _join(prefix), str(errors[0])
        for index, item in enumerate(errors):
            if item:
                if prefix:
                    head = prefix[:-1] + [f"{prefix[-1]}[{index}]"]
                else:
                    head = [f"[{index}]"]
                return _first_error(item, head)
    return _join(prefix), str(errors)


def _join(parts: Sequence[str]) -> str:
    return ".".join(p for p in parts if p)
