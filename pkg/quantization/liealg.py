"""
Finite-dimensional Lie algebras with a distinguished abelian Cartan part,
multivectors with Scalar coefficients, the Schouten bracket, and relative
Chevalley-Eilenberg cohomology dimensions.

Basis indices are 0-based. The Cartan part is spanned by the first
``cartan_dim`` basis vectors.

The Schouten bracket is written for any "frame algebra": an object with
``dim``, ``labels``, ``bracket_basis(a, b)`` (structure constants as a dict
index -> Scalar) and ``anchor(a, s)`` (derivative of a Scalar coefficient
along basis element a). A LieAlgebra has zero anchor; the tangent algebroid
of dynr adds derivatives in the dynamical variables.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exceptions import AlgebraMismatchError, ConsistencyError, DegreeError, InvalidAlgebraError
from .symexpr import ONE, ZERO, Scalar, ScalarLike, ScalarMatrix

logger = logging.getLogger(__name__)

Vector = Dict[int, Scalar]
Key = Tuple[int, ...]


def exterior_sign(indices: Sequence[int]) -> Tuple[Optional[Key], int]:
    """
    Sort a wedge monomial.

    Returns:
        (sorted key, sign of the permutation), or (None, 0) when an index repeats
    """
    items = list(indices)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and items[j - 1] == items[j]:
            return None, 0
    return tuple(items), sign


def add_to(target: Dict, key, value: Scalar) -> None:
    """Accumulate value into a sparse dict, dropping zeros."""
    if not value:
        return
    current = target.get(key)
    total = value if current is None else current + value
    if total:
        target[key] = total
    else:
        target.pop(key, None)


class LieAlgebra:
    """
    Lie algebra given by structure constants.

    Attributes:
        labels: Basis labels
        cartan_dim: Dimension l of the abelian part spanned by the first l vectors
        name: Optional model name
    """

    def __init__(
        self,
        labels: Sequence[str],
        cartan_dim: int,
        brackets: Mapping[Tuple[int, int], Mapping[int, ScalarLike]],
        name: str = "",
    ):
        if not 0 <= cartan_dim <= len(labels):
            raise DegreeError(f"cartan_dim {cartan_dim} outside 0..{len(labels)}")
        self.labels = tuple(labels)
        self.cartan_dim = cartan_dim
        self.name = name
        n = len(self.labels)
        self._raw: Dict[Tuple[int, int], Vector] = {}
        for (a, b), coeffs in brackets.items():
            if not (0 <= a < n and 0 <= b < n):
                raise DegreeError(f"bracket ({a}, {b}) outside basis of size {n}")
            vector: Vector = {}
            for c, value in coeffs.items():
                if not 0 <= c < n:
                    raise DegreeError(f"bracket ({a}, {b}) has component {c} outside basis")
                add_to(vector, c, Scalar.coerce(value))
            if vector:
                self._raw[(a, b)] = vector
        self._table: Dict[Tuple[int, int], Vector] = {}
        for (a, b), vector in self._raw.items():
            if a == b:
                continue
            self._table[(a, b)] = vector
            if (b, a) not in self._raw:
                self._table[(b, a)] = {c: -v for c, v in vector.items()}

    @classmethod
    def from_entries(
        cls,
        labels: Sequence[str],
        cartan_dim: int,
        entries: Iterable[Tuple[int, int, int, ScalarLike]],
        name: str = "",
    ) -> "LieAlgebra":
        """Build from (i, j, k, c) entries meaning c_{ij}^k = c."""
        brackets: Dict[Tuple[int, int], Dict[int, Scalar]] = {}
        for i, j, k, c in entries:
            add_to(brackets.setdefault((i, j), {}), k, Scalar.coerce(c))
        return cls(labels, cartan_dim, brackets, name)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def complement_indices(self) -> range:
        return range(self.cartan_dim, self.dim)

    def is_cartan(self, index: int) -> bool:
        return index < self.cartan_dim

    def bracket_basis(self, a: int, b: int) -> Vector:
        """[x_a, x_b] as a sparse coordinate vector."""
        return self._table.get((a, b), {})

    def structure_constant(self, a: int, b: int, c: int) -> Scalar:
        return self.bracket_basis(a, b).get(c, ZERO)

    def anchor(self, index: int, value: Scalar) -> Scalar:
        return ZERO

    def bracket(self, u: Mapping[int, Scalar], v: Mapping[int, Scalar]) -> Vector:
        """Bracket of two coordinate vectors (coefficients multiply as Scalars)."""
        result: Vector = {}
        for a, ua in u.items():
            for b, vb in v.items():
                for c, value in self.bracket_basis(a, b).items():
                    add_to(result, c, ua * vb * value)
        return result

    def raw_entries(self) -> List[Tuple[int, int, int, Scalar]]:
        """Structure constants as given, sorted."""
        return sorted(
            ((a, b, c, v) for (a, b), vec in self._raw.items() for c, v in vec.items()),
            key=lambda e: e[:3],
        )

    def canonical_entries(self) -> List[Tuple[int, int, int, Scalar]]:
        """Structure constants c_{ij}^k with i < j."""
        return sorted(
            ((a, b, c, v) for (a, b), vec in self._table.items() if a < b for c, v in vec.items()),
            key=lambda e: e[:3],
        )

    def subalgebra(
        self,
        vectors: Sequence[Mapping[int, Scalar]],
        labels: Sequence[str],
        cartan_dim: int,
        name: str = "",
    ) -> "LieAlgebra":
        """
        Structure constants of the span of ``vectors`` in that basis.

        Raises:
            ConsistencyError: If the vectors are dependent or their span is not closed
        """
        basis = vector_matrix(vectors, self.dim)
        if basis.rank() != len(vectors):
            raise ConsistencyError("subalgebra", "basis vectors are linearly dependent")
        brackets: Dict[Tuple[int, int], Dict[int, Scalar]] = {}
        for p, q in combinations(range(len(vectors)), 2):
            image = self.bracket(vectors[p], vectors[q])
            coords = basis.solve([image.get(i, ZERO) for i in range(self.dim)])
            if coords is None:
                raise ConsistencyError(
                    "subalgebra", f"[{labels[p]}, {labels[q]}] leaves the span"
                )
            entry = {k: c for k, c in enumerate(coords) if c}
            if entry:
                brackets[(p, q)] = entry
        return LieAlgebra(labels, cartan_dim, brackets, name or self.name)

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.cartan_dim == other.cartan_dim
            and self.canonical_entries() == other.canonical_entries()
        )

    def __hash__(self):
        return hash((self.labels, self.cartan_dim))

    def __repr__(self):
        return f"<LieAlgebra {self.name or '?'}: {', '.join(self.labels)} (l={self.cartan_dim})>"


def vector_matrix(vectors: Sequence[Mapping[int, Scalar]], dim: int) -> ScalarMatrix:
    """Matrix whose columns are the given coordinate vectors."""
    return ScalarMatrix.from_rows(
        [[vec.get(i, ZERO) for vec in vectors] for i in range(dim)]
    ) if vectors else ScalarMatrix(dim, 0, tuple(() for _ in range(dim)))


@dataclass
class LieAlgebraDiagnostics:
    """Result of validate_lie_algebra; empty lists mean the axiom holds."""

    jacobi: List[Tuple[int, int, int]] = field(default_factory=list)
    antisymmetry: List[Tuple[int, int]] = field(default_factory=list)
    abelian: List[Tuple[int, int]] = field(default_factory=list)
    non_constant: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not (self.jacobi or self.antisymmetry or self.abelian or self.non_constant)

    def to_dict(self) -> Dict[str, List]:
        return {
            "jacobi": [list(t) for t in self.jacobi],
            "antisymmetry": [list(t) for t in self.antisymmetry],
            "abelian": [list(t) for t in self.abelian],
            "non_constant": [list(t) for t in self.non_constant],
        }


def validate_lie_algebra(g: LieAlgebra) -> LieAlgebraDiagnostics:
    """
    Check antisymmetry, Jacobi and the abelian Cartan part exactly.

    Args:
        g: The algebra to check

    Returns:
        LieAlgebraDiagnostics listing the violating index tuples
    """
    diagnostics = LieAlgebraDiagnostics()
    for (a, b), vec in sorted(g._raw.items()):
        if a == b:
            diagnostics.antisymmetry.append((a, b))
        elif (b, a) in g._raw and a < b:
            other = g._raw[(b, a)]
            keys = set(vec) | set(other)
            if any(vec.get(c, ZERO) + other.get(c, ZERO) for c in keys):
                diagnostics.antisymmetry.append((a, b))
        if any(not value.is_constant() for value in vec.values()):
            diagnostics.non_constant.append((a, b))
    for a, b, c in combinations(range(g.dim), 3):
        total: Vector = {}
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            for k, v in g.bracket(g.bracket_basis(x, y), {z: ONE}).items():
                add_to(total, k, v)
        if total:
            diagnostics.jacobi.append((a, b, c))
    for a, b in combinations(range(g.cartan_dim), 2):
        if g.bracket_basis(a, b):
            diagnostics.abelian.append((a, b))
    if not diagnostics.is_valid:
        logger.info(f"Lie algebra {g.name or '?'} failed validation: {diagnostics.to_dict()}")
    return diagnostics


class MultiVector:
    """
    Element of the exterior algebra over a frame algebra.

    Attributes:
        algebra: The frame algebra (LieAlgebra or a tangent algebroid)
        degree: Homogeneous degree k
    """

    __slots__ = ("algebra", "degree", "_coeffs")

    def __init__(self, algebra, degree: int, coefficients: Optional[Mapping[Key, Scalar]] = None):
        if degree < 0:
            raise DegreeError(f"negative degree {degree}")
        self.algebra = algebra
        self.degree = degree
        coeffs: Dict[Key, Scalar] = {}
        for key, value in (coefficients or {}).items():
            key = tuple(key)
            if len(key) != degree:
                raise DegreeError(f"key {key} does not have degree {degree}")
            if any(not 0 <= i < algebra.dim for i in key):
                raise DegreeError(f"key {key} outside basis of size {algebra.dim}")
            if any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
                raise DegreeError(f"key {key} is not strictly increasing")
            add_to(coeffs, key, Scalar.coerce(value))
        self._coeffs = coeffs

    @classmethod
    def _raw(cls, algebra, degree: int, coeffs: Dict[Key, Scalar]) -> "MultiVector":
        mv = cls.__new__(cls)
        mv.algebra = algebra
        mv.degree = degree
        mv._coeffs = coeffs
        return mv

    @classmethod
    def zero(cls, algebra, degree: int) -> "MultiVector":
        return cls._raw(algebra, degree, {})

    @classmethod
    def constant(cls, algebra, value: ScalarLike) -> "MultiVector":
        return cls(algebra, 0, {(): value})

    @classmethod
    def basis(cls, algebra, *indices: int, coefficient: ScalarLike = 1) -> "MultiVector":
        """The monomial x_{i1} ^ ... ^ x_{ik}, sorted with sign."""
        key, sign = exterior_sign(indices)
        if key is None:
            return cls.zero(algebra, len(indices))
        return cls(algebra, len(indices), {key: Scalar.coerce(coefficient) * sign})

    @classmethod
    def from_vector(cls, algebra, vector: Mapping[int, Scalar]) -> "MultiVector":
        return cls(algebra, 1, {(i,): v for i, v in vector.items()})

    def items(self):
        return self._coeffs.items()

    def keys(self):
        return self._coeffs.keys()

    @property
    def coefficients(self) -> Dict[Key, Scalar]:
        return dict(self._coeffs)

    def coefficient(self, *indices: int) -> Scalar:
        key, sign = exterior_sign(indices)
        if key is None:
            return ZERO
        value = self._coeffs.get(key)
        return ZERO if value is None else value * sign

    def to_vector(self) -> Vector:
        if self.degree != 1:
            raise DegreeError("only degree-1 multivectors are vectors")
        return {key[0]: value for key, value in self._coeffs.items()}

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self):
        return bool(self._coeffs)

    def _check(self, other: "MultiVector") -> None:
        if not isinstance(other, MultiVector):
            raise TypeError(f"expected MultiVector, got {type(other).__name__}")
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraMismatchError("multivectors live on different algebras")

    def __add__(self, other: "MultiVector") -> "MultiVector":
        self._check(other)
        if other.degree != self.degree:
            raise DegreeError(f"cannot add degrees {self.degree} and {other.degree}")
        coeffs = dict(self._coeffs)
        for key, value in other._coeffs.items():
            add_to(coeffs, key, value)
        return MultiVector._raw(self.algebra, self.degree, coeffs)

    def __neg__(self) -> "MultiVector":
        return MultiVector._raw(self.algebra, self.degree, {k: -v for k, v in self._coeffs.items()})

    def __sub__(self, other: "MultiVector") -> "MultiVector":
        return self + (-other)

    def scale(self, factor: ScalarLike) -> "MultiVector":
        factor = Scalar.coerce(factor)
        if not factor:
            return MultiVector.zero(self.algebra, self.degree)
        return MultiVector._raw(
            self.algebra, self.degree, {k: v * factor for k, v in self._coeffs.items()}
        )

    def __rmul__(self, factor: ScalarLike) -> "MultiVector":
        return self.scale(factor)

    def map_coefficients(self, fn) -> "MultiVector":
        coeffs: Dict[Key, Scalar] = {}
        for key, value in self._coeffs.items():
            add_to(coeffs, key, fn(value))
        return MultiVector._raw(self.algebra, self.degree, coeffs)

    def diff(self, index: int) -> "MultiVector":
        """Derivative of every coefficient in l<index>."""
        return self.map_coefficients(lambda s: s.diff(index))

    def subs(self, point: Sequence[ScalarLike]) -> "MultiVector":
        return self.map_coefficients(lambda s: s.subs(point))

    def wedge(self, other: "MultiVector") -> "MultiVector":
        return wedge(self, other)

    def __xor__(self, other: "MultiVector") -> "MultiVector":
        return wedge(self, other)

    def on_algebra(self, algebra, offset: int = 0) -> "MultiVector":
        """The same multivector with indices shifted into another frame algebra."""
        return MultiVector._raw(
            algebra,
            self.degree,
            {tuple(i + offset for i in key): v for key, v in self._coeffs.items()},
        )

    def __eq__(self, other):
        if not isinstance(other, MultiVector):
            return NotImplemented
        if self.degree != other.degree:
            return not self._coeffs and not other._coeffs
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.degree, frozenset((k, str(v)) for k, v in self._coeffs.items())))

    def format(self) -> str:
        if not self._coeffs:
            return "0"
        labels = self.algebra.labels
        terms = []
        for key in sorted(self._coeffs):
            monomial = "^".join(labels[i] for i in key) or "1"
            terms.append(f"({self._coeffs[key]})*{monomial}")
        return " + ".join(terms)

    def to_dict(self) -> Dict[str, str]:
        labels = self.algebra.labels
        return {
            "^".join(labels[i] for i in key) or "1": str(value)
            for key, value in sorted(self._coeffs.items())
        }

    def __repr__(self):
        return f"MultiVector(deg={self.degree}, {self.format()})"


def wedge(u: MultiVector, v: MultiVector) -> MultiVector:
    """
    Exterior product u ^ v.

    Raises:
        AlgebraMismatchError: If u and v live on different algebras
    """
    u._check(v)
    degree = u.degree + v.degree
    coeffs: Dict[Key, Scalar] = {}
    if degree <= u.algebra.dim:
        for ku, cu in u.items():
            for kv, cv in v.items():
                key, sign = exterior_sign(ku + kv)
                if key is not None:
                    add_to(coeffs, key, cu * cv * sign)
    return MultiVector._raw(u.algebra, degree, coeffs)


def _bracket_monomials(algebra, x: Key, y: Key) -> Dict[Key, Scalar]:
    """
    Schouten bracket of two constant wedge monomials of basis elements.

    [x_1..x_p, y_1..y_q] = sum (-1)^(i+j) [x_i, y_j] ^ x_1..^x_i..x_p ^ y_1..^y_j..y_q
    """
    cache = algebra.__dict__.setdefault("_schouten_cache", {})
    cached = cache.get((x, y))
    if cached is not None:
        return cached
    result: Dict[Key, Scalar] = {}
    for i, xi in enumerate(x):
        rest_x = x[:i] + x[i + 1:]
        for j, yj in enumerate(y):
            bracket = algebra.bracket_basis(xi, yj)
            if not bracket:
                continue
            rest_y = y[:j] + y[j + 1:]
            sign = -1 if (i + j) % 2 else 1
            for c, value in bracket.items():
                key, s = exterior_sign((c,) + rest_x + rest_y)
                if key is not None:
                    add_to(result, key, value * (sign * s))
    cache[(x, y)] = result
    return result


def _monomial_on_function(algebra, x: Key, g: Scalar) -> Dict[Key, Scalar]:
    """[X, g] for a wedge monomial X and a coefficient g: sum_i (-1)^(p-1-i) X_i(g) X without i."""
    result: Dict[Key, Scalar] = {}
    p = len(x)
    for i, xi in enumerate(x):
        derivative = algebra.anchor(xi, g)
        if derivative:
            sign = -1 if (p - 1 - i) % 2 else 1
            add_to(result, x[:i] + x[i + 1:], derivative * sign)
    return result


def schouten_bracket(u: MultiVector, v: MultiVector) -> MultiVector:
    """
    Schouten bracket of multivectors of degrees p and q (result degree p+q-1).

    On degree-1 elements this is the Lie bracket; it satisfies graded
    antisymmetry and the graded Leibniz rule. Coefficients are differentiated
    along the anchor of the frame algebra (zero for a LieAlgebra).

    Raises:
        AlgebraMismatchError: If u and v live on different algebras
    """
    u._check(v)
    algebra = u.algebra
    p, q = u.degree, v.degree
    degree = p + q - 1
    if degree < 0:
        return MultiVector.zero(algebra, 0)
    coeffs: Dict[Key, Scalar] = {}
    swap_sign = -1 if ((p - 1) * (q - 1)) % 2 else 1
    for kx, f in u.items():
        for ky, g in v.items():
            fg = f * g
            for key, value in _bracket_monomials(algebra, kx, ky).items():
                add_to(coeffs, key, fg * value)
            for rest, derivative in _monomial_on_function(algebra, kx, g).items():
                key, s = exterior_sign(rest + ky)
                if key is not None:
                    add_to(coeffs, key, f * derivative * s)
            for rest, derivative in _monomial_on_function(algebra, ky, f).items():
                key, s = exterior_sign(rest + kx)
                if key is not None:
                    add_to(coeffs, key, -g * derivative * (swap_sign * s))
    return MultiVector._raw(algebra, degree, coeffs)


def adjoint_action(x: Mapping[int, Scalar], u: MultiVector) -> MultiVector:
    """ad_x extended to the exterior algebra as a derivation, monomial by monomial."""
    algebra = u.algebra
    coeffs: Dict[Key, Scalar] = {}
    for key, value in u.items():
        for position, index in enumerate(key):
            image = algebra.bracket(x, {index: ONE})
            for c, coefficient in image.items():
                replaced = key[:position] + (c,) + key[position + 1:]
                sorted_key, sign = exterior_sign(replaced)
                if sorted_key is not None:
                    add_to(coeffs, sorted_key, value * coefficient * sign)
    return MultiVector._raw(algebra, u.degree, coeffs)


# Relative Lie algebra cohomology


def _form_keys(g: LieAlgebra, k: int) -> List[Key]:
    return list(combinations(g.complement_indices, k))


def _evaluate_basis_form(index_of: Dict[Key, int], indices: Sequence[int]) -> Tuple[Optional[int], int]:
    key, sign = exterior_sign(indices)
    if key is None:
        return None, 0
    return index_of.get(key), sign


def _complement_part(g: LieAlgebra, vector: Vector) -> Vector:
    return {c: v for c, v in vector.items() if not g.is_cartan(c)}


def cartan_action_matrix(g: LieAlgebra, k: int) -> ScalarMatrix:
    """
    Stacked action of every Cartan basis element on alternating k-forms of
    the complement, (h.xi)(x_1..x_k) = -sum_i xi(x_1..[h,x_i] mod h..x_k).
    """
    keys = _form_keys(g, k)
    index_of = {key: i for i, key in enumerate(keys)}
    rows = []
    for h in range(g.cartan_dim):
        block = [[ZERO] * len(keys) for _ in keys]
        for out_index, out_key in enumerate(keys):
            for position, x in enumerate(out_key):
                image = _complement_part(g, g.bracket_basis(h, x))
                for c, value in image.items():
                    replaced = out_key[:position] + (c,) + out_key[position + 1:]
                    in_index, sign = _evaluate_basis_form(index_of, replaced)
                    if in_index is not None:
                        block[out_index][in_index] = block[out_index][in_index] - value * sign
        rows.extend(block)
    if not rows:
        return ScalarMatrix(0, len(keys), ())
    return ScalarMatrix.from_rows(rows)


def relative_cochain_basis(g: LieAlgebra, k: int) -> ScalarMatrix:
    """Columns spanning the Cartan-invariant alternating k-forms on g/h."""
    _check_cohomology_degree(g, k)
    keys = _form_keys(g, k)
    action = cartan_action_matrix(g, k)
    if action.rows == 0:
        return ScalarMatrix.identity(len(keys))
    basis = action.nullspace()
    if not basis:
        return ScalarMatrix(len(keys), 0, tuple(() for _ in keys))
    return ScalarMatrix.from_rows([[vec[i] for vec in basis] for i in range(len(keys))])


def relative_differential(g: LieAlgebra, k: int) -> ScalarMatrix:
    """
    Chevalley-Eilenberg differential C^k -> C^(k+1) on alternating forms of
    g/h, (d xi)(x_0..x_k) = sum_{i<j} (-1)^(i+j) xi([x_i,x_j] mod h, ..).
    """
    source = _form_keys(g, k)
    target = _form_keys(g, k + 1)
    index_of = {key: i for i, key in enumerate(source)}
    rows = [[ZERO] * len(source) for _ in target]
    for out_index, out_key in enumerate(target):
        for i, j in combinations(range(len(out_key)), 2):
            image = _complement_part(g, g.bracket_basis(out_key[i], out_key[j]))
            rest = tuple(x for m, x in enumerate(out_key) if m not in (i, j))
            sign = -1 if (i + j) % 2 else 1
            for c, value in image.items():
                in_index, s = _evaluate_basis_form(index_of, (c,) + rest)
                if in_index is not None:
                    rows[out_index][in_index] = rows[out_index][in_index] + value * (sign * s)
    if not target:
        return ScalarMatrix(0, len(source), ())
    return ScalarMatrix.from_rows(rows) if source else ScalarMatrix(len(target), 0, tuple(() for _ in target))


def _check_cohomology_degree(g: LieAlgebra, k: int) -> None:
    top = g.dim - g.cartan_dim
    if not 0 <= k <= top:
        raise DegreeError(f"cohomology degree {k} outside 0..{top}")


@dataclass(frozen=True)
class CohomologyDimensions:
    degree: int
    cochains: int
    cohomology: int

    def to_dict(self) -> Dict[str, int]:
        return {"degree": self.degree, "cochains": self.cochains, "cohomology": self.cohomology}


def _image_rank(g: LieAlgebra, k: int) -> int:
    if k < 0 or k > g.dim - g.cartan_dim:
        return 0
    basis = relative_cochain_basis(g, k)
    if basis.cols == 0:
        return 0
    d = relative_differential(g, k)
    if d.rows == 0:
        return 0
    return (d @ basis).rank()


def relative_cohomology_dim(g: LieAlgebra, k: int) -> CohomologyDimensions:
    """
    Dimensions of C^k(g, h) and H^k(g, h) with trivial coefficients.

    Raises:
        DegreeError: If k is outside 0..dim g - dim h
    """
    _check_cohomology_degree(g, k)
    cochains = relative_cochain_basis(g, k).cols
    cocycles = cochains - _image_rank(g, k)
    coboundaries = _image_rank(g, k - 1)
    result = CohomologyDimensions(k, cochains, cocycles - coboundaries)
    logger.debug(f"H^{k}({g.name or '?'}, h): {result}")
    return result
