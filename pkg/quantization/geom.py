"""
Invariant geometry of M = h* x G in the global frame
{d/dl1..d/dl<l>, e_1..e_n} (left-invariant fields of the basis of g).

Frame index A < l is d/dl<A+1>, frame index l + a is the left-invariant
field of basis vector a; the first l of those are the Cartan directions.
Coefficients are rational functions of l only, so the left-invariant fields
never differentiate them. The Poisson bivector is pinned as
pi = sum_i e_{h_i} ^ d/dl_i + r, which gives pi(dl_i, xi^{h_i}) = -1 and
omega(e_{h_i}, .) = -dl_i.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .dynr import DynamicalR, TangentAlgebroid, lambda_bivector, require_r_matrix, sharp, evaluate_at
from .exceptions import (
    ConsistencyError,
    DegenerateStructureError,
    DegreeError,
    NonReductiveComplementError,
    SingularPointError,
)
from .liealg import Key, LieAlgebra, Vector, add_to, exterior_sign
from .symexpr import ONE, ZERO, Scalar, ScalarLike, ScalarMatrix

logger = logging.getLogger(__name__)

THIRD = Scalar.coerce(1) / 3
HALF = Scalar.coerce(1) / 2


class FrameForm:
    """Differential form sum_J a_J theta^J in the coframe dual to the frame."""

    __slots__ = ("frame", "degree", "_coeffs")

    def __init__(self, frame, degree: int, coefficients: Optional[Mapping[Key, ScalarLike]] = None):
        self.frame = frame
        self.degree = degree
        coeffs: Dict[Key, Scalar] = {}
        for key, value in (coefficients or {}).items():
            if len(key) != degree:
                raise DegreeError(f"form key {key} does not have degree {degree}")
            sorted_key, sign = exterior_sign(key)
            if sorted_key is not None:
                add_to(coeffs, sorted_key, Scalar.coerce(value) * sign)
        self._coeffs = coeffs

    @classmethod
    def zero(cls, frame, degree: int) -> "FrameForm":
        return cls(frame, degree)

    @classmethod
    def from_matrix(cls, frame, matrix: ScalarMatrix) -> "FrameForm":
        """The 2-form with omega(X_A, X_B) = matrix[A, B]."""
        return cls(
            frame,
            2,
            {(a, b): matrix[a, b] for a, b in combinations(range(matrix.rows), 2) if matrix[a, b]},
        )

    def items(self):
        return self._coeffs.items()

    def component(self, *indices: int) -> Scalar:
        key, sign = exterior_sign(indices)
        if key is None:
            return ZERO
        value = self._coeffs.get(key)
        return ZERO if value is None else value * sign

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self):
        return bool(self._coeffs)

    def __add__(self, other: "FrameForm") -> "FrameForm":
        if other.degree != self.degree:
            raise DegreeError(f"cannot add forms of degree {self.degree} and {other.degree}")
        coeffs = dict(self._coeffs)
        for key, value in other._coeffs.items():
            add_to(coeffs, key, value)
        return self._new(self.degree, coeffs)

    def __neg__(self) -> "FrameForm":
        return self._new(self.degree, {k: -v for k, v in self._coeffs.items()})

    def __sub__(self, other: "FrameForm") -> "FrameForm":
        return self + (-other)

    def scale(self, factor: ScalarLike) -> "FrameForm":
        factor = Scalar.coerce(factor)
        coeffs: Dict[Key, Scalar] = {}
        for key, value in self._coeffs.items():
            add_to(coeffs, key, value * factor)
        return self._new(self.degree, coeffs)

    def _new(self, degree: int, coeffs: Dict[Key, Scalar]) -> "FrameForm":
        form = FrameForm.__new__(FrameForm)
        form.frame = self.frame
        form.degree = degree
        form._coeffs = coeffs
        return form

    def wedge(self, other: "FrameForm") -> "FrameForm":
        coeffs: Dict[Key, Scalar] = {}
        for ka, va in self._coeffs.items():
            for kb, vb in other._coeffs.items():
                key, sign = exterior_sign(ka + kb)
                if key is not None:
                    add_to(coeffs, key, va * vb * sign)
        return self._new(self.degree + other.degree, coeffs)

    def interior(self, index: int) -> "FrameForm":
        """Contraction with the frame vector X_index."""
        if self.degree == 0:
            return self._new(0, {})
        coeffs: Dict[Key, Scalar] = {}
        for key, value in self._coeffs.items():
            for position, j in enumerate(key):
                if j == index:
                    sign = -1 if position % 2 else 1
                    add_to(coeffs, key[:position] + key[position + 1:], value * sign)
        return self._new(self.degree - 1, coeffs)

    def d(self) -> "FrameForm":
        """
        Frame exterior derivative, with d theta^C = -sum_{A<B} C_{AB}^C theta^A ^ theta^B.
        """
        frame = self.frame
        structure = _coframe_differentials(frame)
        coeffs: Dict[Key, Scalar] = {}
        for key, value in self._coeffs.items():
            for a in range(frame.dim):
                derivative = frame.anchor(a, value)
                if derivative:
                    sorted_key, sign = exterior_sign((a,) + key)
                    if sorted_key is not None:
                        add_to(coeffs, sorted_key, derivative * sign)
            for position, c in enumerate(key):
                sign = -1 if position % 2 else 1
                for (a, b), constant in structure.get(c, ()):
                    replaced = key[:position] + (a, b) + key[position + 1:]
                    sorted_key, s = exterior_sign(replaced)
                    if sorted_key is not None:
                        add_to(coeffs, sorted_key, -value * constant * (sign * s))
        return self._new(self.degree + 1, coeffs)

    def __eq__(self, other):
        if not isinstance(other, FrameForm):
            return NotImplemented
        return self.degree == other.degree and (self - other).is_zero()

    def __hash__(self):
        return hash((self.degree, frozenset((k, str(v)) for k, v in self._coeffs.items())))

    def to_dict(self) -> Dict[str, str]:
        labels = coframe_labels(self.frame)
        return {
            "^".join(labels[i] for i in key) or "1": str(value)
            for key, value in sorted(self._coeffs.items())
        }

    def __repr__(self):
        return f"FrameForm(deg={self.degree}, {self.to_dict()})"


def coframe_labels(frame) -> Tuple[str, ...]:
    offset = getattr(frame, "offset", 0)
    return tuple(
        f"dl{i + 1}" if i < offset else f"xi_{label}" for i, label in enumerate(frame.labels)
    )


def _coframe_differentials(frame) -> Dict[int, List[Tuple[Tuple[int, int], Scalar]]]:
    cached = frame.__dict__.get("_coframe_differentials")
    if cached is not None:
        return cached
    table: Dict[int, List[Tuple[Tuple[int, int], Scalar]]] = {}
    for a, b in combinations(range(frame.dim), 2):
        for c, value in frame.bracket_basis(a, b).items():
            table.setdefault(c, []).append(((a, b), value))
    frame.__dict__["_coframe_differentials"] = table
    return table


@dataclass
class FrameGeometry:
    """
    Poisson and symplectic structure of M in the invariant frame.

    Attributes:
        dynamical: The r-matrix the geometry is built from
        frame: Frame of M (coordinate derivatives, then left-invariant fields)
        poisson: Matrix pi^{AB}
        symplectic: Matrix omega_{AB} = inverse of pi, or None when pi is degenerate
    """

    dynamical: DynamicalR
    frame: TangentAlgebroid
    poisson: ScalarMatrix
    symplectic: Optional[ScalarMatrix] = None

    @property
    def algebra(self) -> LieAlgebra:
        return self.dynamical.algebra

    @property
    def num_vars(self) -> int:
        return self.frame.offset

    @property
    def size(self) -> int:
        return self.frame.dim

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.frame.labels

    def is_lambda_direction(self, index: int) -> bool:
        return index < self.num_vars

    def is_cartan_direction(self, index: int) -> bool:
        return self.num_vars <= index < 2 * self.num_vars

    def structure(self, a: int, b: int) -> Vector:
        return self.frame.bracket_basis(a, b)

    def derivative(self, index: int, value: Scalar) -> Scalar:
        return self.frame.anchor(index, value)

    def require_symplectic(self) -> ScalarMatrix:
        if self.symplectic is None:
            raise DegenerateStructureError(
                "the Poisson bivector is degenerate; restrict to g1 first"
            )
        return self.symplectic

    def symplectic_form(self) -> FrameForm:
        return FrameForm.from_matrix(self.frame, self.require_symplectic())

    def poisson_bracket(self, df: Sequence[Scalar], dg: Sequence[Scalar]) -> Scalar:
        """pi(df, dg) for frame differentials df_A = X_A f."""
        total = ZERO
        for a in range(self.size):
            if not df[a]:
                continue
            for b in range(self.size):
                if dg[b] and self.poisson[a, b]:
                    total = total + self.poisson[a, b] * df[a] * dg[b]
        return total


def build_frame_geometry(R: DynamicalR, require_nondegenerate: bool = True) -> FrameGeometry:
    """
    Assemble pi = sum_i e_{h_i} ^ d/dl_i + r and omega = pi^{-1} in the frame.

    Raises:
        NotAnRMatrixError: If r fails CDYBE or zero weight
        DegenerateStructureError: If pi is degenerate and require_nondegenerate is set
        ConsistencyError: If omega fails closedness or the moment map relation
    """
    require_r_matrix(R)
    frame = R.algebroid()
    bivector = lambda_bivector(R)
    size = frame.dim
    poisson = ScalarMatrix.from_rows(
        [[bivector.coefficient(a, b) if a != b else ZERO for b in range(size)] for a in range(size)]
    )
    symplectic = poisson.inverse()
    if symplectic is None and require_nondegenerate:
        raise DegenerateStructureError(
            f"pi has rank {poisson.rank()} < {size}; restrict to g1 first"
        )
    geometry = FrameGeometry(R, frame, poisson, symplectic)
    if symplectic is not None:
        violations = symplectic_violations(geometry)
        if violations:
            raise ConsistencyError("build_frame_geometry", "; ".join(violations))
    logger.debug(f"frame geometry of size {size} built for {R.algebra.name or '?'}")
    return geometry


def symplectic_violations(geometry: FrameGeometry) -> List[str]:
    """Antisymmetry, closedness and omega(e_{h_i}, .) = -dl_i."""
    omega = geometry.require_symplectic()
    problems = []
    size = geometry.size
    for a in range(size):
        for b in range(size):
            if omega[a, b] + omega[b, a]:
                problems.append(f"omega not antisymmetric at ({a}, {b})")
    if geometry.symplectic_form().d():
        problems.append("d omega is nonzero")
    l = geometry.num_vars
    for i in range(l):
        for b in range(size):
            expected = -ONE if b == i else ZERO
            if omega[l + i, b] != expected:
                problems.append(f"omega(e_h{i + 1}, X_{b}) = {omega[l + i, b]}, expected {expected}")
    return problems


# Reductive decomposition


@dataclass
class ReductiveComplement:
    """
    A complement m of h with [h, m] inside m.

    Attributes:
        vectors: Basis of m in coordinates of the basis of g
        labels: Labels of the adapted basis (h first, then m)
        change_of_basis: Columns are the adapted basis vectors in the old basis
        adapted: g written in the adapted basis
    """

    vectors: List[Vector]
    labels: List[str]
    change_of_basis: ScalarMatrix
    adapted: LieAlgebra

    def to_dict(self) -> Dict:
        return {
            "labels": self.labels,
            "vectors": [{str(k): str(v) for k, v in sorted(vec.items())} for vec in self.vectors],
        }


def complement_from_vectors(g: LieAlgebra, vectors: Sequence[Vector], labels: Optional[Sequence[str]] = None) -> ReductiveComplement:
    """
    Validate a complement of h given by basis vectors.

    Raises:
        NonReductiveComplementError: If the vectors do not complement h or [h, m] leaves m
    """
    l = g.cartan_dim
    basis = [{i: ONE} for i in range(l)] + list(vectors)
    if len(basis) != g.dim:
        raise NonReductiveComplementError(
            f"complement has dimension {len(vectors)}, expected {g.dim - l}"
        )
    names = list(g.labels[:l]) + list(labels or [f"m{k + 1}" for k in range(len(vectors))])
    change = ScalarMatrix.from_rows([[vec.get(i, ZERO) for vec in basis] for i in range(g.dim)])
    if change.rank() != g.dim:
        raise NonReductiveComplementError("complement vectors and h do not span g")
    adapted = g.subalgebra(basis, names, l, name=g.name)
    for i in range(l):
        for k in range(l, g.dim):
            image = adapted.bracket_basis(i, k)
            leaking = [c for c in image if c < l]
            if leaking:
                raise NonReductiveComplementError(
                    f"[{names[i]}, {names[k]}] has a component along {names[leaking[0]]}"
                )
    return ReductiveComplement(list(vectors), names, change, adapted)


def reductive_complement(R: DynamicalR, base_point: Sequence[ScalarLike]) -> ReductiveComplement:
    """
    m = r(l0)^# h^perp at a regular rational point.

    Raises:
        DegenerateStructureError: If r is degenerate
        SingularPointError: If l0 is a pole or a rank-drop point
        NonReductiveComplementError: If m is not h-stable
    """
    from .dynr import rank_flags

    flags = rank_flags(R)
    if not flags.nondegenerate:
        raise DegenerateStructureError("reductive complement needs a nondegenerate r")
    g = R.algebra
    l, n = g.cartan_dim, g.dim
    r0 = evaluate_at(R, base_point)
    # Complement coordinates first so the echelon basis is pivoted on them.
    order = list(range(l, n)) + list(range(l))
    rows = []
    for j in range(l, n):
        image = sharp(R, {j: ONE}, r0)
        rows.append([image.get(k, ZERO) for k in order])
    reduced, pivots = ScalarMatrix.from_rows(rows).rref() if rows else (None, ())
    if len(pivots) != n - l or any(p >= n - l for p in pivots):
        raise SingularPointError(
            f"r(l0)^# h^perp has dimension {len(pivots)} at the base point, expected {n - l}"
        )
    vectors = []
    labels = []
    for i in range(len(pivots)):
        vector = {order[k]: value for k, value in enumerate(reduced.row(i)) if value}
        vectors.append(vector)
        pivot = order[pivots[i]]
        labels.append(g.labels[pivot] if len(vector) == 1 else g.labels[pivot] + "'")
    complement = complement_from_vectors(g, vectors, labels)
    logger.debug(f"reductive complement at {list(map(str, base_point))}: {complement.to_dict()}")
    return complement


# Connections


@dataclass
class FrameConnection:
    """
    Linear connection nabla_{X_A} X_B = sum_C Gamma_{AB}^C X_C.

    Attributes:
        frame: Frame of M
        christoffels: Sparse map (A, B) -> {C: Gamma_{AB}^C}
        name: Label used in reports
    """

    frame: TangentAlgebroid
    christoffels: Dict[Tuple[int, int], Vector] = field(default_factory=dict)
    name: str = ""

    @property
    def size(self) -> int:
        return self.frame.dim

    def gamma(self, a: int, b: int) -> Vector:
        return self.christoffels.get((a, b), {})

    def christoffel(self, a: int, b: int, c: int) -> Scalar:
        return self.gamma(a, b).get(c, ZERO)

    def __add__(self, other: "FrameConnection") -> "FrameConnection":
        table = {key: dict(vec) for key, vec in self.christoffels.items()}
        for key, vec in other.christoffels.items():
            target = table.setdefault(key, {})
            for c, value in vec.items():
                add_to(target, c, value)
        return FrameConnection(self.frame, {k: v for k, v in table.items() if v}, self.name)

    def torsion_violations(self) -> List[Tuple[int, int, int]]:
        """(A, B, C) with Gamma_{AB}^C - Gamma_{BA}^C != C_{AB}^C."""
        problems = []
        for a, b in combinations(range(self.size), 2):
            structure = self.frame.bracket_basis(a, b)
            for c in range(self.size):
                value = self.christoffel(a, b, c) - self.christoffel(b, a, c)
                if value != structure.get(c, ZERO):
                    problems.append((a, b, c))
        return problems

    def is_torsion_free(self) -> bool:
        return not self.torsion_violations()

    def covariant_derivative_of_metric(self, matrix: ScalarMatrix, a: int) -> ScalarMatrix:
        """(nabla_A w)_{BD} = X_A(w_BD) - Gamma_{AB}^E w_ED - Gamma_{AD}^E w_BE."""
        size = self.size
        rows = []
        for b in range(size):
            row = []
            for d in range(size):
                value = self.frame.anchor(a, matrix[b, d])
                for e, gamma in self.gamma(a, b).items():
                    if matrix[e, d]:
                        value = value - gamma * matrix[e, d]
                for e, gamma in self.gamma(a, d).items():
                    if matrix[b, e]:
                        value = value - gamma * matrix[b, e]
                row.append(value)
            rows.append(row)
        return ScalarMatrix.from_rows(rows)

    def symplectic_violations(self, geometry: FrameGeometry) -> List[int]:
        """Directions A with nabla_A omega != 0."""
        omega = geometry.require_symplectic()
        return [a for a in range(self.size) if not self.covariant_derivative_of_metric(omega, a).is_zero()]

    def cartan_parallel_violations(self, geometry: FrameGeometry) -> List[Tuple[int, int]]:
        """(A, h) with nabla_A e_h != 0."""
        l = geometry.num_vars
        return [(a, l + i) for a in range(self.size) for i in range(l) if self.gamma(a, l + i)]

    def coframe_derivative(self, a: int, c: int) -> Dict[int, Scalar]:
        """nabla_A theta^C = -sum_B Gamma_{AB}^C theta^B."""
        result: Dict[int, Scalar] = {}
        for b in range(self.size):
            value = self.christoffel(a, b, c)
            if value:
                result[b] = -value
        return result

    def to_dict(self) -> Dict[str, str]:
        labels = self.frame.labels
        return {
            f"{labels[a]},{labels[b]}->{labels[c]}": str(value)
            for (a, b), vec in sorted(self.christoffels.items())
            for c, value in sorted(vec.items())
        }


def base_connection(g: LieAlgebra, complement: Sequence[Vector], frame: Optional[TangentAlgebroid] = None) -> FrameConnection:
    """
    The biinvariant torsion-free connection of a reductive decomposition g = h + m:
    nabla_{e_h} e_m = [h, m], nabla_{e_m} e_m' = 1/2 [m, m'], all other
    frame derivatives zero; written back in the frame of the basis of g.

    Raises:
        NonReductiveComplementError: If [h, m] is not contained in m
    """
    frame = frame or TangentAlgebroid(g)
    data = complement_from_vectors(g, complement)
    adapted = data.adapted
    l, n = g.cartan_dim, g.dim
    inverse = data.change_of_basis.inverse()

    # Christoffels in adapted coordinates.
    local: Dict[Tuple[int, int], Vector] = {}
    for p in range(n):
        for q in range(n):
            if p < l and q >= l:
                image = dict(adapted.bracket_basis(p, q))
            elif p >= l and q >= l:
                image = {c: v * HALF for c, v in adapted.bracket_basis(p, q).items()}
            else:
                continue
            if image:
                local[(p, q)] = image

    # Constant change of basis: Gamma_{ab}^c = sum P^-1_{pa} P^-1_{qb} Gamma'_{pq}^s P_{cs}.
    change = data.change_of_basis
    table: Dict[Tuple[int, int], Vector] = {}
    for a in range(n):
        for b in range(n):
            vector: Vector = {}
            for (p, q), image in local.items():
                weight = inverse[p, a] * inverse[q, b]
                if not weight:
                    continue
                for s, value in image.items():
                    for c in range(n):
                        if change[c, s]:
                            add_to(vector, l + c, weight * value * change[c, s])
            if vector:
                table[(l + a, l + b)] = vector
    connection = FrameConnection(frame, table, "base")
    if not connection.is_torsion_free():
        raise ConsistencyError("base_connection", f"torsion at {connection.torsion_violations()[:3]}")
    return connection


def symplectize(base: FrameConnection, geometry: FrameGeometry) -> FrameConnection:
    """
    nabla = nabla0 + S with omega(S(X, Y), Z) = 1/3 [(nabla0_X omega)(Y, Z) + (nabla0_Y omega)(X, Z)].

    Raises:
        DegenerateStructureError: If omega is degenerate
        ConsistencyError: If nabla is not symplectic, not torsion-free, or moves e_h
    """
    omega = geometry.require_symplectic()
    pi = geometry.poisson
    size = geometry.size
    derivatives = [base.covariant_derivative_of_metric(omega, a) for a in range(size)]
    correction: Dict[Tuple[int, int], Vector] = {}
    for a in range(size):
        for b in range(a, size):
            vector: Vector = {}
            for d in range(size):
                t = (derivatives[a][b, d] + derivatives[b][a, d]) * THIRD
                if not t:
                    continue
                for c in range(size):
                    if pi[d, c]:
                        add_to(vector, c, t * pi[d, c])
            if vector:
                correction[(a, b)] = vector
                if a != b:
                    correction[(b, a)] = dict(vector)
    connection = base + FrameConnection(geometry.frame, correction)
    connection.name = "symplectic"

    problems = []
    if connection.symplectic_violations(geometry):
        problems.append(f"nabla omega != 0 along {connection.symplectic_violations(geometry)}")
    if not connection.is_torsion_free():
        problems.append("torsion")
    if connection.cartan_parallel_violations(geometry):
        problems.append(f"nabla e_h != 0 at {connection.cartan_parallel_violations(geometry)[:3]}")
    if problems:
        raise ConsistencyError("symplectize", "; ".join(problems))
    logger.debug(f"symplectic connection with {len(connection.christoffels)} nonzero entries")
    return connection


def connection_table_violations(connection: FrameConnection, geometry: FrameGeometry) -> List[str]:
    """
    Compare with the explicit table for r valued in the exterior square of a
    complement spanned by basis vectors: nabla_d d = 0, nabla_d e_h = 0,
    nabla_d e_m and nabla_{e_m} d along e_m only, nabla_{e_h} d = 0,
    nabla_{e_h} e_h' = 0, nabla_{e_h} e_m = [h, m], nabla_{e_m} e_h = 0,
    nabla_{e_m} e_m' - 1/2 [m, m'] along e_m only.
    """
    l = geometry.num_vars
    size = geometry.size
    lam = range(l)
    cartan = range(l, 2 * l)
    rest = range(2 * l, size)
    problems = []

    def expect_zero(a, b, what):
        if connection.gamma(a, b):
            problems.append(f"{what} at ({a}, {b})")

    def expect_complement_only(a, b, offset: Vector, what):
        gamma = dict(connection.gamma(a, b))
        for c, value in offset.items():
            add_to(gamma, c, -value)
        if any(c < 2 * l for c in gamma):
            problems.append(f"{what} at ({a}, {b})")

    for a in lam:
        for b in lam:
            expect_zero(a, b, "nabla_d d != 0")
        for b in cartan:
            expect_zero(a, b, "nabla_d e_h != 0")
        for b in rest:
            expect_complement_only(a, b, {}, "nabla_d e_m leaves m")
    for a in cartan:
        for b in lam:
            expect_zero(a, b, "nabla_{e_h} d != 0")
        for b in cartan:
            expect_zero(a, b, "nabla_{e_h} e_h != 0")
        for b in rest:
            if connection.gamma(a, b) != geometry.structure(a, b):
                problems.append(f"nabla_(e_h) e_m != [h, m] at ({a}, {b})")
    for a in rest:
        for b in lam:
            expect_complement_only(a, b, {}, "nabla_{e_m} d leaves m")
        for b in cartan:
            expect_zero(a, b, "nabla_{e_m} e_h != 0")
        for b in rest:
            half = {c: v * HALF for c, v in geometry.structure(a, b).items()}
            expect_complement_only(a, b, half, "nabla_{e_m} e_m' - [m, m']/2 leaves m")
    return problems


# Curvature


@dataclass
class CurvatureTensor:
    """
    R(X_A, X_B) X_D = sum_F R^F_{D,AB} X_F and R_{CD,AB} = omega_{CE} R^E_{D,AB}.

    Attributes:
        size: Frame size N
        upper: Sparse map (F, D, A, B) -> R^F_{D,AB}
        lowered: Sparse map (C, D, A, B) -> R_{CD,AB}
    """

    size: int
    upper: Dict[Tuple[int, int, int, int], Scalar]
    lowered: Dict[Tuple[int, int, int, int], Scalar]

    def component(self, f: int, d: int, a: int, b: int) -> Scalar:
        return self.upper.get((f, d, a, b), ZERO)

    def lowered_component(self, c: int, d: int, a: int, b: int) -> Scalar:
        return self.lowered.get((c, d, a, b), ZERO)

    def is_zero(self) -> bool:
        return not self.upper

    def symmetry_violations(self, cartan: Sequence[int] = ()) -> Dict[str, List[Tuple[int, ...]]]:
        """
        Antisymmetry in the last pair, symmetry in the first pair, the Bianchi
        sum R_{C D,AB} + R_{C A,BD} + R_{C B,DA}, and vanishing on Cartan directions.
        """
        n = self.size
        problems: Dict[str, List[Tuple[int, ...]]] = {
            "antisymmetry": [],
            "symmetry": [],
            "bianchi": [],
            "cartan": [],
        }
        r = self.lowered_component
        cartan = set(cartan)
        for c in range(n):
            for d in range(n):
                for a in range(n):
                    for b in range(n):
                        value = r(c, d, a, b)
                        if value + r(c, d, b, a):
                            problems["antisymmetry"].append((c, d, a, b))
                        if value != r(d, c, a, b):
                            problems["symmetry"].append((c, d, a, b))
                        if value + r(c, a, b, d) + r(c, b, d, a):
                            problems["bianchi"].append((c, d, a, b))
                        if value and cartan.intersection((c, d, a, b)):
                            problems["cartan"].append((c, d, a, b))
        return problems

    def to_dict(self, labels: Sequence[str]) -> Dict[str, str]:
        return {
            f"R_{labels[c]}{labels[d]},{labels[a]}{labels[b]}": str(value)
            for (c, d, a, b), value in sorted(self.lowered.items())
            if a < b
        }


def curvature(connection: FrameConnection, geometry: FrameGeometry, check: bool = True) -> CurvatureTensor:
    """
    R^F_{D,AB} = X_A(Gamma_{BD}^F) - X_B(Gamma_{AD}^F) + Gamma_{BD}^E Gamma_{AE}^F
                 - Gamma_{AD}^E Gamma_{BE}^F - C_{AB}^E Gamma_{ED}^F.

    With check set, the symmetries of a symplectic curvature and its
    vanishing on Cartan directions are asserted.

    Raises:
        ConsistencyError: If a checked symmetry fails
    """
    size = geometry.size
    frame = geometry.frame
    upper: Dict[Tuple[int, int, int, int], Scalar] = {}
    for a, b in combinations(range(size), 2):
        structure = frame.bracket_basis(a, b)
        for d in range(size):
            vector: Vector = {}
            for f, value in connection.gamma(b, d).items():
                add_to(vector, f, frame.anchor(a, value))
            for f, value in connection.gamma(a, d).items():
                add_to(vector, f, -frame.anchor(b, value))
            for e, value in connection.gamma(b, d).items():
                for f, other in connection.gamma(a, e).items():
                    add_to(vector, f, value * other)
            for e, value in connection.gamma(a, d).items():
                for f, other in connection.gamma(b, e).items():
                    add_to(vector, f, -value * other)
            for e, value in structure.items():
                for f, other in connection.gamma(e, d).items():
                    add_to(vector, f, -value * other)
            for f, value in vector.items():
                upper[(f, d, a, b)] = value
                upper[(f, d, b, a)] = -value

    lowered: Dict[Tuple[int, int, int, int], Scalar] = {}
    if geometry.symplectic is not None:
        omega = geometry.symplectic
        for (e, d, a, b), value in upper.items():
            for c in range(size):
                if omega[c, e]:
                    key = (c, d, a, b)
                    lowered[key] = lowered.get(key, ZERO) + omega[c, e] * value
        lowered = {k: v for k, v in lowered.items() if v}
    tensor = CurvatureTensor(size, upper, lowered)

    if check and geometry.symplectic is not None:
        cartan = range(geometry.num_vars, 2 * geometry.num_vars)
        violations = {k: v for k, v in tensor.symmetry_violations(cartan).items() if v}
        if violations:
            summary = ", ".join(f"{k}: {v[:2]}" for k, v in violations.items())
            raise ConsistencyError("curvature", summary)
    return tensor


def covariant_derivative_of_curvature(connection: FrameConnection, tensor: CurvatureTensor, a: int) -> Dict[Tuple[int, int, int, int], Scalar]:
    """Nonzero components of (nabla_A R)_{CD,EF} of the lowered curvature."""
    frame = connection.frame
    size = tensor.size
    result: Dict[Tuple[int, int, int, int], Scalar] = {}
    r = tensor.lowered_component
    for c in range(size):
        for d in range(size):
            for e in range(size):
                for f in range(size):
                    value = frame.anchor(a, r(c, d, e, f))
                    for g, gamma in connection.gamma(a, c).items():
                        value = value - gamma * r(g, d, e, f)
                    for g, gamma in connection.gamma(a, d).items():
                        value = value - gamma * r(c, g, e, f)
                    for g, gamma in connection.gamma(a, e).items():
                        value = value - gamma * r(c, d, g, f)
                    for g, gamma in connection.gamma(a, f).items():
                        value = value - gamma * r(c, d, e, g)
                    if value:
                        result[(c, d, e, f)] = value
    return result


@dataclass
class SymplecticData:
    """Geometry, base and symplectic connections and curvature of one r-matrix."""

    geometry: FrameGeometry
    complement: ReductiveComplement
    base: FrameConnection
    connection: FrameConnection
    curvature: CurvatureTensor


def symplectic_data(R: DynamicalR, base_point: Sequence[ScalarLike]) -> SymplecticData:
    """Run build_frame_geometry, reductive_complement, base_connection, symplectize and curvature."""
    geometry = build_frame_geometry(R)
    complement = reductive_complement(R, base_point)
    base = base_connection(R.algebra, complement.vectors, geometry.frame)
    connection = symplectize(base, geometry)
    tensor = curvature(connection, geometry)
    return SymplecticData(geometry, complement, base, connection, tensor)
