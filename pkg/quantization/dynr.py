"""
Triangular dynamical r-matrices: the classical dynamical Yang-Baxter
residual, the zero-weight residual, the bracket [Lambda, Lambda] on the
tangent algebroid, rank and splittability, restriction to the subalgebra
where r is nondegenerate, gauge transformations and the delta_r complex.

The dynamical variables are l1..l<cartan_dim>; the Cartan basis vector h_i
(0-based index i) is paired with the variable l<i+1>.
"""

import logging
from dataclasses import dataclass, field
from math import factorial
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .exceptions import (
    ConsistencyError,
    DegreeError,
    GaugeError,
    NotAnRMatrixError,
    NotSplittableError,
    PoleError,
    SingularPointError,
    WeightError,
)
from .liealg import (
    LieAlgebra,
    MultiVector,
    Vector,
    add_to,
    adjoint_action,
    schouten_bracket,
    wedge,
)
from .symexpr import ONE, ZERO, Scalar, ScalarLike, ScalarMatrix

logger = logging.getLogger(__name__)

DEFAULT_GAUGE_SERIES_LIMIT = 16


class TangentAlgebroid:
    """
    The algebroid A = T(h*) x g with frame d/dl1..d/dl<l> followed by the
    basis of g.

    Frame index A < l is the coordinate derivative d/dl<A+1>; frame index
    l + a is the algebra basis vector a. Coordinate derivatives commute with
    everything and act on coefficients; algebra vectors bracket through the
    structure constants and do not differentiate coefficients.
    """

    def __init__(self, algebra: LieAlgebra):
        self.algebra = algebra
        self.offset = algebra.cartan_dim
        self.labels = tuple(f"d/dl{i + 1}" for i in range(self.offset)) + algebra.labels

    @property
    def dim(self) -> int:
        return self.offset + self.algebra.dim

    def bracket_basis(self, a: int, b: int) -> Vector:
        if a < self.offset or b < self.offset:
            return {}
        image = self.algebra.bracket_basis(a - self.offset, b - self.offset)
        return {c + self.offset: v for c, v in image.items()}

    def anchor(self, index: int, value: Scalar) -> Scalar:
        if index < self.offset:
            return value.diff(index + 1)
        return ZERO

    def embed(self, u: MultiVector) -> MultiVector:
        """A multivector on g viewed on the algebroid."""
        return u.on_algebra(self, self.offset)

    def __eq__(self, other):
        return isinstance(other, TangentAlgebroid) and other.algebra == self.algebra

    def __hash__(self):
        return hash(("algebroid", self.algebra))


# Sections of the exterior algebra of the tangent algebroid are multivectors
# over the algebroid frame.
AlgebroidVector = MultiVector


@dataclass
class DynamicalR:
    """
    A candidate triangular dynamical r-matrix r(l) in the exterior square of g.

    Attributes:
        algebra: The Lie algebra g with Cartan part h
        r: Degree-2 multivector with Scalar coefficients
    """

    algebra: LieAlgebra
    r: MultiVector

    def __post_init__(self):
        if self.r.degree != 2:
            raise DegreeError(f"r must have degree 2, got {self.r.degree}")
        if self.r.algebra is not self.algebra and self.r.algebra != self.algebra:
            raise DegreeError("r does not live on the given algebra")

    @property
    def num_vars(self) -> int:
        return self.algebra.cartan_dim

    @classmethod
    def zero(cls, algebra: LieAlgebra) -> "DynamicalR":
        return cls(algebra, MultiVector.zero(algebra, 2))

    def cartan(self, i: int) -> MultiVector:
        return MultiVector.basis(self.algebra, i)

    def algebroid(self) -> TangentAlgebroid:
        return TangentAlgebroid(self.algebra)

    def to_dict(self) -> Dict[str, str]:
        return self.r.to_dict()


def _dynamical_term(algebra: LieAlgebra, tau: MultiVector) -> MultiVector:
    """sum_i h_i ^ d tau / d l<i+1>."""
    result = MultiVector.zero(algebra, tau.degree + 1)
    for i in range(algebra.cartan_dim):
        derivative = tau.diff(i + 1)
        if derivative:
            result = result + wedge(MultiVector.basis(algebra, i), derivative)
    return result


def cdybe_residual(R: DynamicalR) -> MultiVector:
    """
    sum_i h_i ^ dr/dl_i + 1/2 [r, r]; zero iff r solves the classical
    dynamical Yang-Baxter equation.
    """
    half_bracket = schouten_bracket(R.r, R.r).scale(Scalar.coerce(1) / 2)
    residual = _dynamical_term(R.algebra, R.r) + half_bracket
    logger.debug(f"CDYBE residual: {residual.format()}")
    return residual


def zero_weight_residual(R: DynamicalR) -> List[MultiVector]:
    """[h_i, r(l)] for every Cartan basis vector; all zero iff r has zero weight."""
    return [schouten_bracket(R.cartan(i), R.r) for i in range(R.algebra.cartan_dim)]


def lambda_bivector(R: DynamicalR) -> MultiVector:
    """Lambda = sum_i h_i ^ d/dl_i + r on the tangent algebroid."""
    algebroid = R.algebroid()
    l = algebroid.offset
    coefficients = {(i, l + i): -ONE for i in range(l)}
    return MultiVector(algebroid, 2, coefficients) + algebroid.embed(R.r)


def lambda_self_bracket(R: DynamicalR) -> MultiVector:
    """
    The algebroid Schouten bracket [Lambda, Lambda].

    It is computed directly on the algebroid and compared against
    2 * CDYBE residual + 2 * sum_i [r, h_i] ^ d/dl_i built from the simpler
    residuals.

    Raises:
        ConsistencyError: If the two computations disagree
    """
    algebroid = R.algebroid()
    lam = lambda_bivector(R)
    bracket = schouten_bracket(lam, lam)

    expected = algebroid.embed(cdybe_residual(R)).scale(2)
    for i, weight in enumerate(zero_weight_residual(R)):
        if weight:
            term = wedge(algebroid.embed(-weight), MultiVector.basis(algebroid, i))
            expected = expected + term.scale(2)
    if bracket != expected:
        raise ConsistencyError(
            "lambda_self_bracket",
            f"algebroid bracket {bracket.format()} differs from {expected.format()}",
        )
    return bracket


def is_r_matrix(R: DynamicalR) -> bool:
    return cdybe_residual(R).is_zero() and all(w.is_zero() for w in zero_weight_residual(R))


def require_r_matrix(R: DynamicalR) -> None:
    """
    Raises:
        NotAnRMatrixError: If the CDYBE or zero-weight residual is nonzero
    """
    residual = cdybe_residual(R)
    if residual:
        raise NotAnRMatrixError(f"CDYBE residual is nonzero: {residual.format()}")
    for i, weight in enumerate(zero_weight_residual(R)):
        if weight:
            raise NotAnRMatrixError(
                f"[{R.algebra.labels[i]}, r] is nonzero: {weight.format()}"
            )


@dataclass
class RankFlags:
    """
    Rank data of a triangular dynamical r-matrix.

    Attributes:
        rank: Field rank of the complement block c
        nondegenerate: rank == dim g - dim h
        splittable: Every b-row lies in the row span of c
        a, b, c: Blocks of r in the decomposition g = h + m
    """

    rank: int
    nondegenerate: bool
    splittable: bool
    a: ScalarMatrix = field(repr=False, default=None)
    b: ScalarMatrix = field(repr=False, default=None)
    c: ScalarMatrix = field(repr=False, default=None)

    def to_dict(self) -> Dict:
        return {
            "rank": self.rank,
            "nondegenerate": self.nondegenerate,
            "splittable": self.splittable,
            "a": [[str(x) for x in row] for row in self.a.entries] if self.a else [],
            "b": [[str(x) for x in row] for row in self.b.entries] if self.b else [],
            "c": [[str(x) for x in row] for row in self.c.entries] if self.c else [],
        }


def decompose(R: DynamicalR) -> Tuple[ScalarMatrix, ScalarMatrix, ScalarMatrix]:
    """
    The blocks a (h x h), b (h x m) and c (m x m) of r: entry (i, j) is the
    coefficient of x_i^x_j, so a and c are antisymmetric.
    """
    g = R.algebra
    l, n = g.cartan_dim, g.dim
    m = n - l

    def block(rows: range, cols: range) -> List[List[Scalar]]:
        return [[R.r.coefficient(i, j) if i != j else ZERO for j in cols] for i in rows]

    a = block(range(l), range(l))
    b = block(range(l), range(l, n))
    c = block(range(l, n), range(l, n))
    return (
        ScalarMatrix.from_rows(a) if l else ScalarMatrix(0, 0, ()),
        ScalarMatrix.from_rows(b) if l and m else ScalarMatrix(l, 0, tuple(() for _ in range(l))),
        ScalarMatrix.from_rows(c) if m else ScalarMatrix(0, 0, ()),
    )


def rank_flags(R: DynamicalR) -> RankFlags:
    """
    Rank, nondegeneracy and splittability over the rational-function field.

    Raises:
        NotAnRMatrixError: If r does not satisfy CDYBE and zero weight
    """
    require_r_matrix(R)
    a, b, c = decompose(R)
    m = R.algebra.dim - R.algebra.cartan_dim
    rank = c.rank() if m else 0
    if b.cols == 0 or b.is_zero():
        splittable = True
    else:
        splittable = c.stack(b).rank() == rank
    flags = RankFlags(rank, rank == m, splittable, a, b, c)
    logger.debug(f"rank flags for {R.algebra.name or '?'}: {flags}")
    return flags


def sharp(R: DynamicalR, covector: Mapping[int, Scalar], r: Optional[MultiVector] = None) -> Vector:
    """r^#(xi) = r(xi, .) with x^y evaluated as x(x)y - y(x)x."""
    r = R.r if r is None else r
    result: Vector = {}
    for (a, b), value in r.items():
        xa = covector.get(a)
        xb = covector.get(b)
        if xa:
            add_to(result, b, value * xa)
        if xb:
            add_to(result, a, -value * xb)
    return result


def evaluate_at(R: DynamicalR, base_point: Sequence[ScalarLike]) -> MultiVector:
    """r(l0) as a constant multivector."""
    if len(base_point) != R.num_vars:
        raise SingularPointError(
            f"base point has {len(base_point)} coordinates, expected {R.num_vars}"
        )
    try:
        return R.r.subs(base_point)
    except PoleError as exc:
        raise SingularPointError(f"base point is a pole of r: {exc}") from exc


def _check_regular(R: DynamicalR, base_point: Sequence[ScalarLike], rank: int) -> MultiVector:
    r0 = evaluate_at(R, base_point)
    _, _, c0 = decompose(DynamicalR(R.algebra, r0))
    rank0 = c0.rank() if c0.rows else 0
    if rank0 != rank:
        raise SingularPointError(
            f"rank drops from {rank} to {rank0} at the base point; choose another point"
        )
    return r0


def lambda_subspace(R: DynamicalR, base_point: Sequence[ScalarLike]) -> List[Vector]:
    """
    Basis of the complement part of g_l0 = h + r(l0)^# h^perp in echelon form.
    """
    flags = rank_flags(R)
    r0 = _check_regular(R, base_point, flags.rank)
    g = R.algebra
    l, n = g.cartan_dim, g.dim
    images = []
    for j in range(l, n):
        image = sharp(R, {j: ONE}, r0)
        images.append([image.get(k, ZERO) for k in range(l, n)])
    if not images:
        return []
    reduced, pivots = ScalarMatrix.from_rows(images).rref()
    return [
        {l + k: value for k, value in enumerate(reduced.row(i)) if value}
        for i in range(len(pivots))
    ]


def _adapted_labels(g: LieAlgebra, vectors: Sequence[Vector]) -> List[str]:
    labels = []
    for vector in vectors:
        pivot = min(vector)
        if len(vector) == 1 and vector[pivot] == ONE:
            labels.append(g.labels[pivot])
        else:
            labels.append(g.labels[pivot] + "'")
    return labels


def express_in_basis(u: MultiVector, vectors: Sequence[Vector], target: LieAlgebra) -> Optional[MultiVector]:
    """Coordinates of a bivector of g in the wedge basis of a subspace, or None."""
    source = u.algebra
    pairs = [(p, q) for p in range(len(vectors)) for q in range(p + 1, len(vectors))]
    if not pairs:
        return MultiVector.zero(target, 2) if u.is_zero() else None
    columns = [_wedge_vectors(source, vectors[p], vectors[q]) for p, q in pairs]
    keys = sorted({key for column in columns for key in column.keys()} | set(u.keys()))
    matrix = ScalarMatrix.from_rows(
        [[column.coefficient(*key) for column in columns] for key in keys]
    )
    solution = matrix.solve([u.coefficient(*key) for key in keys])
    if solution is None:
        return None
    return MultiVector(target, 2, {pair: value for pair, value in zip(pairs, solution) if value})


def _wedge_vectors(algebra, x: Vector, y: Vector) -> MultiVector:
    return wedge(MultiVector.from_vector(algebra, x), MultiVector.from_vector(algebra, y))


def restrict_to_g1(R: DynamicalR, base_point: Sequence[ScalarLike]) -> DynamicalR:
    """
    Restrict a splittable r-matrix to g1 = h + r(l0)^# h^perp.

    Args:
        R: A splittable triangular dynamical r-matrix
        base_point: A regular rational point l0 (no pole, no rank drop)

    Returns:
        DynamicalR: r re-expressed on the subalgebra g1 in an adapted basis

    Raises:
        NotSplittableError: If r is not splittable or not valued in the exterior square of g1
        SingularPointError: If l0 is a pole or a rank-drop point
    """
    flags = rank_flags(R)
    if not flags.splittable:
        raise NotSplittableError("r is not splittable: a b-row leaves the row span of c")
    g = R.algebra
    complement = lambda_subspace(R, base_point)
    vectors: List[Vector] = [{i: ONE} for i in range(g.cartan_dim)] + complement
    labels = list(g.labels[: g.cartan_dim]) + _adapted_labels(g, complement)
    g1 = g.subalgebra(vectors, labels, g.cartan_dim, name=f"{g.name}_1" if g.name else "")
    r1 = express_in_basis(R.r, vectors, g1)
    if r1 is None:
        raise NotSplittableError("r is not valued in the exterior square of g1")
    restricted = DynamicalR(g1, r1)
    if not rank_flags(restricted).nondegenerate:
        raise ConsistencyError("restrict_to_g1", "restricted r-matrix is degenerate")
    logger.info(f"restricted {g.name or '?'} to {len(vectors)}-dimensional subalgebra {labels}")
    return restricted


# Gauge transformations


@dataclass
class GaugeElement:
    """
    g = exp(f) with f a g-valued function centralizing h and ad_f nilpotent.

    Attributes:
        log: Components of f
        nilpotency: N with (ad_f)^N = 0, or None to search
    """

    log: Dict[int, Scalar]
    nilpotency: Optional[int] = None

    def to_dict(self) -> Dict:
        return {
            "log": [{"a": a, "coeff": str(v)} for a, v in sorted(self.log.items())],
            "nilpotency": self.nilpotency,
        }


def _ad_matrix(g: LieAlgebra, f: Vector) -> ScalarMatrix:
    rows = [[ZERO] * g.dim for _ in range(g.dim)]
    for b in range(g.dim):
        for c, value in g.bracket(f, {b: ONE}).items():
            rows[c][b] = value
    return ScalarMatrix.from_rows(rows)


def validate_gauge(g: LieAlgebra, gauge: GaugeElement, limit: int = DEFAULT_GAUGE_SERIES_LIMIT) -> int:
    """
    Check that f centralizes h and that ad_f is nilpotent.

    Returns:
        int: The nilpotency order N, (ad_f)^N = 0

    Raises:
        GaugeError: If either condition fails
    """
    for i in range(g.cartan_dim):
        bracket = g.bracket({i: ONE}, gauge.log)
        if bracket:
            raise GaugeError(f"[{g.labels[i]}, f] = {bracket} is nonzero; f must centralize h")
    ad = _ad_matrix(g, gauge.log)
    power = ScalarMatrix.identity(g.dim)
    bound = gauge.nilpotency if gauge.nilpotency is not None else limit
    for order in range(bound + 1):
        if power.is_zero():
            return order
        power = power @ ad
    if gauge.nilpotency is not None:
        raise GaugeError(f"(ad_f)^{gauge.nilpotency} is nonzero")
    raise GaugeError(f"ad_f is not nilpotent within {limit} powers")


def adjoint_group_action(gauge: GaugeElement, tau: MultiVector, nilpotency: Optional[int] = None) -> MultiVector:
    """Ad_{exp f} tau = sum_k ad_f^k tau / k!, a finite sum since ad_f is nilpotent."""
    order = nilpotency if nilpotency is not None else validate_gauge(tau.algebra, gauge)
    bound = max(1, tau.degree) * max(order - 1, 0) + 1
    result = tau
    term = tau
    for k in range(1, bound + 1):
        term = adjoint_action(gauge.log, term)
        if term.is_zero():
            break
        result = result + term.scale(Scalar.coerce(1) / factorial(k))
    return result


def right_log_derivative(g: LieAlgebra, gauge: GaugeElement, i: int, nilpotency: Optional[int] = None) -> Vector:
    """(d g / d l_i) g^{-1} = sum_k (ad_f)^k (d f / d l_i) / (k+1)!."""
    order = nilpotency if nilpotency is not None else validate_gauge(g, gauge)
    derivative: Vector = {}
    for a, value in gauge.log.items():
        add_to(derivative, a, value.diff(i + 1))
    result: Vector = {}
    term = derivative
    for k in range(max(order, 1)):
        if not term:
            break
        scale = Scalar.coerce(1) / factorial(k + 1)
        for a, value in term.items():
            add_to(result, a, value * scale)
        term = g.bracket(gauge.log, term)
    return result


def gauge_transform(R: DynamicalR, gauge: GaugeElement, limit: int = DEFAULT_GAUGE_SERIES_LIMIT) -> DynamicalR:
    """
    r_g = Ad_g r - sum_i h_i ^ (d g / d l_i) g^{-1}.

    Raises:
        GaugeError: If f does not centralize h or ad_f is not nilpotent
        ConsistencyError: If r solves CDYBE but r_g does not
    """
    g = R.algebra
    order = validate_gauge(g, gauge, limit)
    result = adjoint_group_action(gauge, R.r, order)
    for i in range(g.cartan_dim):
        rho = right_log_derivative(g, gauge, i, order)
        if rho:
            result = result - wedge(MultiVector.basis(g, i), MultiVector.from_vector(g, rho))
    transformed = DynamicalR(g, result)
    if cdybe_residual(R).is_zero() and not cdybe_residual(transformed).is_zero():
        raise ConsistencyError("gauge_transform", "gauge transform broke the CDYBE")
    logger.debug(f"gauge transform: {transformed.r.format()}")
    return transformed


# The delta_r complex


def weight_residual(algebra: LieAlgebra, tau: MultiVector) -> List[MultiVector]:
    return [schouten_bracket(MultiVector.basis(algebra, i), tau) for i in range(algebra.cartan_dim)]


def delta_r(R: DynamicalR, tau: MultiVector, check_weight: bool = True) -> MultiVector:
    """
    delta_r tau = sum_i h_i ^ d tau / d l_i + [r, tau].

    Raises:
        WeightError: If check_weight is set and tau has nonzero weight
    """
    if check_weight:
        for i, weight in enumerate(weight_residual(R.algebra, tau)):
            if weight:
                raise WeightError(
                    f"cochain has nonzero weight under {R.algebra.labels[i]}: {weight.format()}"
                )
    return _dynamical_term(R.algebra, tau) + schouten_bracket(R.r, tau)


def leafwise_obstruction(R: DynamicalR) -> Scalar:
    """
    For r = f h^e on the two-dimensional algebra [h, e] = a h, the residual
    a^2 f^2 - a df/dl of the condition for an invariant torsion-free
    leafwise Poisson connection with nabla h = 0. Zero for a = 0 and for
    solutions of df/dl = a f^2.

    Raises:
        DegreeError: If R does not have this shape
    """
    g = R.algebra
    if g.dim != 2 or g.cartan_dim != 1:
        raise DegreeError("leafwise obstruction needs a 2-dimensional algebra with dim h = 1")
    if g.structure_constant(0, 1, 1):
        raise DegreeError("leafwise obstruction needs [h, e] to be a multiple of h")
    a = g.structure_constant(0, 1, 0)
    f = R.r.coefficient(0, 1)
    return a * a * f * f - a * f.diff(1)
