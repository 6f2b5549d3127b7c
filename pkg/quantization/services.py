import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from django.conf import settings
from rest_framework import serializers

from .dynr import (
    DynamicalR,
    GaugeElement,
    TangentAlgebroid,
    cdybe_residual,
    gauge_transform,
    lambda_self_bracket,
    leafwise_obstruction,
    rank_flags,
    restrict_to_g1,
    zero_weight_residual,
)
from .enveloping import PBWAlgebra, UEATensor, parse_pbw
from .exceptions import (
    DegreeError,
    ExpressionError,
    InvalidAlgebraError,
    SchemaError,
    WeylCurvatureError,
)
from .fedosov import FedosovData, WeylCaps, fedosov_data, solve_gamma, star, star_operator
from .geom import (
    FrameForm,
    base_connection,
    build_frame_geometry,
    connection_table_violations,
    covariant_derivative_of_curvature,
    curvature,
    reductive_complement,
    symplectic_violations,
    symplectize,
)
from .jets import JetSpace, parse_jet
from .liealg import (
    LieAlgebra,
    MultiVector,
    relative_cochain_basis,
    relative_cohomology_dim,
    relative_differential,
    validate_lie_algebra,
)
from .models import ModelRun
from .quantize import (
    conjugation_residuals,
    equivalence_transform,
    extract_F,
    extract_F_by_pairing,
    operator_star,
    qdybe_residual,
    quantization_check,
    r_matrix_from_twist,
    series_difference,
    theta_cocycle_residual,
)
from .reports import Report
from .serializers import FormEntrySerializer, ModelFileSerializer
from .symexpr import Scalar, parse_scalar

logger = logging.getLogger(__name__)

COMMANDS = (
    "check",
    "cohomology",
    "geometry",
    "quantize",
    "star",
    "extract-f",
    "residuals",
    "gauge",
    "equivalence",
)


def engine_setting(name: str) -> Any:
    return settings.RMATRIX[name]


@dataclass
class ModelFile:
    """
    A loaded and validated model.

    Attributes:
        name: Model name
        algebra: The Lie algebra g with its Cartan part
        dynamical: The candidate r-matrix r(l)
        weyl_curvature: omega_1, omega_2, ... in the coframe of M
        gauge: Optional gauge element for the gauge command
        base_point: Optional base point l0
        source: The validated input dict
    """

    name: str
    algebra: LieAlgebra
    dynamical: DynamicalR
    weyl_curvature: List[FrameForm] = field(default_factory=list)
    gauge: Optional[GaugeElement] = None
    base_point: Optional[List[Scalar]] = None
    source: Dict[str, Any] = field(default_factory=dict, repr=False)

    def resolved_base_point(self) -> List[Scalar]:
        """The declared base point, or l_i = 1 for every variable."""
        if self.base_point is not None:
            return list(self.base_point)
        width = max(1, self.algebra.cartan_dim)
        return [Scalar.from_value(1, width) for _ in range(self.algebra.cartan_dim)]

    def __str__(self):
        return f"{self.name} (dim {self.algebra.dim}, cartan {self.algebra.cartan_dim})"


class WeylCurvatureFileSerializer(serializers.Serializer):
    """A separate file of Weyl curvature terms, one entry list per hbar order."""

    weyl_curvature = serializers.ListField(child=FormEntrySerializer(many=True))


class ModelLoader:
    """
    Reads model files into validated objects and writes them back in canonical form.
    """

    @staticmethod
    def load(path) -> ModelFile:
        """
        Load a JSON model file.

        Args:
            path: Path to a UTF-8 JSON file

        Returns:
            ModelFile: Parsed and validated model

        Raises:
            SchemaError: If the file is missing, not JSON or does not match the schema
            InvalidAlgebraError: If the structure constants fail the Lie algebra axioms
        """
        data = ModelLoader._read_json(path)
        if not isinstance(data, dict):
            raise SchemaError("", "model file must contain a JSON object")
        return ModelLoader.load_dict(data)

    @staticmethod
    def load_dict(data: Dict[str, Any]) -> ModelFile:
        """
        Validate and parse a model given as a dict.

        Raises:
            SchemaError: On a schema violation or an unparsable scalar (field path reported)
            InvalidAlgebraError: If the structure constants fail the Lie algebra axioms
        """
        serializer = ModelFileSerializer(data=data)
        if not serializer.is_valid():
            raise SchemaError.from_nested(serializer.errors)
        validated = serializer.validated_data
        num_vars = validated["cartan_dim"]
        parse = ModelLoader._scalar_parser(num_vars)

        entries = [
            (entry["i"], entry["j"], entry["k"], parse(entry["c"], f"brackets[{n}].c"))
            for n, entry in enumerate(validated["brackets"])
        ]
        algebra = LieAlgebra.from_entries(validated["basis"], num_vars, entries, validated["name"])
        diagnostics = validate_lie_algebra(algebra)
        if not diagnostics.is_valid:
            raise InvalidAlgebraError(
                f"structure constants of {validated['name']} are not a Lie algebra with abelian Cartan part",
                diagnostics.to_dict(),
            )

        r = MultiVector.zero(algebra, 2)
        for n, entry in enumerate(validated["r"]):
            value = parse(entry["coeff"], f"r[{n}].coeff")
            r = r + MultiVector.basis(algebra, entry["i"], entry["j"], coefficient=value)
        dynamical = DynamicalR(algebra, r)

        weyl_curvature = ModelLoader._forms(algebra, validated["weyl_curvature"], parse, "weyl_curvature")

        gauge = None
        if validated.get("gauge"):
            log: Dict[int, Scalar] = {}
            for n, entry in enumerate(validated["gauge"]["log"]):
                value = parse(entry["coeff"], f"gauge.log[{n}].coeff")
                log[entry["a"]] = log.get(entry["a"], Scalar.from_value(0)) + value
            gauge = GaugeElement({a: v for a, v in log.items() if v}, validated["gauge"].get("nilpotency"))

        base_point = None
        if validated.get("base_point") is not None:
            base_point = [
                parse(text, f"base_point[{n}]") for n, text in enumerate(validated["base_point"])
            ]

        model = ModelFile(
            name=validated["name"],
            algebra=algebra,
            dynamical=dynamical,
            weyl_curvature=weyl_curvature,
            gauge=gauge,
            base_point=base_point,
            source=dict(validated),
        )
        logger.info(f"Loaded model {model}")
        return model

    @staticmethod
    def load_weyl_curvature(path, model: ModelFile) -> List[FrameForm]:
        """
        Load Weyl curvature terms from a separate file.

        The file holds either a list (one entry list per hbar order) or an
        object with a ``weyl_curvature`` key.

        Raises:
            SchemaError: On a schema violation or an index outside the frame
        """
        data = ModelLoader._read_json(path)
        if isinstance(data, list):
            data = {"weyl_curvature": data}
        serializer = WeylCurvatureFileSerializer(data=data)
        if not serializer.is_valid():
            raise SchemaError.from_nested(serializer.errors)
        size = model.algebra.cartan_dim + model.algebra.dim
        for order, entries in enumerate(serializer.validated_data["weyl_curvature"]):
            for n, entry in enumerate(entries):
                for name in ("A", "B"):
                    if entry[name] >= size:
                        raise SchemaError(
                            f"weyl_curvature[{order}][{n}].{name}",
                            f"index {entry[name]} outside 0..{size - 1}",
                        )
        parse = ModelLoader._scalar_parser(model.algebra.cartan_dim)
        return ModelLoader._forms(
            model.algebra, serializer.validated_data["weyl_curvature"], parse, "weyl_curvature"
        )

    @staticmethod
    def parse_base_point(text: str, model: ModelFile) -> List[Scalar]:
        """
        Parse a comma-separated base point such as ``1,1/2``.

        Raises:
            SchemaError: If the number of coordinates is wrong or a coordinate does not parse
        """
        parts = [part.strip() for part in text.split(",")] if text.strip() else []
        expected = model.algebra.cartan_dim
        if len(parts) != expected:
            raise SchemaError("base_point", f"expected {expected} coordinates, got {len(parts)}")
        parse = ModelLoader._scalar_parser(expected)
        return [parse(part, f"base_point[{n}]") for n, part in enumerate(parts)]

    @staticmethod
    def serialize(model: ModelFile) -> Dict[str, Any]:
        """
        Canonical dict of a model: sorted entries with i < j and canonical scalar strings.
        """
        algebra = model.algebra
        return {
            "name": model.name,
            "dim": algebra.dim,
            "cartan_dim": algebra.cartan_dim,
            "basis": list(algebra.labels),
            "brackets": [
                {"i": i, "j": j, "k": k, "c": value.canonical()}
                for i, j, k, value in algebra.canonical_entries()
            ],
            "r": [
                {"i": i, "j": j, "coeff": value.canonical()}
                for (i, j), value in sorted(model.dynamical.r.items())
            ],
            "weyl_curvature": [
                [{"A": a, "B": b, "coeff": value.canonical()} for (a, b), value in sorted(form.items())]
                for form in model.weyl_curvature
            ],
            "gauge": model.gauge.to_dict() if model.gauge else None,
            "base_point": [x.canonical() for x in model.base_point] if model.base_point is not None else None,
        }

    @staticmethod
    def _read_json(path) -> Any:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise SchemaError("", f"cannot read {path}: {exc}") from exc
        except UnicodeDecodeError as exc:
            raise SchemaError("", f"{path} is not UTF-8: {exc}") from exc
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError("", f"{path} is not valid JSON: {exc}") from exc

    @staticmethod
    def _scalar_parser(num_vars: int) -> Callable[[str, str], Scalar]:
        def parse(text: str, path: str) -> Scalar:
            try:
                return parse_scalar(text, num_vars)
            except ExpressionError as exc:
                raise SchemaError(path, str(exc)) from exc

        return parse

    @staticmethod
    def _forms(algebra: LieAlgebra, orders, parse, prefix: str) -> List[FrameForm]:
        frame = TangentAlgebroid(algebra)
        forms = []
        for order, entries in enumerate(orders):
            coefficients: Dict[Tuple[int, int], Scalar] = {}
            for n, entry in enumerate(entries):
                if entry["A"] == entry["B"]:
                    raise SchemaError(f"{prefix}[{order}][{n}]", "form entry needs A != B")
                value = parse(entry["coeff"], f"{prefix}[{order}][{n}].coeff")
                key = (entry["A"], entry["B"])
                coefficients[key] = coefficients.get(key, Scalar.from_value(0)) + value
            forms.append(FrameForm(frame, 2, coefficients))
        return forms


def load_model(path) -> ModelFile:
    """Load and validate a model file; see ModelLoader.load."""
    return ModelLoader.load(path)


@dataclass
class PreparedModel:
    """The r-matrix actually quantized and its solved Fedosov data."""

    dynamical: DynamicalR
    data: FedosovData
    restricted: bool
    base_point: List[Scalar]


class QuantizationPipeline:
    """
    Runs one command of the engine on a model and collects a Report.

    Caps and jet degrees are resolved from settings.RMATRIX here; the core
    modules only ever receive them as arguments.
    """

    @staticmethod
    def caps_for(order: int) -> WeylCaps:
        return WeylCaps.for_order(
            order,
            engine_setting("HBAR_CAP_SLACK"),
            engine_setting("DEGREE_CAP_SLACK"),
        )

    @staticmethod
    def jet_degree(order: int) -> int:
        return 2 * order + engine_setting("JET_DEGREE_SLACK")

    @staticmethod
    def run(command: str, model: ModelFile, **options) -> Report:
        """
        Run a command and time it.

        Args:
            command: One of COMMANDS
            model: The loaded model
            **options: Command options (order, degree, f, g, t, base_point, weyl_curvature, pairing)

        Returns:
            Report: Checks and results; exit status 0 iff every check passed

        Raises:
            DegreeError: If the command is unknown
            RMatrixError: Any engine error, unchanged
        """
        handlers = {
            "check": QuantizationPipeline.check,
            "cohomology": QuantizationPipeline.cohomology,
            "geometry": QuantizationPipeline.geometry,
            "quantize": QuantizationPipeline.quantize,
            "star": QuantizationPipeline.star,
            "extract-f": QuantizationPipeline.extract_f,
            "residuals": QuantizationPipeline.residuals,
            "gauge": QuantizationPipeline.gauge,
            "equivalence": QuantizationPipeline.equivalence,
        }
        if command not in handlers:
            raise DegreeError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
        report = Report(command=command, model=model.name)
        start = time.perf_counter()
        handlers[command](model, report, **{k: v for k, v in options.items() if v is not None})
        report.runtime_ms = int((time.perf_counter() - start) * 1000)
        logger.info(
            f"{command} on {model.name}: {'pass' if report.passed else 'fail'} in {report.runtime_ms}ms"
        )
        return report

    # Classical checks

    @staticmethod
    def check(model: ModelFile, report: Report, **options) -> Report:
        R = model.dynamical
        report.add_residual("cdybe", cdybe_residual(R))
        report.add_residual("zero_weight", zero_weight_residual(R))
        report.add_residual("lambda_self_bracket", lambda_self_bracket(R))
        if report.passed:
            flags = rank_flags(R)
            report.add_result("rank", flags.to_dict())
            logger.info(f"rank of {model.name}: {flags.rank}, splittable {flags.splittable}")
        try:
            report.add_result("leafwise_obstruction", leafwise_obstruction(R))
        except DegreeError:
            pass
        report.add_result("r", R.to_dict())
        return report

    @staticmethod
    def cohomology(model: ModelFile, report: Report, degree: int = 2, **options) -> Report:
        g = model.algebra
        dims = relative_cohomology_dim(g, degree)
        report.add_result("cohomology", dims.to_dict())
        top = g.dim - g.cartan_dim
        if 1 <= degree < top:
            square = (
                relative_differential(g, degree)
                @ relative_differential(g, degree - 1)
                @ relative_cochain_basis(g, degree - 1)
            )
            report.add_check("d_squared", square.is_zero())
        return report

    @staticmethod
    def prepare_dynamical(model: ModelFile, base_point: Optional[Sequence[Scalar]] = None) -> Tuple[DynamicalR, bool, List[Scalar]]:
        """
        The nondegenerate r-matrix to work with: r itself, or its restriction
        to g1 when r is degenerate and splittable.

        Raises:
            NotAnRMatrixError: If r is not a triangular dynamical r-matrix
            NotSplittableError: If r is degenerate and not splittable
        """
        point = list(base_point) if base_point is not None else model.resolved_base_point()
        R = model.dynamical
        if rank_flags(R).nondegenerate:
            return R, False, point
        logger.info(f"{model.name} is degenerate; restricting to g1 at {[str(x) for x in point]}")
        return restrict_to_g1(R, point), True, point

    @staticmethod
    def prepare(
        model: ModelFile,
        order: int,
        base_point: Optional[Sequence[Scalar]] = None,
        weyl_curvature: Optional[List[FrameForm]] = None,
    ) -> PreparedModel:
        """
        Build and solve the Fedosov data for quantization to order K.

        Raises:
            WeylCurvatureError: If Weyl curvature terms are given for a model that had to be restricted
        """
        R, restricted, point = QuantizationPipeline.prepare_dynamical(model, base_point)
        forms = model.weyl_curvature if weyl_curvature is None else weyl_curvature
        if restricted and forms:
            raise WeylCurvatureError("Weyl curvature terms refer to the frame of the unrestricted algebra")
        start = time.perf_counter()
        data = fedosov_data(R, point, QuantizationPipeline.caps_for(order), forms)
        solve_gamma(data)
        logger.info(
            f"Fedosov connection for {model.name} at caps {data.caps.to_dict()} "
            f"in {int((time.perf_counter() - start) * 1000)}ms"
        )
        return PreparedModel(R, data, restricted, point)

    @staticmethod
    def geometry(model: ModelFile, report: Report, base_point=None, **options) -> Report:
        R, restricted, point = QuantizationPipeline.prepare_dynamical(model, base_point)
        geometry = build_frame_geometry(R)
        complement = reductive_complement(R, point)
        base = base_connection(R.algebra, complement.vectors, geometry.frame)
        connection = symplectize(base, geometry)
        tensor = curvature(connection, geometry, check=False)
        cartan = range(geometry.num_vars, 2 * geometry.num_vars)

        report.add_residual("symplectic_form", symplectic_violations(geometry))
        report.add_residual("torsion_free", connection.torsion_violations())
        report.add_residual("symplectic_connection", connection.symplectic_violations(geometry))
        report.add_residual("cartan_parallel", connection.cartan_parallel_violations(geometry))
        report.add_residual("connection_table", connection_table_violations(connection, geometry))
        report.add_residual("curvature_symmetries", tensor.symmetry_violations(cartan))
        report.add_residual(
            "curvature_cartan_invariant",
            {
                geometry.labels[a]: covariant_derivative_of_curvature(connection, tensor, a)
                for a in cartan
            },
        )
        report.add_result("restricted", restricted)
        report.add_result("base_point", [x.canonical() for x in point])
        report.add_result("complement", complement.to_dict())
        report.add_result("connection", connection.to_dict())
        report.add_result("curvature", tensor.to_dict(geometry.labels))
        return report

    # Quantization

    @staticmethod
    def quantize(
        model: ModelFile,
        report: Report,
        order: Optional[int] = None,
        base_point=None,
        weyl_curvature=None,
        **options,
    ) -> Report:
        order = engine_setting("DEFAULT_HBAR_ORDER") if order is None else order
        prepared = QuantizationPipeline.prepare(model, order, base_point, weyl_curvature)
        report.caps = prepared.data.caps.to_dict()
        F = extract_F(prepared.data, order)
        QuantizationPipeline._add_twist_checks(report, F, prepared.dynamical, order)
        first = F.order(1)
        report.add_result("restricted", prepared.restricted)
        report.add_result("gamma_terms", len(prepared.data.gamma))
        report.add_result("F", F)
        report.add_result("F1_antisymmetric", first - first.flip())
        report.add_result("r", prepared.dynamical.to_dict())
        return report

    @staticmethod
    def star(
        model: ModelFile,
        report: Report,
        f: str = "",
        g: str = "",
        order: Optional[int] = None,
        base_point=None,
        weyl_curvature=None,
        **options,
    ) -> Report:
        if not f or not g:
            raise SchemaError("f" if not f else "g", "star needs both --f and --g jet expressions")
        order = engine_setting("DEFAULT_HBAR_ORDER") if order is None else order
        prepared = QuantizationPipeline.prepare(model, order, base_point, weyl_curvature)
        report.caps = prepared.data.caps.to_dict()
        space = JetSpace(prepared.dynamical.algebra, QuantizationPipeline.jet_degree(order))
        left = QuantizationPipeline._parse_jet(f, space, "f")
        right = QuantizationPipeline._parse_jet(g, space, "g")
        valid = space.degree - order

        product = star(left, right, prepared.data, order)
        operator = star_operator(prepared.data, order)
        by_operator = operator_star(operator, left, right, order)
        mismatch = {
            k: v.truncate(valid).format()
            for k, v in series_difference(product, by_operator).items()
            if v.truncate(valid)
        }
        report.add_residual("operator_agreement", mismatch)
        report.add_result("jet_degree", space.degree)
        report.add_result("valid_degree", valid)
        report.add_result(
            "star",
            {k: product[k].truncate(valid).format() for k in sorted(product)},
        )
        return report

    @staticmethod
    def extract_f(
        model: ModelFile,
        report: Report,
        order: Optional[int] = None,
        base_point=None,
        weyl_curvature=None,
        pairing: bool = False,
        **options,
    ) -> Report:
        order = engine_setting("DEFAULT_HBAR_ORDER") if order is None else order
        prepared = QuantizationPipeline.prepare(model, order, base_point, weyl_curvature)
        report.caps = prepared.data.caps.to_dict()
        F = extract_F(prepared.data, order)
        report.add_check("leading_term", F.leading().is_one())
        if pairing:
            by_pairing = extract_F_by_pairing(prepared.data, order)
            report.add_residual("pairing_agreement", F - by_pairing)
        report.add_result("F", F)
        return report

    @staticmethod
    def residuals(
        model: ModelFile,
        report: Report,
        order: Optional[int] = None,
        base_point=None,
        weyl_curvature=None,
        **options,
    ) -> Report:
        order = engine_setting("DEFAULT_HBAR_ORDER") if order is None else order
        prepared = QuantizationPipeline.prepare(model, order, base_point, weyl_curvature)
        report.caps = prepared.data.caps.to_dict()
        F = extract_F(prepared.data, order)
        QuantizationPipeline._add_twist_checks(report, F, prepared.dynamical, order)
        pbw = F.pbw
        R_first = r_matrix_from_twist(F).order(1) if order >= 1 else UEATensor.zero(pbw, 2, 0)
        report.add_residual(
            "r_matrix_first_order",
            R_first - UEATensor.from_bivector(pbw, prepared.dynamical.r),
        )
        report.add_residual(
            "theta_cocycle",
            theta_cocycle_residual(PBWAlgebra(prepared.dynamical.algebroid()), order),
        )
        return report

    @staticmethod
    def _add_twist_checks(report: Report, F: UEATensor, R: DynamicalR, order: int) -> None:
        residuals = quantization_check(F, R, order)
        objects = {
            "weight": residuals.weight,
            "normal": [residuals.normal_left, residuals.normal_right],
            "quantization": residuals.quantization,
            "shifted_cocycle": residuals.cocycle,
        }
        for name, passed in residuals.checks.items():
            report.add_check(name, passed, None if passed else objects[name])
        report.add_residual("qdybe", qdybe_residual(F, order))

    # Equivalences

    @staticmethod
    def gauge(model: ModelFile, report: Report, **options) -> Report:
        if model.gauge is None:
            raise SchemaError("gauge", "model has no gauge element")
        R = model.dynamical
        transformed = gauge_transform(R, model.gauge, engine_setting("GAUGE_SERIES_LIMIT"))
        report.add_residual("cdybe", cdybe_residual(transformed))
        report.add_residual("zero_weight", zero_weight_residual(transformed))
        if not cdybe_residual(R) and not any(zero_weight_residual(R)):
            before = rank_flags(R)
            after = rank_flags(transformed)
            report.add_check(
                "rank_preserved",
                before.rank == after.rank,
                detail=f"rank {before.rank} -> {after.rank}",
            )
        report.add_result("gauge", model.gauge.to_dict())
        report.add_result("r_g", transformed.to_dict())
        return report

    @staticmethod
    def equivalence(
        model: ModelFile,
        report: Report,
        t: str = "",
        order: Optional[int] = None,
        base_point=None,
        weyl_curvature=None,
        **options,
    ) -> Report:
        if not t:
            raise SchemaError("t", "equivalence needs a --t expression")
        order = engine_setting("DEFAULT_HBAR_ORDER") if order is None else order
        prepared = QuantizationPipeline.prepare(model, order, base_point, weyl_curvature)
        report.caps = prepared.data.caps.to_dict()
        F = extract_F(prepared.data, order)
        try:
            T = parse_pbw(t, F.pbw, order)
        except ExpressionError as exc:
            raise SchemaError("t", str(exc)) from exc
        E = equivalence_transform(F, T, order, dynamical=prepared.dynamical)
        QuantizationPipeline._add_twist_checks(report, E, prepared.dynamical, order)
        report.add_residual("conjugation", conjugation_residuals(T))
        report.add_result("T", T)
        report.add_result("E", E)
        return report

    @staticmethod
    def _parse_jet(text: str, space: JetSpace, name: str):
        try:
            return parse_jet(text, space)
        except ExpressionError as exc:
            raise SchemaError(name, str(exc)) from exc


class ReportBuilder:
    """
    Renders reports as text lines and records runs.
    """

    @staticmethod
    def text_lines(report: Report, verbose: bool = False) -> List[Tuple[str, str]]:
        """
        (style, line) pairs for a text report; style is one of
        "title", "section", "success", "error" or "" for plain text.
        """
        lines: List[Tuple[str, str]] = [("title", f"{report.command} on {report.model}")]
        if report.caps:
            lines.append(("", f"caps: hbar <= {report.caps['hbar']}, degree <= {report.caps['degree']}"))
        lines.append(("section", "Checks"))
        for check in report.checks:
            style = "success" if check.passed else "error"
            marker = "✓" if check.passed else "✗"
            detail = f" ({check.detail})" if check.detail else ""
            lines.append((style, f"{marker} {check.name}{detail}"))
            if not check.passed and check.residual is not None:
                lines.append(("", f"    residual: {json.dumps(check.to_dict()['residual'], sort_keys=True)}"))
        if report.results:
            lines.append(("section", "Results"))
            for section in sorted(report.results):
                value = report.results[section]
                if isinstance(value, dict) and (verbose or len(value) <= 12):
                    lines.append(("", f"{section}:"))
                    for key in sorted(value, key=str):
                        lines.append(("", f"  {key}: {value[key]}"))
                elif isinstance(value, dict):
                    lines.append(("", f"{section}: {len(value)} entries (use --json for all)"))
                else:
                    lines.append(("", f"{section}: {value}"))
        failed = [check.name for check in report.checks if not check.passed]
        if failed:
            lines.append(("error", f"FAILED: {', '.join(failed)}"))
        else:
            lines.append(("success", f"PASSED: {len(report.checks)} checks"))
        return lines

    @staticmethod
    def write_json(report: Report, path) -> None:
        indent = engine_setting("REPORT_INDENT")
        Path(path).write_text(report.to_json(indent=indent) + "\n", encoding="utf-8")
        logger.info(f"Wrote report for {report.command} on {report.model} to {path}")

    @staticmethod
    def record(report: Report, options: Optional[Dict[str, Any]] = None) -> ModelRun:
        """
        Persist a run as a ModelRun.

        Args:
            report: The finished report
            options: Command options as given on the command line

        Returns:
            ModelRun: The created record
        """
        clean = {
            key: value for key, value in (options or {}).items()
            if isinstance(value, (str, int, bool)) and value is not None
        }
        run = ModelRun.objects.create(
            model_name=report.model,
            command=report.command,
            options=clean,
            caps=dict(report.caps),
            passed=report.passed,
            report=report.to_dict(include_timing=False),
            runtime_ms=report.runtime_ms,
        )
        logger.info(f"Recorded run {run.id} ({report.command} on {report.model})")
        return run
