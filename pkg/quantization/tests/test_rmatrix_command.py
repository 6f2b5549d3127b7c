"""
Tests for the rmatrix management command.

This test module covers:
- text output and exit status of passing and failing runs
- error reporting for bad model files and options
- JSON reports and recorded runs
"""

import json
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from quantization.models import ModelRun


def run(*args, **kwargs):
    out = StringIO()
    err = StringIO()
    call_command("rmatrix", *args, stdout=out, stderr=err, **kwargs)
    return out.getvalue(), err.getvalue()


class TestCheckCommand:
    """Test the classical checks through the command line."""

    def test_passing_check(self, model_dir):
        out, _ = run("check", str(model_dir / "heisenberg.json"))
        assert "check on heisenberg" in out
        assert "=" * 50 in out
        assert "✓ cdybe" in out
        assert "✓ zero_weight" in out
        assert "✓ lambda_self_bracket" in out
        assert "PASSED: 3 checks" in out
        assert "Runtime:" in out

    def test_failing_check_exits_nonzero(self, model_dir):
        out = StringIO()
        with pytest.raises(CommandError) as exc_info:
            call_command("rmatrix", "check", str(model_dir / "heisenberg_nonsolution.json"), stdout=out)
        assert exc_info.value.returncode == 1
        assert "cdybe" in str(exc_info.value)
        assert "✗ cdybe" in out.getvalue()
        assert "FAILED" in out.getvalue()

    def test_cohomology_degree(self, model_dir):
        out, _ = run("cohomology", str(model_dir / "heisenberg.json"), "--degree", "1")
        assert "cohomology:" in out
        assert "✓ d_squared" in out

    def test_gauge(self, model_dir):
        out, _ = run("gauge", str(model_dir / "gauge_demo.json"))
        assert "✓ rank_preserved" in out


class TestQuantizeCommand:
    """Test the quantization commands at order 1."""

    def test_quantize(self, model_dir):
        out, _ = run("quantize", str(model_dir / "heisenberg.json"), "--hbar", "1")
        assert "caps: hbar <= 2, degree <= 5" in out
        assert "✓ quantization" in out
        assert "✓ shifted_cocycle" in out
        assert "✓ qdybe" in out

    def test_star(self, model_dir):
        out, _ = run("star", str(model_dir / "heisenberg.json"), "--hbar", "1", "--f", "x2", "--g", "x3")
        assert "✓ operator_agreement" in out
        assert "star:" in out

    def test_base_point_option(self, model_dir):
        out, _ = run("geometry", str(model_dir / "abelian.json"), "--base-point", "2")
        assert "base_point: ['2']" in out

    def test_weyl_curvature_option(self, model_dir):
        """Test a separate Weyl curvature file is rejected for a restricted model."""
        err = StringIO()
        with pytest.raises(CommandError):
            call_command(
                "rmatrix",
                "quantize",
                str(model_dir / "heisenberg_central_k.json"),
                "--hbar",
                "1",
                "--weyl-curvature",
                str(model_dir / "heisenberg_weyl_curvature.json"),
                stdout=StringIO(),
                stderr=err,
            )
        assert "WeylCurvatureError" in err.getvalue()


class TestCommandErrors:
    """Test engine errors become command errors with a message on stderr."""

    def test_missing_model_file(self, tmp_path):
        err = StringIO()
        with pytest.raises(CommandError) as exc_info:
            call_command("rmatrix", "check", str(tmp_path / "missing.json"), stdout=StringIO(), stderr=err)
        assert exc_info.value.returncode == 1
        assert "SchemaError" in err.getvalue()

    def test_invalid_algebra_prints_diagnostics(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text(
            json.dumps(
                {
                    "name": "broken",
                    "dim": 2,
                    "cartan_dim": 2,
                    "basis": ["h1", "h2"],
                    "brackets": [{"i": 0, "j": 1, "k": 0, "c": "1"}],
                }
            ),
            encoding="utf-8",
        )
        err = StringIO()
        with pytest.raises(CommandError):
            call_command("rmatrix", "check", str(path), stdout=StringIO(), stderr=err)
        assert "InvalidAlgebraError" in err.getvalue()
        assert "abelian" in err.getvalue()

    def test_bad_base_point(self, model_dir):
        err = StringIO()
        with pytest.raises(CommandError):
            call_command(
                "rmatrix", "geometry", str(model_dir / "heisenberg.json"), "--base-point", "1,2",
                stdout=StringIO(), stderr=err,
            )
        assert "base_point" in err.getvalue()

    def test_star_without_jets(self, model_dir):
        err = StringIO()
        with pytest.raises(CommandError):
            call_command("rmatrix", "star", str(model_dir / "heisenberg.json"), stdout=StringIO(), stderr=err)
        assert "SchemaError" in err.getvalue()


class TestReportOutput:
    """Test machine-readable reports and recorded runs."""

    def test_json_report(self, model_dir, tmp_path):
        path = tmp_path / "report.json"
        out, _ = run("check", str(model_dir / "abelian.json"), "--json", str(path))
        assert f"Report written to {path}" in out
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["command"] == "check"
        assert data["model"] == "abelian"
        assert data["passed"] is True
        assert [check["status"] for check in data["checks"]] == ["pass", "pass", "pass"]

    def test_json_report_written_before_failure(self, model_dir, tmp_path):
        path = tmp_path / "report.json"
        with pytest.raises(CommandError):
            run("check", str(model_dir / "heisenberg_nonsolution.json"), "--json", str(path))
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["passed"] is False
        assert data["checks"][0]["residual"]

    @pytest.mark.django_db
    def test_record(self, model_dir):
        out, _ = run("check", str(model_dir / "heisenberg.json"), "--record")
        run_record = ModelRun.objects.get()
        assert f"Recorded run {run_record.id}" in out
        assert run_record.model_name == "heisenberg"
        assert run_record.command == "check"
        assert run_record.passed is True
        assert run_record.options["degree"] == 2

    @pytest.mark.django_db
    def test_record_from_settings(self, model_dir, settings):
        settings.RMATRIX = {**settings.RMATRIX, "RECORD_RUNS": True}
        run("check", str(model_dir / "abelian.json"))
        assert ModelRun.objects.filter(model_name="abelian").count() == 1

    def test_no_record_by_default(self, model_dir, settings):
        settings.RMATRIX = {**settings.RMATRIX, "RECORD_RUNS": False}
        out, _ = run("check", str(model_dir / "abelian.json"))
        assert "Recorded run" not in out
