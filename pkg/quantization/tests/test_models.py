import uuid
from datetime import timedelta

import pytest
from django.utils import timezone

from quantization.models import ModelRun


@pytest.fixture
def failed_run():
    return ModelRun.objects.create(
        model_name="heisenberg_nonsolution",
        command="check",
        options={"model": "heisenberg_nonsolution.json"},
        passed=False,
        report={
            "checks": [
                {"name": "cdybe", "status": "fail", "residual": {"e1^e2^h": "1"}},
                {"name": "zero_weight", "status": "pass"},
                {"name": "lambda_self_bracket", "status": "fail"},
            ]
        },
        runtime_ms=12,
    )


@pytest.mark.django_db
def test_run_creation(failed_run):
    """Test a run is stored with a UUID primary key and its JSON fields."""
    assert isinstance(failed_run.id, uuid.UUID)
    assert failed_run.options == {"model": "heisenberg_nonsolution.json"}
    assert failed_run.caps == {}
    assert failed_run.created_at is not None


@pytest.mark.django_db
def test_run_str_representation(failed_run):
    assert str(failed_run) == "check on heisenberg_nonsolution (fail)"
    assert repr(failed_run) == "<ModelRun: check heisenberg_nonsolution passed=False>"


@pytest.mark.django_db
def test_failed_checks(failed_run):
    """Test failed check names are read from the stored report."""
    assert failed_run.failed_checks == ["cdybe", "lambda_self_bracket"]


@pytest.mark.django_db
def test_failed_checks_of_empty_report():
    run = ModelRun.objects.create(model_name="abelian", command="check", passed=True)
    assert run.failed_checks == []


@pytest.mark.django_db
def test_runs_are_ordered_newest_first(failed_run):
    ModelRun.objects.filter(pk=failed_run.pk).update(created_at=timezone.now() - timedelta(minutes=5))
    later = ModelRun.objects.create(model_name="abelian", command="quantize", passed=True)
    assert list(ModelRun.objects.all()) == [later, failed_run]
