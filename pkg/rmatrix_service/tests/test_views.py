import json
from unittest.mock import patch

import pytest
from django.test import Client
from django.urls import reverse

from quantization.models import ModelRun


@pytest.mark.django_db
def test_health_check_success():
    """Test health check reports a connected database and the run count."""
    ModelRun.objects.create(model_name="heisenberg", command="check", passed=True)
    client = Client()
    response = client.get(reverse("health_check"))

    assert response.status_code == 200
    assert response["Content-Type"] == "application/json"

    data = json.loads(response.content)
    assert data["status"] == "healthy"
    assert data["database"] == "connected"
    assert data["recorded_runs"] == 1


@pytest.mark.django_db
@patch("django.db.connection.cursor")
def test_health_check_database_error(mock_cursor):
    """Test health check handles database connection errors."""
    mock_cursor.side_effect = Exception("Database connection failed")
    client = Client()
    response = client.get(reverse("health_check"))
    data = json.loads(response.content)

    assert data["status"] == "unhealthy"
    assert "Database connection failed" in data["database"]
    assert data["recorded_runs"] is None
