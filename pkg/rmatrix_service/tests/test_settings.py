import pytest
from django.conf import settings


def test_secret_key_configuration():
    """Test SECRET_KEY is configured."""
    assert settings.SECRET_KEY is not None
    assert settings.SECRET_KEY != ""


def test_allowed_hosts_configuration():
    """Test ALLOWED_HOSTS is properly configured."""
    assert isinstance(settings.ALLOWED_HOSTS, list)
    assert "localhost" in settings.ALLOWED_HOSTS
    assert "127.0.0.1" in settings.ALLOWED_HOSTS


def test_database_configuration():
    """Test the database falls back to a local SQLite file."""
    db_config = settings.DATABASES["default"]
    assert "ENGINE" in db_config
    assert "NAME" in db_config


def test_installed_apps_includes_required():
    """Test that required apps are installed."""
    for app in ["django.contrib.admin", "django.contrib.contenttypes", "rest_framework", "quantization"]:
        assert app in settings.INSTALLED_APPS


@pytest.mark.parametrize(
    "key",
    [
        "DEFAULT_HBAR_ORDER",
        "HBAR_CAP_SLACK",
        "DEGREE_CAP_SLACK",
        "JET_DEGREE_SLACK",
        "GAUGE_SERIES_LIMIT",
        "REPORT_INDENT",
    ],
)
def test_engine_integer_settings(key):
    """Test engine defaults are parsed to integers."""
    assert isinstance(settings.RMATRIX[key], int)
    assert settings.RMATRIX[key] >= 0


def test_engine_caps_leave_room_for_the_default_order():
    """Test the default slacks give caps at least the minimum for any order."""
    assert settings.RMATRIX["HBAR_CAP_SLACK"] >= 0
    assert settings.RMATRIX["DEGREE_CAP_SLACK"] >= 0
    assert isinstance(settings.RMATRIX["RECORD_RUNS"], bool)
    assert settings.RMATRIX["MODEL_DIR"].is_dir()


def test_logging_configuration():
    """Test the engine loggers are configured."""
    loggers = settings.LOGGING["loggers"]
    for name in ["quantization", "quantization.services", "quantization.fedosov", "quantization.management"]:
        assert name in loggers
        assert "console" in loggers[name]["handlers"]
