"""
Performance test configuration and fixtures.

This module provides pytest configuration and fixtures for timing and
memory profiling of engine runs on generated model families.
"""

import os

import pytest

import django
from django.conf import settings
if not settings.configured:
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'rmatrix_service.settings')
    django.setup()

from quantization.services import ModelLoader
from .utils.benchmarks import PerformanceBenchmark, PerformanceRegression
from .utils.generators import JetGenerator, ModelGenerator
from .utils.profiling import MemoryProfiler

REPORTS_DIR = os.path.join(os.path.dirname(__file__), 'reports')


# Performance test markers
def pytest_configure(config):
    """Configure pytest markers for performance tests."""
    config.addinivalue_line(
        "markers", "performance: mark test as a performance test"
    )
    config.addinivalue_line(
        "markers", "slow: mark test as slow running"
    )
    config.addinivalue_line(
        "markers", "memory_intensive: mark test as memory intensive"
    )


# Model fixtures
@pytest.fixture(scope="session")
def heisenberg_model():
    """The shipped Heisenberg model, [e1, e2] = h with r = (1/l1) e1^e2."""
    return ModelLoader.load(settings.RMATRIX["MODEL_DIR"] / "heisenberg.json")


@pytest.fixture(scope="session")
def model_generator():
    return ModelGenerator()


@pytest.fixture(scope="session")
def jet_generator():
    return JetGenerator()


@pytest.fixture(scope="session")
def heisenberg_family(model_generator):
    """Heisenberg models with 1 to 3 pairs."""
    return [ModelLoader.load_dict(data) for data in model_generator.family("heisenberg", [1, 2, 3])]


@pytest.fixture(scope="session")
def abelian_family(model_generator):
    """Abelian models with 1 to 3 pairs."""
    return [ModelLoader.load_dict(data) for data in model_generator.family("abelian", [1, 2, 3])]


# Benchmark and profiling fixtures
@pytest.fixture
def benchmark_timer():
    """Create a benchmark timer."""
    return PerformanceBenchmark()


@pytest.fixture
def memory_profiler():
    """Create a memory usage profiler."""
    return MemoryProfiler()


@pytest.fixture
def regression_detector():
    return PerformanceRegression()


@pytest.fixture
def baseline_path():
    return os.path.join(REPORTS_DIR, 'engine_baseline.json')


@pytest.fixture
def performance_thresholds():
    """Define performance thresholds for tests."""
    return {
        # Classical checks
        'check_heisenberg_3': 5.0,        # 5s for CDYBE and rank on dim 7
        'cohomology_heisenberg_3': 5.0,   # 5s for H^2 on dim 7

        # Fedosov quantization
        'quantize_order_1': 10.0,         # 10s for F to order 1
        'quantize_order_2': 60.0,         # 60s for F to order 2
        'star_order_2': 60.0,             # 60s for a star product to order 2

        # Memory thresholds (in MB)
        'memory_quantize_order_2': 1024,  # 1GB peak for order 2
    }


# Pytest collection hook to skip performance tests by default
def pytest_collection_modifyitems(config, items):
    """Skip performance tests unless explicitly requested."""
    if not config.getoption("--runperformance"):
        skip_performance = pytest.mark.skip(reason="Performance tests skipped (use --runperformance to run)")
        for item in items:
            if "performance" in item.keywords:
                item.add_marker(skip_performance)


def pytest_addoption(parser):
    """Add command line options for performance tests."""
    parser.addoption(
        "--runperformance",
        action="store_true",
        default=False,
        help="Run performance tests"
    )
    parser.addoption(
        "--performance-baseline",
        action="store_true",
        default=False,
        help="Save the timings of this run as the new baseline"
    )
