"""
Benchmark utilities for performance testing.

This module provides timing, statistical analysis and baseline
comparison for engine runs.
"""

import json
import statistics
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union


@dataclass
class BenchmarkResult:
    """Results from a performance benchmark."""
    name: str
    iterations: int
    total_time: float
    min_time: float
    max_time: float
    mean_time: float
    median_time: float
    std_dev: float
    percentile_95: float
    timestamp: str
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return asdict(self)

    def __str__(self) -> str:
        return (
            f"Benchmark: {self.name}\n"
            f"Iterations: {self.iterations}\n"
            f"Mean time: {self.mean_time:.4f}s\n"
            f"Median time: {self.median_time:.4f}s\n"
            f"95th percentile: {self.percentile_95:.4f}s\n"
            f"Std deviation: {self.std_dev:.4f}s\n"
        )


class PerformanceBenchmark:
    """Repeated timing of engine calls."""

    def __init__(self, warmup_iterations: int = 1, min_iterations: int = 3):
        """
        Initialize the benchmark utility.

        Args:
            warmup_iterations: Number of warmup runs before measurement
            min_iterations: Minimum number of measured iterations
        """
        self.warmup_iterations = warmup_iterations
        self.min_iterations = min_iterations
        self.results_history: List[BenchmarkResult] = []

    def benchmark_function(self, func: Callable, iterations: Optional[int] = None,
                           name: Optional[str] = None, **metadata) -> BenchmarkResult:
        """
        Benchmark a function with multiple iterations.

        Engine errors in warmup runs are not swallowed: a run that raises
        would make the timings meaningless.

        Args:
            func: Function to benchmark
            iterations: Number of iterations (uses min_iterations if None)
            name: Name for the benchmark
            **metadata: Extra fields stored with the result (order, caps, model)

        Returns:
            BenchmarkResult with timing statistics
        """
        iterations = self.min_iterations if iterations is None else iterations
        name = name or func.__name__

        for _ in range(self.warmup_iterations):
            func()

        times = []
        for _ in range(iterations):
            start_time = time.perf_counter()
            func()
            times.append(time.perf_counter() - start_time)

        sorted_times = sorted(times)
        result = BenchmarkResult(
            name=name,
            iterations=iterations,
            total_time=sum(times),
            min_time=sorted_times[0],
            max_time=sorted_times[-1],
            mean_time=statistics.mean(times),
            median_time=statistics.median(times),
            std_dev=statistics.stdev(times) if len(times) > 1 else 0.0,
            percentile_95=self._percentile(sorted_times, 95),
            timestamp=datetime.now().isoformat(),
            metadata=metadata,
        )
        self.results_history.append(result)
        return result

    @contextmanager
    def time_context(self, name: str = "operation"):
        """
        Context manager for timing a block of code.

        Yields:
            Dictionary that will contain ``duration`` after the block
        """
        timing_result: Dict[str, Any] = {"name": name}
        start_time = time.perf_counter()
        try:
            yield timing_result
        finally:
            timing_result["duration"] = time.perf_counter() - start_time
            timing_result["timestamp"] = datetime.now().isoformat()

    def scaling(self, results: List[BenchmarkResult], key: str) -> List[Dict[str, Any]]:
        """
        Growth of the mean time along a metadata key such as ``order`` or ``dim``.

        Returns:
            One row per result, sorted by the key, with the ratio to the previous row
        """
        rows = []
        previous = None
        for result in sorted(results, key=lambda r: r.metadata[key]):
            ratio = result.mean_time / previous.mean_time if previous and previous.mean_time > 0 else None
            rows.append({key: result.metadata[key], "mean_time": result.mean_time, "ratio": ratio})
            previous = result
        return rows

    def assert_performance_threshold(self, result: BenchmarkResult,
                                     max_mean_time: float,
                                     max_percentile_95: Optional[float] = None) -> bool:
        """
        Assert that benchmark results meet performance thresholds.

        Raises:
            AssertionError: If any threshold is not met
        """
        errors = []
        if result.mean_time > max_mean_time:
            errors.append(f"Mean time {result.mean_time:.4f}s exceeds threshold {max_mean_time:.4f}s")
        if max_percentile_95 and result.percentile_95 > max_percentile_95:
            errors.append(
                f"95th percentile {result.percentile_95:.4f}s exceeds threshold {max_percentile_95:.4f}s"
            )
        if errors:
            raise AssertionError(f"Performance thresholds not met for {result.name}:\n" + "\n".join(errors))
        return True

    def save_results(self, filepath: Union[str, Path]) -> None:
        """Save the benchmark history as JSON."""
        filepath = Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)
        with open(filepath, "w") as f:
            json.dump([result.to_dict() for result in self.results_history], f, indent=2)

    @staticmethod
    def load_results(filepath: Union[str, Path]) -> List[BenchmarkResult]:
        """Load results saved by save_results; a missing file gives no results."""
        filepath = Path(filepath)
        if not filepath.exists():
            return []
        with open(filepath) as f:
            return [BenchmarkResult(**item) for item in json.load(f)]

    @staticmethod
    def _percentile(data: List[float], percentile: float) -> float:
        if not data:
            return 0.0
        k = (len(data) - 1) * (percentile / 100.0)
        f = int(k)
        c = k - f
        if f + 1 < len(data):
            return data[f] * (1 - c) + data[f + 1] * c
        return data[f]


class PerformanceRegression:
    """Compares runs against a saved baseline."""

    def __init__(self, threshold_percent: float = 25.0):
        self.threshold_percent = threshold_percent

    def detect_regression(self, baseline: BenchmarkResult, current: BenchmarkResult) -> Dict[str, Any]:
        """
        Relative change of mean and median time between two results.

        Returns:
            Dictionary with regression analysis
        """
        mean_change = (current.mean_time - baseline.mean_time) / baseline.mean_time * 100
        median_change = (current.median_time - baseline.median_time) / baseline.median_time * 100
        return {
            "name": current.name,
            "regression_detected": mean_change > self.threshold_percent
            and median_change > self.threshold_percent,
            "mean_time_change_percent": mean_change,
            "median_time_change_percent": median_change,
            "threshold_percent": self.threshold_percent,
        }

    def compare_to_baseline(self, baseline: List[BenchmarkResult],
                            current: List[BenchmarkResult]) -> List[Dict[str, Any]]:
        """Regression analysis for every current result with a baseline of the same name."""
        by_name = {result.name: result for result in baseline}
        return [
            self.detect_regression(by_name[result.name], result)
            for result in current
            if result.name in by_name
        ]
