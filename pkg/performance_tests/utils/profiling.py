"""
Profiling utilities for performance testing.

This module provides memory usage tracking for engine runs. The
Fedosov iteration keeps every truncated Weyl algebra element in memory,
so peak resident size is the number to watch as the order grows.
"""

import gc
import sys
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, Tuple

import psutil
from memory_profiler import memory_usage


@dataclass
class MemorySnapshot:
    """Memory usage snapshot at a point in time."""
    timestamp: float
    rss_bytes: int          # Resident Set Size
    gc_objects: int         # Number of objects tracked by GC

    @property
    def rss_mb(self) -> float:
        return self.rss_bytes / (1024 * 1024)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class MemoryProfiler:
    """Memory usage profiler for performance testing."""

    def __init__(self, sampling_interval: float = 0.05):
        """
        Args:
            sampling_interval: Interval between samples in seconds
        """
        self.sampling_interval = sampling_interval
        self.process = psutil.Process()

    def get_current_snapshot(self) -> MemorySnapshot:
        return MemorySnapshot(
            timestamp=time.time(),
            rss_bytes=self.process.memory_info().rss,
            gc_objects=len(gc.get_objects()),
        )

    def measure_call(self, func: Callable, *args, **kwargs) -> Tuple[Any, Dict[str, float]]:
        """
        Run a function while sampling memory.

        Returns:
            (return value, dict with start, peak and delta in MB)
        """
        gc.collect()
        start = self.get_current_snapshot()
        peak_mb, value = memory_usage(
            (func, args, kwargs),
            interval=self.sampling_interval,
            max_usage=True,
            retval=True,
        )
        end = self.get_current_snapshot()
        return value, {
            "start_memory_mb": start.rss_mb,
            "peak_memory_mb": float(peak_mb),
            "end_memory_mb": end.rss_mb,
            "memory_delta_mb": end.rss_mb - start.rss_mb,
            "gc_objects_delta": end.gc_objects - start.gc_objects,
        }

    @contextmanager
    def profile_memory(self, test_name: str = "test"):
        """
        Context manager recording memory before and after a block.

        Yields:
            Dictionary that will contain profiling results
        """
        start = self.get_current_snapshot()
        result: Dict[str, Any] = {"test_name": test_name}
        try:
            yield result
        finally:
            end = self.get_current_snapshot()
            result.update({
                "start_memory_mb": start.rss_mb,
                "end_memory_mb": end.rss_mb,
                "memory_delta_mb": end.rss_mb - start.rss_mb,
                "duration": end.timestamp - start.timestamp,
            })


def get_system_info() -> Dict[str, Any]:
    """System information stored next to benchmark baselines."""
    return {
        "python_version": sys.version,
        "platform": sys.platform,
        "cpu_count": psutil.cpu_count(),
        "memory_total_mb": psutil.virtual_memory().total / (1024 * 1024),
    }
