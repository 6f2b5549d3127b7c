"""
Utilities for performance testing.

This module contains helpers for model generation,
benchmarking, and profiling.
"""
