"""Affine loop synthesis from polynomial invariants."""

from ._core import (
    ParseError,
    SolverError,
    bench,
    bench_csv,
    int_partitions,
    synthesize,
    verify,
)

__all__ = [
    "ParseError",
    "SolverError",
    "bench",
    "bench_csv",
    "int_partitions",
    "synthesize",
    "verify",
]
