"""Turnpike reconstruction from pairwise distances."""

from ._core import (
    DistanceMultiset,
    InvalidInput,
    coords_least_squares,
    delta,
    gap_star,
    generate,
    kendall_tau,
    oracle,
    parse_instance,
    perturb,
    run_cli,
    run_pipeline,
    two_partitions,
)

__all__ = [
    "DistanceMultiset",
    "InvalidInput",
    "coords_least_squares",
    "delta",
    "gap_star",
    "generate",
    "kendall_tau",
    "oracle",
    "parse_instance",
    "perturb",
    "run_cli",
    "run_pipeline",
    "two_partitions",
]
