"""Experiment harness: initial data, refinement studies, file output, CLI."""

from .config import RunConfig, load_config_file
from .fileio import read_field_raw, write_field_raw, write_series, write_snapshot
from .initial import init_benchmark, init_random
from .study import CauchyRow, cauchy_study, prolong_bilinear, rates_from_norms

__all__ = [
    "RunConfig",
    "load_config_file",
    "init_benchmark",
    "init_random",
    "prolong_bilinear",
    "cauchy_study",
    "CauchyRow",
    "rates_from_norms",
    "write_field_raw",
    "read_field_raw",
    "write_snapshot",
    "write_series",
]
