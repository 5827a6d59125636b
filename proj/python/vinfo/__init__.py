"""Pointwise and dataset-level usable information for labeled text."""

from ._vinfo import (
    ConfigError,
    Dataset,
    EmptyInputError,
    Instance,
    PlantedData,
    PviAnalysis,
    PviRecord,
    PviSummary,
    UndefinedError,
    ValidationError,
    apply_transform,
    generate_independent,
    generate_planted,
    planted_information_bits,
    pvi,
    pvi_correlation,
    read_dataset,
    run_cli,
    write_dataset,
)

__all__ = [name for name in dir() if not name.startswith("_")]
