"""Multi-tier DRAM/NVM/SSD buffer management simulator."""

from ._core import (
    CapacityError,
    ConfigError,
    Error,
    Hierarchy,
    MigrationPolicy,
    ModelError,
    ParseError,
    Trace,
    UsageError,
    ValidationError,
    block_transfer_time,
    characterize,
    effective_access_time,
    generate_log,
    generate_shifting,
    generate_zipf,
    hierarchy,
    parse_size,
    recommend,
    simulate,
    tune,
)

__all__ = [
    "CapacityError",
    "ConfigError",
    "Error",
    "Hierarchy",
    "MigrationPolicy",
    "ModelError",
    "ParseError",
    "Trace",
    "UsageError",
    "ValidationError",
    "block_transfer_time",
    "characterize",
    "effective_access_time",
    "generate_log",
    "generate_shifting",
    "generate_zipf",
    "hierarchy",
    "parse_size",
    "recommend",
    "simulate",
    "tune",
]
