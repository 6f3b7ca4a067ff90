"""Event-camera background-activity denoising."""

from ._evdenoise import (
    ConfigError,
    Error,
    EventStream,
    IoError,
    OrderingError,
    ParseError,
    ValidationError,
    baseline_roc,
    benchmark_scene,
    hw_report,
    memory_bits,
    merge_streams,
    read_events,
    roc_auc,
    run_filter,
    score_stream,
    synthesize,
    write_events,
)

__all__ = [
    "ConfigError",
    "Error",
    "EventStream",
    "IoError",
    "OrderingError",
    "ParseError",
    "ValidationError",
    "baseline_roc",
    "benchmark_scene",
    "hw_report",
    "memory_bits",
    "merge_streams",
    "read_events",
    "roc_auc",
    "run_filter",
    "score_stream",
    "synthesize",
    "write_events",
]
