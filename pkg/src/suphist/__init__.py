"""Support-aware k-piece histograms over strict turnstile streams."""
from .baselines import BaselineConfig, equal_pieces, fixed_baseline
from .errors import (
    BadParams,
    DomainMismatch,
    DomainViolation,
    EmptyPointSet,
    EmptyStream,
    InvalidHHHSet,
    NegativeCount,
    NegativeDeltaUnsupported,
    NonReplayableSource,
    ParseError,
    SupportHistError,
)
from .experiment import RunRecord, run_algorithm, sweep
from .gadgets import GadgetSpec, gadget_stream
from .heavy_hitters import DyadicCountMin, SpaceSaving, hh_query, hh_update, make_hh_sketch
from .hhh import HHHSet, IntervalPartition, build_partition, hhh_exact, hhh_stream
from .histogram import (
    Histogram,
    WeightedPointSet,
    domain_error,
    est_error,
    evaluate,
    interval_cost,
    optimal_histogram_domain,
    optimal_histogram_exact,
    optimal_histogram_samples,
    support_error,
)
from .l0 import EMPTY_SUPPORT, L0Sampler, L0SamplerBank, l0_sample, l0_update
from .onepass import OnePassConfig, RunOutput, onepass_run
from .stream import (
    ArrayStream,
    ExactDistribution,
    OneShotStream,
    StreamUpdate,
    apply_update,
    generate_synthetic,
    mass,
    read_stream,
    stream_from_counts,
    write_stream,
)
from .twopass import TwoPassConfig, median_tail_check, twopass_run

__version__ = "0.1.0"
