"""Split-computing activation compression toolkit."""

from splitwire._core import (
    BudgetUnsatisfiableError,
    ChannelParams,
    InfeasiblePlanError,
    OutlierStats,
    compress,
    decompress,
    epsilon_latency,
    io_bits,
    kv_cache_bits,
    opsc_memory_bytes,
    optimal_rate,
    outage_prob,
    payload_size_bytes,
    plan,
    psi,
    simulate,
    synth_activations,
    threshold_split_nnz,
)

__all__ = [
    "BudgetUnsatisfiableError",
    "ChannelParams",
    "InfeasiblePlanError",
    "OutlierStats",
    "compress",
    "decompress",
    "epsilon_latency",
    "io_bits",
    "kv_cache_bits",
    "opsc_memory_bytes",
    "optimal_rate",
    "outage_prob",
    "payload_size_bytes",
    "plan",
    "psi",
    "simulate",
    "synth_activations",
    "threshold_split_nnz",
]
