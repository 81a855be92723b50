"""Clock offset recovery for single-photon links."""

from ._iqsync import (
    AttenuationSolution,
    DataError,
    DerivedCounts,
    Interval,
    LinkParams,
    ModelResult,
    NonMonotoneBracket,
    PolyLogFit,
    RecoveryResult,
    SyncConfig,
    TrialRecord,
    attenuation_from_p_sig,
    clopper_pearson,
    derived_counts,
    expected_loop_iterations,
    max_offset,
    pattern,
    pattern_duration,
    p_sig_from_attenuation,
    polylog_fit,
    qber_estimate,
    recover_offset,
    run_trial,
    simulate_detections,
    success_probability,
    tolerable_attenuation,
    verify_range,
)

__all__ = [name for name in dir() if not name.startswith("_")]
