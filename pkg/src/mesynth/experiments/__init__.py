"""Calibration and tool-parameter fabrication experiments."""

from .calibration import (
    DEFAULT_SEEDS,
    KPIS,
    CalibrationCell,
    CalibrationReport,
    run_calibration,
    simulate_kpis,
    target_ranges,
)
from .classify import (
    CORRECT,
    EMPTY_VALID,
    FABRICATED_CODE,
    GENERIC_IDENTIFIER,
    PLAUSIBLE_SYNONYM,
    REJECTED,
    TOOL_PARAM_FABRICATION,
    TRANSPORT_ERROR,
    Classification,
    classify_outcome,
    fabrication_category,
)
from .clients import ClientReply, ClientRequest, FuzzClient, HttpClient, ModelClient, ReplayClient, TransportError
from .hallucination import (
    CONDITIONS,
    Aggregate,
    Environment,
    OutcomeRecord,
    QueryCorpus,
    aggregate,
    breakdown,
    compare,
    evaluate_call,
    load_corpus,
    render_summary,
    replay_client,
    run_fuzz,
    run_hallucination,
)
from .kpis import KpiSet, extract_kpis
from .stats import cohens_h, fishers_exact, t_confidence_interval, wilson_ci

__all__ = [
    "DEFAULT_SEEDS", "KPIS", "CalibrationCell", "CalibrationReport", "run_calibration", "simulate_kpis",
    "target_ranges", "CORRECT", "EMPTY_VALID", "FABRICATED_CODE", "GENERIC_IDENTIFIER", "PLAUSIBLE_SYNONYM",
    "REJECTED", "TOOL_PARAM_FABRICATION", "TRANSPORT_ERROR", "Classification", "classify_outcome",
    "fabrication_category", "ClientReply", "ClientRequest", "FuzzClient", "HttpClient", "ModelClient",
    "ReplayClient", "TransportError", "CONDITIONS", "Aggregate", "Environment", "OutcomeRecord", "QueryCorpus",
    "aggregate", "breakdown", "compare", "evaluate_call", "load_corpus", "render_summary", "replay_client",
    "run_fuzz", "run_hallucination", "KpiSet", "extract_kpis", "cohens_h", "fishers_exact",
    "t_confidence_interval", "wilson_ci",
]
