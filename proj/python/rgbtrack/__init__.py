"""RGB-T graph-learning tracker: python bindings over the C++ core."""

from ._core import (
    BoundingBox,
    FrameDiagnostics,
    GraphState,
    SolverConfig,
    SyntheticConfig,
    Tracker,
    TrackerParams,
    eao,
    format_results,
    generate_synthetic,
    iou,
    mpr,
    msr,
    overlap_curve,
    parse_groundtruth,
    project_simplex,
    prox_l21,
    sigmoid_map,
    solve_joint,
    track_manifest,
    update_affinity,
    update_modality_weights,
    update_weights_s,
    write_synthetic,
)

__all__ = [
    "BoundingBox",
    "FrameDiagnostics",
    "GraphState",
    "SolverConfig",
    "SyntheticConfig",
    "Tracker",
    "TrackerParams",
    "eao",
    "format_results",
    "generate_synthetic",
    "iou",
    "mpr",
    "msr",
    "overlap_curve",
    "parse_groundtruth",
    "project_simplex",
    "prox_l21",
    "sigmoid_map",
    "solve_joint",
    "track_manifest",
    "update_affinity",
    "update_modality_weights",
    "update_weights_s",
    "write_synthetic",
]
