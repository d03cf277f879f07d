"""Reproduction harnesses: phase transition, image round trip, distinguishing game, tables."""
from sparse_ots.experiments.image import ImageResult, run_image_pipeline, synthetic_image
from sparse_ots.experiments.indist import (
    DistinguishingResult,
    distinguishing_rate,
    run_indistinguishability,
)
from sparse_ots.experiments.phase import PhasePoint, frontier, run_phase_transition
from sparse_ots.experiments.tables import emit_bound_tables

__all__ = [
    "DistinguishingResult",
    "ImageResult",
    "PhasePoint",
    "distinguishing_rate",
    "emit_bound_tables",
    "frontier",
    "run_image_pipeline",
    "run_indistinguishability",
    "run_phase_transition",
    "synthetic_image",
]
