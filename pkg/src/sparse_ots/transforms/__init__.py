"""Sparsifying bases and plaintext statistics."""
from sparse_ots.transforms.bases import Basis, analyze, coherence, synthesize
from sparse_ots.transforms.statistics import c_statistic, estimate_c_max, sample_sparse

__all__ = [
    "Basis",
    "analyze",
    "c_statistic",
    "coherence",
    "estimate_c_max",
    "sample_sparse",
    "synthesize",
]
