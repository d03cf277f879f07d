"""Chosen-plaintext attacks at desk scale."""
from sparse_ots.attacks.counting import (
    CandidateCount,
    composite_representation,
    count_candidates,
    enumerate_candidates,
    hoeffding_validate,
    permutation_candidate_count,
    validate_candidate_bound,
)
from sparse_ots.attacks.probes import (
    ExactCiphertext,
    ExtractedMatrix,
    RowCount,
    balanced_ternary,
    class1_attack,
    class1_plaintext,
    class2_attack,
    class2_plaintext,
    exact_encrypt,
    true_signed_matrix,
)
from sparse_ots.attacks.trial import class1_run, class2_run, two_stage_cpa_trial

__all__ = [
    "CandidateCount",
    "ExactCiphertext",
    "ExtractedMatrix",
    "RowCount",
    "balanced_ternary",
    "class1_attack",
    "class1_plaintext",
    "class1_run",
    "class2_attack",
    "class2_plaintext",
    "class2_run",
    "composite_representation",
    "count_candidates",
    "enumerate_candidates",
    "exact_encrypt",
    "hoeffding_validate",
    "permutation_candidate_count",
    "true_signed_matrix",
    "two_stage_cpa_trial",
    "validate_candidate_bound",
]
