"""Security calculus: indistinguishability and chosen-plaintext bounds."""
from sparse_ots.security.bounds import (
    LAMBDA_MIN,
    RefreshBudget,
    beta,
    candidate_floor_log2,
    hellinger_sq,
    hoeffding_tolerance,
    key_bound_from,
    p_d_bound,
    p_d_limit,
    p_key_up,
    p_suc_up,
    q_cpa,
    q_cpa_up,
    refresh_count,
    s_cpa_low,
    ssg_attack_log2_work,
    t_ref_up,
    tv_bounds,
)
from sparse_ots.security.lambertw import lambert_w_neg1
from sparse_ots.security.report import security_report, sweep_bounds

__all__ = [
    "LAMBDA_MIN",
    "RefreshBudget",
    "beta",
    "candidate_floor_log2",
    "hellinger_sq",
    "hoeffding_tolerance",
    "key_bound_from",
    "lambert_w_neg1",
    "p_d_bound",
    "p_d_limit",
    "p_key_up",
    "p_suc_up",
    "q_cpa",
    "q_cpa_up",
    "refresh_count",
    "s_cpa_low",
    "security_report",
    "ssg_attack_log2_work",
    "sweep_bounds",
    "t_ref_up",
    "tv_bounds",
]
