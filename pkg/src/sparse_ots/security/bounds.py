"""Closed-form security bounds.

Indistinguishability: Hellinger distance between the two ciphertext distributions, the
total-variation bracket it implies and the resulting detector success bound. CPA:
candidate keystream count, feasibility threshold on q, keystream and key recovery
probabilities and the key refresh time.

Probabilities are evaluated in log domain; quantities that can leave double range go
through mpmath.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from sparse_ots.core.errors import ArgumentError, BoundInvalidError, ConditionViolatedError
from sparse_ots.core.models import CpaParams, IndistParams
from sparse_ots.security.lambertw import lambert_w_neg1

LN2 = math.log(2.0)

# Complexity exponent of the best known key search against the self-shrinking generator.
LAMBDA_MIN = 0.66

_MP_DPS = 50


# ============================================================================
# Indistinguishability
# ============================================================================


def _log_affinity(p: IndistParams, *, finite_q: bool = True) -> float:
    """log(1 - d_H^2), the log of the Bhattacharyya coefficient."""
    gamma_e = p.gamma_e
    log_a = (p.m / 4.0) * math.log(4.0 * gamma_e / (gamma_e + 1.0) ** 2)
    if not finite_q:
        return log_a
    ratio = p.c / (8.0 * p.q)
    if ratio > 1.0:
        raise BoundInvalidError(
            f"c/(8q) = {ratio:.4g} > 1: need q >= {p.c / 8.0:.4g} "
            f"(q >= c_max/4 = {p.c_max / 4.0:.4g} always suffices)",
            required=p.c / 8.0,
        )
    u = ratio * ((gamma_e - 1.0) / (gamma_e + 1.0)) ** 2
    log_b = p.m * math.log1p(-u) if u < 1.0 else -math.inf
    return log_a + log_b


def hellinger_sq(p: IndistParams) -> float:
    """Squared Hellinger distance between the ciphertext distributions of x_max and x_min."""
    return -math.expm1(_log_affinity(p))


def _bracket(log_affinity: float) -> tuple[float, float]:
    low = -math.expm1(log_affinity)
    up = math.sqrt(max(-math.expm1(2.0 * log_affinity), 0.0))
    return low, max(up, low)


def tv_bounds(p: IndistParams) -> tuple[float, float]:
    """(d_TV low, d_TV up) = (d_H^2, d_H sqrt(2 - d_H^2))."""
    return _bracket(_log_affinity(p))


def p_d_bound(p: IndistParams) -> float:
    """Upper bound on any detector's success probability, 1/2 + d_TV,up / 2."""
    return 0.5 + 0.5 * tv_bounds(p)[1]


def p_d_limit(p: IndistParams) -> float:
    """The q -> infinity limit of :func:`p_d_bound` (the dense Gaussian baseline)."""
    return 0.5 + 0.5 * _bracket(_log_affinity(p, finite_q=False))[1]


# ============================================================================
# Candidate keystreams
# ============================================================================


def hoeffding_tolerance(q: int, tau: int, eps2: float) -> float:
    """t with Pr[all tau rows satisfy |y_i| < t] >= 1 - eps2."""
    per_row = -math.expm1(math.log1p(-eps2) / tau)
    return math.sqrt(2.0 * q * math.log(2.0 / per_row))


def candidate_floor_log2(q: int, tau: int, t: float) -> float:
    """log2 of C(q, ceil((q - t)/2))^tau with an exact integer binomial."""
    if not 0.0 <= t <= q:
        raise BoundInvalidError(f"Tolerance t = {t:.4g} outside [0, q={q}]; bound is vacuous")
    plus = math.ceil((q - t) / 2.0)
    return math.log2(math.comb(q, plus) ** tau)


def s_cpa_low(p: CpaParams) -> float:
    """log2 of the lower bound on the candidate keystream count S_CPA."""
    t = hoeffding_tolerance(p.q, p.tau, p.eps2)
    return candidate_floor_log2(p.q, p.tau, t)


# ============================================================================
# Feasibility thresholds and success probabilities
# ============================================================================


def _check_condition(k: int, budget: float) -> None:
    required = budget * math.e * LN2
    if k < required:
        raise ConditionViolatedError(
            f"k = {k} < L*e*ln2 = {required:.2f}; the CPA bounds need a longer key",
            required=required,
        )


def beta(k: int, budget: float) -> float:
    """beta = -(k / (L ln 2)) W_{-1}(-L ln 2 / k); always >= e under the key condition."""
    _check_condition(k, budget)
    return -(k / (budget * LN2)) * lambert_w_neg1(-budget * LN2 / k)


def _threshold_log(p: CpaParams) -> float:
    per_row = -math.expm1(math.log1p(-p.eps2) / (p.k * p.rho + 1.0))
    return math.log(2.0 / per_row)


def _threshold(beta_value: float, p: CpaParams) -> float:
    return 0.5 * (2.0 + 4.0 / (beta_value - 2.0)) ** 2 * _threshold_log(p)


def q_cpa(p: CpaParams) -> int:
    """Minimum q keeping S_CPA above 2^L with probability 1 - eps2."""
    return math.ceil(_threshold(beta(p.k, p.budget), p))


def q_cpa_up(p: CpaParams) -> float:
    """Upper bound on the threshold of :func:`q_cpa`, from beta >= e."""
    _check_condition(p.k, p.budget)
    return _threshold(math.e, p)


def _p_suc_mp(p: CpaParams) -> mpmath.mpf:
    b = beta(p.k, p.budget)
    with mpmath.workdps(_MP_DPS):
        u = 2 * mpmath.exp(-mpmath.mpf(p.q) / 2 * (1 - 2 / mpmath.mpf(b)) ** 2)
        if u >= 1:
            return mpmath.mpf(1)
        return -mpmath.expm1(p.tau * mpmath.log1p(-u))


def p_suc_up(p: CpaParams) -> float:
    """Upper bound on the adversary recovering the first k keystream symbols."""
    return float(min(max(_p_suc_mp(p), 0), 1))


def _key_bound_mp(p_suc: mpmath.mpf | float, k: int, delta: float) -> mpmath.mpf:
    if not 1.0 / k <= delta <= 1.0:
        raise ArgumentError(f"delta = {delta} outside [1/k, 1] = [{1.0 / k:.4g}, 1]")
    with mpmath.workdps(_MP_DPS):
        floor = mpmath.mpf(2) ** (-k)
        return floor + (1 - floor - mpmath.mpf(delta) + mpmath.mpf(1) / k) * p_suc


def key_bound_from(p_suc: float, k: int, delta: float) -> float:
    """2^-k + (1 - 2^-k - delta + 1/k) * P_suc."""
    return float(_key_bound_mp(p_suc, k, delta))


def p_key_up(p: CpaParams) -> float:
    """Upper bound on two-stage CPA key recovery."""
    return float(_key_bound_mp(_p_suc_mp(p), p.k, p.delta))


# ============================================================================
# Key refresh
# ============================================================================


@dataclass(frozen=True)
class RefreshBudget:
    """Encryptions allowed under one key."""

    t_ref: int
    raw: float
    p_key: float
    bits_per_encryption: float | None = None
    period_ok: bool | None = None


def _refresh_mp(eps3: float, p_key: mpmath.mpf | float) -> mpmath.mpf:
    if not 0.0 < eps3 < 1.0:
        raise ArgumentError(f"eps3 = {eps3} must lie in (0, 1)")
    with mpmath.workdps(_MP_DPS):
        p = mpmath.mpf(p_key)
        if not 0 < p < 1:
            raise ArgumentError(f"P_key = {p_key} must lie in (0, 1)")
        return mpmath.log1p(-mpmath.mpf(eps3)) / mpmath.log1p(-p)


def refresh_count(eps3: float, p_key: float) -> float:
    """log(1 - eps3) / log(1 - P_key), unfloored."""
    return float(_refresh_mp(eps3, p_key))


def t_ref_up(p: CpaParams, bits_per_encryption: float | None = None) -> RefreshBudget:
    """Key refresh time, with the keystream period check when the per-encryption cost is known."""
    p_key = _key_bound_mp(_p_suc_mp(p), p.k, p.delta)
    raw = _refresh_mp(p.eps3, p_key)
    t_ref = int(mpmath.floor(raw))
    period_ok = None
    if bits_per_encryption is not None:
        period_ok = bits_per_encryption * t_ref < 2 ** (p.k // 2)
    return RefreshBudget(
        t_ref=t_ref,
        raw=float(raw),
        p_key=float(p_key),
        bits_per_encryption=bits_per_encryption,
        period_ok=period_ok,
    )


def ssg_attack_log2_work(k: int) -> float:
    """log2 work of the best known key search on the generator, lambda_min * k."""
    return LAMBDA_MIN * k
