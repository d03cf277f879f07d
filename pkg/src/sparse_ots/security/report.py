"""Aggregate bound evaluation and parameter sweeps."""
from __future__ import annotations

import logging
from collections.abc import Iterable
from typing import Any

from sparse_ots.core.errors import ArgumentError, BoundInvalidError
from sparse_ots.core.models import CpaParams, IndistParams, SecurityReport
from sparse_ots.security import bounds

logger = logging.getLogger(__name__)

CPA_FIELDS = {"k", "q", "rho", "budget", "eps2", "delta", "eps3"}
INDIST_FIELDS = {"m", "q", "gamma", "pnr", "c_max"}


def security_report(
    cpa: CpaParams | None = None,
    indist: IndistParams | None = None,
    bits_per_encryption: float | None = None,
) -> SecurityReport:
    """Evaluate every bound that applies; failures become notes instead of aborting."""
    report = SecurityReport(cpa=cpa, indist=indist)

    if indist is not None:
        try:
            report.d_h_sq = bounds.hellinger_sq(indist)
            report.d_tv_low, report.d_tv_up = bounds.tv_bounds(indist)
            report.p_d_bound = bounds.p_d_bound(indist)
        except BoundInvalidError as e:
            report.notes.append(f"indistinguishability: {e}")

    if cpa is not None:
        report.ssg_attack_log2 = bounds.ssg_attack_log2_work(cpa.k)
        steps: list[tuple[str, Any]] = [
            ("s_cpa_low_log2", lambda: bounds.s_cpa_low(cpa)),
            ("q_cpa", lambda: bounds.q_cpa(cpa)),
            ("q_cpa_up", lambda: bounds.q_cpa_up(cpa)),
            ("p_suc_up", lambda: bounds.p_suc_up(cpa)),
            ("p_key_up", lambda: bounds.p_key_up(cpa)),
        ]
        for name, evaluate in steps:
            try:
                setattr(report, name, evaluate())
            except (BoundInvalidError, ArgumentError) as e:
                report.notes.append(f"{name}: {e}")
        try:
            budget = bounds.t_ref_up(cpa, bits_per_encryption)
            report.t_ref_up = budget.t_ref
            report.period_ok = budget.period_ok
        except (BoundInvalidError, ArgumentError) as e:
            report.notes.append(f"t_ref_up: {e}")

    if report.notes:
        logger.info("Report at %s has %d invalid bounds", cpa or indist, len(report.notes))
    return report


def sweep_bounds(
    var: str,
    values: Iterable[float],
    cpa: CpaParams | None = None,
    indist: IndistParams | None = None,
    bits_per_encryption: float | None = None,
) -> list[SecurityReport]:
    """One report per value of ``var``, applied to whichever parameter sets carry it."""
    known = CPA_FIELDS | INDIST_FIELDS
    if var not in known:
        raise ArgumentError(f"Cannot sweep {var!r}; choose from {sorted(known)}")
    reports = []
    for value in values:
        cast = int(value) if var in {"k", "q", "m"} else float(value)
        point_cpa = cpa.model_copy(update={var: cast}) if cpa and var in CPA_FIELDS else cpa
        point_indist = (
            indist.model_copy(update={var: cast}) if indist and var in INDIST_FIELDS else indist
        )
        reports.append(security_report(point_cpa, point_indist, bits_per_encryption))
    return reports
