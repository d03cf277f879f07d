"""Closed-form bound tables, one CSV per swept relationship."""
from __future__ import annotations

import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any

from sparse_ots.core.errors import ArgumentError, BoundInvalidError
from sparse_ots.core.models import BoundGrids, CpaParams, IndistParams
from sparse_ots.export.csv_writer import Marker, Row, write_csv
from sparse_ots.security import bounds

logger = logging.getLogger(__name__)

TABLES: dict[str, tuple[str, ...]] = {
    "pd_bound_vs_gamma.csv": ("gamma", "q", "pd_bound", "pd_limit"),
    "s_cpa_vs_q.csv": ("q", "tau", "s_cpa_low_log2"),
    "q_cpa_vs_eps2.csv": ("eps2", "budget", "q_cpa", "q_cpa_up"),
    "success_vs_q.csv": ("q", "p_suc_up", "p_key_up"),
    "refresh_vs_q.csv": ("q", "p_key_up", "t_ref_up"),
}


def _point(
    rows: list[Row], where: dict[str, Any], evaluate: Callable[[], dict[str, Any]]
) -> None:
    try:
        rows.append({**where, **evaluate()})
    except (BoundInvalidError, ArgumentError) as e:
        logger.info("Marker row at %s: %s", where, e)
        rows.append(Marker(str(e), where))


def _cpa(grids: BoundGrids, **update: Any) -> CpaParams:
    values: dict[str, Any] = {
        "k": grids.k, "q": 1, "rho": grids.rho, "budget": grids.budget,
        "eps2": grids.eps2, "delta": grids.delta, "eps3": grids.eps3,
    }
    values.update(update)
    return CpaParams(**values)


def pd_bound_rows(grids: BoundGrids) -> list[Row]:
    rows: list[Row] = []
    for q in grids.indist_q:
        for gamma in grids.gammas:
            p = IndistParams(m=grids.m, q=q, gamma=gamma, c_max=grids.c_max)
            _point(rows, {"gamma": gamma, "q": q}, lambda p=p: {
                "pd_bound": bounds.p_d_bound(p), "pd_limit": bounds.p_d_limit(p),
            })
    return rows


def s_cpa_rows(grids: BoundGrids) -> list[Row]:
    rows: list[Row] = []
    for q in grids.q_values:
        p = _cpa(grids, q=q)
        _point(rows, {"q": q}, lambda p=p: {"tau": p.tau, "s_cpa_low_log2": bounds.s_cpa_low(p)})
    return rows


def q_cpa_rows(grids: BoundGrids) -> list[Row]:
    rows: list[Row] = []
    for budget in grids.budgets:
        for eps2 in grids.eps2_values:
            p = _cpa(grids, budget=budget, eps2=eps2)
            _point(rows, {"eps2": eps2, "budget": budget}, lambda p=p: {
                "q_cpa": bounds.q_cpa(p), "q_cpa_up": bounds.q_cpa_up(p),
            })
    return rows


def success_rows(grids: BoundGrids) -> list[Row]:
    rows: list[Row] = []
    for q in grids.q_values:
        p = _cpa(grids, q=q)
        _point(rows, {"q": q}, lambda p=p: {
            "p_suc_up": bounds.p_suc_up(p), "p_key_up": bounds.p_key_up(p),
        })
    return rows


def refresh_rows(grids: BoundGrids) -> list[Row]:
    rows: list[Row] = []
    for q in grids.q_values:
        p = _cpa(grids, q=q)

        def evaluate(p: CpaParams = p) -> dict[str, Any]:
            budget = bounds.t_ref_up(p)
            return {"p_key_up": budget.p_key, "t_ref_up": budget.t_ref}

        _point(rows, {"q": q}, evaluate)
    return rows


_BUILDERS: dict[str, Callable[[BoundGrids], list[Row]]] = {
    "pd_bound_vs_gamma.csv": pd_bound_rows,
    "s_cpa_vs_q.csv": s_cpa_rows,
    "q_cpa_vs_eps2.csv": q_cpa_rows,
    "success_vs_q.csv": success_rows,
    "refresh_vs_q.csv": refresh_rows,
}


def emit_bound_tables(out_dir: Path, grids: BoundGrids | None = None) -> dict[str, Path]:
    """Write every bound table under ``out_dir``; invalid points become marker rows."""
    grids = grids or BoundGrids()
    written: dict[str, Path] = {}
    for name, header in TABLES.items():
        path = out_dir / name
        write_csv(path, header, _BUILDERS[name](grids))
        written[name] = path
    return written
