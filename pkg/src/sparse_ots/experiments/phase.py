"""Noiseless recovery phase transition over (M/N, K/M)."""
from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from sparse_ots.codec.cipher import decrypt, encrypt
from sparse_ots.codec.omp import RecoverySettings
from sparse_ots.core.errors import ArgumentError, ConfigurationError
from sparse_ots.core.models import ExperimentConfig, SystemParams
from sparse_ots.experiments.runner import item_rng, random_state, run_items
from sparse_ots.export.csv_writer import Marker
from sparse_ots.keystream.lfsr import Key, KeystreamSource, LfsrSpec
from sparse_ots.transforms.bases import Basis
from sparse_ots.transforms.statistics import sample_sparse

logger = logging.getLogger(__name__)

PHASE_HEADER = ("rho", "kappa", "success_rate")
# Relative error below which a decryption counts as recovered.
SUCCESS_ERROR = 1e-2


@dataclass(frozen=True)
class PhasePoint:
    rho: float
    kappa: float
    success_rate: float

    def as_row(self) -> dict[str, float]:
        return {"rho": self.rho, "kappa": self.kappa, "success_rate": self.success_rate}


def _grid(step: float, upper: float) -> list[float]:
    count = math.floor(upper / step + 1e-9)
    return [round(j * step, 12) for j in range(1, count + 1)]


def rho_grid(config: ExperimentConfig) -> list[float]:
    if config.rho_values is not None:
        return list(config.rho_values)
    return _grid(config.rho_step, 1.0)


def kappa_grid(config: ExperimentConfig) -> list[float]:
    return _grid(config.kappa_step, config.kappa_max)


def _success_rate(
    config: ExperimentConfig, params: SystemParams, sparsity: int, grid_index: int
) -> float:
    if sparsity == 0:
        return 1.0
    basis = Basis(config.basis, params.n)
    spec = LfsrSpec.primitive(params.k)
    settings = RecoverySettings(sparsity=sparsity, basis=basis)
    hits = 0
    for trial in range(config.trials):
        rng = item_rng(config.seed, grid_index, trial)
        x = basis.synthesize(sample_sparse(rng, 1, params.n, sparsity)[0])
        source = KeystreamSource(spec, Key(params.k, random_state(rng, params.k)))
        ciphertext, key = encrypt(source, params, x)
        recovered = decrypt(key, params, ciphertext, settings)
        if np.linalg.norm(recovered - x) < SUCCESS_ERROR * np.linalg.norm(x):
            hits += 1
    return hits / config.trials


def run_phase_transition(config: ExperimentConfig) -> list[PhasePoint | Marker]:
    """Success rate per (rho, kappa) for K-sparse Gaussian plaintexts.

    A grid point whose M breaks the row structure, or whose K exceeds M, yields a marker.
    """
    if config.sigma:
        raise ArgumentError("Phase transition runs are noiseless; set sigma = 0")
    jobs: list[tuple[int, float, float, SystemParams, int]] = []
    out: list[PhasePoint | Marker] = []
    slots: list[int] = []
    grid_index = 0
    for rho in rho_grid(config):
        m = round(rho * config.n)
        try:
            params = config.system_params(m=m, sigma=0.0)
        except ConfigurationError as e:
            logger.info("Skipping rho=%s: %s", rho, e)
            out.append(Marker(f"infeasible M={m}", {"rho": rho}))
            continue
        for kappa in kappa_grid(config):
            grid_index += 1
            sparsity = round(kappa * m)
            if sparsity > m:
                logger.info("Skipping rho=%s kappa=%s: K=%d > M=%d", rho, kappa, sparsity, m)
                out.append(Marker(f"K={sparsity} > M={m}", {"rho": rho, "kappa": kappa}))
                continue
            slots.append(len(out))
            out.append(Marker("pending"))
            jobs.append((grid_index, rho, kappa, params, sparsity))

    def evaluate(job: tuple[int, float, float, SystemParams, int]) -> PhasePoint:
        index, rho, kappa, params, sparsity = job
        rate = _success_rate(config, params, sparsity, index)
        return PhasePoint(rho=rho, kappa=kappa, success_rate=rate)

    for slot, point in zip(slots, run_items(evaluate, jobs, config.workers), strict=True):
        out[slot] = point
    return out


def frontier(rows: Iterable[PhasePoint | Marker], threshold: float) -> dict[float, float]:
    """Per rho, the largest kappa whose success rate is at least ``threshold``.

    Rows without any such kappa map to 0.0.
    """
    best: dict[float, float] = {}
    for row in rows:
        if isinstance(row, Marker):
            continue
        best.setdefault(row.rho, 0.0)
        if row.success_rate >= threshold:
            best[row.rho] = max(best[row.rho], row.kappa)
    return best


def frontier_gap(a: dict[float, float], b: dict[float, float], rhos: Sequence[float]) -> float:
    """Largest |kappa_a - kappa_b| over the shared rho values."""
    shared = [r for r in rhos if r in a and r in b]
    if not shared:
        raise ArgumentError("Frontiers share no rho values")
    return max(abs(a[r] - b[r]) for r in shared)
