"""Two-plaintext distinguishing game against an energy-threshold detector."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from sparse_ots.codec.cipher import encrypt, pnr_of
from sparse_ots.core.errors import ArgumentError, BoundInvalidError
from sparse_ots.core.models import ExperimentConfig, IndistParams, SystemParams
from sparse_ots.experiments.runner import item_rng, random_state, run_items
from sparse_ots.keystream.lfsr import Key, KeystreamSource, LfsrSpec
from sparse_ots.security.bounds import p_d_bound
from sparse_ots.transforms.statistics import c_statistic

logger = logging.getLogger(__name__)

INDIST_HEADER = ("gamma", "q", "empirical_pd", "bound_pd")


@dataclass(frozen=True)
class DistinguishingResult:
    gamma: float
    q: int
    empirical_pd: float
    stderr: float
    bound_pd: float | None

    @property
    def dominated(self) -> bool:
        """Empirical rate within three standard errors of the bound (True if no bound)."""
        return self.bound_pd is None or self.empirical_pd <= self.bound_pd + 3.0 * self.stderr

    def as_row(self) -> dict[str, object]:
        return {
            "gamma": self.gamma,
            "q": self.q,
            "empirical_pd": self.empirical_pd,
            "bound_pd": self.bound_pd,
        }


def energy_threshold(strong: float, gamma: float) -> float:
    """Likelihood-ratio cut on ||y||^2 between energies ``strong`` and ``gamma * strong``."""
    if gamma >= 1.0:
        return strong
    return strong * gamma * math.log(1.0 / gamma) / (1.0 - gamma)


def _canonical(
    x0: npt.NDArray[np.float64], x1: npt.NDArray[np.float64]
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Order the pair by descending energy, ties broken by content."""
    first, second = sorted((x0, x1), key=lambda v: (-float(v @ v), tuple(v.tolist())))
    return first, second


def distinguishing_rate(
    x0: npt.ArrayLike,
    x1: npt.ArrayLike,
    params: SystemParams,
    trials: int,
    seed: int,
    grid: int = 0,
) -> tuple[float, float]:
    """Success rate of the energy detector and its standard error.

    Each trial encrypts both plaintexts under independent fresh keys; the detector names the
    stronger plaintext when ||y||^2 reaches the threshold. The result does not depend on the
    order in which the pair is given.
    """
    if trials < 1:
        raise ArgumentError("Need at least one trial")
    strong, weak = _canonical(np.asarray(x0, dtype=np.float64), np.asarray(x1, dtype=np.float64))
    energy = float(strong @ strong)
    if energy == 0.0:
        raise ArgumentError("Plaintexts must not both be zero")
    cut = energy_threshold(energy, float(weak @ weak) / energy)
    spec = LfsrSpec.primitive(params.k)
    correct = 0
    for trial in range(trials):
        rng = item_rng(seed, grid, trial)
        for label, plaintext in enumerate((strong, weak)):
            source = KeystreamSource(spec, Key(params.k, random_state(rng, params.k)))
            noise_seed = int(rng.integers(1 << 62))
            ciphertext, _ = encrypt(source, params, plaintext, noise_seed=noise_seed)
            said_strong = float(ciphertext.values @ ciphertext.values) >= cut
            correct += said_strong == (label == 0)
    rate = correct / (2 * trials)
    stderr = math.sqrt(max(rate * (1.0 - rate), 0.25 / trials) / (2 * trials))
    return rate, stderr


def flat_pair(
    rng: np.random.Generator, n: int, gamma: float
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Two random +/-1 plaintexts with energy ratio ``gamma``."""
    if not 0.0 < gamma <= 1.0:
        raise ArgumentError(f"gamma = {gamma} outside (0, 1]")
    signs = rng.choice(np.array([-1.0, 1.0]), size=(2, n))
    return signs[0], math.sqrt(gamma) * signs[1]


def run_indistinguishability(config: ExperimentConfig) -> list[DistinguishingResult]:
    """Empirical detector success per configured gamma, next to the closed-form bound."""
    params = config.system_params()

    def evaluate(job: tuple[int, float]) -> DistinguishingResult:
        grid, gamma = job
        x0, x1 = flat_pair(item_rng(config.seed, grid, 0, stream=1), params.n, gamma)
        rate, stderr = distinguishing_rate(x0, x1, params, config.trials, config.seed, grid)
        pnr = pnr_of(x0, params.m, params.sigma)
        c_max = max(1.0, c_statistic(x0), c_statistic(x1))
        try:
            bound: float | None = p_d_bound(
                IndistParams(m=params.m, q=params.q, gamma=gamma, pnr=pnr, c_max=c_max)
            )
        except BoundInvalidError as e:
            logger.info("No p_d bound at gamma=%s: %s", gamma, e)
            bound = None
        result = DistinguishingResult(gamma, params.q, rate, stderr, bound)
        if not result.dominated:
            logger.warning(
                "Detector success %.4f exceeds bound %.4f at gamma=%s", rate, bound, gamma
            )
        return result

    return run_items(evaluate, list(enumerate(config.gammas)), config.workers)
