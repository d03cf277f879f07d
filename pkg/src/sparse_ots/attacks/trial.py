"""Desk-scale runs of the chosen-plaintext attacks, one AttackRecord per run."""
from __future__ import annotations

import logging
import math

import numpy as np

from sparse_ots.attacks.counting import (
    composite_representation,
    count_candidates,
    enumerate_candidates,
    permutation_candidate_count,
)
from sparse_ots.attacks.probes import (
    class1_attack,
    class1_plaintext,
    class2_attack,
    class2_plaintext,
    exact_encrypt,
    true_signed_matrix,
)
from sparse_ots.codec.cipher import encrypt
from sparse_ots.core.errors import ArgumentError, ScaleError
from sparse_ots.core.models import AttackMode, AttackRecord, SystemParams
from sparse_ots.experiments.runner import random_state
from sparse_ots.keystream.lfsr import Key, KeystreamSource, LfsrSpec, ssg_prefix

logger = logging.getLogger(__name__)

# Largest key searched exhaustively.
MAX_TRIAL_DEGREE = 24
# Largest candidate set materialized in memory.
MAX_CANDIDATES = 1 << 20


def _random_source(params: SystemParams, rng: np.random.Generator) -> tuple[KeystreamSource, int]:
    spec = LfsrSpec.primitive(params.k)
    state = random_state(rng, params.k)
    return KeystreamSource(spec, Key(degree=params.k, state=state)), state


def _require_noiseless(params: SystemParams) -> None:
    if params.sigma:
        raise ArgumentError("Chosen-plaintext probes assume noiseless encryption (sigma = 0)")


def class1_run(params: SystemParams, budget: float, seed: int) -> AttackRecord:
    """Probe a fresh random key with the constant plaintext and check the extracted counts."""
    _require_noiseless(params)
    rng = np.random.default_rng(seed)
    source, _ = _random_source(params, rng)
    ciphertext, key = encrypt(source, params, class1_plaintext(params))
    counts = class1_attack(ciphertext, params)
    truth = [int(np.count_nonzero(key.signs[c.row - 1] == 1)) for c in counts]
    s_cpa = count_candidates(counts).log2
    return AttackRecord(
        mode=AttackMode.CLASS1,
        s_cpa_log2=s_cpa,
        feasible=s_cpa <= budget,
        stage1_success=[c.plus for c in counts] == truth,
    )


def class2_run(params: SystemParams, seed: int) -> AttackRecord:
    """Probe a fresh random key with the balanced-ternary plaintext and check the extraction."""
    _require_noiseless(params)
    rng = np.random.default_rng(seed)
    source, _ = _random_source(params, rng)
    ciphertext, key = exact_encrypt(source, params, class2_plaintext(params.n))
    extracted = class2_attack(ciphertext, params)
    composite_representation(extracted, params)
    recovered = np.array_equal(extracted.signed_matrix(), true_signed_matrix(key, params))
    return AttackRecord(
        mode=AttackMode.CLASS2,
        feasible=True,
        stage1_success=recovered,
        permutation_log2=permutation_candidate_count(params).log2,
    )


def two_stage_cpa_trial(params: SystemParams, budget: float, seed: int) -> AttackRecord:
    """Class-1 probe, candidate keystream enumeration, then exhaustive key search.

    Stage 1 stops when log2 S_CPA exceeds ``budget``. Stage 2 keeps every key whose
    generator output starts with some candidate; a unique survivor is taken, ties are
    broken at random.

    Raises:
        ScaleError: If the key or the candidate set is too large to enumerate
    """
    if params.k > MAX_TRIAL_DEGREE:
        raise ScaleError(f"Key search over 2^{params.k} states exceeds desk scale")
    _require_noiseless(params)
    rng = np.random.default_rng(seed)
    source, true_state = _random_source(params, rng)
    ciphertext, key = encrypt(source, params, class1_plaintext(params))
    counts = class1_attack(ciphertext, params)
    total = count_candidates(counts)

    if total.log2 > budget:
        logger.debug("Stage 1 infeasible: log2 S_CPA = %.2f > L = %g", total.log2, budget)
        return AttackRecord(mode=AttackMode.TRIAL, s_cpa_log2=total.log2, feasible=False)
    if total.count > MAX_CANDIDATES:
        raise ScaleError(f"{total.count} candidate keystreams exceed {MAX_CANDIDATES}")

    candidates = set(enumerate_candidates(counts))
    prefix = tuple(int(s) for s in key.signs[: len(counts)].ravel())
    stage1 = prefix in candidates

    spec = source.spec
    length = len(counts) * params.q
    consistent = [
        state for state in range(1, 1 << params.k) if ssg_prefix(spec, state, length) in candidates
    ]
    if not consistent:
        guess = None
    elif len(consistent) == 1:
        guess = consistent[0]
    else:
        guess = consistent[int(rng.integers(len(consistent)))]
    work = total.count + (1 << params.k) - 1
    logger.debug(
        "Stage 2 kept %d of %d keys (work 2^%.1f)",
        len(consistent),
        (1 << params.k) - 1,
        math.log2(work),
    )
    return AttackRecord(
        mode=AttackMode.TRIAL,
        s_cpa_log2=total.log2,
        feasible=True,
        stage1_success=stage1,
        stage2_success=guess == true_state,
        work=work,
        consistent_keys=len(consistent),
    )
