"""Candidate counting and Monte-Carlo checks of the counting arguments."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from sparse_ots.attacks.probes import ExtractedMatrix, RowCount
from sparse_ots.core.errors import ArgumentError, StructuralError
from sparse_ots.core.models import CpaParams, SystemParams
from sparse_ots.security.bounds import s_cpa_low


@dataclass(frozen=True, slots=True)
class CandidateCount:
    """Exact candidate count with its log2."""

    count: int

    @property
    def log2(self) -> float:
        return math.log2(self.count)


def count_candidates(counts: Sequence[RowCount]) -> CandidateCount:
    """S_CPA = prod C(q, q_i+)."""
    if not counts:
        raise ArgumentError("No row counts given")
    total = 1
    for row in counts:
        total *= math.comb(row.q, row.plus)
    return CandidateCount(total)


def enumerate_candidates(counts: Sequence[RowCount]) -> Iterator[tuple[int, ...]]:
    """Every bipolar keystream prefix consistent with the row counts, rows concatenated."""
    per_row = []
    for row in counts:
        patterns = []
        for plus_at in itertools.combinations(range(row.q), row.plus):
            signs = [-1] * row.q
            for j in plus_at:
                signs[j] = 1
            patterns.append(tuple(signs))
        per_row.append(patterns)
    for combo in itertools.product(*per_row):
        yield tuple(itertools.chain.from_iterable(combo))


def permutation_candidate_count(params: SystemParams) -> CandidateCount:
    """(q!)^eta permutations agree with a fully extracted class-2 support."""
    return CandidateCount(math.factorial(params.q) ** params.eta)


@dataclass(frozen=True)
class CompositeCensus:
    """Per-column composite integers (columns 1..N) and how often each value occurs."""

    values: list[int]
    census: Counter[int]


def composite_representation(extracted: ExtractedMatrix, params: SystemParams) -> CompositeCensus:
    """c_j = sum_i c_ij 2^(i-1) over the 0/1 support matrix.

    Raises:
        StructuralError: Unless there are exactly eta distinct values, q columns each
    """
    if len(extracted.rows) != params.m:
        raise ArgumentError(f"Need all {params.m} rows, got {len(extracted.rows)}")
    values = [0] * params.n
    for i, entries in enumerate(extracted.rows):
        bit = 1 << i
        for position, _ in entries:
            values[position - 1] |= bit
    census = Counter(values)
    if len(census) != params.eta or any(c != params.q for c in census.values()):
        raise StructuralError(
            f"Composite census {dict(census)} is not {params.eta} values x {params.q} columns"
        )
    return CompositeCensus(values=values, census=census)


# ============================================================================
# Monte-Carlo checks
# ============================================================================


@dataclass(frozen=True)
class HoeffdingCheck:
    """Empirical Pr[|y| < t] for sums of q random signs against 1 - 2 exp(-t^2 / 2q)."""

    empirical: float
    bound: float
    stderr: float

    @property
    def holds(self) -> bool:
        return self.empirical >= self.bound - 3.0 * self.stderr


def _sign_sums(rng: np.random.Generator, q: int, size: int) -> npt.NDArray[np.int64]:
    return 2 * rng.binomial(q, 0.5, size=size) - q


def hoeffding_validate(q: int, t: float, trials: int, seed: int) -> HoeffdingCheck:
    if not 0 <= t <= q:
        raise ArgumentError(f"t = {t} outside [0, {q}]")
    if trials < 1:
        raise ArgumentError("Need at least one trial")
    rng = np.random.default_rng(seed)
    sums = _sign_sums(rng, q, trials)
    empirical = float(np.mean(np.abs(sums) < t))
    stderr = math.sqrt(max(empirical * (1.0 - empirical), 1.0 / trials) / trials)
    return HoeffdingCheck(
        empirical=empirical, bound=1.0 - 2.0 * math.exp(-t * t / (2.0 * q)), stderr=stderr
    )


@dataclass(frozen=True)
class CandidateBoundCheck:
    """Empirical Pr[S_CPA >= lower bound] against the promised 1 - eps2."""

    empirical: float
    required: float
    stderr: float

    @property
    def holds(self) -> bool:
        return self.empirical >= self.required - 3.0 * self.stderr


def validate_candidate_bound(cpa: CpaParams, trials: int, seed: int) -> CandidateBoundCheck:
    """Simulate tau independent rows of q fair signs and compare S_CPA to its lower bound."""
    floor = s_cpa_low(cpa)
    table = np.array([math.log2(math.comb(cpa.q, a)) for a in range(cpa.q + 1)])
    rng = np.random.default_rng(seed)
    plus = rng.binomial(cpa.q, 0.5, size=(trials, cpa.tau))
    log_counts = table[plus].sum(axis=1)
    empirical = float(np.mean(log_counts >= floor - 1e-9))
    stderr = math.sqrt(max(empirical * (1.0 - empirical), 1.0 / trials) / trials)
    return CandidateBoundCheck(empirical=empirical, required=1.0 - cpa.eps2, stderr=stderr)
