"""Tests for sparsifying bases and plaintext statistics."""
import math

import numpy as np
import pytest
from scipy import fft, linalg

from sparse_ots.core.errors import ArgumentError
from sparse_ots.core.models import Arrangement, BasisKind
from sparse_ots.transforms.bases import Basis, analyze, coherence, synthesize
from sparse_ots.transforms.statistics import c_statistic, estimate_c_max, sample_sparse

ALL_KINDS = list(BasisKind)


def test_identity_basis():
    """Test the identity basis leaves vectors alone."""
    x = np.arange(16, dtype=float)
    basis = Basis(BasisKind.IDENTITY, 16)
    assert np.array_equal(analyze(basis, x), x)
    assert np.array_equal(synthesize(basis, x), x)


def test_dct_of_constant():
    """Test a constant vector has only a DC coefficient."""
    alpha = analyze(Basis(BasisKind.DCT, 32), np.full(32, 3.0))
    assert alpha[0] == pytest.approx(3.0 * math.sqrt(32))
    assert np.max(np.abs(alpha[1:])) < 1e-12


@pytest.mark.parametrize("kind", ALL_KINDS)
@pytest.mark.parametrize("arrangement", list(Arrangement))
def test_round_trip_and_isometry(kind, arrangement):
    """Test synthesis inverts analysis and both preserve norms."""
    basis = Basis(kind, 64, arrangement)
    rng = np.random.default_rng(3)
    for _ in range(100):
        x = rng.standard_normal(64)
        alpha = basis.analyze(x)
        assert np.linalg.norm(basis.synthesize(alpha) - x) <= 1e-10 * np.linalg.norm(x)
        assert np.linalg.norm(alpha) == pytest.approx(np.linalg.norm(x), rel=1e-10)


@pytest.mark.parametrize("kind", ALL_KINDS)
@pytest.mark.parametrize("arrangement", list(Arrangement))
def test_orthonormal_matrix(kind, arrangement):
    """Test the materialized basis satisfies Psi Psi^T = I."""
    psi = Basis(kind, 64, arrangement).matrix()
    assert np.max(np.abs(psi @ psi.T - np.eye(64))) < 1e-10


def test_fast_transforms_match_dense_references():
    """Test the DCT and WHT against scipy's dense constructions."""
    n = 64
    dct_ref = fft.dct(np.eye(n), norm="ortho", axis=0)
    assert np.allclose(Basis(BasisKind.DCT, n).matrix(), dct_ref, atol=1e-12)
    wht_ref = linalg.hadamard(n) / math.sqrt(n)
    assert np.allclose(Basis(BasisKind.WHT, n).matrix(), wht_ref, atol=1e-12)


def test_batched_transform():
    """Test a batch along the leading axis equals row-by-row transforms."""
    basis = Basis(BasisKind.D4, 32)
    batch = np.random.default_rng(4).standard_normal((5, 32))
    expected = np.stack([basis.analyze(row) for row in batch])
    assert np.allclose(basis.analyze(batch), expected)


@pytest.mark.parametrize("kind", [BasisKind.DCT, BasisKind.HAAR, BasisKind.D4, BasisKind.WHT])
def test_kronecker_consistency(kind):
    """Test the 2D basis applies the 1D basis to both sides of the column-stacked image."""
    side = 8
    psi = Basis(kind, side).matrix()
    image = np.random.default_rng(8).standard_normal((side, side))
    basis = Basis(kind, side * side, Arrangement.KRONECKER_2D)
    expected = (psi @ image @ psi.T).ravel(order="F")
    assert np.allclose(basis.analyze(image.ravel(order="F")), expected)


def test_unit_coefficient_gives_unit_column():
    """Test e_j synthesizes to a unit-norm basis column."""
    basis = Basis(BasisKind.HAAR, 32)
    unit = np.zeros(32)
    unit[5] = 1.0
    column = synthesize(basis, unit)
    assert np.linalg.norm(column) == pytest.approx(1.0)
    assert np.allclose(column, basis.matrix()[5])
    assert np.all(synthesize(basis, np.zeros(32)) == 0)


def test_basis_constraints():
    """Test power-of-two and shape requirements."""
    Basis(BasisKind.DCT, 12)
    with pytest.raises(ArgumentError):
        Basis(BasisKind.WHT, 12)
    with pytest.raises(ArgumentError):
        Basis(BasisKind.HAAR, 24)
    with pytest.raises(ArgumentError):
        Basis(BasisKind.D4, 2)
    with pytest.raises(ArgumentError):
        Basis(BasisKind.DCT, 50, Arrangement.KRONECKER_2D)
    with pytest.raises(ArgumentError):
        Basis(BasisKind.HAAR, 36, Arrangement.KRONECKER_2D)
    with pytest.raises(ArgumentError):
        Basis(BasisKind.DCT, 16).analyze(np.zeros(15))


def test_coherence_values():
    """Test coherence of the identity, Walsh-Hadamard and DCT bases."""
    assert coherence(Basis(BasisKind.IDENTITY, 64)) == pytest.approx(8.0)
    assert coherence(Basis(BasisKind.WHT, 64)) == pytest.approx(1.0)
    n = 1024
    # Largest DCT entry sits at frequency 1, sample 0.
    expected = math.sqrt(2.0) * math.cos(math.pi / (2 * n))
    assert abs(coherence(Basis(BasisKind.DCT, n)) - expected) < 1e-9


def test_c_statistic_extremes():
    """Test c is 1 for flat energy and N for a single spike."""
    assert c_statistic(np.full(64, -2.5)) == pytest.approx(1.0)
    spike = np.zeros(64)
    spike[10] = 4.0
    assert c_statistic(spike) == pytest.approx(64.0)
    with pytest.raises(ArgumentError):
        c_statistic(np.zeros(8))


def test_c_statistic_range():
    """Test 1 <= c <= N on random vectors."""
    rng = np.random.default_rng(9)
    for _ in range(200):
        x = rng.standard_normal(32) * rng.exponential(size=32)
        assert 1.0 - 1e-12 <= c_statistic(x) <= 32.0 + 1e-12


def test_sample_sparse():
    """Test the sampled coefficient vectors have exactly K nonzeros."""
    alpha = sample_sparse(np.random.default_rng(1), 50, 64, 6)
    assert alpha.shape == (50, 64)
    assert np.all(np.count_nonzero(alpha, axis=1) == 6)
    assert not sample_sparse(np.random.default_rng(1), 3, 64, 0).any()
    with pytest.raises(ArgumentError):
        sample_sparse(np.random.default_rng(1), 3, 8, 9)


def test_estimate_c_max_identity():
    """Test identity basis with K=1 attains c = N."""
    assert estimate_c_max(Basis(BasisKind.IDENTITY, 128), 1, 50, seed=0) == pytest.approx(128.0)


def test_estimate_c_max_reproducible():
    """Test the estimate depends only on the seed."""
    basis = Basis(BasisKind.DCT, 128)
    assert estimate_c_max(basis, 4, 500, seed=7) == estimate_c_max(basis, 4, 500, seed=7)
    with pytest.raises(ArgumentError):
        estimate_c_max(basis, 4, 0, seed=7)


def test_localized_bases_concentrate_energy():
    """Test wavelet plaintexts are far more concentrated than DCT plaintexts."""
    dct = estimate_c_max(Basis(BasisKind.DCT, 256), 8, 2000, seed=1)
    haar = estimate_c_max(Basis(BasisKind.HAAR, 256), 8, 2000, seed=1)
    assert 1.0 <= dct < haar / 3


@pytest.mark.slow
@pytest.mark.parametrize(
    ("kind", "expected"),
    [(BasisKind.DCT, 4.0), (BasisKind.WHT, 4.0), (BasisKind.HAAR, 555.0)],
)
def test_c_max_reference_values(kind, expected):
    """Test 10^5 eight-sparse plaintexts at N=1024 land within 15% of the reference c_max."""
    estimate = estimate_c_max(Basis(kind, 1024), 8, 100_000, seed=0)
    assert estimate == pytest.approx(expected, rel=0.15)
