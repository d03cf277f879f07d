"""Tests for sensing key construction and the implicit operator."""
import math
from collections import Counter

import numpy as np
import pytest

from sparse_ots.core.errors import ArgumentError, ConfigurationError
from sparse_ots.core.models import ExperimentConfig, SystemParams
from sparse_ots.keystream.lfsr import Key, KeystreamSource, LfsrSpec
from sparse_ots.sensing.operator import (
    SensingKey,
    apply_phi,
    apply_phi_adjoint,
    build_sensing_key,
    dump_key,
    index_set,
)
from sparse_ots.sensing.permutation import generate_permutation


@pytest.fixture
def small_params():
    """N=8, M=4, q=2 instance."""
    return SystemParams(n=8, m=4, q=2, k=8)


def _source(state: int = 0x9D, degree: int = 8) -> KeystreamSource:
    return KeystreamSource(LfsrSpec.primitive(degree), Key(degree=degree, state=state))


def _dense(key: SensingKey, params: SystemParams) -> np.ndarray:
    return np.column_stack([apply_phi(key, params, e) for e in np.eye(params.n)])


def test_params_validation():
    """Test the structural constraints on N, M, q and k."""
    SystemParams(n=8, m=4, q=2, k=8)
    SystemParams(n=16, m=16, q=16, k=8)  # dense case
    with pytest.raises(ValueError):
        SystemParams(n=8, m=4, q=3, k=8)  # eta not integer
    with pytest.raises(ValueError):
        SystemParams(n=8, m=3, q=2, k=8)  # Mr not integer
    with pytest.raises(ValueError):
        SystemParams(n=8, m=4, q=2, k=16)  # N < k


def test_checked_params_raise_configuration_error():
    """Test structural violations through the checked constructor are configuration errors."""
    assert SystemParams.checked(n=8, m=4, q=2, k=8) == SystemParams(n=8, m=4, q=2, k=8)
    with pytest.raises(ConfigurationError, match="eta"):
        SystemParams.checked(n=8, m=4, q=3, k=8)
    with pytest.raises(ConfigurationError, match="N >= k"):
        SystemParams.checked(n=8, m=4, q=2, k=16)
    with pytest.raises(ConfigurationError):
        SystemParams.checked(n=8, m=4, q=0)
    with pytest.raises(ConfigurationError):
        ExperimentConfig(n=64, q=8).system_params(m=19)


def test_derived_quantities():
    """Test eta, Mr, rho and tau."""
    params = SystemParams(n=256, m=128, q=32, k=64)
    assert params.eta == 8
    assert params.mr == 16
    assert params.rho == 0.5
    assert params.tau == 2


def test_index_set(small_params):
    """Test consecutive index blocks that wrap every eta rows."""
    assert index_set(1, small_params).tolist() == [1, 2]
    assert index_set(2, small_params).tolist() == [3, 4]
    assert index_set(4, small_params).tolist() == [7, 8]
    with pytest.raises(ArgumentError):
        index_set(0, small_params)
    with pytest.raises(ArgumentError):
        index_set(5, small_params)

    wide = SystemParams(n=8, m=8, q=2, k=8)
    assert index_set(5, wide).tolist() == [1, 2]
    for i in range(1, 9):
        block = index_set(i, wide)
        assert len(block) == 2 and block.max() <= 8


def test_build_sensing_key_reads_consecutive_symbols(small_params):
    """Test signs take the first qM symbols row by row, then the permutation follows."""
    expected = _source().take_bits(small_params.q * small_params.m)
    source = _source()
    key = build_sensing_key(source, small_params)
    assert key.signs.tolist() == expected.reshape(4, 2).tolist()
    assert key.c_s == 8
    assert sorted(key.permutation.tolist()) == list(range(8))
    assert source.keystream_count == key.c_s + key.c_p


def test_keys_differ_between_encryptions():
    """Test two keys drawn from one source differ."""
    source = _source(0x3C, 16)
    params = SystemParams(n=64, m=32, q=8, k=16)
    first = build_sensing_key(source, params)
    second = build_sensing_key(source, params)
    assert not (
        np.array_equal(first.signs, second.signs)
        and np.array_equal(first.permutation, second.permutation)
    )


def test_permutation_trivial_sizes():
    """Test N=1 uses no bits and N=2 swaps on a 0 bit."""
    perm, used = generate_permutation(iter([]), 1)
    assert perm.tolist() == [0]
    assert used == 0

    identity, used = generate_permutation(iter([1]), 2)
    swapped, _ = generate_permutation(iter([0]), 2)
    assert identity.tolist() == [0, 1]
    assert swapped.tolist() == [1, 0]
    assert used == 1


def test_permutation_uniformity():
    """Test all 24 permutations of 4 elements appear at about equal rates."""
    rng = np.random.default_rng(11)
    trials = 100_000
    counts: Counter[tuple[int, ...]] = Counter()
    for _ in range(trials):
        bits = iter(rng.integers(0, 2, size=64).tolist())
        perm, _ = generate_permutation(bits, 4)
        counts[tuple(perm.tolist())] += 1
    assert len(counts) == 24
    p = 1 / 24
    sigma = math.sqrt(trials * p * (1 - p))
    for count in counts.values():
        assert abs(count - trials * p) < 4 * sigma


@pytest.mark.slow
def test_permutation_bit_cost():
    """Test the average permutation cost at N=1024 stays between N log2 N and twice that."""
    params = SystemParams(n=1024, m=512, q=16, k=16)
    costs = []
    for state in range(1, 101):
        source = KeystreamSource(LfsrSpec.primitive(16), Key(16, state * 613))
        costs.append(build_sensing_key(source, params).c_p)
    mean = sum(costs) / len(costs)
    assert 1024 * 10 <= mean <= 2 * 1024 * 10


def test_apply_phi_zero_and_all_ones(small_params):
    """Test y = 0 for x = 0 and y_i = q for the constant probe with all-plus signs."""
    key = SensingKey(
        signs=np.ones((4, 2), dtype=np.int8), permutation=np.arange(8, dtype=np.int64)
    )
    assert np.all(apply_phi(key, small_params, np.zeros(8)) == 0)
    probe = np.full(8, math.sqrt(small_params.mr))
    assert np.allclose(apply_phi(key, small_params, probe), 2.0)


def test_phi_structure(small_params):
    """Test each row has q entries of magnitude 1/sqrt(Mr) on the permuted block."""
    key = build_sensing_key(_source(), small_params)
    phi = _dense(key, small_params)
    scale = 1 / math.sqrt(small_params.mr)
    for i in range(small_params.m):
        nonzero = np.flatnonzero(phi[i])
        assert len(nonzero) == small_params.q
        assert np.allclose(np.abs(phi[i, nonzero]), scale)
        block = index_set(i + 1, small_params) - 1
        assert sorted(nonzero.tolist()) == sorted(key.permutation[block].tolist())


def test_adjoint_identity():
    """Test <Phi x, y> = <x, Phi^T y> on random triples."""
    params = SystemParams(n=64, m=32, q=8, k=16)
    rng = np.random.default_rng(5)
    source = _source(0xFACE, 16)
    for _ in range(100):
        key = build_sensing_key(source, params)
        x = rng.standard_normal(params.n)
        y = rng.standard_normal(params.m)
        lhs = apply_phi(key, params, x) @ y
        rhs = x @ apply_phi_adjoint(key, params, y)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_adjoint_zero_and_single_row():
    """Test the adjoint of 0 and the one-row spread onto the permuted support."""
    params = SystemParams(n=8, m=4, q=2, k=8)
    key = build_sensing_key(_source(), params)
    assert np.all(apply_phi_adjoint(key, params, np.zeros(4)) == 0)

    single = SystemParams(n=4, m=2, q=2, k=4)
    key = build_sensing_key(_source(0x9, 4), single)
    out = apply_phi_adjoint(key, single, np.array([1.0, 0.0]))
    support = key.permutation[:2]
    assert np.allclose(out[support], key.signs[0] / math.sqrt(single.mr))
    assert np.count_nonzero(out) == 2


def test_dimension_errors(small_params):
    """Test wrong vector lengths are rejected."""
    key = build_sensing_key(_source(), small_params)
    with pytest.raises(ArgumentError):
        apply_phi(key, small_params, np.zeros(7))
    with pytest.raises(ArgumentError):
        apply_phi_adjoint(key, small_params, np.zeros(5))


@pytest.mark.slow
def test_energy_preserved_on_average():
    """Test E||Phi x||^2 = ||x||^2 over fresh keys."""
    params = SystemParams(n=128, m=64, q=16, k=16)
    rng = np.random.default_rng(2)
    x = rng.standard_normal(params.n)
    source = _source(0x13579BDF, 32)
    energies = [
        float(np.sum(apply_phi(build_sensing_key(source, params), params, x) ** 2))
        for _ in range(2000)
    ]
    assert abs(np.mean(energies) / float(x @ x) - 1) < 0.02


def test_dump_key_lists_rows_and_permutation(small_params):
    """Test the debug dump is 1-based."""
    key = build_sensing_key(_source(), small_params)
    lines = dump_key(key, small_params).splitlines()
    assert lines[0].startswith("1: 1:")
    assert lines[-1].startswith("perm: ")
    assert sorted(int(v) for v in lines[-1][6:].split(",")) == list(range(1, 9))
