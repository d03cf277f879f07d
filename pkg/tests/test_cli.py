"""Tests for the sots command line."""
import csv
import json
import math

import numpy as np
import pytest
from typer.testing import CliRunner

from sparse_ots.cli.app import app
from sparse_ots.codec.io import read_ciphertext
from sparse_ots.core.models import BasisKind
from sparse_ots.keystream.keyfile import read_key_file
from sparse_ots.transforms.bases import Basis

runner = CliRunner()


def _invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


def _csv_rows(path):
    with path.open() as handle:
        return list(csv.DictReader(line for line in handle if not line.startswith("#")))


@pytest.fixture
def key_path(tmp_path):
    """A freshly generated 32-bit key file."""
    path = tmp_path / "alice.key"
    result = _invoke("keygen", "--degree", 32, "--out", path)
    assert result.exit_code == 0, result.output
    return path


def test_keygen(key_path):
    """Test keygen writes a loadable key at position zero."""
    key_file = read_key_file(key_path)
    assert key_file.spec.degree == 32
    assert key_file.position == 0


def test_keygen_requires_output():
    """Test keygen without an output path is an argument error."""
    assert _invoke("keygen", "--degree", 16).exit_code == 2


def test_encrypt_decrypt_round_trip(tmp_path, key_path):
    """Test a sparse plaintext survives encrypt then decrypt at the recorded position."""
    basis = Basis(BasisKind.DCT, 64)
    alpha = np.zeros(64)
    alpha[[3, 17]] = [4.0, -2.5]
    x = basis.synthesize(alpha)
    plain = tmp_path / "x.txt"
    np.savetxt(plain, x)

    ct = tmp_path / "x.sots"
    result = _invoke("encrypt", "--key", key_path, "--input", plain, "--q", 8, "--out", ct)
    assert result.exit_code == 0, result.output
    assert read_ciphertext(ct).m == 32
    assert read_key_file(key_path).position > 0

    recovered = tmp_path / "x_hat.txt"
    result = _invoke(
        "decrypt", "--key", key_path, "--input", ct, "--position", 0,
        "--sparsity", 2, "--basis", "dct", "--out", recovered,
    )
    assert result.exit_code == 0, result.output
    assert np.allclose(np.loadtxt(recovered), x, atol=1e-8)


def test_encrypt_advances_keystream(tmp_path, key_path):
    """Test consecutive encryptions of one plaintext use fresh keystream."""
    plain = tmp_path / "ones.txt"
    np.savetxt(plain, np.ones(64))
    first, second = tmp_path / "a.sots", tmp_path / "b.sots"
    used = []
    for out in (first, second):
        result = _invoke("encrypt", "--key", key_path, "-i", plain, "--q", 8, "-o", out)
        assert result.exit_code == 0, result.output
        used.append(read_key_file(key_path).emitted)
    # Each run adds at least its q*M sign symbols to the persisted count.
    assert used[0] >= 8 * 32
    assert used[1] >= used[0] + 8 * 32
    assert not np.array_equal(read_ciphertext(first).values, read_ciphertext(second).values)


def test_encrypt_argument_errors(tmp_path, key_path):
    """Test invalid dimensions and missing files exit with code 2."""
    plain = tmp_path / "x.txt"
    np.savetxt(plain, np.ones(64))
    out = tmp_path / "x.sots"
    assert _invoke("encrypt", "--key", key_path, "-i", plain, "--q", 7, "-o", out).exit_code == 2
    missing = tmp_path / "none.txt"
    assert _invoke("encrypt", "--key", key_path, "-i", missing, "--q", 8, "-o", out).exit_code == 2
    missing_ct = tmp_path / "none.sots"
    assert _invoke("decrypt", "--key", key_path, "-i", missing_ct, "-o", out).exit_code == 2


def test_bounds_point(tmp_path):
    """Test the single-point report reproduces the q_CPA and P_suc anchors."""
    out = tmp_path / "bounds.csv"
    result = _invoke(
        "--out", out, "bounds", "--k", 256, "--L", 128, "--q", 256, "--gamma", 0.5, "--M", 256
    )
    assert result.exit_code == 0, result.output
    (row,) = _csv_rows(out)
    assert row["q_cpa"] == "137"
    assert float(row["p_suc_up"]) == pytest.approx(2 * math.exp(-32), rel=1e-9)
    assert row["indist_gamma"] == "0.5"
    assert row["notes"] == ""


def test_bounds_invalid_point_exit_code(tmp_path):
    """Test a violated key-length condition exits with code 3 after writing the row."""
    out = tmp_path / "bounds.csv"
    result = _invoke("--out", out, "bounds", "--k", 200, "--q", 200)
    assert result.exit_code == 3
    (row,) = _csv_rows(out)
    assert row["q_cpa"] == ""
    assert "q_cpa" in row["notes"]


def test_bounds_sweep(tmp_path):
    """Test a sweep writes one row per value, including the L alias."""
    out = tmp_path / "sweep.csv"
    result = _invoke(
        "--out", out, "bounds", "--k", 256, "sweep", "--var", "q", "--from", 128, "--to", 256,
        "--step", 64,
    )
    assert result.exit_code == 0, result.output
    assert [row["q"] for row in _csv_rows(out)] == ["128", "192", "256"]

    result = _invoke(
        "--out", out, "bounds", "sweep", "--var", "L", "--from", 100, "--to", 128, "--step", 28
    )
    assert result.exit_code == 0, result.output
    assert [float(row["budget"]) for row in _csv_rows(out)] == [100.0, 128.0]


def test_bounds_sweep_unknown_variable(tmp_path):
    """Test an unknown sweep variable is an argument error."""
    result = _invoke("bounds", "sweep", "--var", "colour", "--from", 1, "--to", 2)
    assert result.exit_code == 2


def test_attack_class1_json_lines(tmp_path):
    """Test one JSON record per trial with the aliased candidate count."""
    out = tmp_path / "runs.jsonl"
    result = _invoke(
        "--out", out, "--seed", 7, "attack", "--mode", "class1",
        "--n", 64, "--m", 16, "--q", 8, "--k", 16, "--trials", 3,
    )
    assert result.exit_code == 0, result.output
    records = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(records) == 3
    assert all(r["mode"] == "class1" and r["stage1_success"] for r in records)
    assert all("S_CPA_log2" in r for r in records)


def test_attack_accepts_seed_and_out_after_command(tmp_path):
    """Test --seed and --out given after the subcommand match the global forms."""
    args = ("--mode", "trial", "--n", 16, "--m", 4, "--q", 4, "--k", 8, "--L", 3, "--trials", 2)
    late, early = tmp_path / "late.jsonl", tmp_path / "early.jsonl"
    result = _invoke("attack", *args, "--seed", 7, "--out", late)
    assert result.exit_code == 0, result.output
    result = _invoke("--seed", 7, "--out", early, "attack", *args)
    assert result.exit_code == 0, result.output
    assert late.read_text() == early.read_text()
    assert len(late.read_text().splitlines()) == 2


def test_attack_params_file(tmp_path):
    """Test parameters read from a key=value file."""
    params = tmp_path / "toy.conf"
    params.write_text("n=32\nm=8\nq=4\nk=16\n")
    out = tmp_path / "runs.jsonl"
    result = _invoke("--out", out, "attack", "--mode", "class2", "--params-file", params)
    assert result.exit_code == 0, result.output
    (record,) = [json.loads(line) for line in out.read_text().splitlines()]
    assert record["stage1_success"]


def test_attack_scale_limit():
    """Test an oversized trial exits with code 2."""
    result = _invoke("attack", "--mode", "trial", "--n", 64, "--m", 16, "--q", 8, "--k", 32)
    assert result.exit_code == 2


def test_cmax(tmp_path):
    """Test the identity basis with K=1 reports c_max = N."""
    out = tmp_path / "cmax.csv"
    result = _invoke(
        "--out", out, "cmax", "--basis", "identity", "--n", 64, "--k", 1, "--trials", 20
    )
    assert result.exit_code == 0, result.output
    assert _csv_rows(out) == [{"basis": "identity", "N": "64", "K": "1", "c_max": "64"}]


def test_tables(tmp_path):
    """Test the bound tables land in the output directory."""
    result = _invoke("--out", tmp_path, "tables", "--q-values", "8,256")
    assert result.exit_code == 0, result.output
    assert [row["q"] for row in _csv_rows(tmp_path / "success_vs_q.csv")] == ["8", "256"]
    assert (tmp_path / "pd_bound_vs_gamma.csv").exists()


def test_phase_from_config_file(tmp_path):
    """Test the global config file feeds the phase harness and flags override it."""
    conf = tmp_path / "phase.conf"
    conf.write_text("n=64\nq=8\nrho_values=0.5\nkappa_step=0.25\nkappa_max=0.5\ntrials=2\n")
    out = tmp_path / "phase.csv"
    result = _invoke("--config", conf, "--out", out, "phase", "--kappa-max", 0.25)
    assert result.exit_code == 0, result.output
    rows = _csv_rows(out)
    assert [(row["rho"], row["kappa"]) for row in rows] == [("0.5", "0.25")]


def test_phase_output_from_config_file(tmp_path, monkeypatch):
    """Test ``output=`` in the config file is used when --out is absent."""
    monkeypatch.chdir(tmp_path)
    conf = tmp_path / "phase.conf"
    conf.write_text(
        "kind=phase\noutput=runs/phase.csv\nn=64\nq=8\nrho_values=0.5\n"
        "kappa_step=0.25\nkappa_max=0.25\ntrials=2\n"
    )
    result = _invoke("--config", conf, "phase")
    assert result.exit_code == 0, result.output
    assert [row["kappa"] for row in _csv_rows(tmp_path / "runs" / "phase.csv")] == ["0.25"]


def test_config_for_other_harness_rejected(tmp_path):
    """Test a config declaring another harness exits with code 2."""
    conf = tmp_path / "image.conf"
    conf.write_text("kind=image\nn=64\n")
    assert _invoke("--config", conf, "phase").exit_code == 2
    assert _invoke("--config", conf, "tables", "--q-values", "8").exit_code == 2


def test_image_synthetic(tmp_path):
    """Test the image command writes its artifacts and a CSV row."""
    result = _invoke("--out", tmp_path, "image", "--side", 8)
    assert result.exit_code == 0, result.output
    assert (tmp_path / "synthetic8_decrypted.pgm").exists()
    assert (tmp_path / "synthetic8.sots").exists()
    assert "synthetic8" in result.output


def test_indist(tmp_path):
    """Test the distinguishing game writes one row per gamma."""
    out = tmp_path / "indist.csv"
    result = _invoke(
        "--out", out, "indist", "--n", 64, "--m", 32, "--q", 8, "--gammas", "0.5,1.0",
        "--trials", 20,
    )
    assert result.exit_code == 0, result.output
    rows = _csv_rows(out)
    assert [row["gamma"] for row in rows] == ["0.5", "1"]
    assert float(rows[1]["bound_pd"]) == 0.5
