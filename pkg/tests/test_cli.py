"""Tests for the qproduct command-line interface."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qproduct import cli, states

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def read_matrix(doc):
    return np.array([[complex(*z) for z in row] for row in doc["data"]])


@pytest.mark.parametrize(
    "fixture,argv",
    [
        ("example1_p05.json", ["--state", "example1", "--p", "0.5"]),
        ("example1_p03.json", ["--state", "example1", "--p", "0.3"]),
        ("example2.json", ["--state", "example2"]),
        ("w3.json", ["--state", "w", "--n", "3"]),
        ("bell.json", ["--state", "ghz", "--n", "2"]),
        ("product_22_3.json", ["--state", "random-product", "--dims", "2,2|3", "--seed", "5"]),
    ],
)
def test_gen_matches_frozen_fixture(capsys, fixture, argv):
    code, out, _ = run(capsys, "gen", *argv)
    assert code == 0
    assert out == (FIXTURES / fixture).read_text()


def test_gen_example1_values(capsys):
    _, out, _ = run(capsys, "gen", "--state", "example1", "--p", "0.5")
    doc = json.loads(out)
    assert doc["dims"] == [2, 2] and doc["kind"] == "density"
    np.testing.assert_array_equal(np.diag(read_matrix(doc)).real, [0.375, 0.125, 0.125, 0.375])


def test_gen_w_and_ghz(capsys):
    _, out, _ = run(capsys, "gen", "--state", "w", "--n", "3")
    doc = json.loads(out)
    amp = np.array([complex(*z) for z in doc["data"]])
    np.testing.assert_allclose(amp, np.array([0, 1, 1, 0, 1, 0, 0, 0]) / np.sqrt(3), atol=1e-15)
    _, out, _ = run(capsys, "gen", "--state", "ghz", "--n", "2")
    amp = np.array([complex(*z) for z in json.loads(out)["data"]])
    np.testing.assert_allclose(amp, np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-15)


def test_gen_read_write_roundtrip_is_bitwise(tmp_path, capsys):
    for argv in (["--state", "random", "--dims", "2,3", "--seed", "1"], ["--state", "w", "--n", "4"]):
        first = tmp_path / "a.json"
        assert run(capsys, "gen", *argv, "-o", first)[0] == 0
        state, _ = cli.read_state(first)
        second = tmp_path / "b.json"
        cli.write_state(second, state)
        again, _ = cli.read_state(second)
        assert first.read_bytes() == second.read_bytes()
        a = state.matrix if isinstance(state, states.DensityMatrix) else state.amplitudes
        b = again.matrix if isinstance(again, states.DensityMatrix) else again.amplitudes
        assert a.tobytes() == b.tobytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--state", "example1", "--p", "1.5"],
        ["gen", "--state", "example1"],
        ["gen", "--state", "nope"],
        ["gen", "--state", "random"],
        ["gen", "--state", "w", "--n", "1"],
    ],
)
def test_gen_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_realign_example2_split_1_23(capsys):
    code, out, _ = run(capsys, "realign", FIXTURES / "example2.json", "-P", "1|2,3", "--json")
    assert code == 0
    r = read_matrix(json.loads(out))
    expected = np.zeros((4, 16))
    expected[[0, 1, 2, 3], [0, 2, 8, 10]] = 0.5
    np.testing.assert_allclose(r, expected, atol=1e-12)


def test_realign_example1_text(capsys):
    code, out, _ = run(capsys, "realign", "-i", FIXTURES / "example1_p03.json", "-P", "1|2")
    assert code == 0
    rows = [[float(x) for x in line.split()] for line in out.strip().splitlines()]
    r = np.array(rows)
    assert r.shape == (4, 4)
    assert r[0, 0] == pytest.approx(0.325, abs=1e-15) and r[3, 3] == pytest.approx(0.325, abs=1e-15)
    assert r[0, 3] == pytest.approx(0.175, abs=1e-15) and r[3, 0] == pytest.approx(0.175, abs=1e-15)
    assert np.count_nonzero(r) == 4


def test_realign_product_file_is_rank_one(capsys):
    _, out, _ = run(capsys, "realign", FIXTURES / "product_22_3.json", "-P", "1,2|3", "--json")
    s = np.linalg.svd(read_matrix(json.loads(out)), compute_uv=False)
    assert s[1] <= 1e-12 * s[0]


def test_svals(capsys):
    code, out, _ = run(capsys, "svals", FIXTURES / "example1_p05.json", "-P", "1|2")
    assert code == 0
    np.testing.assert_allclose([float(x) for x in out.split()], [0.5, 0.25, 0, 0], atol=1e-15)


def test_test_command_exit_codes(capsys):
    code, out, _ = run(capsys, "test", FIXTURES / "example2.json", "--partition", "3|1,2")
    assert code == 0 and "verdict: product" in out
    code, out, _ = run(capsys, "test", FIXTURES / "example2.json", "-P", "1|2,3")
    assert code == 1 and "verdict: not product" in out
    code, _, _ = run(capsys, "test", FIXTURES / "example2.json", "-P", "1,2|3|")
    assert code == 2


def test_test_json_report(capsys):
    code, out, _ = run(capsys, "test", FIXTURES / "example1_p05.json", "-P", "1|2", "--json", "--tol", "1e-6")
    doc = json.loads(out)
    assert code == 1
    assert doc["command"] == "test"
    assert doc["tol"] == 1e-6
    assert doc["verdict"] is False
    assert doc["partition"] == "1|2"
    assert doc["ratio"] == pytest.approx(0.5)
    assert len(doc["input_digest"]) == 64


def test_test_k_partition(capsys):
    code, out, _ = run(capsys, "test", FIXTURES / "example2.json", "-P", "1|2|3", "--json")
    doc = json.loads(out)
    assert code == 1 and doc["verdict"] is False
    assert [s["verdict"] for s in doc["splits"]] == [False, False, True]
    code, _, _ = run(capsys, "test", FIXTURES / "product_22_3.json", "-P", "1|2|3")
    assert code == 1


def test_factorize(tmp_path, capsys):
    report = tmp_path / "r.json"
    code, _, _ = run(capsys, "factorize", FIXTURES / "example2.json", "-P", "3|1,2", "-o", report)
    assert code == 0
    doc = json.loads(report.read_text())
    assert [f["block"] for f in doc["factors"]] == ["3", "1,2"]
    np.testing.assert_allclose(read_matrix(doc["factors"][0]), [[1, 0], [0, 0]], atol=1e-10)
    np.testing.assert_allclose(read_matrix(doc["factors"][1]), states.gen_bell().matrix, atol=1e-10)
    for f in doc["factors"]:
        cli.state_from_dict(f)  # factors are valid state-file fragments
    code, out, _ = run(capsys, "factorize", FIXTURES / "example1_p05.json", "-P", "1|2", "--json")
    assert code == 1 and "factors" not in json.loads(out)


def test_factorize_k_partition(capsys):
    code, out, _ = run(capsys, "factorize", FIXTURES / "product_22_3.json", "-P", "1,2|3", "--json")
    assert code == 0
    assert len(json.loads(out)["factors"]) == 2


def test_analyze(capsys):
    assert run(capsys, "analyze", FIXTURES / "example2.json") == (0, "1,2|3\n", "")
    assert run(capsys, "analyze", FIXTURES / "w3.json") == (0, "1,2,3\n", "")
    assert run(capsys, "analyze", FIXTURES / "example1_p05.json") == (0, "1,2\n", "")
    code, out, _ = run(capsys, "analyze", FIXTURES / "product_22_3.json", "--json")
    doc = json.loads(out)
    assert doc["finest_partition"] == "1,2|3"
    assert [f["block"] for f in doc["factors"]] == ["1,2", "3"]


@pytest.mark.parametrize(
    "argv",
    [
        ["test", "missing.json", "-P", "1|2"],
        ["test", str(FIXTURES / "example2.json")],
        ["test", str(FIXTURES / "example2.json"), "-P", "1|2"],
        ["test", str(FIXTURES / "example2.json"), "-P", "1|2,3", "--tol", "2"],
        ["realign", str(FIXTURES / "example2.json"), "-P", "1|2|3"],
        ["analyze"],
        [],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_invalid_state_files_exit_2(tmp_path, capsys):
    bad = {
        "nonhermitian.json": {"dims": [2], "kind": "density", "data": [[[1, 0], [1, 0]], [[0, 0], [0, 0]]]},
        "unnormalized.json": {"dims": [2], "kind": "pure", "data": [[1, 0], [1, 0]]},
        "dims.json": {"dims": [3], "kind": "pure", "data": [[1, 0], [0, 0]]},
        "kind.json": {"dims": [1], "kind": "ket", "data": [[1, 0]]},
    }
    for name, doc in bad.items():
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        assert run(capsys, "analyze", path)[0] == 2, name
    path = tmp_path / "nan.json"
    path.write_text('{"dims": [1], "kind": "pure", "data": [[NaN, 0]]}')
    assert run(capsys, "analyze", path)[0] == 2
    path.write_text("not json")
    assert run(capsys, "analyze", path)[0] == 2


def test_numerical_failure_exit_3(capsys, monkeypatch):
    from qproduct.errors import NumericalError

    def boom(*a, **k):
        raise NumericalError("SVD did not converge")

    monkeypatch.setattr(cli, "finest_product_partition", boom)
    assert run(capsys, "analyze", FIXTURES / "w3.json")[0] == 3


def test_reports_are_deterministic(capsys):
    for argv in (
        ["test", FIXTURES / "example1_p05.json", "-P", "1|2", "--json"],
        ["analyze", FIXTURES / "product_22_3.json", "--json"],
    ):
        first = run(capsys, *argv)
        assert run(capsys, *argv) == first


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qproduct", "analyze", str(FIXTURES / "example2.json")],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == "1,2|3\n"
