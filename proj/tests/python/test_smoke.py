import math
import pathlib

import numpy as np
import pytest

import ism_kdr

DATA = pathlib.Path(__file__).resolve().parents[2] / "data" / "wine.csv"


def load_wine():
    raw = np.genfromtxt(DATA, delimiter=",", names=True)
    labels = raw["class"].astype(int)
    names = [n for n in raw.dtype.names if n != "class"]
    X = np.column_stack([raw[n] for n in names])
    X = (X - X.mean(axis=0)) / X.std(axis=0)
    _, ids = np.unique(labels, return_inverse=True)
    return X, ids.tolist()


def test_kernel_tokens():
    assert "gauss" in ism_kdr.valid_kernel_tokens()
    assert ism_kdr.canonical_kernel("poly:p=3,c=1") == ism_kdr.canonical_kernel("poly")
    with pytest.raises(ValueError):
        ism_kdr.canonical_kernel("rbf")


def test_gaussian_kernel_matrix_has_unit_diagonal():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(6, 3))
    W = np.linalg.qr(rng.normal(size=(3, 2)))[0]
    K = ism_kdr.kernel_matrix(X, W, "gauss:sigma=1")
    assert np.allclose(np.diag(K), 1.0)
    P = X @ W
    expected = np.exp(-((P[:, None, :] - P[None, :, :]) ** 2).sum(-1) / 2.0)
    assert np.allclose(K, expected, rtol=1e-12, atol=0)


def test_linear_solve_reaches_ky_fan_bound():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(15, 4))
    A = rng.normal(size=(15, 15))
    G = A @ A.T
    res = ism_kdr.ism_solve(X, G, "linear", 2)
    top = np.sort(np.linalg.eigvalsh(X.T @ G @ X))[::-1][:2].sum()
    assert res["converged"]
    assert math.isclose(res["cost"], top, rel_tol=1e-10)
    assert np.allclose(res["W"].T @ res["W"], np.eye(2), atol=1e-10)


def test_nmi_examples():
    assert ism_kdr.nmi([0, 0, 1, 1], [0, 0, 1, 1]) == 1.0
    assert ism_kdr.nmi([0, 0, 1, 1], [0, 1, 0, 1]) == 0.0
    assert ism_kdr.nmi([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0


def test_supervised_wine():
    X, y = load_wine()
    res = ism_kdr.supervised_dr(X, y, "gauss:sigma=median", 3)
    assert res["converged"]
    assert res["W"].shape == (13, 3)
    Z = X @ res["W"]
    assert ism_kdr.knn_accuracy(Z, y, Z, y, 5) > 0.9


def test_gamma_is_centered():
    G = ism_kdr.gamma_supervised([0, 0, 1, 2, 2])
    assert np.allclose(G.sum(axis=1), 0.0, atol=1e-12)


def test_cli_in_process(tmp_path):
    model = tmp_path / "m.txt"
    code, out, err = ism_kdr.run_cli(
        ["fit", "--data", str(DATA), "--labels-col", "class", "--kernel", "linear", "--q", "2",
         "--out-model", str(model)])
    assert code == 0, err
    assert "[result]" in out
    assert model.read_text().startswith("format_version=ism-model/1")
    code, _, err = ism_kdr.run_cli(["fit", "--kernel", "linear"])
    assert code == 1
    assert "--data" in err
