import numpy as np
import pytest

import histq

S = 1 / np.sqrt(2)
P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)
PPLUS = 0.5 * np.ones((2, 2), dtype=complex)
PMINUS = np.eye(2, dtype=complex) - PPLUS
KET0 = P0.copy()
PLUS = PPLUS.copy()


def random_density(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_projection(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(a)
    v = q[:, :1]
    return v @ v.conj().T


def test_hand_value():
    v = histq.d_direct(KET0, [PPLUS, P0], [PMINUS, P0])
    assert abs(v - 0.25) <= 1e-12


def test_methods_agree():
    rng = np.random.default_rng(5)
    rho = random_density(3, rng)
    h = [random_projection(3, rng) for _ in range(2)]
    k = [random_projection(3, rng) for _ in range(2)]
    ref = histq.d_direct(rho, h, k)
    for method in ("series", "ils", "stream"):
        assert abs(histq.evaluate(rho, h, k, 3, 2, method) - ref) <= 1e-9
    m = histq.build_M(rho, 3, 2)
    assert abs(np.trace(m.matrix) - 1) <= 1e-9
    assert abs(m.evaluate(histq.embed(h), k) - ref) <= 1e-9
    assert abs(histq.d_stream(rho, h, k, 3, 2, workers=2) - ref) <= 1e-9


def test_axioms():
    r = histq.verify_axioms(PLUS, 2, 2, "ils", samples=20, seed=3)
    assert r["passed"]
    assert r["samples"] == 20


def test_witness():
    r = histq.divergence_witness(64, [4, 8, 16, 32, 64])
    assert r["verdict"] == "divergent"
    assert np.allclose(r["partial_sums"], [(n + 1) / 2 for n in (4, 8, 16, 32, 64)], atol=1e-9)
    u = histq.divergence_witness(16, [4, 8, 16], q="swap")
    assert [s.real for s in u["partial_sums"]] == [4.0, 8.0, 16.0]


def test_quadform_and_probe():
    one = [[np.eye(2), np.eye(2)]]
    assert abs(histq.D_form(PLUS, one, one, 2, 2) - 1) <= 1e-12
    z = [[PPLUS, P0]]
    w = [[PMINUS, P0]]
    assert abs(histq.D_form(KET0, z, w, 2, 2) - histq.d_direct(KET0, [PPLUS, P0], [PMINUS, P0])) <= 1e-12
    rows = histq.unboundedness_probe([1, 2, 4])
    assert [r[0] for r in rows] == [1, 2, 4]
    assert np.allclose([r[1] for r in rows], 1.0)
    assert np.allclose([r[2] for r in rows], [1, 2, 4])


def test_consistency():
    fam = [[a, b] for a in (P0, P1) for b in (P0, P1)]
    r = histq.check_consistent(PLUS, fam, 2, 2)
    assert r["consistent"]
    assert np.allclose(r["probabilities"], [0.5, 0, 0, 0.5], atol=1e-9)
    bad = [[a, b] for a in (PPLUS, PMINUS) for b in (P0, P1)]
    r = histq.check_consistent(KET0, bad, 2, 2)
    assert not r["consistent"]
    assert abs(r["max_re_offdiag"] - 0.25) <= 1e-9


def test_excess_search():
    psi = np.array([0.6, 0.8j])
    rho = np.outer(psi, psi.conj())
    r = histq.diag_excess_search(rho, 2, 2, budget=40, seed=1)
    assert r["value"] > 1.05
    again = histq.diag_excess_search(rho, 2, 2, budget=40, seed=1)
    assert again["value"] == r["value"]
    assert np.array_equal(again["history"], r["history"])


def test_errors():
    with pytest.raises(histq.ValidationError):
        histq.d_direct(np.eye(2), [P0, P0], [P0, P0])
    with pytest.raises(histq.ShapeError):
        histq.d_direct(KET0, [P0, P0], [P0, np.eye(3)])
    with pytest.raises(histq.SizeError):
        histq.build_M(np.diag([1.0, 0, 0, 0]), 4, 3)
    with pytest.raises(ValueError):
        histq.evaluate(KET0, [P0, P0], [P0, P0], 2, 2, "nope")
