from __future__ import annotations

import numpy as np
import pytest

from distorder import _backend

BACKENDS = ["python"] + (["compiled"] if _backend.compiled is not None else [])


@pytest.fixture(params=BACKENDS)
def impl(request):
    return _backend.get(request.param)


def test_backend_names():
    assert _backend.BACKEND in ("compiled", "python")
    with pytest.raises(ValueError):
        _backend.get("fortran")


def test_causal_conv_matches_numpy(impl, rng):
    a, x = rng.standard_normal(17), rng.standard_normal(40)
    assert np.allclose(impl.causal_conv(a, x), np.convolve(a, x)[:40], atol=1e-13)


def test_volterra_march_satisfies_scheme(impl, rng):
    w = np.sort(rng.random(30))[::-1] + 0.1
    lam_h = -0.3
    u = impl.volterra_march(w, lam_h, 1.0)
    du = np.diff(u)
    for i in range(1, 31):
        lhs = sum(w[i - j - 1] * du[j] for j in range(i))
        assert lhs == pytest.approx(lam_h * u[i], abs=1e-12)


def test_toeplitz_inverse(impl, rng):
    cols = rng.standard_normal((3, 12))
    cols[:, 0] += 4.0
    inv = impl.tril_toeplitz_inv(cols)
    for c, b in zip(cols, inv):
        i, j = np.tril_indices(12)
        T = np.zeros((12, 12))
        T[i, j] = c[i - j]
        assert np.allclose(T @ np.linalg.solve(T, np.eye(12))[:, 0], np.eye(12)[:, 0])
        assert np.allclose(b, np.linalg.solve(T, np.eye(12)[:, 0]), atol=1e-12)


@pytest.mark.skipif(_backend.compiled is None, reason="compiled kernels not built")
def test_backends_agree(rng):
    py, cy = _backend.get("python"), _backend.get("compiled")
    a, x = rng.random(64), rng.random(200)
    assert np.allclose(py.causal_conv(a, x), cy.causal_conv(a, x), rtol=1e-13, atol=1e-14)
    w = np.linspace(1.0, 0.2, 50)
    assert np.allclose(py.volterra_march(w, 0.05, 1.0), cy.volterra_march(w, 0.05, 1.0), rtol=1e-12)
    cols = rng.random((4, 30)) + np.eye(1, 30) * 3
    assert np.allclose(py.tril_toeplitz_inv(cols), cy.tril_toeplitz_inv(cols), rtol=1e-12)
