from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distorder.errors import ConfigurationError, DomainError, NumericalError
from distorder.funcalc import (
    StieltjesRule,
    TriangularMatrix,
    build_A,
    build_J,
    derivative_residual,
    hirsch_apply,
    inversion_refinement,
    kappa_matrix,
    resolvent_A_kernel,
    semigroup_decay_report,
    verify_inversion_identity,
)
from distorder.gridops import Grid
from distorder.kernels import KernelEvaluator, eval_L
from distorder.weights import WeightFunction


def test_build_A_small():
    assert np.array_equal(build_A(Grid(1.0, 2)).dense, [[-2.0, 0.0], [2.0, -2.0]])


@pytest.mark.parametrize("n", [16, 64, 128])
def test_pairing_and_accretivity(n):
    g = Grid(1.0, n)
    A, J = build_A(g), build_J(g)
    assert np.max(np.abs(-A.dense @ J.dense - np.eye(n))) < 1e-12
    assert np.linalg.eigvalsh(J.dense + J.dense.T).min() >= -1e-12


def test_J_of_one():
    g = Grid(1.0, 64)
    J = build_J(g)
    assert np.max(np.abs(J @ np.ones(64) - g.nodes[1:])) <= g.h
    trap = build_J(g, trapezoid=True)
    assert np.max(np.abs(trap @ g.nodes[1:] - g.nodes[1:] ** 2 / 2)) < np.max(
        np.abs(J @ g.nodes[1:] - g.nodes[1:] ** 2 / 2)
    )


@pytest.mark.parametrize("lam", [0.5, 1.0, 10.0])
def test_resolvent_norm_bound(lam):
    A = build_A(Grid(1.0, 128)).dense
    assert np.linalg.norm(np.linalg.inv(A - lam * np.eye(128)), 2) <= 1.0 / lam * (1 + 1e-12)


def test_resolvent_kernel_matches_inverse():
    g = Grid(1.0, 256)
    R = resolvent_A_kernel(1.0, g).dense
    inv = np.linalg.inv(build_A(g).dense - np.eye(256))
    assert np.max(np.abs(R - inv)) <= 5 * g.h
    rows = np.sum(np.abs(R), axis=1)
    assert np.allclose(rows, -np.expm1(-g.nodes[1:]))
    assert np.max(rows) <= 1.0
    far = [np.max(np.abs(resolvent_A_kernel(lam, g).dense)) for lam in (1e2, 1e4, 1e6)]
    assert far[0] > far[1] > far[2] and far[2] <= 1e-6


def test_resolvent_kernel_domain():
    with pytest.raises(DomainError):
        resolvent_A_kernel(0.0, Grid(1.0, 8))


def test_triangular_matrix_rejects_upper():
    with pytest.raises(ConfigurationError):
        TriangularMatrix.from_dense(np.ones((3, 3)))


@pytest.mark.parametrize("x", [0.5, 1.0, 5.0])
def test_scalar_hirsch(ke_uniform, x):
    out = hirsch_apply(TriangularMatrix.from_dense(np.array([[x]])), StieltjesRule(), ke_uniform)
    assert out.dense[0, 0] == pytest.approx(eval_L(ke_uniform, x).real, rel=1e-10)


def test_toeplitz_and_dense_paths_agree(ke_uniform):
    V = build_A(Grid(1.0, 24))
    V = TriangularMatrix.toeplitz(-V.column)
    fast = hirsch_apply(V, StieltjesRule(), ke_uniform).dense
    slow = hirsch_apply(TriangularMatrix.from_dense(V.dense), StieltjesRule(), ke_uniform).dense
    assert np.allclose(fast, slow, rtol=1e-10, atol=1e-10 * np.abs(slow).max())


def test_singular_shift_is_reported(ke_uniform):
    rule = StieltjesRule()
    lam = rule.nodes[10]
    V = TriangularMatrix.from_dense(np.array([[-1.0 / lam]]))
    with pytest.raises(NumericalError, match="rule node 10"):
        hirsch_apply(V, rule, ke_uniform)


def test_hirsch_is_linear(ke_uniform, rng):
    V = TriangularMatrix.toeplitz(-build_A(Grid(1.0, 32)).column)
    W = hirsch_apply(V, StieltjesRule(), ke_uniform)
    x, y = rng.standard_normal(32), rng.standard_normal(32)
    assert np.allclose(W @ (x + y), W @ x + W @ y, rtol=1e-13, atol=1e-12)


def test_derivative_surrogate_converges(ke_uniform):
    rule = StieltjesRule()
    coarse = derivative_residual(Grid(1.0, 128), rule, ke_uniform)
    fine = derivative_residual(Grid(1.0, 256), rule.refined(), ke_uniform)
    assert fine <= 3e-2
    assert fine < coarse


def test_inversion_identity(cfg_uniform):
    coarse, fine = inversion_refinement(Grid(1.0, 128), StieltjesRule(), cfg_uniform)
    assert coarse["residual"] <= 5e-2
    assert fine["residual"] < coarse["residual"]
    assert coarse["identity_residual"] < 1e-12
    assert coarse["consistency"] <= 5e-2
    assert coarse["refinement_ratio"] > 1
    json.dumps(coarse)


def test_inversion_for_linear_weight(cfg_linear):
    report = verify_inversion_identity(Grid(1.0, 64), StieltjesRule(), cfg_linear)
    assert report["residual"] <= 5e-2


def test_kappa_matrix_is_lower_toeplitz(cfg_uniform):
    K = kappa_matrix(cfg_uniform, Grid(1.0, 16))
    assert K.is_toeplitz and np.all(np.triu(K.dense, 1) == 0)


def test_semigroup_decay(ke_uniform):
    rows = semigroup_decay_report(Grid(1.0, 64), StieltjesRule(), [0.0, 5.0, 10.0, 20.0], ke_uniform)
    assert rows[0].norm == 1.0
    norms = [r.norm for r in rows]
    assert all(b < a for a, b in zip(norms, norms[1:]))
    rates = [r.rate for r in rows[1:]]
    assert rates[0] > rates[1] > rates[2]


def test_semigroup_decay_requires_increasing_times(ke_uniform):
    with pytest.raises(DomainError):
        semigroup_decay_report(Grid(1.0, 8), StieltjesRule(), [2.0, 1.0], ke_uniform)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 100.0))
def test_scalar_hirsch_property(x):
    ke = KernelEvaluator(WeightFunction.power_at_zero(1.0, 1.0))
    out = hirsch_apply(TriangularMatrix.from_dense(np.array([[x]])), StieltjesRule(), ke)
    assert out.dense[0, 0] == pytest.approx(eval_L(ke, x).real, rel=1e-9)
