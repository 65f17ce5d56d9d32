from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from distorder.errors import DomainError
from distorder.kernels import (
    AlphaRule,
    KernelEvaluator,
    StieltjesRule,
    cell_mass,
    check_real_part_monotone,
    eval_beta,
    eval_k,
    eval_k_prime,
    eval_K,
    eval_L,
    moment_identity_sides,
    stieltjes_identity_residual,
)
from distorder.weights import WeightFunction

# mpmath, 30 digits: int_0^1 dalpha / Gamma(1 - alpha) and / Gamma(2 - alpha)
K_AT_ONE = 0.54123573432867053014953732888
K_INTEGRAL_ONE = 1.08514266435747008432686664279
K_INTEGRAL_HALF = 0.782934567749709845017493377869


def test_k_at_one(ke_uniform):
    assert eval_k(ke_uniform, 1.0) == pytest.approx(K_AT_ONE, rel=1e-14)


def test_k_against_direct_quadrature(ke_linear):
    for s in (0.01, 0.3, 2.0, 50.0):
        ref = quad(lambda a: s**-a / gamma_fn(1 - a) * a, 0, 1, epsabs=1e-14)[0]
        assert eval_k(ke_linear, s) == pytest.approx(ref, rel=1e-12)


def test_k_small_s_asymptotics(ke_uniform):
    # k(s) ~ 1 / (s ln^2(1/s)) up to a slowly varying correction
    s = np.array([1e-4, 1e-8, 1e-16])
    scaled = ke_uniform.k(s) * s * np.log(s) ** 2
    assert np.all(np.abs(scaled - 1.0) < 0.1)
    assert np.all(np.diff(np.abs(scaled - 1.0)) < 0)


def test_k_prime_against_finite_difference(ke_uniform):
    for s in (0.1, 1.0, 3.0):
        d = 1e-5 * s
        fd = (eval_k(ke_uniform, s + d) - eval_k(ke_uniform, s - d)) / (2 * d)
        assert eval_k_prime(ke_uniform, s) == pytest.approx(fd, rel=1e-7)


def test_cell_masses(ke_uniform):
    assert cell_mass(ke_uniform, 0.0, 1.0) == pytest.approx(K_INTEGRAL_ONE, rel=1e-14)
    assert cell_mass(ke_uniform, 0.0, 0.5) == pytest.approx(K_INTEGRAL_HALF, rel=1e-14)
    masses = ke_uniform.cell_masses(0.01, 100)
    assert np.sum(masses) == pytest.approx(K_INTEGRAL_ONE, rel=1e-13)
    assert np.all(np.diff(masses) < 0)
    ref = quad(lambda s: eval_k(ke_uniform, s), 0.37, 0.38, epsabs=1e-15)[0]
    assert masses[37] == pytest.approx(ref, rel=1e-12)


def test_late_weights_against_quadrature(ke_linear):
    h = 0.05
    late = ke_linear.cell_late_weights(h, 6)
    for m in (1, 5):
        lo, hi = m * h, (m + 1) * h
        ref = quad(lambda s: (hi - s) * eval_k(ke_linear, s), lo, hi, epsabs=1e-15)[0] / h
        assert late[m] == pytest.approx(ref, rel=1e-10)

    # first cell, integrated by parts: (1/h) int_0^h (h - s) k = (1/h) int_0^h K1,
    # K1(s) = int_0^s k = int alpha s^(1 - alpha) / Gamma(2 - alpha) dalpha
    def K1(s):
        return quad(lambda a: a * s ** (1 - a) / gamma_fn(2 - a), 0, 1, epsabs=1e-15)[0]

    pts = [h * 2.0**-j for j in range(1, 30)]
    ref = quad(K1, 0, h, points=pts, limit=500, epsabs=1e-14)[0] / h
    assert late[0] == pytest.approx(ref, rel=1e-8)


def test_cell_mass_domain(ke_uniform):
    with pytest.raises(DomainError):
        cell_mass(ke_uniform, 0.5, 0.5)
    with pytest.raises(DomainError):
        eval_k(ke_uniform, 0.0)


@pytest.mark.parametrize("z", [2.0, math.e, 4.0, 10.0, 1.0 + 1.0j])
def test_symbol_closed_form(ke_uniform, z):
    assert abs(eval_L(ke_uniform, z) - (z - 1) / np.log(z)) <= 1e-10


def test_symbol_linear_weight(ke_linear):
    # int_0^1 alpha z^alpha dalpha = (z ln z - z + 1) / ln^2 z
    z = 3.0 + 0.5j
    ref = (z * np.log(z) - z + 1) / np.log(z) ** 2
    assert abs(eval_L(ke_linear, z) - ref) < 1e-12
    assert eval_L(ke_linear, math.e) == pytest.approx(1.0, rel=1e-14)


def test_K_is_L_over_z(ke_linear):
    z = 0.7 - 2.0j
    assert eval_K(ke_linear, z) * z == pytest.approx(eval_L(ke_linear, z), rel=1e-14)


def test_branch_cut(ke_uniform):
    with pytest.raises(DomainError):
        eval_L(ke_uniform, -1.0)
    with pytest.raises(DomainError):
        eval_K(ke_uniform, 0.0)


@pytest.mark.parametrize("k", range(2, 9))
def test_large_z_asymptotics(ke_uniform, k):
    z = 10.0**k
    lz = math.log(z)
    assert abs(eval_K(ke_uniform, z).real * lz - 1.0) * lz <= 5.0


def test_beta_closed_form(ke_uniform):
    assert eval_beta(ke_uniform, 1.0) == pytest.approx(2 / math.pi**2, rel=1e-14)
    with pytest.raises(DomainError):
        eval_beta(ke_uniform, 0.0)


def test_stieltjes_identity(ke_uniform, ke_linear):
    for ke in (ke_uniform, ke_linear):
        for x in (0.5, 1.0, 5.0):
            assert stieltjes_identity_residual(ke, x) < 1e-12


def test_stieltjes_tails_matter(ke_uniform):
    bare = StieltjesRule(include_tails=False)
    assert stieltjes_identity_residual(ke_uniform, 1.0, bare) > 1e-3


def test_stieltjes_refinement_is_monotone(ke_uniform):
    base = StieltjesRule(order=4, panels_per_decade=1)
    rules = [base, base.refined(), base.refined().refined()]
    errors = [stieltjes_identity_residual(ke_uniform, 1.0, r) for r in rules]
    assert errors[0] > errors[1] > errors[2]
    assert rules[2].size == 4 * base.size


def test_stieltjes_rule_shape():
    rule = StieltjesRule()
    assert np.all(rule.nodes > 0) and np.all(np.diff(rule.nodes) > 0)
    assert np.all(rule.weights > 0)


def test_moment_identity(ke_uniform, ke_linear):
    for ke in (ke_uniform, ke_linear):
        lhs, rhs = moment_identity_sides(ke)
        assert lhs == pytest.approx(rhs, rel=1e-10)


@pytest.mark.parametrize("sigma", [1.0, 2.0])
def test_real_part_monotone(ke_uniform, ke_linear, sigma):
    tau = np.geomspace(1.0, 100.0, 50)
    assert check_real_part_monotone(ke_uniform, sigma, tau)
    assert check_real_part_monotone(ke_linear, sigma, tau)


def test_graded_rule_for_fractional_power():
    w = WeightFunction.power_at_zero(1.0, 0.5)
    ke = KernelEvaluator(w)
    assert ke.alpha_rule.levels > 0
    ref = quad(lambda a: a**0.5 / gamma_fn(1 - a), 0, 1, epsabs=1e-14)[0]
    assert eval_k(ke, 1.0) == pytest.approx(ref, rel=1e-12)
    coarse = KernelEvaluator(w, AlphaRule(16))
    assert abs(eval_k(coarse, 1.0) - ref) > abs(eval_k(ke, 1.0) - ref)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-6, 1e3), st.floats(1.0001, 2.0))
def test_k_positive_decreasing(s, factor):
    ke = KernelEvaluator(WeightFunction.constant(1.0))
    assert eval_k(ke, s) > eval_k(ke, s * factor) > 0
    assert eval_k_prime(ke, s) < 0


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-4, 1e4), st.floats(-1e3, 1e3))
def test_L_conjugate_symmetry(x, y):
    ke = KernelEvaluator(WeightFunction.constant(1.0))
    z = complex(x, y)
    assert eval_L(ke, z.conjugate()) == pytest.approx(eval_L(ke, z).conjugate(), rel=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
def test_L_increasing_on_axis(x, y):
    ke = KernelEvaluator(WeightFunction.constant(1.0))
    lo, hi = sorted((x, y))
    if hi > lo * (1 + 1e-9):
        assert eval_L(ke, hi).real > eval_L(ke, lo).real
