"""Verification suites run by ``distorder verify``.

Every check records a measured value, the tolerance it is held to and
whether it passed, so that a failing run still produces a full report.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy.integrate import quad

from . import funcalc, gridops
from .contour import eval_kappa, eval_r_lambda, truncated_exp_integral
from .kernels import (
    KernelEvaluator,
    check_real_part_monotone,
    eval_L,
    moment_identity_sides,
    stieltjes_identity_residual,
)

if TYPE_CHECKING:
    from .cli import RunConfig

#: largest grid used for the dense-matrix checks
DENSE_N = 128


def _check(name: str, value: float, tol: float, passed: bool | None = None) -> dict[str, Any]:
    value = float(value)
    ok = (value <= tol) if passed is None else passed
    return {"name": name, "value": value, "tolerance": tol, "passed": bool(ok and math.isfinite(value))}


def _guard(name: str, tol: float, fn: Callable[[], dict[str, Any]]) -> dict[str, Any]:
    try:
        return fn()
    except Exception as exc:  # a crashing check is a failing check
        return {"name": name, "value": None, "tolerance": tol, "passed": False, "error": str(exc)}


# {{{ suites


def kernel_suite(cfg: RunConfig, ke: KernelEvaluator) -> list[dict[str, Any]]:
    tol = cfg.tolerances

    def symbol() -> dict[str, Any]:
        worst = 0.0
        for z in (2.0, math.e, 4.0, 10.0, 1.0 + 1.0j):
            re = quad(lambda a: (z**a * ke.weight(np.array([a]))[0]).real, 0, 1, epsabs=1e-14)[0]
            im = quad(lambda a: (z**a * ke.weight(np.array([a]))[0]).imag, 0, 1, epsabs=1e-14)[0]
            worst = max(worst, abs(eval_L(ke, z) - complex(re, im)))
        return _check("symbol_vs_quadrature", worst, tol.symbol)

    def stieltjes() -> dict[str, Any]:
        worst = max(stieltjes_identity_residual(ke, x) / float(ke.L_real(x)) for x in (0.5, 1.0, 5.0))
        return _check("stieltjes_identity", worst, tol.stieltjes)

    def moment() -> dict[str, Any]:
        lhs, rhs = moment_identity_sides(ke)
        return _check("moment_identity", abs(lhs - rhs) / abs(rhs), tol.moment)

    def monotone() -> dict[str, Any]:
        tau = np.geomspace(1.0, 100.0, 50)
        ok = all(check_real_part_monotone(ke, s, tau) for s in (1.0, 2.0))
        return _check("real_part_monotone", 0.0, 0.0, ok)

    return [
        _guard("symbol_vs_quadrature", tol.symbol, symbol),
        _guard("stieltjes_identity", tol.stieltjes, stieltjes),
        _guard("moment_identity", tol.moment, moment),
        _guard("real_part_monotone", 0.0, monotone),
    ]


def contour_suite(cfg: RunConfig, ke: KernelEvaluator) -> list[dict[str, Any]]:
    tol = cfg.tolerances
    inv = cfg.inverter(ke)

    def invariance() -> dict[str, Any]:
        values = [
            eval_kappa(inv.with_(omega=om, gamma=ga), 0.5)
            for om in (0.6, 0.75, 0.9)
            for ga in (0.5, 1.0, 2.0)
        ]
        ref = values[4]
        return _check("kappa_contour_invariance", max(abs(v / ref - 1) for v in values), tol.contour)

    def exp_integral() -> dict[str, Any]:
        c = inv.contour(inv.gamma, 0.5)
        return _check("truncated_exp_integral", abs(truncated_exp_integral(c, 0.5)), tol.contour)

    def decreasing() -> dict[str, Any]:
        t = np.geomspace(1e-6, 1e-3, 20)
        kap = eval_kappa(inv, t)
        fitted = kap / np.log(1.0 / t)
        spread = float(fitted.max() / fitted.min())
        ok = bool(np.all(np.diff(kap) < 0)) and spread <= 10.0
        return _check("kappa_log_bound", spread, 10.0, ok)

    return [
        _guard("kappa_contour_invariance", tol.contour, invariance),
        _guard("truncated_exp_integral", tol.contour, exp_integral),
        _guard("kappa_log_bound", 10.0, decreasing),
    ]


def grid_suite(cfg: RunConfig, ke: KernelEvaluator) -> list[dict[str, Any]]:
    tol = cfg.tolerances
    inv = cfg.inverter(ke)
    grid = cfg.grid_obj()
    T = grid.T

    def four_way() -> dict[str, Any]:
        phi = gridops.SampledFunction.from_callable(grid, lambda t: (t / T) ** 2)
        outs = [
            gridops.dist_derivative_conv(phi, ke),
            gridops.dist_derivative_spectral(phi, ke.weight),
            gridops.dist_derivative_bp(phi, ke),
            gridops.dist_derivative_def4(phi, ke),
        ]
        worst = max(
            gridops.relative_interior_error(a, b, grid)
            for i, a in enumerate(outs)
            for b in outs[i + 1 :]
        )
        return _check("four_way_agreement", worst, tol.operator)

    def constants() -> dict[str, Any]:
        c = gridops.SampledFunction(grid, np.full(grid.n + 1, 3.0))
        worst = max(
            float(np.max(np.abs(op(c).values)))
            for op in (
                lambda f: gridops.dist_derivative_conv(f, ke),
                lambda f: gridops.dist_derivative_spectral(f, ke.weight),
                lambda f: gridops.dist_derivative_def4(f, ke),
            )
        )
        return _check("constants_annihilated", worst, 1e-6)

    def left_inverse() -> dict[str, Any]:
        op = gridops.kappa_operator(inv, grid)
        worst = 0.0
        for f in (lambda t: np.ones_like(t), lambda t: t, np.sin):
            fs = gridops.SampledFunction.from_callable(grid, f)
            back = gridops.dist_derivative_conv(op.apply(fs), ke)
            worst = max(worst, gridops.max_interior_error(back, fs, grid))
        return _check("left_inverse", worst, tol.operator)

    def eigen() -> dict[str, Any]:
        worst = 0.0
        for lam in (1.0, -1.0):
            u = gridops.solve_eigen(lam, ke, grid).values
            for frac in (0.25, 0.5, 0.75):
                i = int(round(frac * grid.n))
                fd = (u[i + 1] - u[i - 1]) / (2 * grid.h) / lam
                r = eval_r_lambda(inv, lam, grid.nodes[i])
                worst = max(worst, abs(fd - r) / abs(r))
        return _check("eigen_resolvent_consistency", worst, tol.resolvent)

    def integral_resolvent() -> dict[str, Any]:
        g = gridops.Grid(T, min(grid.n, DENSE_N))
        u = gridops.SampledFunction.from_callable(g, lambda t: t)
        lam = -0.5
        v = gridops.integral_resolvent_apply(lam, u, inv)
        dense = gridops.kappa_operator(inv, g).matrix() - lam * np.eye(g.n + 1)
        direct = np.linalg.solve(dense, u.values)
        return _check("integral_resolvent_dense", float(np.max(np.abs(v.values - direct))), tol.operator)

    def causality() -> dict[str, Any]:
        g = gridops.Grid(T, 16)
        ops = [
            lambda f: gridops.dist_derivative_conv(f, ke),
            lambda f: gridops.dist_derivative_spectral(f, ke.weight),
            lambda f: gridops.dist_derivative_def4(f, ke),
            gridops.kappa_operator(inv, g).apply,
        ]
        upper = max(float(np.max(np.abs(np.triu(gridops.operator_matrix(op, g), 1)))) for op in ops)
        return _check("causality", upper, 0.0, upper == 0.0)

    return [
        _guard("four_way_agreement", tol.operator, four_way),
        _guard("constants_annihilated", 1e-6, constants),
        _guard("left_inverse", tol.operator, left_inverse),
        _guard("eigen_resolvent_consistency", tol.resolvent, eigen),
        _guard("integral_resolvent_dense", tol.operator, integral_resolvent),
        _guard("causality", 0.0, causality),
    ]


def calculus_suite(cfg: RunConfig, ke: KernelEvaluator) -> list[dict[str, Any]]:
    tol = cfg.tolerances
    inv = cfg.inverter(ke)
    rule = cfg.stieltjes_rule()
    g = gridops.Grid(cfg.grid.T, min(cfg.grid.n, DENSE_N))

    def pairing() -> dict[str, Any]:
        A, J = funcalc.build_A(g), funcalc.build_J(g)
        err = np.linalg.norm(-A.dense @ J.dense - np.eye(g.n), 2)
        return _check("pairing", err, tol.structure)

    def accretive() -> dict[str, Any]:
        J = funcalc.build_J(g).dense
        lowest = float(np.linalg.eigvalsh(J + J.T).min())
        return _check("accretivity", max(0.0, -lowest), tol.structure)

    def resolvent_norm() -> dict[str, Any]:
        A = funcalc.build_A(g).dense
        excess = max(
            np.linalg.norm(np.linalg.inv(A - lam * np.eye(g.n)), 2) * lam - 1.0
            for lam in (0.5, 1.0, 10.0)
        )
        return _check("resolvent_norm_bound", max(0.0, excess), tol.structure)

    def derivative() -> dict[str, Any]:
        return _check("calculus_derivative", funcalc.derivative_residual(g, rule, ke), tol.calculus)

    def inversion() -> dict[str, Any]:
        report = funcalc.verify_inversion_identity(g, rule, inv)
        return _check("calculus_inversion", report["residual"], tol.calculus)

    def decay() -> dict[str, Any]:
        rows = funcalc.semigroup_decay_report(gridops.Grid(1.0, 64), rule, [5.0, 10.0, 20.0], ke)
        rates = [r.rate for r in rows]
        ok = all(b < a for a, b in zip(rates, rates[1:]))
        return _check("semigroup_decay", rates[-1], 0.0, ok)

    return [
        _guard("pairing", tol.structure, pairing),
        _guard("accretivity", tol.structure, accretive),
        _guard("resolvent_norm_bound", tol.structure, resolvent_norm),
        _guard("calculus_derivative", tol.calculus, derivative),
        _guard("calculus_inversion", tol.calculus, inversion),
        _guard("semigroup_decay", 0.0, decay),
    ]


# }}}


def run_all(cfg: RunConfig) -> dict[str, Any]:
    ke = cfg.kernel()
    suites = {
        "kernels": kernel_suite(cfg, ke),
        "contour": contour_suite(cfg, ke),
        "gridops": grid_suite(cfg, ke),
        "funcalc": calculus_suite(cfg, ke),
    }
    failed = [c["name"] for checks in suites.values() for c in checks if not c["passed"]]
    return {
        "weight": cfg.weight if isinstance(cfg.weight, (str, dict)) else str(cfg.weight),
        "grid": {"T": cfg.grid.T, "n": cfg.grid.n},
        "suites": suites,
        "failed": failed,
        "passed": not failed,
    }
