"""Matrix checks of the Stieltjes functional calculus for A = -d/dx and J.

On the nodes 1..n of a grid (the value at t = 0 is pinned to zero), the
generator A is the backward difference A_h and the integration operator is
J_h = (-A_h)^-1.  For a Stieltjes-type symbol L with density beta,

    H_L(V) = int_0^inf V (I + lambda V)^-1 beta(lambda) dlambda,

is realized by a :class:`~distorder.kernels.StieltjesRule`.  With V = -A_h
this is a discrete version of the distributed-order derivative, its inverse
is compared against the kappa-convolution matrix, and its exponential
against super-exponential decay.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg as sla

from . import _backend
from .contour import InverterConfig
from .errors import ConfigurationError, DomainError, NumericalError
from .gridops import (
    Grid,
    SampledFunction,
    dist_derivative_conv,
    kappa_operator,
    relative_interior_error,
)
from .kernels import KernelEvaluator, StieltjesRule

#: (I + lambda V) counts as singular when a diagonal entry falls below this
SINGULAR_PIVOT = 1.0e-14


# {{{ triangular matrices


@dataclass(frozen=True)
class TriangularMatrix:
    """Lower-triangular n x n matrix, optionally tagged as Toeplitz.

    Toeplitz matrices also keep their first column in ``column``, which the
    fast paths use instead of the dense entries.
    """

    n: int
    dense: np.ndarray = field(repr=False)
    column: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        mat = np.array(self.dense, dtype=np.float64)
        if mat.shape != (self.n, self.n):
            raise ConfigurationError(f"expected a {self.n}x{self.n} matrix, got {mat.shape}")
        if np.any(np.triu(mat, 1) != 0.0):
            raise ConfigurationError("matrix is not lower triangular")
        mat.setflags(write=False)
        object.__setattr__(self, "dense", mat)

    @classmethod
    def toeplitz(cls, column: np.ndarray) -> TriangularMatrix:
        col = np.array(column, dtype=np.float64)
        n = col.size
        i, j = np.tril_indices(n)
        mat = np.zeros((n, n))
        mat[i, j] = col[i - j]
        col.setflags(write=False)
        return cls(n, mat, col)

    @classmethod
    def from_dense(cls, mat: np.ndarray) -> TriangularMatrix:
        mat = np.asarray(mat, dtype=np.float64)
        return cls(mat.shape[0], mat)

    @property
    def is_toeplitz(self) -> bool:
        return self.column is not None

    def __matmul__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.column is not None and x.ndim == 1:
            return _backend.causal_conv(self.column, x)
        return self.dense @ x

    def inverse(self) -> TriangularMatrix:
        if np.any(np.abs(np.diag(self.dense)) < SINGULAR_PIVOT):
            raise NumericalError("triangular matrix is singular")
        if self.column is not None:
            return TriangularMatrix.toeplitz(_backend.tril_toeplitz_inv(self.column[None, :])[0])
        inv = sla.solve_triangular(self.dense, np.eye(self.n), lower=True)
        return TriangularMatrix.from_dense(np.tril(inv))


def _toeplitz_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """First column of the product of two lower-triangular Toeplitz matrices."""
    return np.convolve(a, b)[: a.size]


# }}}


# {{{ A, J and the resolvent of A


def build_A(grid: Grid) -> TriangularMatrix:
    """Backward difference (A u)_i = -(u_i - u_{i-1}) / h on nodes 1..n, u_0 = 0."""
    col = np.zeros(grid.n)
    col[0] = -1.0 / grid.h
    col[1] = 1.0 / grid.h
    return TriangularMatrix.toeplitz(col)


def build_J(grid: Grid, *, trapezoid: bool = False) -> TriangularMatrix:
    """Cumulative integral (J u)_i = int_0^{t_i} u on nodes 1..n, with u_0 = 0.

    The default rule h sum_{j=1}^{i} u_j is the exact inverse of -A_h.  The
    trapezoid rule is more accurate pointwise but does not pair with A_h.
    """
    col = np.full(grid.n, grid.h)
    if trapezoid:
        col[0] = 0.5 * grid.h
    return TriangularMatrix.toeplitz(col)


def resolvent_A_kernel(lam: float, grid: Grid) -> TriangularMatrix:
    """(R(lam, A) u)(x) = -int_0^x e^{-lam (x - y)} u(y) dy.

    u is taken constant on each cell (t_{j-1}, t_j], as in J_h, and the
    exponential is integrated exactly, so row sums are (1 - e^{-lam t_i}) / lam.
    """
    lam = float(lam)
    if not lam > 0:
        raise DomainError(f"lambda must be positive: {lam}")
    d = grid.h * np.arange(grid.n)
    return TriangularMatrix.toeplitz(-(-np.expm1(-lam * grid.h) / lam) * np.exp(-lam * d))


# }}}


# {{{ Stieltjes calculus


def _tail_terms(
    v: TriangularMatrix, rule: StieltjesRule, ke: KernelEvaluator
) -> np.ndarray:
    """Series for the parts of the lambda-integral outside the rule's range.

    Near 0: V (I + lambda V)^-1 = sum_k (-lambda)^k V^{k+1}.
    Near infinity: V (I + lambda V)^-1 = sum_k (-1)^k lambda^{-k-1} V^{-k}.
    """
    nt = rule.tail_terms
    lower = ke.beta_lower_moments(rule.lambda_min, nt)
    upper = ke.beta_upper_moments(rule.lambda_max, nt)
    sign = (-1.0) ** np.arange(nt)

    if v.column is not None:
        vinv = v.inverse().column
        total = np.zeros(v.n)
        power = v.column.copy()
        for k in range(nt):
            total += sign[k] * lower[k] * power
            power = _toeplitz_mul(power, v.column)
        power = np.zeros(v.n)
        power[0] = 1.0
        for k in range(nt):
            total += sign[k] * upper[k] * power
            power = _toeplitz_mul(power, vinv)
        return total

    vd, vinv = v.dense, v.inverse().dense
    total = np.zeros((v.n, v.n))
    power = vd.copy()
    for k in range(nt):
        total += sign[k] * lower[k] * power
        power = power @ vd
    power = np.eye(v.n)
    for k in range(nt):
        total += sign[k] * upper[k] * power
        power = power @ vinv
    return total


def hirsch_apply(
    V: TriangularMatrix, rule: StieltjesRule, ke: KernelEvaluator
) -> TriangularMatrix:
    """H(V) = sum_q w_q beta(lambda_q) V (I + lambda_q V)^-1, plus tail series."""
    lam = rule.nodes
    coef = rule.weights * ke.beta(lam)

    diag = np.diag(V.dense)
    pivots = 1.0 + lam[:, None] * diag[None, :]
    bad = np.argwhere(np.abs(pivots) < SINGULAR_PIVOT)
    if bad.size:
        q = int(bad[0, 0])
        raise NumericalError(f"I + lambda V is singular at rule node {q}: lambda={lam[q]:.6e}")

    if V.column is not None:
        shifted = lam[:, None] * V.column[None, :]
        shifted[:, 0] += 1.0
        inv_cols = _backend.tril_toeplitz_inv(shifted)
        # V (I + lam V)^-1 for every node: Toeplitz products commute, so sum
        # the inverses first and multiply by V once
        combined = coef @ inv_cols
        col = _toeplitz_mul(V.column, combined)
        if rule.include_tails:
            col = col + _tail_terms(V, rule, ke)
        return TriangularMatrix.toeplitz(col)

    eye = np.eye(V.n)
    total = np.zeros((V.n, V.n))
    for q in range(lam.size):
        x = sla.solve_triangular(eye + lam[q] * V.dense, V.dense, lower=True)
        total += coef[q] * x
    if rule.include_tails:
        total += _tail_terms(V, rule, ke)
    return TriangularMatrix.from_dense(np.tril(total))


def hirsch_derivative(
    phi: SampledFunction, rule: StieltjesRule, ke: KernelEvaluator
) -> SampledFunction:
    """H_L(-A_h) applied to phi on nodes 1..n (phi(0) is taken as 0)."""
    W = hirsch_apply(_neg(build_A(phi.grid)), rule, ke)
    out = np.zeros(phi.grid.n + 1)
    out[1:] = W @ phi.values[1:]
    return SampledFunction(phi.grid, out)


def _neg(m: TriangularMatrix) -> TriangularMatrix:
    if m.column is not None:
        return TriangularMatrix.toeplitz(-m.column)
    return TriangularMatrix.from_dense(-m.dense)


# }}}


# {{{ reports


def kappa_matrix(cfg: InverterConfig, grid: Grid) -> TriangularMatrix:
    """Right-endpoint kappa convolution on nodes 1..n: (I_h f)_i = sum_m M_m f_{i-m}."""
    return TriangularMatrix.toeplitz(kappa_operator(cfg, grid).masses)


def derivative_residual(
    grid: Grid, rule: StieltjesRule, ke: KernelEvaluator, phi: SampledFunction | None = None
) -> float:
    """Relative interior deviation of H_L(-A_h) phi from the convolution derivative."""
    if phi is None:
        phi = SampledFunction.from_callable(grid, lambda t: t * (grid.T - t))
    return relative_interior_error(
        hirsch_derivative(phi, rule, ke), dist_derivative_conv(phi, ke), grid
    )


def verify_inversion_identity(
    grid: Grid, rule: StieltjesRule, cfg: InverterConfig
) -> dict[str, Any]:
    """Compare [H_L(-A_h)]^-1 with the kappa-convolution matrix.

    The inverse of H_L(V) is H_{1/L(1/z)}(V^-1) and V^-1 = J_h, so this is the
    discrete form of I^(mu) = N(J).  Norms are spectral norms.
    """
    ke = cfg.kernel
    M = hirsch_apply(_neg(build_A(grid)), rule, ke)
    try:
        Minv = M.inverse()
    except NumericalError as exc:
        cond = float(np.linalg.cond(M.dense))
        raise NumericalError(f"{exc}; condition estimate {cond:.3e}") from None

    Ih = kappa_matrix(cfg, grid)
    residual = np.linalg.norm(Minv.dense - Ih.dense, 2) / np.linalg.norm(Ih.dense, 2)
    identity = np.linalg.norm(M.dense @ Minv.dense - np.eye(grid.n), 2)

    ones = SampledFunction(grid, np.ones(grid.n + 1))
    via_inverse = np.concatenate([[0.0], Minv @ np.ones(grid.n)])
    direct = kappa_operator(cfg, grid).apply(ones).values
    consistency = relative_interior_error(via_inverse, direct, grid)

    return {
        "theorem": "inversion",
        "n": grid.n,
        "rule_nodes": rule.size,
        "residual": float(residual),
        "identity_residual": float(identity),
        "consistency": float(consistency),
        "refinement_ratio": None,
    }


def inversion_refinement(
    grid: Grid, rule: StieltjesRule, cfg: InverterConfig
) -> tuple[dict[str, Any], dict[str, Any]]:
    """Inversion reports at (grid, rule) and at (2n, refined rule)."""
    coarse = verify_inversion_identity(grid, rule, cfg)
    fine = verify_inversion_identity(grid.refined(), rule.refined(), cfg)
    ratio = coarse["residual"] / fine["residual"] if fine["residual"] > 0 else math.inf
    coarse["refinement_ratio"] = fine["refinement_ratio"] = float(ratio)
    return coarse, fine


@dataclass(frozen=True)
class DecayRow:
    t: float
    norm: float
    log_norm: float

    @property
    def rate(self) -> float:
        """log ||e^{-tG}|| / t."""
        return self.log_norm / self.t if self.t > 0 else 0.0


def semigroup_decay_report(
    grid: Grid, rule: StieltjesRule, t_list: Sequence[float], ke: KernelEvaluator
) -> list[DecayRow]:
    """Spectral norms of e^{-tG} with G = H_L(-A_h).

    G is lower-triangular Toeplitz, G = g_0 I + N with N nilpotent, so
    e^{-tG} = e^{-t g_0} e^{-tN}; the second factor goes to scipy's
    scaling-and-squaring expm and the first is kept in log form.
    """
    t_arr = np.asarray(t_list, dtype=np.float64)
    if np.any(t_arr < 0) or np.any(np.diff(t_arr) <= 0):
        raise DomainError("times must be nonnegative and strictly increasing")

    G = hirsch_apply(_neg(build_A(grid)), rule, ke)
    g0 = float(G.dense[0, 0])
    N = G.dense - g0 * np.eye(grid.n)
    rows = []
    for t in t_arr:
        if t == 0.0:
            rows.append(DecayRow(0.0, 1.0, 0.0))
            continue
        log_norm = -t * g0 + math.log(np.linalg.norm(sla.expm(-t * N), 2))
        rows.append(DecayRow(float(t), math.exp(log_norm), log_norm))
    return rows


# }}}

__all__ = [
    "DecayRow",
    "StieltjesRule",
    "TriangularMatrix",
    "build_A",
    "build_J",
    "derivative_residual",
    "hirsch_apply",
    "hirsch_derivative",
    "inversion_refinement",
    "kappa_matrix",
    "resolvent_A_kernel",
    "semigroup_decay_report",
    "verify_inversion_identity",
]
