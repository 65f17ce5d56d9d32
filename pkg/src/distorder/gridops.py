"""Distributed-order operators on a uniform grid over [0, T].

Sampled functions are treated as piecewise linear between the nodes, so
every convolution against a weakly singular kernel becomes a product
integration rule with exact cell integrals of the kernel.  Kernels are never
evaluated pointwise inside the first cell.

The derivative D^(mu) has four realizations here, each built from a
different formula for it:

* :func:`dist_derivative_conv`: int_0^t k(t - tau) phi'(tau) dtau;
* :func:`dist_derivative_def4`: d/dt (k * phi) - k(t) phi(0);
* :func:`dist_derivative_bp`: k(x) phi(x) + int_0^x [phi(x - t) - phi(x)] k'(t) dt;
* :func:`dist_derivative_spectral`: int_0^1 D^(alpha) phi mu(alpha) dalpha.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import gamma as gamma_fn

from . import _backend
from ._quadrature import gauss_legendre
from .contour import InverterConfig, resolvent_cell_weights, subordination_cell_weights
from .errors import (
    ConfigurationError,
    DomainError,
    PreconditionError,
    StepSizeError,
)
from .kernels import KernelEvaluator
from .weights import WeightFunction

#: order of the default alpha rule of the spectral realization
SPECTRAL_ALPHA_ORDER = 64
#: solve_eigen refuses steps whose pivot 1 - lambda h / M_0 falls below this
MIN_PIVOT = 0.1


# {{{ grids and sampled functions


@dataclass(frozen=True)
class Grid:
    """Uniform nodes t_j = j h, j = 0..n, on [0, T]."""

    T: float
    n: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.T) and self.T > 0):
            raise ConfigurationError(f"interval length must be positive: T={self.T}")
        if int(self.n) != self.n or self.n < 2:
            raise ConfigurationError(f"grid needs at least 2 cells: n={self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "T", float(self.T))

    @property
    def h(self) -> float:
        return self.T / self.n

    @property
    def nodes(self) -> np.ndarray:
        return self.h * np.arange(self.n + 1, dtype=np.float64)

    def interior(self, lo: float = 0.1, hi: float = 0.9) -> np.ndarray:
        """Mask of nodes with lo T <= t <= hi T."""
        t = self.nodes
        eps = 1e-12 * self.T
        return (t >= lo * self.T - eps) & (t <= hi * self.T + eps)

    def refined(self) -> Grid:
        return Grid(self.T, 2 * self.n)


@dataclass(frozen=True)
class SampledFunction:
    """Values of a function at the nodes of a grid (index 0 is t = 0)."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (self.grid.n + 1,):
            raise ConfigurationError(
                f"expected {self.grid.n + 1} values, got shape {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, grid: Grid, f: Callable[[np.ndarray], np.ndarray]) -> SampledFunction:
        t = grid.nodes
        return cls(grid, np.broadcast_to(np.asarray(f(t), dtype=np.float64), t.shape))

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def __add__(self, other: SampledFunction) -> SampledFunction:
        _check_same_grid(self, other)
        return SampledFunction(self.grid, self.values + other.values)

    def __sub__(self, other: SampledFunction) -> SampledFunction:
        _check_same_grid(self, other)
        return SampledFunction(self.grid, self.values - other.values)

    def scaled(self, c: float) -> SampledFunction:
        return SampledFunction(self.grid, c * self.values)

    # {{{ csv

    def to_csv(self, path: str | Path | None = None) -> str:
        lines = ["t,value"]
        lines += [f"{t:.17g},{v:.17g}" for t, v in zip(self.t, self.values)]
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text, newline="\n")
        return text

    @classmethod
    def from_csv(cls, source: str | Path, *, text: bool = False) -> SampledFunction:
        """Load a ``t,value`` CSV file (or CSV text if ``text`` is set)."""
        content = source if text else Path(source).read_text()
        rows = list(csv.reader(content.splitlines()))
        if not rows or [c.strip() for c in rows[0]] != ["t", "value"]:
            raise ConfigurationError("CSV must start with the header 't,value'")

        try:
            data = np.array(
                [[float(r[0]), float(r[1])] for r in rows[1:] if r], dtype=np.float64
            )
        except (ValueError, IndexError) as exc:
            raise ConfigurationError(f"malformed CSV row: {exc}") from None

        if data.shape[0] < 3:
            raise ConfigurationError("CSV needs at least 3 nodes")
        t, v = data[:, 0], data[:, 1]
        if t[0] != 0.0:
            raise ConfigurationError(f"first node must be t=0, got {t[0]}")
        n = t.size - 1
        grid = Grid(t[-1], n)
        if np.max(np.abs(t - grid.nodes)) > 1e-9 * grid.h:
            raise ConfigurationError("CSV nodes are not uniformly spaced")
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("CSV contains non-finite values")
        return cls(grid, v)

    # }}}


def _check_same_grid(a: SampledFunction, b: SampledFunction) -> None:
    if a.grid != b.grid:
        raise ConfigurationError(f"grid mismatch: {a.grid} vs {b.grid}")


# }}}


# {{{ convolution operators


@dataclass(frozen=True)
class ConvolutionOperator:
    """Product integration of a causal kernel against piecewise-linear data.

    (op f)(t_i) = sum_{m < i} [(masses[m] - late[m]) f_{i-m-1} + late[m] f_{i-m}],

    where ``masses[m]`` is the kernel integral over [m h, (m + 1) h] and
    ``late[m]`` the part of it that falls on the later node of the cell.
    """

    grid: Grid
    masses: np.ndarray = field(repr=False)
    late: np.ndarray = field(repr=False)
    tag: str = ""

    def __post_init__(self) -> None:
        for name in ("masses", "late"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            if arr.shape != (self.grid.n,):
                raise ConfigurationError(f"{name} must have {self.grid.n} entries")
            if not np.all(np.isfinite(arr)):
                raise ConfigurationError(f"{name} contain non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def early(self) -> np.ndarray:
        return self.masses - self.late

    def apply_values(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=np.float64)
        out = np.zeros(self.grid.n + 1)
        out[1:] = _backend.causal_conv(self.early, f[:-1]) + _backend.causal_conv(
            self.late, f[1:]
        )
        return out

    def apply(self, f: SampledFunction) -> SampledFunction:
        _check_grid(self.grid, f)
        return SampledFunction(self.grid, self.apply_values(f.values))

    def matrix(self) -> np.ndarray:
        """Dense (n + 1) x (n + 1) matrix of :meth:`apply_values`."""
        n = self.grid.n
        mat = np.zeros((n + 1, n + 1))
        i, j = np.tril_indices(n + 1, -1)
        m = i - j - 1
        mat[i, j] += self.early[m]
        mat[i, j + 1] += self.late[m]
        return mat

    def rectangle_matrix(self) -> np.ndarray:
        """n x n matrix on nodes 1..n of the right-endpoint rule sum masses[m] f_{i-m}."""
        n = self.grid.n
        i, j = np.tril_indices(n)
        mat = np.zeros((n, n))
        mat[i, j] = self.masses[i - j]
        return mat


def _check_grid(grid: Grid, f: SampledFunction) -> None:
    if f.grid != grid:
        raise ConfigurationError(f"grid mismatch: {f.grid} vs {grid}")


def kernel_operator(ke: KernelEvaluator, grid: Grid) -> ConvolutionOperator:
    """Product integration against k."""
    return ConvolutionOperator(
        grid, ke.cell_masses(grid.h, grid.n), ke.cell_late_weights(grid.h, grid.n), "k"
    )


def kappa_operator(cfg: InverterConfig, grid: Grid) -> ConvolutionOperator:
    """Product integration against kappa, the kernel of I^(mu)."""
    mass, late = resolvent_cell_weights(cfg, 0.0, grid.h, grid.n)
    return ConvolutionOperator(grid, mass, late, "kappa")


def resolvent_operator(cfg: InverterConfig, lam: float, grid: Grid) -> ConvolutionOperator:
    """Product integration against r_lambda."""
    mass, late = resolvent_cell_weights(cfg, lam, grid.h, grid.n)
    return ConvolutionOperator(grid, mass, late, f"r[{lam:g}]")


def operator_matrix(op: Callable[[SampledFunction], SampledFunction], grid: Grid) -> np.ndarray:
    """Dense matrix of a linear operator on sampled functions, column by column."""
    n1 = grid.n + 1
    mat = np.empty((n1, n1))
    for j in range(n1):
        e = np.zeros(n1)
        e[j] = 1.0
        mat[:, j] = op(SampledFunction(grid, e)).values
    return mat


# }}}


# {{{ derivatives


def _increments(phi: SampledFunction) -> np.ndarray:
    return np.diff(phi.values) / phi.grid.h


def _conv_against_slopes(masses: np.ndarray, phi: SampledFunction) -> np.ndarray:
    out = np.zeros(phi.grid.n + 1)
    out[1:] = _backend.causal_conv(masses, _increments(phi))
    return out


def caputo_masses(alpha: float, h: float, n: int) -> np.ndarray:
    """Cell integrals of s^-alpha / Gamma(1 - alpha) over [m h, (m + 1) h]."""
    m = np.arange(n + 1, dtype=np.float64)
    p = 1.0 - alpha
    return h**p * np.diff(m**p) / gamma_fn(2.0 - alpha)


def caputo_derivative(phi: SampledFunction, alpha: float) -> SampledFunction:
    """L1 scheme for the Caputo-Dzhrbashyan derivative of order alpha."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"order must lie in (0, 1): alpha={alpha}")
    g = phi.grid
    return SampledFunction(g, _conv_against_slopes(caputo_masses(alpha, g.h, g.n), phi))


def dist_derivative_conv(phi: SampledFunction, ke: KernelEvaluator) -> SampledFunction:
    """D^(mu) phi as int_0^t k(t - tau) phi'(tau) dtau with exact cell masses of k."""
    g = phi.grid
    return SampledFunction(g, _conv_against_slopes(ke.cell_masses(g.h, g.n), phi))


def dist_derivative_spectral(
    phi: SampledFunction,
    w: WeightFunction,
    alpha_rule: tuple[np.ndarray, np.ndarray] | None = None,
) -> SampledFunction:
    """D^(mu) phi as a quadrature in alpha of Caputo derivatives.

    ``alpha_rule`` is a pair (nodes, weights) on [0, 1]; the default is
    Gauss-Legendre.  Nodes must lie strictly inside (0, 1).
    """
    if alpha_rule is None:
        alpha_rule = gauss_legendre(SPECTRAL_ALPHA_ORDER, 0.0, 1.0)
    nodes = np.asarray(alpha_rule[0], dtype=np.float64)
    weights = np.asarray(alpha_rule[1], dtype=np.float64)
    if nodes.shape != weights.shape or nodes.ndim != 1:
        raise ConfigurationError("alpha rule needs matching 1d nodes and weights")
    if np.any(nodes <= 0.0) or np.any(nodes >= 1.0):
        raise ConfigurationError("alpha rule nodes must lie strictly inside (0, 1)")

    g = phi.grid
    total = np.zeros(g.n)
    wmu = weights * w(nodes)
    for a, c in zip(nodes, wmu):
        total += c * caputo_masses(a, g.h, g.n)
    return SampledFunction(g, _conv_against_slopes(total, phi))


def dist_derivative_bp(
    phi: SampledFunction, ke: KernelEvaluator, *, rtol: float = 1e-12
) -> SampledFunction:
    """D^(mu) phi as k(x) phi(x) + int_0^x [phi(x - t) - phi(x)] k'(t) dt.

    On the first cell the bracket is linear in t and is integrated against
    t k'(t) exactly; on later cells phi(x - t) is linear across the cell.
    Requires phi(0) = 0.
    """
    v = phi.values
    scale = max(1.0, float(np.max(np.abs(v))))
    if abs(v[0]) > rtol * scale:
        raise PreconditionError(
            f"function not in operator domain: phi(0)={v[0]:.3e} must vanish"
        )

    g = phi.grid
    h, n = g.h, g.n
    masses = ke.cell_masses(h, n)
    knodes = ke.k(g.nodes[1:])  # k(t_1), ..., k(t_n)

    # cell j: t in [t_j, t_{j+1}], phi(x - t) linear in t.
    #   int k' = k(t_{j+1}) - k(t_j) = P_j  (j >= 1; on j = 0 the bracket vanishes at t = 0)
    #   int (t - t_j) k' = h k(t_{j+1}) - M_j = Q_j
    p = np.zeros(n)
    p[1:] = np.diff(knodes)
    q = h * knodes - masses

    out = np.zeros(n + 1)
    i = np.arange(1, n + 1)
    # sum_{j=1}^{i-1} (phi_{i-j} - phi_i) P_j
    shifted = _backend.causal_conv(p, v)[1:]
    ptotal = np.cumsum(p)[i - 1]
    # sum_{j=0}^{i-1} Q_j (phi_{i-j-1} - phi_{i-j}) / h
    slopes = _increments(phi)
    linear = -_backend.causal_conv(q, slopes)
    out[1:] = knodes * v[1:] + shifted - v[1:] * ptotal + linear
    return SampledFunction(g, out)


def dist_derivative_def4(phi: SampledFunction, ke: KernelEvaluator) -> SampledFunction:
    """D^(mu) phi as d/dt (k * phi)(t) - k(t) phi(0).

    The cumulative convolution (k * phi)(t_i) is exact for piecewise-linear
    phi; it is differentiated by the second-order backward difference, which
    keeps the operator causal, and by a one-sided difference at t = h.  The
    term k(t) phi(0) is differentiated the same way from the exact integral
    of k, so constants cancel identically.  The value at t = 0 is reported
    as 0.
    """
    g = phi.grid
    cumulative = kernel_operator(ke, g).apply_values(phi.values)
    k_cumulative = np.concatenate([[0.0], ke.k_integral(g.nodes[1:])])
    out = _difference(cumulative, g.h) - phi.values[0] * _difference(k_cumulative, g.h)
    out[0] = 0.0
    return SampledFunction(g, out)


def _difference(c: np.ndarray, h: float) -> np.ndarray:
    d = np.zeros_like(c)
    d[1] = (c[1] - c[0]) / h
    d[2:] = (3.0 * c[2:] - 4.0 * c[1:-1] + c[:-2]) / (2.0 * h)
    return d


# }}}


# {{{ integral, eigenfunctions and resolvents


def dist_integral(
    f: SampledFunction, cfg: InverterConfig, op: ConvolutionOperator | None = None
) -> SampledFunction:
    """I^(mu) f = int_0^t kappa(t - s) f(s) ds.

    ``op`` may be a precomputed :func:`kappa_operator` for the same grid.
    """
    op = kappa_operator(cfg, f.grid) if op is None else op
    return op.apply(f)


def solve_eigen(
    lam: float, ke: KernelEvaluator, grid: Grid, *, min_pivot: float = MIN_PIVOT
) -> SampledFunction:
    """Solution of D^(mu) u = lam u, u(0) = 1, by implicit product integration.

    At node i the scheme solves sum_{j<i} M_{i-j-1} (u_{j+1} - u_j) / h = lam u_i
    for u_i, where M_m are the cell masses of k.
    """
    lam = float(lam)
    masses = ke.cell_masses(grid.h, grid.n)
    lam_h = lam * grid.h
    pivot = 1.0 - lam_h / masses[0]
    if pivot < min_pivot:
        raise StepSizeError(
            f"step too large for lambda={lam:g}: pivot 1 - lambda h / M_0 = {pivot:.3e}; "
            "refine the grid"
        )
    u = _backend.volterra_march(masses, lam_h, 1.0)
    return SampledFunction(grid, u)


def resolvent_apply(
    lam: float,
    u: SampledFunction,
    cfg: InverterConfig,
    op: ConvolutionOperator | None = None,
) -> SampledFunction:
    """R(lam, -A^L) u = int_0^x r_lam(x - s) u(s) ds."""
    op = resolvent_operator(cfg, lam, u.grid) if op is None else op
    return op.apply(u)


def integral_resolvent_apply(
    lam: float, u: SampledFunction, cfg: InverterConfig
) -> SampledFunction:
    """(I^(mu) - lam)^-1 u = -u / lam - r_{1/lam} * u / lam^2."""
    lam = float(lam)
    if lam == 0.0:
        raise DomainError(
            "lambda must be nonzero: I^(mu) is injective with an unbounded inverse"
        )
    conv = resolvent_apply(1.0 / lam, u, cfg).values
    return SampledFunction(u.grid, -u.values / lam - conv / lam**2)


def semigroup_apply(cfg: InverterConfig, t: float, u: SampledFunction) -> SampledFunction:
    """(T(t) u)(x) = int_0^x m(t, s) u(x - s) ds, the subordinated shift semigroup."""
    t = float(t)
    if t < 0:
        raise DomainError(f"time must be nonnegative: t={t}")
    if t == 0.0:
        return u
    g = u.grid
    mass, late = subordination_cell_weights(cfg, t, g.h, g.n)
    return ConvolutionOperator(g, mass, late, f"m[{t:g}]").apply(u)


# }}}


# {{{ error measures


def max_interior_error(
    a: SampledFunction | np.ndarray,
    b: SampledFunction | np.ndarray,
    grid: Grid,
    lo: float = 0.1,
    hi: float = 0.9,
) -> float:
    av = a.values if isinstance(a, SampledFunction) else np.asarray(a)
    bv = b.values if isinstance(b, SampledFunction) else np.asarray(b)
    mask = grid.interior(lo, hi)
    return float(np.max(np.abs(av[mask] - bv[mask])))


def relative_interior_error(
    a: SampledFunction | np.ndarray,
    b: SampledFunction | np.ndarray,
    grid: Grid,
    lo: float = 0.1,
    hi: float = 0.9,
) -> float:
    """max |a - b| / max |b| over the interior nodes lo T <= t <= hi T."""
    bv = b.values if isinstance(b, SampledFunction) else np.asarray(b)
    mask = grid.interior(lo, hi)
    scale = float(np.max(np.abs(bv[mask])))
    err = max_interior_error(a, b, grid, lo, hi)
    return err / scale if scale > 0 else err


# }}}

__all__ = [
    "ConvolutionOperator",
    "Grid",
    "SampledFunction",
    "caputo_derivative",
    "caputo_masses",
    "dist_derivative_bp",
    "dist_derivative_conv",
    "dist_derivative_def4",
    "dist_derivative_spectral",
    "dist_integral",
    "integral_resolvent_apply",
    "kappa_operator",
    "kernel_operator",
    "max_interior_error",
    "operator_matrix",
    "relative_interior_error",
    "resolvent_apply",
    "resolvent_operator",
    "semigroup_apply",
    "solve_eigen",
]
