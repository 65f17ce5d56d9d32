"""Kernel k, its Laplace symbols and the Stieltjes density of L.

Every quantity here is an integral over the order alpha in [0, 1] against the
weight mu, so a single fixed Gauss-Legendre rule in alpha drives them all:

* k(s) = int s^-alpha / Gamma(1 - alpha) mu(alpha) dalpha
* K(z) = int z^(alpha - 1) mu(alpha) dalpha, L(z) = z K(z)
* beta(lambda) = int lambda^-alpha sin(alpha pi) / pi mu(alpha) dalpha

Antiderivatives of k are also exact alpha-integrals, which is how cell
integrals near the singularity at s = 0 are obtained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import rgamma

from ._quadrature import composite_gauss, gauss_legendre, graded_breakpoints
from .errors import ConfigurationError, DomainError
from .weights import WeightFunction

#: grading depth for a weight alpha**nu is about this over (1 + nu) levels
POWER_LAW_GRADING = 32.0


@dataclass(frozen=True)
class AlphaRule:
    """Gauss-Legendre rule over the order interval [0, 1]."""

    order: int = 64
    levels: int = 0

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ConfigurationError(f"alpha rule order must be at least 2: {self.order}")
        if self.levels < 0:
            raise ConfigurationError(f"grading levels must be nonnegative: {self.levels}")

    def nodes_weights(self) -> tuple[np.ndarray, np.ndarray]:
        if self.levels == 0:
            return gauss_legendre(self.order, 0.0, 1.0)
        return composite_gauss(graded_breakpoints(self.levels), max(16, self.order // 2))


def default_alpha_rule(weight: WeightFunction, order: int = 64) -> AlphaRule:
    zb = weight.zero_behavior
    if zb.kind == "power_law" and not float(zb.nu).is_integer():
        # panel [0, 2^-L] carries an error of order 2^(-L (1 + nu))
        return AlphaRule(order, min(40, math.ceil(POWER_LAW_GRADING / (1.0 + zb.nu))))
    return AlphaRule(order)


def _powm1(x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """x**p - 1 without cancellation for x near 1."""
    return np.expm1(p * np.log(x))


@dataclass(frozen=True, eq=False)
class KernelEvaluator:
    """Evaluates k, k', K, L and beta for one weight."""

    weight: WeightFunction
    alpha_rule: AlphaRule | None = None
    alpha: np.ndarray = field(init=False, repr=False, compare=False)
    wmu: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        rule = self.alpha_rule or default_alpha_rule(self.weight)
        object.__setattr__(self, "alpha_rule", rule)
        alpha, w = rule.nodes_weights()
        wmu = w * self.weight(alpha)
        alpha.setflags(write=False)
        wmu.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "wmu", wmu)

    @property
    def mu_at_one(self) -> float:
        return self.weight.mu_at_one

    # {{{ vectorized internals (no domain checks)

    @cached_property
    def _rg1(self) -> np.ndarray:
        return rgamma(1.0 - self.alpha)

    @cached_property
    def _rg2(self) -> np.ndarray:
        return rgamma(2.0 - self.alpha)

    @cached_property
    def _rg3(self) -> np.ndarray:
        return rgamma(3.0 - self.alpha)

    @cached_property
    def _sinpi(self) -> np.ndarray:
        return np.sin(np.pi * self.alpha) / np.pi

    def k(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        logs = np.log(s)[..., None]
        return np.exp(-self.alpha * logs) @ (self.wmu * self._rg1)

    def k_prime(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        logs = np.log(s)[..., None]
        return -np.exp(-(self.alpha + 1.0) * logs) @ (self.wmu * self.alpha * self._rg1)

    def k_integral(self, t: np.ndarray) -> np.ndarray:
        """int_0^t k(s) ds."""
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore"):
            logt = np.log(t)[..., None]
        return np.exp((1.0 - self.alpha) * logt) @ (self.wmu * self._rg2)

    def k_second_integral(self, t: np.ndarray) -> np.ndarray:
        """int_0^t (t - s) k(s) ds."""
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore"):
            logt = np.log(t)[..., None]
        return np.exp((2.0 - self.alpha) * logt) @ (self.wmu * self._rg3)

    def K(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        return np.exp((self.alpha - 1.0) * np.log(z)[..., None]) @ self.wmu

    def L(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        return np.exp(self.alpha * np.log(z)[..., None]) @ self.wmu

    def L_real(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return np.exp(self.alpha * np.log(x)[..., None]) @ self.wmu

    def L_prime(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        return np.exp((self.alpha - 1.0) * np.log(z)[..., None]) @ (self.wmu * self.alpha)

    def L_second(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        return np.exp((self.alpha - 2.0) * np.log(z)[..., None]) @ (
            self.wmu * self.alpha * (self.alpha - 1.0)
        )

    def beta(self, lam: np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=np.float64)
        return np.exp(-self.alpha * np.log(lam)[..., None]) @ (self.wmu * self._sinpi)

    # }}}

    # {{{ cell integrals on uniform grids

    def cell_masses(self, h: float, n: int) -> np.ndarray:
        """int over [m h, (m + 1) h] of k for m = 0, ..., n - 1."""
        m = np.arange(n, dtype=np.float64)[:, None]
        p = 1.0 - self.alpha[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            diff = np.where(m > 0, m**p * _powm1((m + 1.0) / np.maximum(m, 1.0), p), 1.0)
        return (h ** p * diff) @ (self.wmu * self._rg2)

    def cell_late_weights(self, h: float, n: int, order: int = 8) -> np.ndarray:
        """(1/h) int over [m h, (m + 1) h] of ((m + 1) h - s) k(s) ds.

        For a convolution int k(t_i - tau) f(tau) dtau with f piecewise
        linear, this is the weight of f at the later node of the cell.
        """
        p = 1.0 - self.alpha
        # m = 0: int_0^1 (1 - u) u^-alpha du = 1 / ((1 - alpha)(2 - alpha))
        first = (h**p * self._rg1 / (p * (1.0 + p))) @ self.wmu

        if n == 1:
            return np.array([first])

        x, w = gauss_legendre(order, 0.0, 1.0)
        m = np.arange(1, n, dtype=np.float64)[:, None, None]
        u = m + x[None, :, None]
        integrand = (1.0 - x)[None, :, None] * u ** (-self.alpha[None, None, :])
        per_alpha = np.einsum("j,mja->ma", w, integrand)
        rest = (per_alpha * (h**p * self._rg1)[None, :]) @ self.wmu
        return np.concatenate([[first], rest])

    # }}}

    # {{{ Stieltjes tails

    def beta_lower_moments(self, lam_min: float, nterms: int) -> np.ndarray:
        """int_0^lam_min lambda^j beta(lambda) dlambda, j = 0..nterms-1."""
        j = np.arange(nterms, dtype=np.float64)[:, None]
        e = j + 1.0 - self.alpha[None, :]
        return (np.exp(e * np.log(lam_min)) / e) @ (self.wmu * self._sinpi)

    def beta_upper_moments(self, lam_max: float, nterms: int) -> np.ndarray:
        """int_lam_max^inf lambda^(-j-1) beta(lambda) dlambda, j = 0..nterms-1."""
        j = np.arange(nterms, dtype=np.float64)[:, None]
        e = j + self.alpha[None, :]
        return (np.exp(-e * np.log(lam_max)) / e) @ (self.wmu * self._sinpi)

    # }}}


# {{{ checked scalar entry points


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0:
        raise DomainError(f"{name} must be positive: {value}")
    return value


def _off_cut(z: complex) -> complex:
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0:
        raise DomainError(f"z lies on the branch cut (-inf, 0]: {z}")
    return z


def eval_k(ke: KernelEvaluator, s: float) -> float:
    return float(ke.k(_positive("s", s)))


def eval_k_prime(ke: KernelEvaluator, s: float) -> float:
    return float(ke.k_prime(_positive("s", s)))


def cell_mass(ke: KernelEvaluator, t0: float, t1: float) -> float:
    """int_t0^t1 k(s) ds, finite also for t0 = 0."""
    t0, t1 = float(t0), float(t1)
    if t0 < 0 or not t1 > t0:
        raise DomainError(f"need 0 <= t0 < t1: t0={t0}, t1={t1}")
    p = 1.0 - ke.alpha
    if t0 == 0.0:
        diff = t1**p
    else:
        diff = t0**p * _powm1(np.full_like(p, t1 / t0), p)
    return float(diff @ (ke.wmu * ke._rg2))


def eval_K(ke: KernelEvaluator, z: complex) -> complex:
    return complex(ke.K(_off_cut(z)))


def eval_L(ke: KernelEvaluator, z: complex) -> complex:
    z = _off_cut(z)
    if z.imag == 0.0:
        return complex(float(ke.L_real(z.real)), 0.0)
    return complex(ke.L(z))


def eval_beta(ke: KernelEvaluator, lam: float) -> float:
    return float(ke.beta(_positive("lambda", lam)))


# }}}


# {{{ Stieltjes quadrature rule


@dataclass(frozen=True)
class StieltjesRule:
    """Quadrature for int_0^inf F(lambda) beta(lambda) dlambda.

    Gauss panels in log(lambda) cover [lambda_min, lambda_max]; the two tails
    are handled by series in lambda (near 0) and 1/lambda (near infinity)
    whose alpha-moment coefficients are exact.
    """

    lambda_min: float = 1.0e-8
    lambda_max: float = 1.0e8
    panels_per_decade: int = 2
    order: int = 8
    tail_terms: int = 3
    include_tails: bool = True

    def __post_init__(self) -> None:
        if not 0 < self.lambda_min < self.lambda_max:
            raise ConfigurationError(
                f"need 0 < lambda_min < lambda_max: {self.lambda_min}, {self.lambda_max}"
            )
        if self.panels_per_decade < 1 or self.order < 1:
            raise ConfigurationError("Stieltjes rule needs at least one node")
        if self.tail_terms < 1:
            raise ConfigurationError("at least one tail term is required")

    @cached_property
    def _nodes_weights(self) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = np.log10(self.lambda_min), np.log10(self.lambda_max)
        npanels = max(1, int(np.ceil((hi - lo) * self.panels_per_decade)))
        u, wu = composite_gauss(np.linspace(lo, hi, npanels + 1) * np.log(10.0), self.order)
        lam = np.exp(u)
        return lam, lam * wu

    @property
    def nodes(self) -> np.ndarray:
        return self._nodes_weights[0]

    @property
    def weights(self) -> np.ndarray:
        return self._nodes_weights[1]

    @property
    def size(self) -> int:
        return self.nodes.size

    def refined(self) -> StieltjesRule:
        """Rule with twice as many panels (hence nodes)."""
        return StieltjesRule(
            self.lambda_min,
            self.lambda_max,
            2 * self.panels_per_decade,
            self.order,
            self.tail_terms,
            self.include_tails,
        )

    def scalar(self, ke: KernelEvaluator, x: complex) -> complex:
        """Quadrature of int_0^inf x / (1 + lambda x) beta(lambda) dlambda."""
        lam, w = self.nodes, self.weights
        total = np.sum(w * ke.beta(lam) * x / (1.0 + lam * x))
        if self.include_tails:
            total += self.tail_scalar(ke, x)
        return complex(total)

    def tail_scalar(self, ke: KernelEvaluator, x: complex) -> complex:
        j = np.arange(self.tail_terms)
        sign = (-1.0) ** j
        lower = ke.beta_lower_moments(self.lambda_min, self.tail_terms)
        upper = ke.beta_upper_moments(self.lambda_max, self.tail_terms)
        return complex(np.sum(sign * lower * x ** (j + 1)) + np.sum(sign * upper * x ** (-j)))


def stieltjes_identity_residual(
    ke: KernelEvaluator, z: float, rule: StieltjesRule | None = None
) -> float:
    """|L(z) - int_0^inf z / (1 + lambda z) beta(lambda) dlambda| for z > 0."""
    rule = rule or StieltjesRule()
    if rule.size == 0:
        raise ConfigurationError("Stieltjes rule has no nodes")
    z = _positive("z", z)
    return abs(float(ke.L_real(z)) - rule.scalar(ke, z).real)


# }}}


# {{{ analytic identities


def moment_identity_sides(ke: KernelEvaluator) -> tuple[float, float]:
    """Both sides of int_0^inf t / (1 + t) sigma(dt), sigma(dt) = -k'(t) dt.

    The left side integrates -t k'(t) / (1 + t) in t on log-spaced panels
    over [1e-12, 1e12]; the two end pieces use series in t (resp. 1/t)
    integrated term by term.  The right side is the closed alpha-integral
    pi int alpha mu / (sin(alpha pi) Gamma(1 - alpha)) dalpha.
    """
    a = ke.alpha
    c = ke.wmu * a * ke._rg1  # -k'(t) = sum c t^(-a-1)

    t_lo, t_hi = 1.0e-12, 1.0e12
    u, wu = composite_gauss(np.linspace(np.log(t_lo), np.log(t_hi), 97), 16)
    t = np.exp(u)
    middle = float(np.sum(wu * t * (-ke.k_prime(t)) * t / (1.0 + t)))

    # t / (1 + t) = t - t^2 + ..., integrated against t^(-a-1) on (0, t_lo]
    j = np.arange(1, 12, dtype=np.float64)[:, None]
    e = j - a[None, :]
    lower = float(np.sum(((-1.0) ** (j + 1)) * np.exp(e * np.log(t_lo)) / e, axis=0) @ c)
    # t / (1 + t) = 1 - 1/t + ..., integrated on [t_hi, inf)
    j = np.arange(0, 12, dtype=np.float64)[:, None]
    e = j + a[None, :]
    upper = float(np.sum(((-1.0) ** j) * np.exp(-e * np.log(t_hi)) / e, axis=0) @ c)

    lhs = lower + middle + upper
    rhs = float(np.pi * np.sum(ke.wmu * a * ke._rg1 / np.sin(np.pi * a)))
    return lhs, rhs


def moment_identity_residual(ke: KernelEvaluator) -> float:
    lhs, rhs = moment_identity_sides(ke)
    return abs(lhs - rhs)


def real_part_profile(ke: KernelEvaluator, sigma: float, tau: np.ndarray) -> np.ndarray:
    """g(tau) = Re L(sigma + i tau)."""
    return ke.L(sigma + 1j * np.asarray(tau, dtype=np.float64)).real


def check_real_part_monotone(
    ke: KernelEvaluator, sigma: float, tau_grid: np.ndarray, tol: float = 1.0e-12
) -> bool:
    sigma = _positive("sigma", sigma)
    tau = np.asarray(tau_grid, dtype=np.float64)
    if tau.ndim != 1 or tau.size < 2 or np.any(tau <= 0) or np.any(np.diff(tau) <= 0):
        raise DomainError("tau grid must be positive and strictly increasing")

    g = real_part_profile(ke, sigma, tau)
    g0 = float(ke.L_real(sigma))
    return bool(np.all(np.diff(g) > 0) and np.min(g) > g0 - tol)


# }}}
