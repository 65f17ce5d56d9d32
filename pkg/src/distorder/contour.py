"""Inverse Laplace transforms on the hook contour.

The hook S(gamma, omega) is the arc |z| = gamma, |arg z| <= omega pi, joined
to the two rays arg z = +-omega pi, |z| >= gamma, traversed in the direction
of increasing arg z.  Since cos(omega pi) < 0 for 1/2 < omega < 1, e^{zs}
decays along both rays and the rays can be truncated at a finite radius.

Quantities computed here:

* r_lambda(s), the inverse transform of 1 / (L(z) - lambda); kappa = r_0;
* the subordination density m(t, s), the inverse transform of e^{-t L(z)};
* antiderivatives of both in s (extra factors 1/z and 1/z^2), which give
  exact product-integration weights on uniform grids.

For m(t, s) with s small compared with t, e^{-t L(z)} grows along the rays
before e^{zs} wins and the hook sum cancels catastrophically.  Those points
are evaluated on a vertical line through the real saddle point of
x s - t L(x) instead; see :func:`eval_m`.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from ._quadrature import composite_gauss, gauss_legendre
from .errors import ConfigurationError, ContourError, DomainError
from .kernels import KernelEvaluator

Symbol = Callable[[np.ndarray], np.ndarray]

#: accepted loss (natural log) between the largest hook term and |m|
HOOK_CANCELLATION_BUDGET = 16.0
#: cap on Bromwich panels before giving up
MAX_LINE_PANELS = 20_000
#: beyond this size of t L(x*) the line quadrature loses all digits
SADDLE_ONLY_EXPONENT = 1.0e11


# {{{ contour


@dataclass(frozen=True)
class HookContour:
    """Quadrature nodes and complex weights on a truncated hook contour."""

    gamma: float
    omega: float
    ray_truncation: float
    z: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    narc: int = field(repr=False)

    @property
    def size(self) -> int:
        return self.z.size

    @property
    def arc(self) -> slice:
        nray = (self.size - self.narc) // 2
        return slice(nray, nray + self.narc)

    @property
    def rays(self) -> np.ndarray:
        mask = np.ones(self.size, dtype=bool)
        mask[self.arc] = False
        return mask

    def integrate(self, s: np.ndarray | float, values: np.ndarray) -> np.ndarray:
        """(1 / 2 pi i) int e^{zs} F(z) dz for each s, given F on the nodes."""
        s = np.asarray(s, dtype=np.float64)
        terms = np.exp(np.multiply.outer(s, self.z)) * (self.w * values)
        return terms.sum(axis=-1) / (2j * np.pi)


def _ray_breakpoints(gamma: float, radius: float, ratio: float) -> np.ndarray:
    pts = [gamma]
    while pts[-1] < radius:
        pts.append(min(radius, pts[-1] * (1.0 + ratio)))
    if len(pts) < 3:
        pts = list(np.linspace(gamma, max(radius, gamma * (1 + ratio)), 3))
    return np.array(pts)


def build_contour(
    gamma: float,
    omega: float,
    target_s: float,
    tol: float = 1.0e-12,
    *,
    s_max: float | None = None,
    order: int = 16,
    phase_budget: float = 4.0,
) -> HookContour:
    """Hook contour adequate for every s in [target_s, s_max].

    The rays stop at R with exp(R target_s cos(omega pi)) = tol.  Ray panels
    grow geometrically with a ratio chosen so that the phase of e^{zs}
    changes by at most ``phase_budget`` per panel inside the decay range of
    any s >= target_s; arc panels resolve e^{zs} up to ``s_max``.
    """
    gamma, omega, target_s = float(gamma), float(omega), float(target_s)
    if not 0.5 < omega < 1.0:
        raise ConfigurationError(f"omega must lie in (1/2, 1): {omega}")
    if not gamma > 0:
        raise ConfigurationError(f"arc radius must be positive: {gamma}")
    if not target_s > 0:
        raise DomainError(f"target s must be positive: {target_s}")
    if not 0 < tol < 1:
        raise ConfigurationError(f"tolerance must lie in (0, 1): {tol}")
    s_max = target_s if s_max is None else max(float(s_max), target_s)

    theta = omega * np.pi
    c, sn = math.cos(theta), math.sin(theta)
    decay = math.log(1.0 / tol)
    radius = max(gamma * 1.5, decay / (target_s * abs(c)))
    ratio = min(0.5, phase_budget / (decay * abs(sn / c)))

    rho, wrho = composite_gauss(_ray_breakpoints(gamma, radius, ratio), order)
    up = np.exp(1j * theta)

    narc_panels = max(4, math.ceil(2.0 * theta * gamma * s_max / phase_budget))
    phi, wphi = composite_gauss(np.linspace(-theta, theta, narc_panels + 1), order)
    zarc = gamma * np.exp(1j * phi)
    warc = 1j * zarc * wphi

    # lower ray inward, arc, upper ray outward
    z = np.concatenate([(rho * up.conjugate())[::-1], zarc, rho * up])
    w = np.concatenate([(-wrho * up.conjugate())[::-1], warc, wrho * up])
    z.setflags(write=False)
    w.setflags(write=False)
    return HookContour(gamma, omega, radius, z, w, zarc.size)


def truncated_exp_integral(contour: HookContour, s: float) -> complex:
    """(1 / 2 pi i) int over the truncated hook of e^{zs} dz (zero in the limit)."""
    return complex(contour.integrate(s, np.ones(contour.size)))


# }}}


# {{{ configuration


@dataclass(frozen=True)
class InverterConfig:
    """Contour parameters plus the denominator-safety policy."""

    kernel: KernelEvaluator
    gamma: float = 1.0
    omega: float = 0.75
    tol: float = 1.0e-12
    order: int = 16
    phase_budget: float = 4.0
    delta: float = 1.0e-6
    max_enlarge: int = 6
    #: the arc radius is capped so that gamma * s stays below this value
    gs_max: float = 2.0

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ConfigurationError(f"delta must be positive: {self.delta}")
        if not 0.5 < self.omega < 1.0:
            raise ConfigurationError(f"omega must lie in (1/2, 1): {self.omega}")
        if not self.gamma > 0:
            raise ConfigurationError(f"gamma must be positive: {self.gamma}")
        if self.max_enlarge < 0:
            raise ConfigurationError("max_enlarge must be nonnegative")

    def with_(self, **kwargs) -> InverterConfig:
        return replace(self, **kwargs)

    def contour(self, gamma: float, s_min: float, s_max: float | None = None) -> HookContour:
        return build_contour(
            gamma,
            self.omega,
            s_min,
            self.tol,
            s_max=s_max,
            order=self.order,
            phase_budget=self.phase_budget,
        )


def _pole_on_axis(ke: KernelEvaluator, lam: float) -> float:
    """x > 0 with L(x) = lam (L increases from 0 to infinity on (0, inf))."""

    def f(u: float) -> float:
        return float(ke.L_real(math.exp(u))) - lam

    lo, hi = -5.0, 5.0
    while f(lo) > 0:
        lo *= 2
    while f(hi) < 0:
        hi *= 2
    return math.exp(brentq(f, lo, hi, xtol=1e-14))


@dataclass(frozen=True)
class ResolventContour:
    contour: HookContour
    lam: complex
    denom: np.ndarray = field(repr=False)
    attempts: int = 0


def resolvent_contour(
    cfg: InverterConfig, lam: complex, s_min: float, s_max: float | None = None
) -> ResolventContour:
    """Hook contour on which 1 / (L(z) - lam) is safe to evaluate.

    For real lam > 0 the root x* of L(x) = lam must lie inside the arc
    (gamma >= 1.5 x*); in every case min |L(z) - lam| over the nodes must be
    at least ``cfg.delta``.  Failing either, gamma is doubled, at most
    ``cfg.max_enlarge`` times.
    """
    lam = complex(lam)
    s_max = s_min if s_max is None else s_max
    gamma = min(cfg.gamma, cfg.gs_max / s_max)

    need = 0.0
    if lam.imag == 0.0 and lam.real > 0:
        need = 1.5 * _pole_on_axis(cfg.kernel, lam.real)

    for attempt in range(cfg.max_enlarge + 1):
        contour = cfg.contour(gamma, s_min, s_max)
        denom = cfg.kernel.L(contour.z) - lam
        if gamma >= need and np.min(np.abs(denom)) >= cfg.delta:
            return ResolventContour(contour, lam, denom, attempt)
        gamma *= 2.0

    raise ContourError(
        f"resolvent evaluation failed near spectrum of symbol: lambda={lam}, "
        f"gamma enlarged {cfg.max_enlarge} times to {gamma / 2:g}"
    )


# }}}


# {{{ resolvent kernel and kappa


def _real_if_real(lam: complex, values: np.ndarray) -> np.ndarray:
    return values.real if complex(lam).imag == 0.0 else values


def resolvent_values(cfg: InverterConfig, lam: complex, s: np.ndarray) -> np.ndarray:
    """Complex contour sums for r_lambda at an array of s (diagnostics)."""
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    if np.any(s <= 0):
        raise DomainError("s must be positive")
    rc = resolvent_contour(cfg, lam, float(s.min()), float(s.max()))
    return rc.contour.integrate(s, 1.0 / rc.denom)


def eval_r_lambda(cfg: InverterConfig, lam: complex, s: float | np.ndarray):
    """r_lambda(s) = (1 / 2 pi i) int_S e^{zs} / (L(z) - lambda) dz.

    Real for real lambda (the imaginary part cancels by conjugate symmetry).
    """
    values = resolvent_values(cfg, lam, s)
    out = _real_if_real(lam, values)
    return float(out[0]) if np.ndim(s) == 0 else out


def eval_r_lambda_split(cfg: InverterConfig, lam: complex, s: float) -> tuple[complex, complex]:
    """The two integrals of the 1/lambda rewriting of r_lambda.

    Returns (first, second) with r_lambda(s) = first - second, where
    first = (1 / 2 pi i lambda) int e^{zs} L / (L - lambda) dz and
    second = (1 / 2 pi i lambda) int e^{zs} dz (zero in the limit).
    """
    lam = complex(lam)
    if lam == 0:
        raise DomainError("lambda must be nonzero")
    rc = resolvent_contour(cfg, lam, float(s))
    L = rc.denom + lam
    first = complex(rc.contour.integrate(float(s), L / rc.denom)) / lam
    second = truncated_exp_integral(rc.contour, float(s)) / lam
    return first, second


def eval_kappa(cfg: InverterConfig, t: float | np.ndarray):
    """kappa(t) = r_0(t), the kernel of the distributed-order integral."""
    return eval_r_lambda(cfg, 0.0, t)


def resolvent_antiderivatives(
    cfg: InverterConfig, lam: complex, t: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """int_0^t r_lambda and int_0^t (t - s) r_lambda(s) ds at positive t.

    Computed as inverse transforms of 1 / (z (L - lam)) and 1 / (z^2 (L - lam)).
    """
    t = np.asarray(t, dtype=np.float64)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    rc = resolvent_contour(cfg, lam, float(t.min()), float(t.max()))
    z = rc.contour.z
    first = rc.contour.integrate(t, 1.0 / (z * rc.denom))
    second = rc.contour.integrate(t, 1.0 / (z * z * rc.denom))
    return _real_if_real(lam, first), _real_if_real(lam, second)


def resolvent_cell_weights(
    cfg: InverterConfig, lam: complex, h: float, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Cell masses and later-node weights of r_lambda on the grid j h, j = 0..n."""
    t = h * np.arange(1, n + 1, dtype=np.float64)
    r1, r2 = resolvent_antiderivatives(cfg, lam, t)
    r1 = np.concatenate([[0.0], r1])
    r2 = np.concatenate([[0.0], r2])
    mass = np.diff(r1)
    late = (np.diff(r2) - h * r1[:-1]) / h
    return mass, late


# }}}


# {{{ subordination density


def _saddle(ke: KernelEvaluator, t: float, s: float) -> float | None:
    """log of x > 0 solving L'(x) = s / t, or None when x > e^600."""
    target = s / t

    def f(u: float) -> float:
        return float(ke.L_prime(math.exp(u)).real) - target

    if f(600.0) > 0:
        return None
    lo = -50.0
    while f(lo) < 0 and lo > -700:
        lo -= 50.0
    return brentq(f, lo, 600.0, xtol=1e-12)


def _log_chernoff(ke: KernelEvaluator, t: float, s: float) -> float:
    u = _saddle(ke, t, s)
    if u is None:
        return -math.inf
    x = math.exp(u)
    return x * s - t * float(ke.L_real(x))


@dataclass(frozen=True)
class ScaledValue:
    """value = mantissa * exp(log_scale); lets tiny densities be compared in logs."""

    mantissa: float
    log_scale: float

    @property
    def value(self) -> float:
        if self.log_scale == -math.inf or self.mantissa == 0:
            return 0.0
        with np.errstate(over="ignore", under="ignore"):
            return float(self.mantissa * math.exp(min(self.log_scale, 700.0)))

    @property
    def log_abs(self) -> float:
        if self.mantissa == 0:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.log_scale


def _hook_subordination(
    cfg: InverterConfig, t: float, s: float, power: int
) -> tuple[float, float]:
    """Hook sum of e^{zs} e^{-tL(z)} / z^power; returns (value, log of max term)."""
    ke = cfg.kernel
    gamma = min(cfg.gamma, cfg.gs_max / s)
    contour = cfg.contour(gamma, s)
    z = contour.z
    with np.errstate(over="ignore", invalid="ignore"):
        logterm = z * s - t * ke.L(z) - power * np.log(z)
        terms = np.exp(logterm) * contour.w
        value = terms.sum() / (2j * np.pi)
    biggest = float(np.max(logterm.real + np.log(np.abs(contour.w))))
    return float(value.real), biggest


def _line_subordination(cfg: InverterConfig, t: float, s: float, power: int) -> ScaledValue:
    """Vertical-line integral through the saddle x*, in scaled form.

    (1/pi) Re int_0^inf e^{zs - tL(z)} z^-power dtau with z = x* + i tau,
    scaled by exp(x* s - t L(x*)).  The modulus of the integrand decreases
    monotonically in tau because Re L(x* + i tau) increases with tau.
    """
    ke = cfg.kernel
    u = _saddle(ke, t, s)
    if u is None:
        return ScaledValue(0.0, -math.inf)
    x = math.exp(u)
    Lx = float(ke.L_real(x))
    log_scale = x * s - t * Lx - power * u

    if t * Lx > SADDLE_ONLY_EXPONENT:
        # exponent differences along the line are below roundoff; keep the
        # Gaussian (saddle-point) approximation, whose value underflows anyway
        curvature = t * abs(float(ke.L_second(x).real))
        return ScaledValue(1.0 / math.sqrt(2.0 * math.pi * curvature), log_scale)

    order = cfg.order
    xg, wg = gauss_legendre(order, 0.0, 1.0)
    stop = math.log(cfg.tol) - 5.0

    def exponent(tau: np.ndarray) -> np.ndarray:
        z = x + 1j * tau
        return 1j * tau * s - t * (ke.L(z) - Lx) - power * (np.log(z) - u)

    total = 0.0
    a = 0.0
    for _ in range(MAX_LINE_PANELS):
        z = x + 1j * a
        rate = (
            abs(s - t * complex(ke.L_prime(z)))
            + math.sqrt(t * abs(complex(ke.L_second(z))))
            + (power + 1.0) / abs(z)
        )
        b = a + cfg.phase_budget / rate
        tau = a + (b - a) * xg
        total += float(np.sum((b - a) * wg * np.exp(exponent(tau)).real))
        if float(exponent(np.array([b]))[0].real) < stop:
            return ScaledValue(total / math.pi, log_scale)
        a = b

    raise ContourError(
        f"subordination density did not converge within {MAX_LINE_PANELS} panels "
        f"(t={t}, s={s})"
    )


def _subordination(
    cfg: InverterConfig, t: float, s: float, power: int, method: str
) -> ScaledValue:
    t, s = float(t), float(s)
    if not t > 0 or not s > 0:
        raise DomainError(f"t and s must be positive: t={t}, s={s}")
    if method not in ("auto", "hook", "line"):
        raise ConfigurationError(f"unknown method: {method!r}")

    if method == "line":
        return _line_subordination(cfg, t, s, power)

    value, biggest = _hook_subordination(cfg, t, s, power)
    if method == "hook":
        return ScaledValue(value, 0.0)

    expected = _log_chernoff(cfg.kernel, t, s)
    if np.isfinite(value) and biggest - expected <= HOOK_CANCELLATION_BUDGET:
        return ScaledValue(value, 0.0)
    return _line_subordination(cfg, t, s, power)


def eval_m_scaled(
    cfg: InverterConfig, t: float, s: float, method: str = "auto"
) -> ScaledValue:
    """Subordination density m(t, s) in scaled form (see :class:`ScaledValue`)."""
    return _subordination(cfg, t, s, 0, method)


def eval_m(cfg: InverterConfig, t: float, s: float, method: str = "auto") -> float:
    """m(t, s) = (1 / 2 pi i) int e^{zs} e^{-t L(z)} dz.

    ``method`` selects the hook contour, the saddle-point vertical line or
    (``"auto"``) the hook unless its terms exceed the Chernoff bound
    exp(min_x (x s - t L(x))) by more than ``HOOK_CANCELLATION_BUDGET``.
    """
    return eval_m_scaled(cfg, t, s, method).value


def eval_m_cdf_scaled(
    cfg: InverterConfig, t: float, s: float, method: str = "auto"
) -> ScaledValue:
    """int_0^s m(t, u) du, the inverse transform of e^{-t L(z)} / z."""
    return _subordination(cfg, t, s, 1, method)


def eval_m_cdf(cfg: InverterConfig, t: float, s: float, method: str = "auto") -> float:
    return eval_m_cdf_scaled(cfg, t, s, method).value


def subordination_cell_weights(
    cfg: InverterConfig, t: float, h: float, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Cell masses and later-node weights of m(t, .) on the grid j h, j = 0..n."""
    nodes = h * np.arange(1, n + 1, dtype=np.float64)
    first = np.array([eval_m_cdf(cfg, t, x) for x in nodes])
    second = np.array([_subordination(cfg, t, x, 2, "auto").value for x in nodes])
    first = np.concatenate([[0.0], first])
    second = np.concatenate([[0.0], second])
    mass = np.diff(first)
    late = (np.diff(second) - h * first[:-1]) / h
    return mass, late


def semigroup_log_norm_bound(cfg: InverterConfig, t: float, T: float) -> float:
    """log of B(t) = int_0^T |m(t, s)| ds = sigma_t([0, T]) (m is a density)."""
    return eval_m_cdf_scaled(cfg, t, T).log_abs


# }}}


# {{{ vertical line cross-check


def bromwich_line(
    symbol: Symbol,
    s: float,
    gamma: float,
    tau_max: float = 1.0e6,
    panels_per_unit: float = 2.0,
    order: int = 16,
) -> float:
    """(1/pi) Re int_0^tau_max e^{(gamma + i tau) s} F(gamma + i tau) dtau.

    Plain vertical-line quadrature for real-symmetric F; slow and only
    accurate for F decaying like |z|^-2 or faster.
    """
    period = 2.0 * np.pi / max(s, 1e-300)
    lo = min(tau_max, 10.0 * max(gamma, 1.0))
    near = np.linspace(0.0, lo, max(8, int(lo * panels_per_unit)) + 1)
    far = np.geomspace(lo, tau_max, 200)
    uniform_cap = np.arange(lo, tau_max, period / 2.0)
    bps = np.unique(np.concatenate([near, far, uniform_cap[: 200_000]]))
    tau, w = composite_gauss(bps, order)
    z = gamma + 1j * tau
    return float(np.sum(w * (np.exp(z * s) * symbol(z)).real) / np.pi)


# }}}
