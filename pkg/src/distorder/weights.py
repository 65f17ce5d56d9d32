"""Weight functions mu on [0, 1] defining the distributed-order calculus.

A weight is immutable once built.  Three kinds are supported:

``constant``
    mu(alpha) = c.
``power_at_zero``
    a profile vanishing like a * alpha**nu at the origin.  Without an explicit
    body the profile is exactly a * alpha**nu.
``tabulated``
    a not-a-knot cubic spline through ``(alpha, mu(alpha))`` samples.
"""

from __future__ import annotations

import json
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigurationError, DomainError

Profile = Callable[[np.ndarray], np.ndarray]

#: number of points used for pointwise nonnegativity checks
DENSE_CHECK_POINTS = 10_000
#: small alphas at which a declared power law is compared with the profile
POWER_LAW_PROBES = (1.0e-2, 1.0e-3)
#: accepted relative deviation of mu(alpha) / alpha**nu from a at the smallest probe
POWER_LAW_RTOL = 0.1


@dataclass(frozen=True)
class ZeroBehavior:
    """Behavior of the weight as alpha -> 0."""

    kind: str
    a: float = 0.0
    nu: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("positive_at_zero", "power_law"):
            raise ConfigurationError(f"unknown zero behavior: {self.kind!r}")
        if self.kind == "power_law" and not (self.a > 0 and self.nu > 0):
            raise ConfigurationError(
                f"power law needs a > 0 and nu > 0: a={self.a}, nu={self.nu}"
            )

    @classmethod
    def positive(cls) -> ZeroBehavior:
        return cls("positive_at_zero")

    @classmethod
    def power_law(cls, a: float, nu: float) -> ZeroBehavior:
        return cls("power_law", float(a), float(nu))


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """The weight mu together with its declared behavior at alpha = 0."""

    kind: str
    profile: Profile = field(repr=False, compare=False)
    zero_behavior: ZeroBehavior
    params: dict[str, Any] = field(default_factory=dict, compare=False)
    mu_at_one: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu_at_one", float(self.profile(np.array([1.0]))[0]))

    # {{{ constructors

    @classmethod
    def constant(cls, c: float = 1.0) -> WeightFunction:
        c = float(c)
        if not c > 0:
            raise ConfigurationError(f"constant weight must be positive: c={c}")

        def profile(alpha: np.ndarray) -> np.ndarray:
            return np.full(np.shape(alpha), c)

        return cls("constant", profile, ZeroBehavior.positive(), {"c": c})

    @classmethod
    def power_at_zero(
        cls, a: float, nu: float, body: Profile | None = None
    ) -> WeightFunction:
        """Weight with mu(alpha) ~ a * alpha**nu as alpha -> 0.

        ``body`` is the full profile; when omitted it is ``a * alpha**nu``.
        """
        behavior = ZeroBehavior.power_law(a, nu)
        a, nu = behavior.a, behavior.nu
        if body is None:

            def body(alpha: np.ndarray) -> np.ndarray:
                return a * np.asarray(alpha, dtype=np.float64) ** nu

            params: dict[str, Any] = {"a": a, "nu": nu}
        else:
            params = {"a": a, "nu": nu, "body": "callable"}

        fn = body

        def profile(alpha: np.ndarray) -> np.ndarray:
            return np.asarray(fn(np.asarray(alpha, dtype=np.float64)), dtype=np.float64)

        return cls("power_at_zero", profile, behavior, params)

    @classmethod
    def tabulated(
        cls,
        samples: Sequence[Sequence[float]] | np.ndarray,
        zero_behavior: ZeroBehavior | None = None,
    ) -> WeightFunction:
        table = np.asarray(samples, dtype=np.float64)
        if table.ndim != 2 or table.shape[1] != 2 or table.shape[0] < 4:
            raise ConfigurationError("tabulated weight needs at least 4 (alpha, value) pairs")
        order = np.argsort(table[:, 0])
        table = table[order]
        alpha, values = table[:, 0], table[:, 1]
        if np.any(np.diff(alpha) <= 0):
            raise ConfigurationError("tabulated alphas must be distinct")
        if alpha[0] != 0.0 or alpha[-1] != 1.0:
            raise ConfigurationError("tabulated alphas must span exactly [0, 1]")

        spline = CubicSpline(alpha, values, bc_type="not-a-knot")

        def profile(a: np.ndarray) -> np.ndarray:
            return np.asarray(spline(np.asarray(a, dtype=np.float64)), dtype=np.float64)

        if zero_behavior is None:
            zero_behavior = ZeroBehavior.positive()
        return cls(
            "tabulated", profile, zero_behavior, {"samples": table.tolist()}
        )

    # }}}

    def __call__(self, alpha: np.ndarray | float) -> np.ndarray:
        return self.profile(np.asarray(alpha, dtype=np.float64))

    def to_json(self) -> dict[str, Any]:
        if self.kind == "constant":
            return {"kind": "constant", "c": self.params["c"]}
        if self.kind == "power_at_zero":
            if "body" in self.params:
                raise ConfigurationError("weights with a callable body are not serializable")
            return {"kind": "power_at_zero", "a": self.params["a"], "nu": self.params["nu"]}

        out: dict[str, Any] = {"kind": "tabulated", "samples": self.params["samples"]}
        if self.zero_behavior.kind == "power_law":
            out["zero_behavior"] = {
                "kind": "power_law",
                "a": self.zero_behavior.a,
                "nu": self.zero_behavior.nu,
            }
        return out


def eval_weight(w: WeightFunction, alpha: float) -> float:
    """Value of mu at a single order ``alpha`` in [0, 1]."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1]: {alpha}")
    return float(w.profile(np.array([alpha]))[0])


def validate(w: WeightFunction, npoints: int = DENSE_CHECK_POINTS) -> list[str]:
    """List the violated admissibility assumptions; empty if admissible."""
    report: list[str] = []

    alpha = np.linspace(0.0, 1.0, npoints)
    values = w(alpha)
    if not np.all(np.isfinite(values)):
        report.append("non-finite values on the check grid")
    elif np.min(values) < 0:
        i = int(np.argmin(values))
        report.append(f"negative values: min mu={values[i]:.3e} at alpha={alpha[i]:.4f}")

    if not w.mu_at_one > 0:
        report.append(f"μ(1)=0 (mu(1)={w.mu_at_one:.3e} must be positive)")

    zb = w.zero_behavior
    mu0 = float(w(np.array([0.0]))[0])
    if zb.kind == "positive_at_zero":
        if not mu0 > 0:
            report.append(f"zero-behavior mismatch: declared positive at 0 but mu(0)={mu0:.3e}")
    else:
        probes = np.array(POWER_LAW_PROBES)
        ratios = w(probes) / probes**zb.nu
        if abs(ratios[-1] / zb.a - 1.0) > POWER_LAW_RTOL:
            shown = ", ".join(f"{r:.3e}" for r in ratios)
            report.append(
                f"zero-behavior mismatch: mu(alpha)/alpha^{zb.nu:g} = [{shown}] "
                f"at alpha = {list(POWER_LAW_PROBES)}, expected {zb.a:g}"
            )

    return report


def weight_from_json(source: dict[str, Any] | str | Path) -> WeightFunction:
    """Build a weight from its JSON description (dict, JSON text or file path)."""
    is_text = isinstance(source, str) and source.lstrip().startswith("{")
    if isinstance(source, Path) or (isinstance(source, str) and not is_text):
        source = json.loads(Path(source).read_text())
    elif isinstance(source, str):
        source = json.loads(source)

    if not isinstance(source, dict) or "kind" not in source:
        raise ConfigurationError("weight specification must be an object with a 'kind'")

    kind = source["kind"]
    try:
        if kind == "constant":
            return WeightFunction.constant(source.get("c", 1.0))
        if kind == "power_at_zero":
            a, nu = source["a"], source["nu"]
            if "body" in source:
                body = WeightFunction.tabulated(source["body"], ZeroBehavior.power_law(a, nu))
                return WeightFunction.power_at_zero(a, nu, body.profile)
            return WeightFunction.power_at_zero(a, nu)
        if kind == "tabulated":
            zb = source.get("zero_behavior")
            behavior = None
            if zb is not None:
                if zb.get("kind") == "power_law":
                    behavior = ZeroBehavior.power_law(zb["a"], zb["nu"])
                else:
                    behavior = ZeroBehavior(zb.get("kind", ""))
            return WeightFunction.tabulated(source["samples"], behavior)
    except KeyError as exc:
        raise ConfigurationError(f"missing weight parameter: {exc}") from None

    raise ConfigurationError(f"unknown weight kind: {kind!r}")


# {{{ bundled weights


def uniform_weight() -> WeightFunction:
    """mu = 1."""
    return WeightFunction.constant(1.0)


def linear_weight() -> WeightFunction:
    """mu(alpha) = alpha."""
    return WeightFunction.power_at_zero(1.0, 1.0)


def bump_weight(eps: float = 0.0) -> WeightFunction:
    """mu(alpha) = 6 alpha (1 - alpha) + eps; inadmissible for eps = 0."""
    eps = float(eps)

    def body(alpha: np.ndarray) -> np.ndarray:
        return 6.0 * alpha * (1.0 - alpha) + eps

    if eps > 0:
        return WeightFunction.tabulated(
            np.column_stack([np.linspace(0, 1, 201), body(np.linspace(0, 1, 201))])
        )
    return WeightFunction.power_at_zero(6.0, 1.0, body)


# }}}

__all__ = [
    "WeightFunction",
    "ZeroBehavior",
    "bump_weight",
    "eval_weight",
    "linear_weight",
    "uniform_weight",
    "validate",
    "weight_from_json",
]
