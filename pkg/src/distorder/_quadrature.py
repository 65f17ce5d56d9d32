"""Gauss-Legendre rules on intervals and composite panels."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ConfigurationError


@lru_cache(maxsize=64)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(order: int, a: float = -1.0, b: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``order``-point rule mapped to ``[a, b]``."""
    if order < 1:
        raise ConfigurationError(f"quadrature order must be positive: {order}")
    x, w = _gauss_legendre(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_gauss(breakpoints: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule with one ``order``-point Gauss panel per interval."""
    breakpoints = np.asarray(breakpoints, dtype=np.float64)
    if breakpoints.ndim != 1 or breakpoints.size < 2:
        raise ConfigurationError("need at least two breakpoints")
    if np.any(np.diff(breakpoints) <= 0):
        raise ConfigurationError("breakpoints must be strictly increasing")

    x, w = _gauss_legendre(order)
    a = breakpoints[:-1, None]
    half = 0.5 * np.diff(breakpoints)[:, None]
    nodes = a + half * (x[None, :] + 1.0)
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def graded_breakpoints(levels: int, ratio: float = 0.5) -> np.ndarray:
    """Breakpoints on ``[0, 1]`` refined geometrically towards 0."""
    if levels <= 0:
        return np.array([0.0, 1.0])
    inner = ratio ** np.arange(levels, 0, -1, dtype=np.float64)
    return np.concatenate([[0.0], inner, [1.0]])
