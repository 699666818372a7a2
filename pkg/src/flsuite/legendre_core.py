"""Orthonormal Legendre polynomials, Gauss-Legendre rules and the
Christoffel-Darboux kernel.

The basis used everywhere is ``p_n = sqrt((2n+1)/2) * P_n`` so that
``int_{-1}^{1} p_n p_m dx = delta_{nm}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "QuadratureRule",
    "BasisSlice",
    "KernelEval",
    "eval_basis",
    "basis_matrix",
    "gauss_rule",
    "gamma_ratio",
    "leading_coefficient",
    "kernel",
    "kernel_values",
    "kernel_direct",
    "kernel_cd",
    "kernel_tail_integral",
]

_NEWTON_TOL = 1e-15
_NEWTON_MAXITER = 100


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on [-1, 1].

    Attributes
    ----------
    order : int
        Number of nodes.
    nodes : ndarray
        Abscissae, strictly increasing, inside (-1, 1).
    weights : ndarray
        Positive weights summing to 2.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def mapped(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights transported affinely to [a, b]."""
        half = 0.5 * (b - a)
        return a + half * (self.nodes + 1.0), half * self.weights

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


@dataclass(frozen=True)
class BasisSlice:
    n_max: int
    point: float
    values: np.ndarray


@dataclass(frozen=True)
class KernelEval:
    n: int
    x: float
    t: float
    value: float
    path: str  # "cd" or "direct"


def _recurrence_coefficients(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # p_{k+1} = a_k x p_k - b_k p_{k-1}
    k = k.astype(float)
    a = np.sqrt((2 * k + 1) * (2 * k + 3)) / (k + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.where(k > 0, k / (k + 1) * np.sqrt((2 * k + 3) / np.maximum(2 * k - 1, 1)), 0.0)
    return a, b


@lru_cache(maxsize=32)
def _coefficients(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    a, b = _recurrence_coefficients(np.arange(max(n_max, 1)))
    a.setflags(write=False)
    b.setflags(write=False)
    return a, b


def basis_matrix(n_max: int, x) -> np.ndarray:
    """Values ``p_k(x_j)`` for ``k = 0..n_max`` as an array of shape
    ``(n_max + 1,) + x.shape``."""
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0) or not np.all(np.isfinite(x)):
        raise ValueError("points must lie in [-1, 1]")
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0 / math.sqrt(2.0)
    if n_max == 0:
        return out
    a, b = _coefficients(n_max)
    out[1] = a[0] * x * out[0]
    for k in range(1, n_max):
        out[k + 1] = a[k] * x * out[k] - b[k] * out[k - 1]
    return out


def eval_basis(n_max: int, x: float) -> BasisSlice:
    """Evaluate ``p_0(x), ..., p_{n_max}(x)`` by the three-term recurrence.

    Raises ValueError if ``n_max < 0`` or ``x`` lies outside [-1, 1].
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    x = float(x)
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [-1, 1], got {x}")
    return BasisSlice(n_max=n_max, point=x, values=basis_matrix(n_max, x))


def _legendre_and_derivative(q: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(1, q):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = q * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


@lru_cache(maxsize=64)
def gauss_rule(q: int) -> QuadratureRule:
    """q-point Gauss-Legendre rule from Newton iteration on P_q.

    Exact for polynomials of degree <= 2q - 1.
    """
    q = int(q)
    if q < 1:
        raise ValueError(f"quadrature order must be >= 1, got {q}")
    if q == 1:
        return QuadratureRule(1, np.array([0.0]), np.array([2.0]))
    i = np.arange(q)
    x = np.cos(np.pi * (i + 0.75) / (q + 0.5))
    for _ in range(_NEWTON_MAXITER):
        p, dp = _legendre_and_derivative(q, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    p, dp = _legendre_and_derivative(q, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x = x[::-1]
    w = w[::-1]
    # enforce exact mirror symmetry
    nodes = 0.5 * (x - x[::-1])
    weights = 0.5 * (w + w[::-1])
    if q % 2 == 1:
        nodes[q // 2] = 0.0
    return QuadratureRule(q, nodes, weights)


def leading_coefficient(n: int) -> float:
    """Leading coefficient of ``p_n``: sqrt((2n+1)/2) (2n)! / (2^n (n!)^2)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    # log form avoids overflow of the factorials
    log_c = 0.5 * math.log((2 * n + 1) / 2.0) + math.lgamma(2 * n + 1) - n * math.log(2.0) - 2 * math.lgamma(n + 1)
    return math.exp(log_c)


def gamma_ratio(n: int) -> float:
    """Ratio of leading coefficients of ``p_{n-1}`` and ``p_n``.

    Closed form ``n / sqrt((2n-1)(2n+1))``; always in (0, 1].
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return n / math.sqrt((2.0 * n - 1.0) * (2.0 * n + 1.0))


def kernel_direct(n: int, x, t) -> np.ndarray:
    """``sum_{k<n} p_k(x) p_k(t)``, broadcasting over x and t."""
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    px = basis_matrix(n - 1, x)
    pt = basis_matrix(n - 1, t)
    return np.sum(px * pt, axis=0)


def kernel_cd(n: int, x, t) -> np.ndarray:
    """Christoffel-Darboux quotient. Undefined where x == t."""
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    px = basis_matrix(n, x)
    pt = basis_matrix(n, t)
    num = pt[n - 1] * px[n] - px[n - 1] * pt[n]
    return gamma_ratio(n) * num / (x - t)


def kernel_values(n: int, x, t, diag_tol: float | None = None) -> np.ndarray:
    """Vectorised kernel: CD quotient off the diagonal, direct sum near it."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if diag_tol is None:
        diag_tol = 1e-6 * n
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    px = basis_matrix(n, x)
    pt = basis_matrix(n, t)
    diff = x - t
    far = np.abs(diff) > diag_tol
    out = np.empty(x.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        cd = gamma_ratio(n) * (pt[n - 1] * px[n] - px[n - 1] * pt[n]) / diff
    out[far] = cd[far]
    near = ~far
    if np.any(near):
        out[near] = np.sum(px[:n, near] * pt[:n, near], axis=0)
    return out


def kernel(n: int, x: float, t: float, diag_tol: float | None = None) -> KernelEval:
    """Evaluate ``K_n(x, t)`` at a single pair of points."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    x, t = float(x), float(t)
    if not (-1.0 <= x <= 1.0 and -1.0 <= t <= 1.0):
        raise ValueError("x and t must lie in [-1, 1]")
    if diag_tol is None:
        diag_tol = 1e-6 * n
    if abs(x - t) > diag_tol:
        value, path = float(kernel_cd(n, x, t)), "cd"
    else:
        value, path = float(kernel_direct(n, x, t)), "direct"
    return KernelEval(n=n, x=x, t=t, value=value, path=path)


def kernel_tail_integral(
    n: int,
    x: float,
    s: float,
    side: str,
    rule: QuadratureRule | None = None,
) -> float:
    """``int_{-1}^{s} K_n(x,t) dt`` (side="left") or ``int_{s}^{1}`` (side="right").

    The integrand is a polynomial of degree n-1 in t, so any Gauss rule
    with at least n nodes integrates it exactly.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if side == "left":
        if not -1.0 <= s < x < 1.0:
            raise ValueError(f"left tail needs -1 <= s < x < 1, got s={s}, x={x}")
        a, b = -1.0, s
    elif side == "right":
        if not -1.0 < x < s <= 1.0:
            raise ValueError(f"right tail needs -1 < x < s <= 1, got x={x}, s={s}")
        a, b = s, 1.0
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if rule is None:
        rule = gauss_rule(n)
    elif rule.order < n:
        raise ValueError(f"rule order {rule.order} < n={n}; integral would not be exact")
    t, w = rule.mapped(a, b)
    px = basis_matrix(n - 1, x)
    pt = basis_matrix(n - 1, t)
    return float(np.dot(w, px @ pt))
