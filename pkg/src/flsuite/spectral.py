"""Double Fourier-Legendre coefficients and rectangular partial sums.

Index convention: the first truncation order ``N`` counts x-modes
(``n < N``), the second ``M`` counts y-modes (``m < M``), so

    S_{N,M} f(x, y) = sum_{n<N} sum_{m<M} fhat(n, m) p_n(x) p_m(y).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .legendre_core import QuadratureRule, basis_matrix, gauss_rule

__all__ = [
    "CoefficientMatrix",
    "PartialSumResult",
    "default_quad_order",
    "coefficients",
    "partial_sum",
    "partial_sum_grid",
    "partial_sum_kernel",
    "sup_error",
    "interior_lattice",
]

Function2D = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CoefficientMatrix:
    values: np.ndarray
    quad_order: int

    def __post_init__(self):
        if self.values.ndim != 2:
            raise ValueError("coefficient array must be 2-D")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("coefficients must be finite")
        self.values.setflags(write=False)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def M(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class PartialSumResult:
    N: int
    M: int
    x: float
    y: float
    value: float


def default_quad_order(N: int, M: int, kinked: bool = False) -> int:
    """Quadrature order policy: ``4*max(N,M)`` for functions with kinks,
    ``max(N,M) + 32`` otherwise."""
    n = max(N, M)
    return 4 * n if kinked else n + 32


def _sample(f: Function2D, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    S, T = np.meshgrid(s, t, indexing="ij")
    vals = np.asarray(f(S, T), dtype=float)
    if vals.shape != S.shape:
        vals = np.broadcast_to(vals, S.shape).astype(float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("function returned non-finite samples")
    return vals


def coefficients(f: Function2D, N: int, M: int, rule: QuadratureRule | None = None) -> CoefficientMatrix:
    """Fourier-Legendre coefficients ``fhat(n, m)`` for ``n < N``, ``m < M``.

    Uses a tensor Gauss rule and a two-pass contraction: first over the
    y-nodes, then over the x-nodes.

    Parameters
    ----------
    f : callable
        Vectorised ``f(x, y)`` accepting arrays of equal shape.
    N, M : int
        Number of x- and y-modes.
    rule : QuadratureRule, optional
        Defaults to ``gauss_rule(max(N, M) + 32)``.
    """
    if N < 1 or M < 1:
        raise ValueError(f"N and M must be >= 1, got N={N}, M={M}")
    if rule is None:
        rule = gauss_rule(default_quad_order(N, M))
    if rule.order < max(N, M):
        warnings.warn(
            f"quadrature order {rule.order} < max(N, M) = {max(N, M)}; coefficients will be aliased",
            RuntimeWarning,
            stacklevel=2,
        )
    nodes, w = rule.nodes, rule.weights
    F = _sample(f, nodes, nodes)
    Px = basis_matrix(N - 1, nodes) * w  # (N, q)
    Py = basis_matrix(M - 1, nodes) * w  # (M, q)
    inner = F @ Py.T  # (q, M)
    return CoefficientMatrix(values=Px @ inner, quad_order=rule.order)


def _check_orders(coeffs: CoefficientMatrix, N: int, M: int) -> None:
    if N < 1 or M < 1:
        raise ValueError(f"truncation orders must be >= 1, got ({N}, {M})")
    if N > coeffs.N or M > coeffs.M:
        raise IndexError(f"truncation ({N}, {M}) exceeds stored modes ({coeffs.N}, {coeffs.M})")


def partial_sum(coeffs: CoefficientMatrix, N: int, M: int, x: float, y: float) -> PartialSumResult:
    """Rectangular partial sum at one point, summed n-major in ascending order."""
    _check_orders(coeffs, N, M)
    if not (-1.0 <= x <= 1.0 and -1.0 <= y <= 1.0):
        raise ValueError("(x, y) must lie in [-1, 1]^2")
    px = basis_matrix(N - 1, x)
    py = basis_matrix(M - 1, y)
    C = coeffs.values
    total = 0.0
    for n in range(N):
        row = 0.0
        for m in range(M):
            row += C[n, m] * py[m]
        total += row * px[n]
    return PartialSumResult(N=N, M=M, x=float(x), y=float(y), value=float(total))


def partial_sum_grid(coeffs: CoefficientMatrix, N: int, M: int, xs, ys) -> np.ndarray:
    """Partial sum on the tensor grid ``xs x ys``; result has shape (len(xs), len(ys))."""
    _check_orders(coeffs, N, M)
    Px = basis_matrix(N - 1, np.asarray(xs, float))
    Py = basis_matrix(M - 1, np.asarray(ys, float))
    return Px.T @ coeffs.values[:N, :M] @ Py


def partial_sum_kernel(
    f: Function2D, N: int, M: int, x: float, y: float, rule: QuadratureRule | None = None
) -> PartialSumResult:
    """Partial sum as the double integral of ``f(s,t) K_N(x,s) K_M(y,t)``."""
    if N < 1 or M < 1:
        raise ValueError(f"N and M must be >= 1, got N={N}, M={M}")
    if rule is None:
        rule = gauss_rule(default_quad_order(N, M))
    if rule.order < max(N, M):
        raise ValueError(f"rule order {rule.order} < max(N, M) = {max(N, M)}")
    nodes, w = rule.nodes, rule.weights
    F = _sample(f, nodes, nodes)
    # direct-sum kernels: nodes may coincide with x or y
    kx = basis_matrix(N - 1, x) @ basis_matrix(N - 1, nodes)
    ky = basis_matrix(M - 1, y) @ basis_matrix(M - 1, nodes)
    value = (w * kx) @ F @ (w * ky)
    return PartialSumResult(N=N, M=M, x=float(x), y=float(y), value=float(value))


def interior_lattice(eps: float, grid_points: int) -> np.ndarray:
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if grid_points < 2:
        raise ValueError(f"grid_points must be >= 2, got {grid_points}")
    return np.linspace(-1.0 + eps, 1.0 - eps, grid_points)


def sup_error(
    f: Function2D, coeffs: CoefficientMatrix, N: int, M: int, eps: float, grid_points: int = 41
) -> float:
    """Max of ``|S_{N,M} f - f|`` over a uniform lattice on ``[-1+eps, 1-eps]^2``.

    A lattice maximum, so it lower-bounds the true sup-norm error.
    """
    g = interior_lattice(eps, grid_points)
    approx = partial_sum_grid(coeffs, N, M, g, g)
    exact = _sample(f, g, g)
    return float(np.max(np.abs(approx - exact)))
