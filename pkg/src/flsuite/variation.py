"""Generalised bounded-variation functionals for grid-sampled functions.

Every functional here is evaluated for the *grid-restricted* function:
interval endpoints are taken from the sampling grid only, so each value is
a lower bound for the corresponding supremum over all of [-1, 1]^2.

Intervals are non-overlapping when their open interiors are disjoint;
neighbouring intervals may share an endpoint.

Axis 1 means increments in x along lines of fixed y (``values[:, j]``);
axis 2 means increments in y along lines of fixed x (``values[i, :]``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "GridFunction2D",
    "LambdaWeights",
    "IntervalSet",
    "FlaggedValue",
    "VariationReport",
    "SeriesReport",
    "EXHAUSTIVE_LINE_CAP",
    "EXHAUSTIVE_MIXED_CAP",
    "power",
    "rect_increment",
    "modulus_line",
    "modulus_line_linear",
    "modulus_of_variation",
    "lambda_variation_line",
    "partial_lambda_variation",
    "mixed_lambda_variation",
    "best_assignment",
    "alternating_assignment",
    "phi_variation",
    "phi_variation_profile",
    "moduli_of_continuity",
    "shifted_tail_variation",
    "series_conditions",
    "variation_report",
]

EXHAUSTIVE_LINE_CAP = 12
EXHAUSTIVE_MIXED_CAP = 9

GRID_RESTRICTED = "grid-restricted"


# --------------------------------------------------------------------------
# data types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GridFunction2D:
    """A function sampled on the tensor grid ``xs x ys``.

    ``values[i, j] = f(xs[i], ys[j])``.
    """

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        for name, g in (("xs", xs), ("ys", ys)):
            if g.ndim != 1 or g.size < 1:
                raise ValueError(f"{name} must be a non-empty 1-D grid")
            if np.any(np.diff(g) <= 0):
                raise ValueError(f"{name} must be strictly increasing")
            if g[0] < -1.0 or g[-1] > 1.0:
                raise ValueError(f"{name} must lie inside [-1, 1]")
        if vals.shape != (xs.size, ys.size):
            raise ValueError(f"values shape {vals.shape} does not match grid ({xs.size}, {ys.size})")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid values must be finite")
        for arr in (xs, ys, vals):
            arr.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, f: Callable, xs, ys=None) -> "GridFunction2D":
        xs = np.asarray(xs, dtype=float)
        ys = xs if ys is None else np.asarray(ys, dtype=float)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        vals = np.broadcast_to(np.asarray(f(X, Y), dtype=float), X.shape)
        return cls(xs, ys, np.array(vals))

    @classmethod
    def uniform(cls, f: Callable, points: int) -> "GridFunction2D":
        return cls.from_function(f, np.linspace(-1.0, 1.0, points))

    def lines(self, axis: int) -> np.ndarray:
        """Rows are the sampled lines along ``axis``."""
        if axis == 1:
            return self.values.T
        if axis == 2:
            return self.values
        raise ValueError(f"axis must be 1 or 2, got {axis!r}")

    def transpose(self) -> "GridFunction2D":
        return GridFunction2D(self.ys, self.xs, self.values.T)


_GENERATORS = ("harmonic", "constant", "power_log", "table")


@dataclass(frozen=True)
class LambdaWeights:
    """Weight sequence ``lambda_1, lambda_2, ...`` with an optional shift.

    With ``offset = n`` the sequence used is ``lambda_{n+1}, lambda_{n+2}, ...``.

    Generators: ``harmonic`` (k), ``constant`` (1), ``power_log``
    (k / log(k+1)^(1+delta)) and ``table`` (explicit values).
    """

    generator: str = "harmonic"
    delta: float = 1.0
    table: tuple[float, ...] | None = None
    offset: int = 0

    def __post_init__(self):
        if self.generator not in _GENERATORS:
            raise ValueError(f"unknown lambda generator {self.generator!r}; expected one of {_GENERATORS}")
        if self.offset < 0:
            raise ValueError("offset must be >= 0")
        if self.generator == "power_log" and self.delta <= 0:
            raise ValueError("power_log needs delta > 0")
        if self.generator == "table":
            if not self.table:
                raise ValueError("table generator needs a non-empty table")
            object.__setattr__(self, "table", tuple(float(v) for v in self.table))
            if min(self.table) <= 0:
                raise ValueError("lambda values must be positive")

    def shifted(self, n: int) -> "LambdaWeights":
        return LambdaWeights(self.generator, self.delta, self.table, self.offset + n)

    def raw(self, k) -> np.ndarray:
        """Unshifted ``lambda_k`` for 1-based ``k``."""
        k = np.asarray(k, dtype=float)
        if np.any(k < 1):
            raise ValueError("lambda index starts at 1")
        if self.generator == "harmonic":
            return k.copy()
        if self.generator == "constant":
            return np.ones_like(k)
        if self.generator == "power_log":
            return k / np.log(k + 1.0) ** (1.0 + self.delta)
        idx = k.astype(int) - 1
        if np.any(idx >= len(self.table)):
            raise ValueError(f"lambda table has only {len(self.table)} entries")
        return np.asarray(self.table)[idx]

    def values(self, count: int) -> np.ndarray:
        """``lambda_{offset+1}, ..., lambda_{offset+count}``."""
        return self.raw(np.arange(self.offset + 1, self.offset + count + 1))

    def reciprocal_weights(self, count: int) -> np.ndarray:
        """``1/lambda`` for the first ``count`` terms, sorted descending.

        Intervals may be listed in any order, so the supremum pairs the
        largest increments with the smallest lambdas.
        """
        if count == 0:
            return np.zeros(0)
        return np.sort(1.0 / self.values(count))[::-1]

    def is_nondecreasing(self, horizon: int) -> bool:
        v = self.values(horizon)
        return bool(np.all(np.diff(v) >= 0))


@dataclass(frozen=True)
class IntervalSet:
    """Grid-index intervals ``(a_i, b_i)`` with disjoint open interiors, sorted."""

    intervals: tuple[tuple[int, int], ...]

    def __post_init__(self):
        ivs = tuple((int(a), int(b)) for a, b in self.intervals)
        prev = None
        for a, b in ivs:
            if a >= b:
                raise ValueError(f"interval ({a}, {b}) is empty or reversed")
            if prev is not None and a < prev:
                raise ValueError("intervals must be sorted with disjoint interiors")
            prev = b
        object.__setattr__(self, "intervals", ivs)

    def __len__(self):
        return len(self.intervals)

    def increments(self, line: np.ndarray) -> np.ndarray:
        return np.array([abs(line[b] - line[a]) for a, b in self.intervals])


@dataclass(frozen=True)
class FlaggedValue:
    """A functional value with an exact/heuristic flag."""

    value: float
    exact: bool
    witness: tuple = ()

    @property
    def method(self) -> str:
        return "exact" if self.exact else "heuristic-lower-bound"

    def __float__(self):
        return float(self.value)


@dataclass
class VariationReport:
    lambda_v1: FlaggedValue
    lambda_v2: FlaggedValue
    lambda_v12: FlaggedValue
    v1: np.ndarray
    v2: np.ndarray
    omega1: float
    omega2: float
    omega12: float
    delta1: float
    delta2: float
    lam: LambdaWeights
    label: str = GRID_RESTRICTED
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def fv(v: FlaggedValue) -> dict:
            return {"value": float(v.value), "method": v.method}

        return {
            "label": self.label,
            "lambda": {
                "generator": self.lam.generator,
                "delta": self.lam.delta,
                "offset": self.lam.offset,
            },
            "lambda_v1": fv(self.lambda_v1),
            "lambda_v2": fv(self.lambda_v2),
            "lambda_v12": fv(self.lambda_v12),
            "v1": {"values": [float(v) for v in self.v1], "method": "exact"},
            "v2": {"values": [float(v) for v in self.v2], "method": "exact"},
            "omega": {
                "delta1": self.delta1,
                "delta2": self.delta2,
                "omega1": self.omega1,
                "omega2": self.omega2,
                "omega12": self.omega12,
                "method": "exact",
            },
            "notes": list(self.notes),
        }


# --------------------------------------------------------------------------
# increments and scoring
# --------------------------------------------------------------------------


def power(p: float) -> Callable[[np.ndarray], np.ndarray]:
    """``u -> u**p``; ``p >= 1``."""
    if p < 1:
        raise ValueError(f"power p must be >= 1, got {p}")

    def phi(u):
        return np.asarray(u, dtype=float) ** p

    phi.__name__ = f"power_{p:g}"
    return phi


def _check_phi(phi: Callable) -> None:
    probe = np.array([0.0, 1e-3, 0.5, 1.0, 2.0, 10.0])
    vals = np.asarray(phi(probe), dtype=float)
    if vals[0] != 0.0:
        raise ValueError("phi(0) must be 0")
    if np.any(np.diff(vals) <= 0):
        raise ValueError("phi must be strictly increasing")


def rect_increment(f: GridFunction2D, a: int, b: int, c: int, d: int) -> float:
    """Mixed difference ``f(a,c) - f(a,d) - f(b,c) + f(b,d)`` on grid indices."""
    gx, gy = f.values.shape
    if not (0 <= a < b < gx and 0 <= c < d < gy):
        raise IndexError(f"need 0 <= a < b < {gx} and 0 <= c < d < {gy}, got ({a}, {b}, {c}, {d})")
    v = f.values
    return float(v[a, c] - v[a, d] - v[b, c] + v[b, d])


def _pair_scores(lines: np.ndarray, phi: Callable | None) -> np.ndarray:
    """Score tensor ``S[l, a, b] = phi(|line_l[b] - line_l[a]|)`` for a < b, -inf otherwise."""
    diff = np.abs(lines[:, None, :] - lines[:, :, None])
    if phi is not None:
        diff = np.asarray(phi(diff), dtype=float)
    g = lines.shape[1]
    mask = np.triu(np.ones((g, g), dtype=bool), k=1)
    return np.where(mask, diff, -np.inf)


def _best_k_intervals(scores: np.ndarray, n_max: int) -> np.ndarray:
    """DP over positions: best total score from at most k disjoint intervals.

    ``scores`` has shape (L, G, G); returns (L, n_max) for k = 1..n_max.
    """
    L, G, _ = scores.shape
    best_prev = np.zeros((L, G))
    out = np.zeros((L, n_max))
    for k in range(1, n_max + 1):
        cand = np.max(best_prev[:, :, None] + scores, axis=1)  # end at b
        cand = np.maximum(cand, best_prev)
        best = np.maximum.accumulate(cand, axis=1)
        out[:, k - 1] = best[:, -1]
        best_prev = best
    return out


def modulus_line(values, n_max: int, phi: Callable | None = None) -> np.ndarray:
    """``v(1..n_max)`` for one sampled line: best sum of ``phi(|increment|)``
    over at most n disjoint intervals. O(G^2 n)."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    line = np.asarray(values, dtype=float)[None, :]
    if line.shape[1] < 2:
        return np.zeros(n_max)
    return _best_k_intervals(_pair_scores(line, phi), n_max)[0]


def modulus_line_linear(values, n_max: int) -> np.ndarray:
    """Same as :func:`modulus_line` with identity phi, in O(G n).

    Tracks, for each interval count, whether the walk is outside an interval
    or inside one whose increment is being counted with sign +1 or -1.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    v = np.asarray(values, dtype=float)
    neg = -np.inf
    out_ = np.full(n_max + 1, neg)
    inp = np.full(n_max + 1, neg)
    inm = np.full(n_max + 1, neg)
    out_[0] = 0.0
    for d in np.diff(v):
        start = np.full(n_max + 1, neg)
        start[1:] = np.maximum(np.maximum(out_[:-1], inp[:-1]), inm[:-1])
        new_inp = np.maximum(inp, start) + d
        new_inm = np.maximum(inm, start) - d
        out_ = np.maximum(np.maximum(out_, inp), inm)
        inp, inm = new_inp, new_inm
    best = np.maximum(np.maximum(out_, inp), inm)[1:]
    best = np.where(np.isfinite(best), best, 0.0)
    return np.maximum.accumulate(best)


def modulus_of_variation(f: GridFunction2D, axis: int, n_max: int) -> np.ndarray:
    """Partial modulus of variation ``v_axis(n, f)`` for n = 1..n_max.

    Maximum over lines of the best sum of absolute increments over n
    non-overlapping grid intervals. Counts beyond the number of grid cells
    repeat the last attainable value.
    """
    return phi_variation_profile(f, None, axis, n_max)[0]


def phi_variation_profile(
    f: GridFunction2D, phi: Callable | None, axis: int, n_max: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-n partial Phi-variation values for n = 1..n_max and their running max."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if phi is not None:
        _check_phi(phi)
    lines = f.lines(axis)
    if lines.shape[1] < 2:
        per_n = np.zeros(n_max)
    else:
        per_n = np.max(_best_k_intervals(_pair_scores(lines, phi), n_max), axis=0)
    return per_n, np.maximum.accumulate(per_n)


def phi_variation(f: GridFunction2D, phi: Callable | None, axis: int, n: int) -> float:
    """Partial Phi-variation with at most ``n`` intervals per line.

    ``phi=None`` is the identity, which reproduces the modulus of variation.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return float(phi_variation_profile(f, phi, axis, n)[0][-1])


# --------------------------------------------------------------------------
# Lambda-variation
# --------------------------------------------------------------------------


def _partitions(g: int) -> dict[int, np.ndarray]:
    """Breakpoint arrays of every partition of grid indices 0..g-1 into
    consecutive cells, grouped by number of pieces."""
    groups: dict[int, list] = {}
    interior = range(1, g - 1)
    for r in range(g - 1):
        for cut in itertools.combinations(interior, r):
            groups.setdefault(r + 1, []).append((0,) + cut + (g - 1,))
    return {k: np.array(v, dtype=int) for k, v in groups.items()}


def _weighted_sorted_sum(incs: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``sum_i sorted_desc(incs)[i] * w[i]`` along the last axis."""
    s = -np.sort(-incs, axis=-1)
    return s @ w


def _lambda_line_exhaustive(lines: np.ndarray, lam: LambdaWeights) -> tuple[np.ndarray, list]:
    # Only partitions into consecutive cells need checking: any interval
    # set extends to one by filling gaps, and an extra interval placed on
    # the smallest remaining weight never lowers the sum.
    L, g = lines.shape
    best = np.zeros(L)
    witness: list = [()] * L
    if g < 2:
        return best, witness
    for k, B in _partitions(g).items():
        w = lam.reciprocal_weights(k)
        incs = np.abs(np.diff(lines[:, B], axis=-1))  # (L, P, k)
        vals = _weighted_sorted_sum(incs, w)  # (L, P)
        idx = np.argmax(vals, axis=1)
        top = vals[np.arange(L), idx]
        for l in np.nonzero(top > best)[0]:
            best[l] = top[l]
            bp = B[idx[l]]
            witness[l] = tuple(zip(bp[:-1].tolist(), bp[1:].tolist()))
    return best, witness


def _greedy_peel_intervals(line: np.ndarray) -> list[tuple[int, int]]:
    g = line.size
    a, b = np.triu_indices(g, k=1)
    score = np.abs(line[b] - line[a])
    order = np.lexsort((b, a, -score))
    taken = np.zeros(max(g - 1, 0), dtype=bool)
    chosen = []
    for i in order:
        if score[i] <= 0:
            break
        lo, hi = a[i], b[i]
        if not taken[lo:hi].any():
            taken[lo:hi] = True
            chosen.append((int(lo), int(hi)))
    return sorted(chosen)


def _lambda_line_greedy(line: np.ndarray, lam: LambdaWeights) -> tuple[float, tuple]:
    ivs = _greedy_peel_intervals(line)
    if not ivs:
        return 0.0, ()
    incs = np.array([abs(line[hi] - line[lo]) for lo, hi in ivs])
    return float(_weighted_sorted_sum(incs, lam.reciprocal_weights(len(ivs)))), tuple(ivs)


def lambda_variation_line(values, lam: LambdaWeights, method: str = "exhaustive") -> FlaggedValue:
    """Lambda-variation of one sampled line.

    ``method="exhaustive"`` is exact for the grid-restricted line (at most
    ``EXHAUSTIVE_LINE_CAP`` points). ``method="greedy_peel"`` repeatedly
    takes the largest increment disjoint from those already taken and
    returns a lower bound.
    """
    line = np.asarray(values, dtype=float)
    if line.ndim != 1 or line.size < 2:
        raise ValueError("need a 1-D line with at least 2 samples")
    if method == "exhaustive":
        if line.size > EXHAUSTIVE_LINE_CAP:
            raise ValueError(f"exhaustive method is limited to {EXHAUSTIVE_LINE_CAP} points, got {line.size}")
        best, wit = _lambda_line_exhaustive(line[None, :], lam)
        return FlaggedValue(float(best[0]), True, wit[0])
    if method == "greedy_peel":
        value, wit = _lambda_line_greedy(line, lam)
        return FlaggedValue(value, False, wit)
    raise ValueError(f"unknown method {method!r}")


def partial_lambda_variation(f: GridFunction2D, lam: LambdaWeights, axis: int, method: str = "exhaustive") -> FlaggedValue:
    """Marginal Lambda-variation: max over lines along ``axis``."""
    lines = f.lines(axis)
    if lines.shape[1] < 2:
        return FlaggedValue(0.0, True)
    if method == "exhaustive":
        if lines.shape[1] > EXHAUSTIVE_LINE_CAP:
            raise ValueError(
                f"exhaustive method is limited to {EXHAUSTIVE_LINE_CAP} points per line, got {lines.shape[1]}"
            )
        best, wit = _lambda_line_exhaustive(lines, lam)
        i = int(np.argmax(best))
        return FlaggedValue(float(best[i]), True, (i, wit[i]))
    if method == "greedy_peel":
        results = [_lambda_line_greedy(line, lam) for line in lines]
        i = int(np.argmax([r[0] for r in results]))
        return FlaggedValue(results[i][0], False, (i, results[i][1]))
    raise ValueError(f"unknown method {method!r}")


# --------------------------------------------------------------------------
# mixed Lambda-variation
# --------------------------------------------------------------------------


def best_assignment(A: np.ndarray, wr: np.ndarray, wc: np.ndarray) -> float:
    """Exact ``max_{sigma,tau} sum_ij A[i,j] wr[sigma(i)] wc[tau(j)]``.

    Enumerates permutations of the shorter side; the other side is then
    optimal when sorted. Intended for small matrices.
    """
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    if A.shape[1] > A.shape[0]:
        A, wr, wc = A.T, wc, wr
    return float(_best_assignment_batch(A[None], wr, wc)[0])


def _best_assignment_batch(A: np.ndarray, wr: np.ndarray, wc: np.ndarray) -> np.ndarray:
    # A: (P, k, l) with l <= k
    l = A.shape[2]
    perms = np.array(list(itertools.permutations(range(l))), dtype=int)
    W = wc[perms].T  # (l, n_perm)
    R = A @ W  # (P, k, n_perm)
    R = -np.sort(-R, axis=1)
    vals = np.einsum("pkn,k->pn", R, wr)
    return vals.max(axis=1)


def alternating_assignment(A: np.ndarray, wr: np.ndarray, wc: np.ndarray, max_iter: int = 50) -> float:
    """Lower bound for :func:`best_assignment` by alternating sorts.

    Starts from columns ordered by their sums, then re-sorts rows and
    columns in turn until the value stops improving.
    """
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    k, l = A.shape
    col_w = np.empty(l)
    col_w[np.argsort(-A.sum(axis=0), kind="stable")] = wc
    row_w = np.empty(k)
    value = -np.inf
    for _ in range(max_iter):
        row_w[np.argsort(-(A @ col_w), kind="stable")] = wr
        col_w[np.argsort(-(row_w @ A), kind="stable")] = wc
        new = float(row_w @ A @ col_w)
        if new <= value:
            break
        value = new
    return value


def _mixed_matrix(values: np.ndarray, bx, by) -> np.ndarray:
    sub = values[np.ix_(bx, by)]
    return np.abs(np.diff(np.diff(sub, axis=0), axis=1))


def _mixed_exhaustive(f: GridFunction2D, lam_x: LambdaWeights, lam_y: LambdaWeights) -> tuple[float, tuple]:
    gx, gy = f.values.shape
    if gx < 2 or gy < 2:
        return 0.0, ()
    px, py = _partitions(gx), _partitions(gy)
    V = f.values
    best, wit = 0.0, ()
    for k, Bx in px.items():
        wr = lam_x.reciprocal_weights(k)
        Dx = np.diff(V[Bx], axis=1)  # (Px, k, gy)
        for l, By in py.items():
            wc = lam_y.reciprocal_weights(l)
            # A[p, q, i, j] for x-partition p, y-partition q
            A = np.abs(np.diff(Dx[:, :, By], axis=-1))  # (Px, k, Py, l)
            A = A.transpose(0, 2, 1, 3).reshape(-1, k, l)
            if l <= k:
                vals = _best_assignment_batch(A, wr, wc)
            else:
                vals = _best_assignment_batch(A.transpose(0, 2, 1), wc, wr)
            i = int(np.argmax(vals))
            if vals[i] > best:
                best = float(vals[i])
                p, q = divmod(i, len(By))
                wit = (tuple(Bx[p].tolist()), tuple(By[q].tolist()))
    return best, wit


def _fill_gaps(chosen: list[tuple[int, int]], g: int) -> np.ndarray:
    """Breakpoints of the partition refining the chosen intervals."""
    pts = {0, g - 1}
    for a, b in chosen:
        pts.update((a, b))
    return np.array(sorted(pts), dtype=int)


def _mixed_greedy(f: GridFunction2D, lam_x: LambdaWeights, lam_y: LambdaWeights) -> tuple[float, tuple]:
    V = f.values
    gx, gy = V.shape
    if gx < 2 or gy < 2:
        return 0.0, ()
    candidates = [(np.arange(gx), np.arange(gy))]
    # peel rectangles by decreasing |mixed difference|
    ax, bx = np.triu_indices(gx, k=1)
    ay, by = np.triu_indices(gy, k=1)
    dx = V[bx] - V[ax]  # (nx, gy)
    R = np.abs(dx[:, by] - dx[:, ay])  # (nx, ny)
    flat = R.ravel()
    order = np.argsort(-flat, kind="stable")
    takenx = np.zeros(gx - 1, dtype=bool)
    takeny = np.zeros(gy - 1, dtype=bool)
    cx, cy = [], []
    ny = ay.size
    for idx in order:
        if flat[idx] <= 0:
            break
        i, j = divmod(int(idx), ny)
        lo, hi, lo2, hi2 = ax[i], bx[i], ay[j], by[j]
        if takenx[lo:hi].any() or takeny[lo2:hi2].any():
            continue
        takenx[lo:hi] = True
        takeny[lo2:hi2] = True
        cx.append((int(lo), int(hi)))
        cy.append((int(lo2), int(hi2)))
        if takenx.all() or takeny.all():
            break
    if cx:
        candidates.append((_fill_gaps(cx, gx), _fill_gaps(cy, gy)))
    best, wit = 0.0, ()
    for bpx, bpy in candidates:
        A = _mixed_matrix(V, bpx, bpy)
        val = alternating_assignment(A, lam_x.reciprocal_weights(A.shape[0]), lam_y.reciprocal_weights(A.shape[1]))
        if val > best:
            best, wit = val, (tuple(bpx.tolist()), tuple(bpy.tolist()))
    return best, wit


def mixed_lambda_variation(
    f: GridFunction2D,
    lam: LambdaWeights,
    method: str = "exhaustive",
    lam_y: LambdaWeights | None = None,
) -> FlaggedValue:
    """Mixed Lambda-variation: sup over x- and y-interval collections of
    ``sum_ij |f(Delta_i, J_j)| / (lambda_i lambda_j)``.

    ``lam`` weights the x-intervals and ``lam_y`` (default ``lam``) the
    y-intervals. The exhaustive path searches every pair of grid partitions
    and every ordering exactly, so it is capped at
    ``EXHAUSTIVE_MIXED_CAP`` points per axis.
    """
    lam_y = lam if lam_y is None else lam_y
    if method == "exhaustive":
        gx, gy = f.values.shape
        if max(gx, gy) > EXHAUSTIVE_MIXED_CAP:
            raise ValueError(
                f"exhaustive mixed variation is limited to {EXHAUSTIVE_MIXED_CAP} points per axis, got {gx}x{gy}"
            )
        value, wit = _mixed_exhaustive(f, lam, lam_y)
        return FlaggedValue(value, True, wit)
    if method == "greedy_peel":
        value, wit = _mixed_greedy(f, lam, lam_y)
        return FlaggedValue(value, False, wit)
    raise ValueError(f"unknown method {method!r}")


# --------------------------------------------------------------------------
# moduli of continuity, tails, series tests
# --------------------------------------------------------------------------


def _close_pairs(grid: np.ndarray, delta: float) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.triu_indices(grid.size, k=1)
    keep = grid[b] - grid[a] <= delta * (1 + 1e-12) + 1e-15
    return a[keep], b[keep]


def moduli_of_continuity(f: GridFunction2D, delta1: float, delta2: float) -> tuple[float, float, float]:
    """Grid-restricted partial moduli ``omega_1(delta1)``, ``omega_2(delta2)``
    and the mixed modulus ``omega_12(delta1, delta2)``."""
    if delta1 <= 0 or delta2 <= 0:
        raise ValueError("delta1 and delta2 must be positive")
    V = f.values
    ax, bx = _close_pairs(f.xs, delta1)
    ay, by = _close_pairs(f.ys, delta2)
    dx = V[bx] - V[ax]  # (px, gy)
    w1 = float(np.abs(dx).max()) if ax.size else 0.0
    w2 = float(np.abs(V[:, by] - V[:, ay]).max()) if ay.size else 0.0
    w12 = float(np.abs(dx[:, by] - dx[:, ay]).max()) if ax.size and ay.size else 0.0
    return w1, w2, w12


def shifted_tail_variation(
    f: GridFunction2D, lam: LambdaWeights, axis, method: str = "exhaustive"
) -> FlaggedValue:
    """Lambda-variation with the shifted weights carried by ``lam.offset``.

    ``axis`` is 1, 2 or ``"mixed"``. For ``"mixed"`` the shift is applied to
    one side at a time and the larger of the two values is returned.
    On a fixed grid this always decays in the offset, so it is a
    diagnostic, not a class membership test.
    """
    if axis in (1, 2):
        return partial_lambda_variation(f, lam, axis, method)
    if axis == "mixed":
        base = lam.shifted(-lam.offset)
        a = mixed_lambda_variation(f, lam, method, lam_y=base)
        b = mixed_lambda_variation(f, base, method, lam_y=lam)
        return a if a.value >= b.value else b
    raise ValueError(f"axis must be 1, 2 or 'mixed', got {axis!r}")


@dataclass
class SeriesReport:
    """Partial-sum diagnostics for the class-inclusion series conditions.

    Every verdict is empirical over the summation horizon.
    """

    n_terms: int
    lambda_partial_sums: dict[int, float]
    lambda_last_decade_increase: float
    lambda_previous_decade_increase: float
    lambda_trend: str
    lambda_over_n_nonincreasing: bool
    modulus_partial_sums: dict[int, dict[int, float]] | None = None
    modulus_trend: dict[int, str] | None = None
    verdict_label: str = "empirical over horizon"

    def to_dict(self) -> dict:
        return {
            "n_terms": self.n_terms,
            "verdict_label": self.verdict_label,
            "lambda_partial_sums": {str(k): v for k, v in self.lambda_partial_sums.items()},
            "lambda_last_decade_increase": self.lambda_last_decade_increase,
            "lambda_previous_decade_increase": self.lambda_previous_decade_increase,
            "lambda_trend": self.lambda_trend,
            "lambda_over_n_nonincreasing": self.lambda_over_n_nonincreasing,
            "modulus_partial_sums": None
            if self.modulus_partial_sums is None
            else {str(j): {str(k): v for k, v in d.items()} for j, d in self.modulus_partial_sums.items()},
            "modulus_trend": None if self.modulus_trend is None else {str(j): t for j, t in self.modulus_trend.items()},
        }


# A convergent positive series must have shrinking decade increments; a
# ratio above this is read as a divergence trend.
_TREND_RATIO = 0.9


def _decades(n_terms: int) -> list[int]:
    out = [10**e for e in range(1, int(math.log10(n_terms)) + 1) if 10**e <= n_terms]
    if n_terms not in out:
        out.append(n_terms)
    return out


def _trend(partial: np.ndarray) -> tuple[float, float, str]:
    n = partial.size
    last = float(partial[-1] - partial[n // 10 - 1])
    prev = float(partial[n // 10 - 1] - partial[n // 100 - 1]) if n >= 100 else float("nan")
    if last == 0.0:
        return last, prev, "convergent"
    if not np.isfinite(prev) or prev == 0.0:
        return last, prev, "undetermined"
    return last, prev, "convergent" if last < _TREND_RATIO * prev else "divergent"


def series_conditions(lam: LambdaWeights, f: GridFunction2D | None = None, n_terms: int = 10**6) -> SeriesReport:
    """Partial sums of ``sum lambda_n / n^2`` and, when ``f`` is given, of
    ``sum sqrt(v_j(n, f)) / n^{3/2}`` for j = 1, 2.

    The trend verdict compares the increase over the last decade of terms
    (n in (n_terms/10, n_terms]) with the decade before it.
    """
    if n_terms < 10:
        raise ValueError(f"n_terms must be >= 10, got {n_terms}")
    n = np.arange(1, n_terms + 1, dtype=float)
    lam_n = lam.values(n_terms)
    partial = np.cumsum(lam_n / n**2)
    ratio = lam_n / n
    nonincreasing = bool(np.all(np.diff(ratio) <= 1e-15 * ratio[:-1]))
    checkpoints = _decades(n_terms)
    last, prev, trend = _trend(partial)
    report = SeriesReport(
        n_terms=n_terms,
        lambda_partial_sums={c: float(partial[c - 1]) for c in checkpoints},
        lambda_last_decade_increase=last,
        lambda_previous_decade_increase=prev,
        lambda_trend=trend,
        lambda_over_n_nonincreasing=nonincreasing,
    )
    if f is not None:
        sums, trends = {}, {}
        for j in (1, 2):
            cells = f.values.shape[0 if j == 1 else 1] - 1
            v = modulus_of_variation(f, j, max(cells, 1)) if cells >= 1 else np.zeros(1)
            vn = np.full(n_terms, v[-1])
            vn[: min(v.size, n_terms)] = v[:n_terms]
            ps = np.cumsum(np.sqrt(vn) / n**1.5)
            sums[j] = {c: float(ps[c - 1]) for c in checkpoints}
            trends[j] = _trend(ps)[2]
        report.modulus_partial_sums = sums
        report.modulus_trend = trends
    return report


def variation_report(
    f: GridFunction2D,
    lam: LambdaWeights,
    method: str = "exhaustive",
    n_max: int | None = None,
    delta1: float = 0.25,
    delta2: float = 0.25,
) -> VariationReport:
    """All functionals for one grid function, each carrying its method flag."""
    gx, gy = f.values.shape
    if n_max is None:
        n_max = max(gx, gy) - 1
    n_max = max(n_max, 1)
    notes = []
    if method == "exhaustive":
        notes.append("mixed supremum over orderings computed by exact permutation search")
    w = moduli_of_continuity(f, delta1, delta2)
    return VariationReport(
        lambda_v1=partial_lambda_variation(f, lam, 1, method),
        lambda_v2=partial_lambda_variation(f, lam, 2, method),
        lambda_v12=mixed_lambda_variation(f, lam, method),
        v1=modulus_of_variation(f, 1, n_max),
        v2=modulus_of_variation(f, 2, n_max),
        omega1=w[0],
        omega2=w[1],
        omega12=w[2],
        delta1=delta1,
        delta2=delta2,
        lam=lam,
        notes=notes,
    )
