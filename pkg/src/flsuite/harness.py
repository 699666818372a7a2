"""Test-function corpus, kernel-estimate verification and convergence runs."""

from __future__ import annotations

import json
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from . import __version__
from .legendre_core import basis_matrix, gauss_rule, kernel_values
from .spectral import coefficients, default_quad_order, sup_error

__all__ = [
    "TestFunction",
    "ConvergenceRow",
    "ConvergenceTable",
    "KernelEstimateReport",
    "ESTIMATES",
    "CORPUS",
    "corpus",
    "worker_count",
    "run_convergence",
    "verify_kernel_estimates",
    "estimate_ratios",
    "run_experiment",
    "RunArtifacts",
]


def worker_count() -> int:
    """Thread cap from ``FLSUITE_THREADS`` (0 or unset means automatic)."""
    raw = os.environ.get("FLSUITE_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"FLSUITE_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("FLSUITE_THREADS must be >= 0")
    return n if n > 0 else min(8, os.cpu_count() or 1)


# --------------------------------------------------------------------------
# corpus
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """A corpus function with class tags justified by construction."""

    __test__ = False  # not a pytest class

    name: str
    params: dict
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    declared_classes: dict[str, str]
    kinked: bool = False

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return np.broadcast_to(np.asarray(self.evaluator(x, y), dtype=float), x.shape)


def _constant(c: float = 1.0) -> TestFunction:
    c = float(c)
    return TestFunction(
        "constant",
        {"c": c},
        lambda x, y: np.full(np.shape(x), c),
        {"BV": "all increments vanish"},
    )


def _polynomial(coeffs=((0.0, 0.0), (0.0, 1.0))) -> TestFunction:
    C = np.atleast_2d(np.asarray(coeffs, dtype=float))

    def ev(x, y):
        return np.polynomial.polynomial.polyval2d(x, y, C)

    return TestFunction(
        "polynomial",
        {"coeffs": C.tolist()},
        ev,
        {
            "BV": "smooth on the closed square, so all variations are finite",
            "PBV": "implied by BV",
            "HBV": "implied by BV",
        },
    )


def _xy() -> TestFunction:
    t = _polynomial(((0.0, 0.0), (0.0, 1.0)))
    return TestFunction("xy", {}, t.evaluator, t.declared_classes)


def _abs_sum() -> TestFunction:
    return TestFunction(
        "abs_sum",
        {},
        lambda x, y: np.abs(x) + np.abs(y),
        {
            "BV": "monotone in each variable on each quadrant; mixed differences vanish",
            "PBV": "each line has variation 2",
            "HBV": "implied by BV",
        },
        kinked=True,
    )


def _smooth_osc(a: float = 0.1) -> TestFunction:
    a = float(a)
    if a <= 0:
        raise ValueError("smooth_osc needs a > 0")

    def ev(x, y):
        return x * y * np.sin(1.0 / (x * x + y * y + a))

    return TestFunction(
        "smooth_osc",
        {"a": a},
        ev,
        {
            "BV": "C-infinity on the closed square for a > 0",
            "PBV": "implied by BV",
            "HBV": "implied by BV",
        },
    )


def _sawtooth(u):
    return np.abs(u - np.round(u))


def _takagi(x, p: float, levels: int):
    u = 0.5 * (x + 1.0)
    out = np.zeros_like(u)
    for k in range(levels):
        out = out + 2.0 ** (-k / p) * _sawtooth(2.0**k * u)
    return out


def _pbv_p(p: float = 2.0, levels: int = 8) -> TestFunction:
    p, levels = float(p), int(levels)
    if p < 1 or levels < 1:
        raise ValueError("pbv_p needs p >= 1 and levels >= 1")

    def ev(x, y):
        return _takagi(x, p, levels) + _takagi(y, p, levels)

    return TestFunction(
        "pbv_p",
        {"p": p, "levels": levels},
        ev,
        {
            "PBV_p": "separable sum of lacunary sawtooth series with amplitudes 2^(-k/p); "
            "level-k pieces contribute bounded p-th power variation",
            "HBV": "finite partial sum is piecewise linear, hence BV",
        },
        kinked=True,
    )


def _abs_power(alpha: float = 0.5) -> TestFunction:
    alpha = float(alpha)
    if not 0 < alpha <= 1:
        raise ValueError("abs_power needs 0 < alpha <= 1")

    def ev(x, y):
        return np.abs(x * y) ** alpha

    return TestFunction(
        "abs_power",
        {"alpha": alpha},
        ev,
        {
            f"modulus O(k^{alpha:g})": "Hoelder-alpha kink along the axes bounds n increments by n^(1-alpha) growth",
            "HBV": "monotone in each variable on each quadrant",
        },
        kinked=True,
    )


CORPUS: dict[str, Callable[..., TestFunction]] = {
    "constant": _constant,
    "polynomial": _polynomial,
    "xy": _xy,
    "abs_sum": _abs_sum,
    "smooth_osc": _smooth_osc,
    "pbv_p": _pbv_p,
    "abs_power": _abs_power,
}


def corpus(name: str, **params) -> TestFunction:
    """Look up a corpus function by name.

    >>> corpus("constant", c=3)(0.2, -0.7)
    array(3.)
    """
    try:
        factory = CORPUS[name]
    except KeyError:
        raise KeyError(f"unknown corpus function {name!r}; available: {sorted(CORPUS)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {name!r}: {exc}") from None


# --------------------------------------------------------------------------
# convergence
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    M: int
    eps: float
    grid_points: int
    sup_error: float
    wall_ms: float | None = None


@dataclass
class ConvergenceTable:
    function: str
    eps: float
    rows: list[ConvergenceRow] = field(default_factory=list)
    quad_order: int | None = None

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.sup_error for r in self.rows])


def _quad_order(policy, N: int, kinked: bool) -> int:
    if policy in (None, "auto"):
        return default_quad_order(N, N, kinked)
    q = int(policy)
    if q < N:
        raise ValueError(f"quadrature order {q} is below the largest size {N}")
    return q


def run_convergence(
    f: TestFunction,
    eps: float,
    sizes: Sequence[int],
    grid_points: int = 41,
    quad_order_policy="auto",
) -> ConvergenceTable:
    """Sup-norm errors of the square partial sums ``S_{n,n} f`` on
    ``[-1+eps, 1-eps]^2`` for each ``n`` in ``sizes``.

    Coefficients are computed once at the largest size.
    """
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise ValueError("sizes must be non-empty")
    if any(s < 1 for s in sizes):
        raise ValueError("sizes must be positive")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    top = sizes[-1]
    q = _quad_order(quad_order_policy, top, f.kinked)
    C = coefficients(f, top, top, gauss_rule(q))
    table = ConvergenceTable(function=f.name, eps=float(eps), quad_order=q)
    for n in sizes:
        t0 = time.perf_counter()
        err = sup_error(f, C, n, n, eps, grid_points)
        ms = (time.perf_counter() - t0) * 1e3
        table.rows.append(ConvergenceRow(n, n, float(eps), int(grid_points), err, ms))
    return table


# --------------------------------------------------------------------------
# kernel estimates
# --------------------------------------------------------------------------

ESTIMATES = ("p1", "Kn", "Kn_lower", "Kn_upper", "Kn_left_window", "Kn_right_window")


@dataclass
class KernelEstimateReport:
    """Empirical constants ``c_emp(n)``: max over samples of LHS / RHS,
    with the unknown absolute constant removed from the RHS."""

    estimate: str
    c_emp: dict[int, float]
    samples: int
    eps: float
    seed: int
    description: str

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "c_emp": {str(n): v for n, v in self.c_emp.items()},
            "samples": self.samples,
            "eps": self.eps,
            "seed": self.seed,
            "description": self.description,
        }


_DESCRIPTIONS = {
    "p1": "|p_n(x)| (1-x^2)^(1/4), x in [-1+eps, 1-eps]",
    "Kn": "|K_n(x,t)| |x-t| (1-x^2)^(1/4) (1-t^2)^(1/4), x,t in [-1+eps, 1-eps]",
    "Kn_lower": "|int_{-1}^{s} K_n(x,t) dt| n (x-s) (1-x^2)^(1/4), x in [-1+eps, 1-eps], -1 <= s < x",
    "Kn_upper": "|int_{s}^{1} K_n(x,t) dt| n (s-x) (1-x^2)^(1/4), x in [-1+eps, 1-eps], x < s <= 1",
    "Kn_left_window": "int_{x-(1+x)/n}^{x} |K_n(x,t)| dt (1-x^2)^(1/2) / (1+x), x in [-1+eps, 1-eps]",
    "Kn_right_window": "int_{x}^{x+(1-x)/n} |K_n(x,t)| dt (1-x^2)^(1/2) / (1-x), x in [-1+eps, 1-eps]",
}


def _sample_unit(samples: int, seed: int) -> np.ndarray:
    """Deterministic scrambled Halton points in [0, 1)^2."""
    return qmc.Halton(d=2, scramble=True, seed=seed).random(samples)


def _tail_integrals(n: int, x: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    rule = gauss_rule(max(n, 1))
    half = 0.5 * (b - a)
    t = a[:, None] + half[:, None] * (rule.nodes + 1.0)  # (S, q)
    w = half[:, None] * rule.weights
    K = np.einsum("ks,ksq->sq", basis_matrix(n - 1, x), basis_matrix(n - 1, t))
    return np.sum(w * K, axis=1)


def _window_abs_integral(n: int, x: float, a: float, b: float, panels: int, order: int = 8) -> float:
    rule = gauss_rule(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    t = edges[:-1, None] + half[:, None] * (rule.nodes + 1.0)
    w = half[:, None] * rule.weights
    K = basis_matrix(n - 1, x) @ basis_matrix(n - 1, t.ravel()).reshape(n, -1)
    return float(np.sum(w.ravel() * np.abs(K)))


def estimate_ratios(estimate: str, n: int, u: np.ndarray, eps: float) -> np.ndarray:
    """Per-sample ratios LHS / (RHS without the constant) for one estimate.

    ``u`` holds points of [0, 1)^2 that are mapped into the estimate's domain.
    """
    lo, hi = -1.0 + eps, 1.0 - eps
    x = lo + (hi - lo) * u[:, 0]
    wx = (1.0 - x * x) ** 0.25
    if estimate == "p1":
        return np.abs(basis_matrix(n, x)[n]) * wx
    if n < 1:
        raise ValueError(f"estimate {estimate} needs n >= 1")
    if estimate == "Kn":
        t = lo + (hi - lo) * u[:, 1]
        return np.abs(kernel_values(n, x, t)) * np.abs(x - t) * wx * (1.0 - t * t) ** 0.25
    if estimate == "Kn_lower":
        s = -1.0 + u[:, 1] * (x + 1.0)
        val = _tail_integrals(n, x, np.full_like(x, -1.0), s)
        return np.abs(val) * n * (x - s) * wx
    if estimate == "Kn_upper":
        s = 1.0 - u[:, 1] * (1.0 - x)
        val = _tail_integrals(n, x, s, np.ones_like(x))
        return np.abs(val) * n * (s - x) * wx
    panels = 4 * n
    if estimate == "Kn_left_window":
        lhs = np.array([_window_abs_integral(n, xi, xi - (1.0 + xi) / n, xi, panels) for xi in x])
        return lhs * np.sqrt(1.0 - x * x) / (1.0 + x)
    if estimate == "Kn_right_window":
        lhs = np.array([_window_abs_integral(n, xi, xi, xi + (1.0 - xi) / n, panels) for xi in x])
        return lhs * np.sqrt(1.0 - x * x) / (1.0 - x)
    raise ValueError(f"unknown estimate {estimate!r}; expected one of {ESTIMATES}")


def verify_kernel_estimates(
    n_list: Sequence[int],
    samples: int = 200,
    eps: float = 0.1,
    seed: int = 0,
    estimates: Sequence[str] = ESTIMATES,
) -> list[KernelEstimateReport]:
    """Empirical constants for the kernel and polynomial bounds.

    Sample points are a scrambled Halton sequence seeded by ``seed``; x is
    kept in ``[-1+eps, 1-eps]``.
    """
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ValueError("n_list must be non-empty")
    if samples < 10:
        raise ValueError(f"samples must be >= 10, got {samples}")
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    for e in estimates:
        if e not in ESTIMATES:
            raise ValueError(f"unknown estimate {e!r}; expected one of {ESTIMATES}")
    u = _sample_unit(samples, seed)

    def one(est: str) -> KernelEstimateReport:
        c = {n: float(np.max(estimate_ratios(est, n, u, eps))) for n in n_list}
        return KernelEstimateReport(est, c, samples, float(eps), int(seed), _DESCRIPTIONS[est])

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(one, estimates))


# --------------------------------------------------------------------------
# batch runs
# --------------------------------------------------------------------------


@dataclass
class RunArtifacts:
    directory: Path
    manifest: dict
    files: list[Path]


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run_experiment(config) -> RunArtifacts:
    """Execute the experiments named in ``config`` and persist them.

    ``config`` is a :class:`flsuite.io.RunConfig`. Writes ``manifest.json``
    plus one CSV per convergence table and one JSON per kernel or
    variation report into ``config.out``.
    """
    from .io import write_convergence_csv
    from .variation import GridFunction2D, LambdaWeights, variation_report

    out = Path(config.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create run directory {out}: {exc}") from exc
    files: list[Path] = []
    timings: dict[str, float] = {}

    def write(path: Path, fn) -> None:
        try:
            fn(path)
        except OSError as exc:
            raise OSError(f"failed writing {path}: {exc}") from exc
        files.append(path)

    for exp in config.experiments:
        t0 = time.perf_counter()
        if exp == "converge":
            f = corpus(config.fn, **config.params)
            table = run_convergence(f, config.eps, config.sizes, config.grid_points, config.quad_order)
            write(
                out / f"converge_{f.name}.csv",
                lambda p: write_convergence_csv(p, table, include_timing=config.timing),
            )
        elif exp == "variation":
            f = corpus(config.fn, **config.params)
            g = GridFunction2D.uniform(f, config.grid_points)
            lam = LambdaWeights(config.lambda_generator, delta=config.lambda_delta)
            rep = variation_report(g, lam, config.method, config.n_max, config.delta1, config.delta2)
            d = rep.to_dict()
            d["function"] = f.name
            d["grid_points"] = config.grid_points
            write(out / f"variation_{f.name}.json", lambda p: _dump_json(p, d))
        elif exp == "verify-kernels":
            reps = verify_kernel_estimates(config.n_list, config.samples, config.eps, config.seed, config.estimates)
            for r in reps:
                write(out / f"kernel_{r.estimate}.json", lambda p, r=r: _dump_json(p, r.to_dict()))
        else:
            raise ValueError(f"unknown experiment {exp!r}")
        timings[exp] = (time.perf_counter() - t0) * 1e3

    manifest = {
        "tool": "flsuite",
        "version": __version__,
        "seed": config.seed,
        "config": config.to_dict(),
        "experiments": list(config.experiments),
        "artifacts": sorted(p.name for p in files),
        "versions": {"python": platform.python_version(), "numpy": np.__version__},
    }
    if config.timing:
        manifest["wall_ms"] = timings
    write(out / "manifest.json", lambda p: _dump_json(p, manifest))
    files.pop()  # the manifest is not an artifact
    return RunArtifacts(out, manifest, files)
