"""Run configuration, config-file parsing and CSV/JSON serialisation."""

from __future__ import annotations

import configparser
import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .harness import ESTIMATES, ConvergenceRow, ConvergenceTable

__all__ = [
    "ConfigError",
    "RunConfig",
    "EXPERIMENTS",
    "parse_params",
    "parse_int_list",
    "load_config",
    "parse_config_text",
    "write_convergence_csv",
    "read_convergence_csv",
    "convergence_csv_text",
    "dump_json",
]

EXPERIMENTS = ("converge", "variation", "verify-kernels")
CSV_HEADER = ("N", "M", "eps", "grid_points", "sup_error", "wall_ms")


class ConfigError(ValueError):
    """Invalid user input. ``key`` names the offending flag or config key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _scalar(text: str):
    text = text.strip()
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def parse_params(text: str | None, key: str = "params") -> dict:
    """``"c=3, levels=8"`` -> ``{"c": 3, "levels": 8}``."""
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(key, f"expected name=value, got {item!r}")
        name, value = item.split("=", 1)
        out[name.strip()] = _scalar(value)
    return out


def parse_int_list(text, key: str) -> list[int]:
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [s for s in str(text).replace(" ", ",").split(",") if s]
    try:
        values = [int(v) for v in items]
    except ValueError:
        raise ConfigError(key, f"expected a list of integers, got {text!r}") from None
    return values


@dataclass
class RunConfig:
    experiments: list[str] = field(default_factory=list)
    fn: str = "constant"
    params: dict = field(default_factory=dict)
    sizes: list[int] = field(default_factory=lambda: [4, 8, 16, 32, 64])
    quad_order: int | str = "auto"
    eps: float = 0.25
    grid_points: int = 41
    lambda_generator: str = "harmonic"
    lambda_delta: float = 1.0
    method: str = "greedy_peel"
    n_max: int | None = None
    delta1: float = 0.25
    delta2: float = 0.25
    n_list: list[int] = field(default_factory=lambda: [8, 16, 32, 64, 128])
    samples: int = 200
    estimates: list[str] = field(default_factory=lambda: list(ESTIMATES))
    seed: int = 0
    out: str = "run"
    timing: bool = False

    def validate(self) -> "RunConfig":
        from .harness import CORPUS
        from .variation import _GENERATORS

        for e in self.experiments:
            if e not in EXPERIMENTS:
                raise ConfigError("experiments", f"unknown experiment {e!r}; expected {EXPERIMENTS}")
        if self.fn not in CORPUS:
            raise ConfigError("fn", f"unknown function {self.fn!r}; available {sorted(CORPUS)}")
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise ConfigError("sizes", f"sizes must be positive integers, got {self.sizes}")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ConfigError("sizes", f"sizes must be strictly increasing, got {self.sizes}")
        if self.quad_order != "auto":
            if not isinstance(self.quad_order, int) or self.quad_order < 1:
                raise ConfigError("quad_order", f"must be 'auto' or a positive integer, got {self.quad_order!r}")
            if self.quad_order < max(self.sizes):
                raise ConfigError("quad_order", f"{self.quad_order} is below the largest size {max(self.sizes)}")
        if not 0 < self.eps < 1:
            raise ConfigError("eps", f"must lie in (0, 1), got {self.eps}")
        if self.grid_points < 2:
            raise ConfigError("grid_points", f"must be >= 2, got {self.grid_points}")
        if self.lambda_generator not in _GENERATORS or self.lambda_generator == "table":
            raise ConfigError("lambda_generator", f"unknown generator {self.lambda_generator!r}")
        if self.lambda_delta <= 0:
            raise ConfigError("lambda_delta", f"must be positive, got {self.lambda_delta}")
        if self.method not in ("exhaustive", "greedy_peel"):
            raise ConfigError("method", f"must be 'exhaustive' or 'greedy_peel', got {self.method!r}")
        if self.n_max is not None and self.n_max < 1:
            raise ConfigError("n_max", f"must be >= 1, got {self.n_max}")
        if self.delta1 <= 0:
            raise ConfigError("delta1", f"must be positive, got {self.delta1}")
        if self.delta2 <= 0:
            raise ConfigError("delta2", f"must be positive, got {self.delta2}")
        if not self.n_list or any(n < 0 for n in self.n_list):
            raise ConfigError("n_list", f"must be non-negative integers, got {self.n_list}")
        if self.samples < 10:
            raise ConfigError("samples", f"must be >= 10, got {self.samples}")
        for e in self.estimates:
            if e not in ESTIMATES:
                raise ConfigError("estimates", f"unknown estimate {e!r}; expected {ESTIMATES}")
        if self.seed < 0:
            raise ConfigError("seed", f"must be >= 0, got {self.seed}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


def _bool(text: str, key: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {text!r}")


def _num(conv, text: str, key: str):
    try:
        return conv(text)
    except ValueError:
        raise ConfigError(key, f"expected {conv.__name__}, got {text!r}") from None


def _list(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


_PARSERS = {
    "experiments": lambda v, k: _list(v),
    "fn": lambda v, k: v.strip(),
    "params": parse_params,
    "sizes": parse_int_list,
    "quad_order": lambda v, k: "auto" if v.strip() == "auto" else _num(int, v, k),
    "eps": lambda v, k: _num(float, v, k),
    "grid_points": lambda v, k: _num(int, v, k),
    "lambda_generator": lambda v, k: v.strip(),
    "lambda_delta": lambda v, k: _num(float, v, k),
    "method": lambda v, k: v.strip(),
    "n_max": lambda v, k: None if v.strip() in ("", "none") else _num(int, v, k),
    "delta1": lambda v, k: _num(float, v, k),
    "delta2": lambda v, k: _num(float, v, k),
    "n_list": parse_int_list,
    "samples": lambda v, k: _num(int, v, k),
    "estimates": lambda v, k: _list(v),
    "seed": lambda v, k: _num(int, v, k),
    "out": lambda v, k: v.strip(),
    "timing": _bool,
}


def parse_config_text(text: str) -> RunConfig:
    """Parse flat ``key = value`` lines (``#`` comments) into a RunConfig.

    Unknown keys raise :class:`ConfigError` naming the key.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError("config", str(exc).splitlines()[0]) from None
    if parser.sections() != ["run"]:
        raise ConfigError("config", "sections are not allowed; use flat key = value lines")
    kwargs = {}
    for key, value in parser["run"].items():
        if key not in _PARSERS:
            raise ConfigError(key, "unknown config key")
        kwargs[key] = _PARSERS[key](value, key)
    return RunConfig(**kwargs).validate()


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)


# --------------------------------------------------------------------------
# CSV / JSON
# --------------------------------------------------------------------------


def convergence_csv_text(table: ConvergenceTable, include_timing: bool = False) -> str:
    """Header ``N,M,eps,grid_points,sup_error,wall_ms``; floats in shortest
    round-trip form. ``wall_ms`` is left empty unless timing is requested,
    which keeps repeated runs byte-identical."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in table.rows:
        wall = repr(float(r.wall_ms)) if include_timing and r.wall_ms is not None else ""
        w.writerow([r.N, r.M, repr(float(r.eps)), r.grid_points, repr(float(r.sup_error)), wall])
    return buf.getvalue()


def write_convergence_csv(path, table: ConvergenceTable, include_timing: bool = False) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(convergence_csv_text(table, include_timing))


def read_convergence_csv(path) -> list[ConvergenceRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = []
        for rec in reader:
            N, M, eps, grid, err, wall = rec
            rows.append(
                ConvergenceRow(int(N), int(M), float(eps), int(grid), float(err), float(wall) if wall else None)
            )
    return rows


def dump_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
