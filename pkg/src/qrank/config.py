"""Run configuration: flat ``key = value`` files plus command-line overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, ValidationError

SOLVERS = ("integrate", "kernel", "both")
FORMATS = ("csv", "json")
MODES = ("unitary", "dissipative")


def _floats(value) -> list[float]:
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, str):
        return [float(x) for x in value.replace(",", " ").split()]
    return [float(x) for x in value]


@dataclass
class RunConfig:
    """Parameters shared by all commands; ``None`` means "command default"."""

    alpha: float = 0.85
    epsilon: list[float] | None = None
    hamiltonian: str = "symmetrized"
    solver: str = "integrate"
    dt: float = 0.01
    tol: float | None = None
    t_max: float = 1000.0
    max_iter: int = 10000
    seed: int = 0
    output_dir: str = "out"
    format: str = "csv"
    snapshot_time: float = 0.0
    snapshot_every: int = 100
    # lattice experiments
    sites: int = 41
    beta: list[float] = field(default_factory=lambda: [0.0])
    coupling: list[float] = field(default_factory=lambda: [1.0])
    boundary: str = "open"
    z: float = 1.0
    input_site: int | None = None
    site_a: int = 0
    site_b: int = 1
    times: list[float] = field(default_factory=lambda: [2.0, 3.0, 4.0, 5.0, 6.0])
    mode: str = "unitary"
    # fixtures
    count: int = 25
    min_nodes: int = 2
    max_nodes: int = 8
    edge_prob: float = 0.3

    def validate(self) -> "RunConfig":
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {self.alpha}")
        for e in self.epsilon or []:
            if not 0.0 <= e <= 1.0:
                raise ValidationError(f"epsilon must lie in [0, 1], got {e}")
        if self.solver not in SOLVERS:
            raise ValidationError(f"solver must be one of {SOLVERS}")
        if self.format not in FORMATS:
            raise ValidationError(f"format must be one of {FORMATS}")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        h = self.hamiltonian
        if h not in ("symmetrized", "lattice") and not (h.startswith("custom:") and len(h) > 7):
            raise ValidationError("hamiltonian must be symmetrized, lattice or custom:<file>")
        if self.dt <= 0:
            raise ValidationError("dt must be positive")
        if self.tol is not None and self.tol <= 0:
            raise ValidationError("tol must be positive")
        if self.t_max < 0 or self.snapshot_time < 0:
            raise ValidationError("t_max and snapshot_time must be non-negative")
        if self.max_iter < 1 or self.snapshot_every < 1:
            raise ValidationError("max_iter and snapshot_every must be at least 1")
        if self.sites < 1:
            raise ValidationError("sites must be at least 1")
        if not 1 <= self.min_nodes <= self.max_nodes:
            raise ValidationError("need 1 <= min_nodes <= max_nodes")
        if self.count < 0 or not 0.0 <= self.edge_prob <= 1.0:
            raise ValidationError("count must be >= 0 and edge_prob in [0, 1]")
        return self

    def as_header(self, keys=None) -> dict:
        """Effective settings embedded in output files.

        The output location is left out so that runs into different
        directories stay byte-identical.
        """
        d = dataclasses.asdict(self)
        d.pop("output_dir")
        if keys is not None:
            d = {k: d[k] for k in keys}
        return d

    def updated(self, **overrides) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(self)}
        clean = {}
        for k, v in overrides.items():
            if v is None:
                continue
            if k not in known:
                raise ValidationError(f"unknown config key {k!r}")
            clean[k] = coerce(k, v)
        return dataclasses.replace(self, **clean)


_LIST_KEYS = {"epsilon", "beta", "coupling", "times"}
_INT_KEYS = {"max_iter", "seed", "snapshot_every", "sites", "input_site", "site_a", "site_b",
             "count", "min_nodes", "max_nodes"}
_FLOAT_KEYS = {"alpha", "dt", "tol", "t_max", "snapshot_time", "z", "edge_prob"}


def coerce(key: str, value):
    try:
        if key in _LIST_KEYS:
            return _floats(value)
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"bad value for {key}: {value!r}") from None
    return str(value)


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        out["output_dir" if key == "out" else key] = value
    return out


def load_config(path: str | Path | None, **overrides) -> RunConfig:
    """Defaults, then the config file, then command-line overrides."""
    cfg = RunConfig()
    if path is not None:
        cfg = cfg.updated(**parse_config_text(Path(path).read_text()))
    return cfg.updated(**overrides).validate()
