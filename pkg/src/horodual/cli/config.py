"""Run configuration: a JSON file with a versioned schema field."""

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import ConfigError, GeometryError
from ..factors import factor_from_dict
from ..hypersurface import build_surface

SCHEMA = "horodual.config/1"

CHECKS = ("dual_metric", "inversion", "double_dual", "gauss_star", "codazzi",
          "curvature_relation", "conformal_gauss_map", "de_sitter", "envelope_isometry",
          "isometry_equivariance", "cone_embed")

DEFAULT_TOL = {
    "dual_metric": 1e-9, "inversion": 1e-7, "double_dual": 1e-6, "gauss_star": 1e-6,
    "codazzi": 1e-5, "curvature_relation": 1e-9, "conformal_gauss_map": 1e-6,
    "de_sitter": 1e-9, "envelope_isometry": 1e-6, "isometry_equivariance": 1e-10,
    "cone_embed": 1e-12, "roundtrip": 1e-5, "admissible": 1e-9,
}

FAMILIES = ("geodesic_sphere", "equidistant", "totally_geodesic_hyperplane", "klein_quadric",
            "horosphere")


@dataclass
class RunConfig:
    n: int = 3
    surface: dict = field(default_factory=lambda: {"family": "geodesic_sphere", "t": 1.0})
    factor: dict = None
    grid: int = None
    checks: list = field(default_factory=lambda: list(CHECKS))
    tolerances: dict = field(default_factory=dict)
    output: dict = field(default_factory=lambda: {"dir": "out", "mesh": True,
                                                  "model": "poincare", "rows": 20,
                                                  "cols": 40})
    seed: int = 0

    def tol(self, name):
        return self.tolerances.get(name, DEFAULT_TOL[name])

    def factor_spec(self):
        """The factor spec, defaulting to 1 + 0.05 <Q s, s> with Q drawn from the seed."""
        if self.factor is not None:
            return self.factor
        rng = np.random.default_rng(self.seed)
        Q = rng.uniform(-1.0, 1.0, size=(self.n, self.n))
        Q = 0.5 * (Q + Q.T)
        return {"type": "sum", "terms": [{"type": "constant", "c": 1.0},
                                         {"type": "quadratic", "Q": (0.05 * Q).tolist()}]}

    def build_factor(self):
        return factor_from_dict(self.factor_spec(), self.n)

    def echo(self):
        out = asdict(self)
        out["schema"] = SCHEMA
        out["factor"] = self.factor_spec()
        out["tolerances"] = {k: self.tol(k) for k in sorted(DEFAULT_TOL)}
        return out


def _validate(cfg):
    if cfg.n not in (3, 4, 5):
        raise ConfigError(f"n must be 3, 4 or 5, got {cfg.n!r}")
    if not isinstance(cfg.surface, dict) or cfg.surface.get("family") not in FAMILIES:
        raise ConfigError(f"unknown surface spec {cfg.surface!r}")
    if cfg.checks == "all":
        cfg.checks = list(CHECKS)
    unknown = [c for c in cfg.checks if c not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}")
    for k, v in cfg.tolerances.items():
        if k not in DEFAULT_TOL:
            raise ConfigError(f"unknown tolerance {k!r}")
        if not isinstance(v, (int, float)) or v < 0:
            raise ConfigError(f"tolerance {k} must be a non-negative number")
    if cfg.grid is not None and (not isinstance(cfg.grid, int) or cfg.grid < 1):
        raise ConfigError("grid must be a positive integer")
    if not isinstance(cfg.seed, int) or not 0 <= cfg.seed < 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if cfg.output.get("model", "poincare") not in ("poincare", "klein"):
        raise ConfigError("output.model must be poincare or klein")
    cfg.build_factor()
    try:
        fam = build_surface(cfg.surface, cfg.n)
    except (KeyError, TypeError, ValueError, GeometryError) as exc:
        raise ConfigError(f"invalid surface spec {cfg.surface!r}: {exc}") from exc
    if fam.n != cfg.n:
        raise ConfigError(f"surface lives in H^{fam.n}, config says n = {cfg.n}")
    return cfg


def load_config(path=None, seed=None, tol=None, grid=None, out=None):
    """Read and validate a config file; command-line overrides win."""
    raw = {}
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        schema = raw.pop("schema", SCHEMA)
        if schema != SCHEMA:
            raise ConfigError(f"unsupported schema {schema!r}, expected {SCHEMA}")
    known = set(RunConfig.__dataclass_fields__)
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown config fields {sorted(extra)}")
    cfg = RunConfig(**raw)
    cfg.output = {**RunConfig().output, **(cfg.output or {})}
    if seed is not None:
        cfg.seed = seed
    if tol is not None:
        cfg.tolerances = {k: tol for k in DEFAULT_TOL}
    if grid is not None:
        cfg.grid = grid
    if out is not None:
        cfg.output["dir"] = out
    return _validate(cfg)
