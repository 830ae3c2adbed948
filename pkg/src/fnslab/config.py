"""Flat key=value experiment configuration.

Exactly these keys are recognized (diffable, language-neutral):

    alpha, nu, r, K_override, beta, gamma, zeta, s, p,
    N1, N2, N3, dt, t_final_override, quad_nodes, snapshots, outdir, seed

Empty values mean "derive the default".  N1/N2/N3 of 0 request automatic
grid sizing; dt is "auto", "cfl" or a number; p may be "inf".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .construction import InflationConfig, required_dims
from .lattice import Lattice
from .spectral import FractionalParams

CONFIG_KEYS = (
    "alpha", "nu", "r", "K_override", "beta", "gamma", "zeta", "s", "p",
    "N1", "N2", "N3", "dt", "t_final_override", "quad_nodes", "snapshots",
    "outdir", "seed",
)


@dataclass(frozen=True)
class ExperimentConfig:
    r: int = 2
    alpha: float = 1.0
    nu: float = 1.0
    beta: float = 0.45
    gamma: float | None = None
    zeta: float | None = None
    s: float = 1.0
    p: float = math.inf
    K_override: int | None = None
    t_final_override: float | None = None
    N1: int = 0
    N2: int = 0
    N3: int = 0
    dt: object = "auto"
    quad_nodes: int = 64
    snapshots: int = 50
    outdir: str = "out"
    seed: int = 0

    def inflation(self) -> InflationConfig:
        return InflationConfig(
            r=self.r, alpha=self.alpha, beta=self.beta, gamma=self.gamma,
            zeta=self.zeta, s=self.s, p=self.p, K_override=self.K_override,
            t_final_override=self.t_final_override, nu=self.nu,
        )

    def params(self) -> FractionalParams:
        return FractionalParams(alpha=self.alpha, nu=self.nu)

    def lattice(self) -> Lattice:
        dims = required_dims(self.inflation())
        n1 = self.N1 or dims[0]
        n2 = self.N2 or dims[1]
        n3 = self.N3 or dims[2]
        return Lattice((n1, n2, n3))

    def quad_split(self):
        """(panels, nodes per panel) from the total node budget."""
        panels = 8
        per = max(1, self.quad_nodes // panels)
        return panels, per

    def with_r(self, r):
        return replace(self, r=r)


def _parse_value(key, raw):
    raw = raw.strip()
    if raw == "":
        return None
    if key in ("r", "N1", "N2", "N3", "quad_nodes", "snapshots", "seed",
               "K_override"):
        return int(raw)
    if key in ("alpha", "nu", "beta", "gamma", "zeta", "s",
               "t_final_override"):
        return float(raw)
    if key == "p":
        return math.inf if raw.lower() in ("inf", "infinity") else float(raw)
    if key == "dt":
        if raw in ("auto", "cfl"):
            return raw
        return float(raw)
    if key == "outdir":
        return raw
    raise KeyError(key)


def parse_config(text) -> ExperimentConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        parsed = _parse_value(key, raw)
        if parsed is not None:
            values[key] = parsed
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(cfg: ExperimentConfig) -> str:
    def fmt(value):
        if value is None:
            return ""
        if isinstance(value, float) and math.isinf(value):
            return "inf"
        return str(value)

    lines = [f"{key} = {fmt(getattr(cfg, key))}" for key in CONFIG_KEYS]
    return "\n".join(lines) + "\n"


def save_config(path, cfg: ExperimentConfig):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_config(cfg))
