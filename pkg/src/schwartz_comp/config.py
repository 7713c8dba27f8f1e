"""Run configuration: grid sizes, tolerances and search lattices."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any


@dataclass(frozen=True)
class Config:
    # sampling window for suprema and tail fits
    x_max: float = 1.0e4
    x_min: float = 1.0e-3
    base_points: int = 4096
    refine_depth: int = 12
    refine_peaks: int = 8
    tail_lo: float = 1.0e2
    tail_hi: float = 1.0e4
    tail_blocks: int = 32
    # far probes x = +-exp(t) used for asymptotic questions (|phi| -> oo, |x|^(1/k))
    far_t_max: float = 2000.0
    far_points: int = 600
    # numeric judgement
    residual_tol: float = 0.1
    slope_tol: float = 0.1
    tol: float = 1.0e-6
    max_order: int = 4
    blend_order: int = 8
    # search lattices
    p_max: int = 32
    k_max: int = 64
    q_max: int = 32
    n_max: int = 8
    t_values: tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 0.5)
    c_exponents: tuple[int, ...] = (0, -1, -2, -3, -4, -5, -6, -7, -8, -9, -10)
    halfline_radii: tuple[float, ...] = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
    zero_window: float = 1.0e3
    max_multiplicity: int = 8
    # value sampling for the C^oo heuristic
    endpoint_exclusion: float = 1.0e-3
    seed: int = 0

    def replace(self, **changes: Any) -> "Config":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out


def _coerce(name: str, raw: str) -> Any:
    default = getattr(Config(), name)
    raw = raw.strip()
    if isinstance(default, tuple):
        items = [s for s in raw.replace(",", " ").split() if s]
        kind = type(default[0]) if default else float
        return tuple(kind(float(s)) if kind is int else kind(s) for s in items)
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(float(raw))
    return float(raw)


def load_config(path: str | Path | None = None, overrides: dict[str, str] | None = None) -> Config:
    """Read a flat ``key = value`` file; ``overrides`` win over file values.

    Blank lines and ``#`` comments are ignored. Unknown keys raise ``KeyError``.
    """
    values: dict[str, Any] = {}
    known = {f.name for f in fields(Config)}
    items: list[tuple[str, str]] = []
    if path is not None:
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, raw = line.split("=", 1)
            items.append((key.strip().replace("-", "_"), raw))
    for key, raw in (overrides or {}).items():
        items.append((key.replace("-", "_"), raw))
    for key, raw in items:
        if key not in known:
            raise KeyError(f"unknown config key {key!r}")
        values[key] = _coerce(key, raw)
    return Config(**values)


DEFAULT = Config()
