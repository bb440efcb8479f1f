"""Global numerical settings: logarithm base and tolerances.

Values are read once from the environment (``ENTBOUND_LOG_BASE``,
``ENTBOUND_SEED``) and can be replaced with :func:`set_config` or
temporarily with :func:`using`.
"""
from __future__ import annotations

import contextlib
import math
import os
from dataclasses import dataclass, replace


def parse_base(value: str | float) -> float:
    """Accept ``2``, ``"2"``, ``"e"``, ``"nats"``, ``"bits"`` and return the base."""
    if isinstance(value, (int, float)):
        base = float(value)
    else:
        key = value.strip().lower()
        if key in ("e", "nat", "nats", "ln"):
            return math.e
        if key in ("bit", "bits"):
            return 2.0
        base = float(key)
    if base <= 0 or base == 1:
        raise ValueError(f"invalid logarithm base {value!r}")
    return base


@dataclass(frozen=True)
class Config:
    log_base: float = 2.0
    tol_herm: float = 1e-10
    tol_psd: float = 1e-9
    tol_supp: float = 1e-12
    tol_geo: float = 1e-12
    binegative_threshold: float = 1e-8
    seed: int = 0

    @classmethod
    def from_env(cls) -> "Config":
        cfg = cls()
        if "ENTBOUND_LOG_BASE" in os.environ:
            cfg = replace(cfg, log_base=parse_base(os.environ["ENTBOUND_LOG_BASE"]))
        if "ENTBOUND_SEED" in os.environ:
            cfg = replace(cfg, seed=int(os.environ["ENTBOUND_SEED"]))
        return cfg

    @property
    def base_label(self) -> str:
        return "e" if self.log_base == math.e else f"{self.log_base:g}"


_current = Config.from_env()


def get_config() -> Config:
    return _current


def set_config(**changes) -> Config:
    global _current
    if "log_base" in changes:
        changes["log_base"] = parse_base(changes["log_base"])
    _current = replace(_current, **changes)
    return _current


@contextlib.contextmanager
def using(**changes):
    """Temporarily override settings, e.g. ``with using(log_base="e"): ...``."""
    global _current
    saved = _current
    try:
        yield set_config(**changes)
    finally:
        _current = saved


def nats_to(value: float, base: float | None = None) -> float:
    """Convert a quantity computed with natural logs to ``base`` (default: configured)."""
    base = _current.log_base if base is None else parse_base(base)
    if base == math.e:
        return value
    return value / math.log(base)
