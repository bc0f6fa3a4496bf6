"""Run configuration: defaults, a flat key = value file, LMHS_* environment overrides, then flags."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from ..errors import ConfigError

ENV_PREFIX = "LMHS_"


def parse_ladder(text: str) -> tuple[int, ...]:
    """'256,512,1024' or '2^8..2^14' into a strictly increasing tuple of cutoffs."""
    text = text.strip()
    if not text:
        return ()
    try:
        if ".." in text:
            lo, hi = (part.strip() for part in text.split(".."))
            if lo.startswith("2^") and hi.startswith("2^"):
                out = tuple(2**e for e in range(int(lo[2:]), int(hi[2:]) + 1))
            else:
                out = tuple(range(int(lo), int(hi) + 1))
        else:
            out = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse cutoff ladder {text!r}") from exc
    if any(c < 0 for c in out) or any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError(f"cutoff ladder must be non-negative and strictly increasing: {text!r}")
    return out


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 256
    tolerance: float | None = None  # overrides every suite tolerance when set
    tolerances: dict = field(default_factory=dict)  # per suite
    cutoffs: tuple[int, ...] | None = None
    geometry: str | None = None
    out: str | None = None
    output_format: str = "json"

    def __post_init__(self):
        if self.precision_bits < 53:
            raise ConfigError("precision_bits must be at least 53")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ConfigError(f"tolerance for {k} must be positive")
        if self.cutoffs is not None and any(b <= a for a, b in zip(self.cutoffs, self.cutoffs[1:])):
            raise ConfigError("cutoff ladder must be strictly increasing")
        if self.output_format not in ("json", "table"):
            raise ConfigError("output format must be json or table")

    def tolerance_for(self, suite: str, default: float) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return self.tolerances.get(suite, default)

    def environment(self) -> dict:
        return {
            "precision_bits": self.precision_bits,
            "cutoffs": list(self.cutoffs) if self.cutoffs is not None else "default",
        }


_SIMPLE = {f.name for f in fields(RunConfig)} - {"tolerances"}


def _coerce(key: str, value: str):
    if key.startswith("tolerance."):
        return float(value)
    if key == "precision_bits":
        return int(value)
    if key == "tolerance":
        return float(value)
    if key == "cutoffs":
        return parse_ladder(value)
    return value


def apply_pairs(cfg: RunConfig, pairs: dict, source: str) -> RunConfig:
    updates: dict = {}
    tols = dict(cfg.tolerances)
    for key, raw in pairs.items():
        key = key.strip().lower().replace("-", "_")
        try:
            value = _coerce(key, raw)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"{source}: bad value for {key}: {raw!r}") from exc
        if key.startswith("tolerance."):
            tols[key.split(".", 1)[1]] = value
        elif key in _SIMPLE:
            updates[key] = value
        else:
            raise ConfigError(f"{source}: unknown key {key!r}")
    return replace(cfg, tolerances=tols, **updates)


def read_flat_file(path: str | Path) -> dict:
    """Lines of 'key = value'; '#' starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def read_environment(env=None) -> dict:
    """LMHS_PRECISION_BITS=512, LMHS_TOLERANCE__IDENTITIES=1e-8 (double underscore for a dot)."""
    env = os.environ if env is None else env
    out = {}
    for k, v in env.items():
        if k.startswith(ENV_PREFIX) and k != ENV_PREFIX + "CONFIG":
            out[k[len(ENV_PREFIX):].lower().replace("__", ".")] = v
    return out


def load_config(path: str | None = None, env=None, overrides: dict | None = None) -> RunConfig:
    cfg = RunConfig()
    env = os.environ if env is None else env
    path = path or env.get(ENV_PREFIX + "CONFIG")
    if path:
        cfg = apply_pairs(cfg, read_flat_file(path), str(path))
    cfg = apply_pairs(cfg, read_environment(env), "environment")
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg
