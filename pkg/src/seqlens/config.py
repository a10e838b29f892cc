"""Engine configuration.

Every knob can come from (in increasing precedence) built-in defaults, a
config file (JSON, or flat ``key = value`` TOML), an environment variable,
or an explicit keyword. Environment variable names are ``SEQLENS_<KNOB>``
in upper case, e.g. ``SEQLENS_GAP_OPEN_PENALTY=0.5``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

ENV_PREFIX = "SEQLENS_"


@dataclass(frozen=True)
class EngineConfig:
    # q-gram profile length used for the pairwise sequence distance
    q: int = 1
    # alignment scoring
    gap_open_penalty: float = 0.8
    match_score: float = 3.0
    mismatch_score: float = -1.0
    # clusters holding less than this share of all records are flagged small
    small_cluster_threshold: float = 0.01
    # bounded memo for simplified matrices, entries keyed by (node, threshold)
    simplify_memo_size: int = 256
    # cap on the ranked list of suggested cluster counts
    max_recommendations: int = 10
    # fixed bin width per numeric attribute; attributes not listed use an
    # automatic Freedman-Diaconis width
    bin_width: dict[str, float] = field(default_factory=dict)
    # reserved hook; only "qgram" is implemented
    distance_metric: str = "qgram"

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.distance_metric != "qgram":
            raise NotImplementedError(
                f"distance metric {self.distance_metric!r} is a reserved hook; "
                "only 'qgram' is implemented"
            )
        if not self.match_score > self.mismatch_score:
            raise ValueError("match_score must exceed mismatch_score")
        if self.gap_open_penalty < 0:
            raise ValueError("gap_open_penalty must be non-negative")


def _parse_flat_toml(text: str) -> dict[str, Any]:
    """Parse a flat ``key = value`` file (the TOML subset we document)."""
    out: dict[str, Any] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line is not 'key = value': {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = _coerce_scalar(value)
    return out


def _coerce_scalar(value: str) -> Any:
    if value.startswith(("'", '"')) and value.endswith(value[0]) and len(value) >= 2:
        return value[1:-1]
    if value in ("true", "false"):
        return value == "true"
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass
    if value.startswith("{"):
        return json.loads(value)
    return value


def load_config(path: str | Path | None = None, **overrides: Any) -> EngineConfig:
    """Build an EngineConfig from defaults, file, environment, and overrides."""
    values: dict[str, Any] = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        if str(path).endswith(".json"):
            values.update(json.loads(text))
        else:
            values.update(_parse_flat_toml(text))

    for f in fields(EngineConfig):
        env_name = ENV_PREFIX + f.name.upper()
        if env_name in os.environ:
            raw = os.environ[env_name]
            values[f.name] = json.loads(raw) if f.name == "bin_width" else _coerce_scalar(raw)

    values.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(EngineConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return EngineConfig(**values)


def with_updates(config: EngineConfig, **changes: Any) -> EngineConfig:
    return replace(config, **changes)
