"""Pipeline configuration: a flat key=value file mirrored by a dataclass.

Relative paths in a config file resolve against the file's directory so a
committed fixture config works from any working directory.  Empty table
paths fall back to the packaged reference tables.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError
from .leadmodel import DEFAULT_THRESHOLD, FAMILY_LINEAR, FAMILY_LOGISTIC
from .metrics import COUNT_AUTHOR_PAPER, COUNT_UNIQUE_AUTHOR

DEFAULT_IF_EDGES = (1.0, 2.0, 4.0, 8.0, 16.0)
DEFAULT_THRESHOLD_SWEEP = (0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80)


@dataclass(frozen=True)
class PipelineConfig:
    corpus: Optional[Path] = None
    contributions: Optional[Path] = None
    output_dir: Path = Path("out")
    regions: Optional[Path] = None
    bri: Optional[Path] = None
    areas_table: Optional[Path] = None
    fields_table: Optional[Path] = None
    lead_threshold: float = DEFAULT_THRESHOLD
    if_bin_edges: tuple[float, ...] = DEFAULT_IF_EDGES
    window_start: int = 2010
    window_end: int = 2021
    confidence_level: float = 0.95
    horizon: float = 2200.0
    seed: int = 0
    workers: int = 1
    strict: bool = False
    counting_mode: str = COUNT_AUTHOR_PAPER
    model_family: str = FAMILY_LINEAR
    split_ratio: float = 0.9
    strict_binary_labels: bool = False
    focal_region: str = "China"
    # empty tuples mean "no restriction": all observed pairs, every
    # area/field/bin/class group gets its own series
    pairs: tuple[tuple[str, str], ...] = ()
    areas: tuple[str, ...] = ()
    fields: tuple[str, ...] = ()
    if_bins: tuple[int, ...] = ()
    bri_classes: tuple[str, ...] = ()
    threshold_sweep: tuple[float, ...] = DEFAULT_THRESHOLD_SWEEP

    def __post_init__(self) -> None:
        if not 0.0 < self.lead_threshold < 1.0:
            raise ConfigError(
                f"lead_threshold must be in (0,1), got {self.lead_threshold}"
            )
        if self.window_start >= self.window_end:
            raise ConfigError(
                f"window start {self.window_start} must precede end {self.window_end}"
            )
        if not 0.0 < self.confidence_level < 1.0:
            raise ConfigError(
                f"confidence_level must be in (0,1), got {self.confidence_level}"
            )
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError(f"split_ratio must be in (0,1), got {self.split_ratio}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.counting_mode not in (COUNT_AUTHOR_PAPER, COUNT_UNIQUE_AUTHOR):
            raise ConfigError(f"unknown counting_mode {self.counting_mode!r}")
        if self.model_family not in (FAMILY_LINEAR, FAMILY_LOGISTIC):
            raise ConfigError(f"unknown model_family {self.model_family!r}")
        if list(self.if_bin_edges) != sorted(self.if_bin_edges) or len(
            set(self.if_bin_edges)
        ) != len(self.if_bin_edges):
            raise ConfigError("if_bin_edges must be strictly increasing")
        if not self.if_bin_edges:
            raise ConfigError("if_bin_edges must not be empty")
        for t in self.threshold_sweep:
            if not 0.0 < t < 1.0:
                raise ConfigError(f"sweep threshold {t} not in (0,1)")

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)


_PATH_KEYS = (
    "corpus", "contributions", "output_dir", "regions", "bri",
    "areas_table", "fields_table",
)
_BOOL_KEYS = ("strict", "strict_binary_labels")
_INT_KEYS = ("window_start", "window_end", "seed", "workers")
_FLOAT_KEYS = ("lead_threshold", "confidence_level", "horizon", "split_ratio")
_STR_KEYS = ("counting_mode", "model_family", "focal_region")
_KNOWN_KEYS = frozenset(
    _PATH_KEYS + _BOOL_KEYS + _INT_KEYS + _FLOAT_KEYS + _STR_KEYS
    + ("if_bin_edges", "pairs", "areas", "fields", "if_bins",
       "bri_classes", "threshold_sweep")
)


def _parse_bool(key: str, value: str) -> bool:
    if value in ("true", "false"):
        return value == "true"
    raise ConfigError(f"{key} must be 'true' or 'false', got {value!r}")


def _split_list(value: str) -> list[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _parse_pairs(value: str) -> tuple[tuple[str, str], ...]:
    pairs = []
    for chunk in _split_list(value):
        sides = chunk.split("|")
        if len(sides) != 2:
            raise ConfigError(f"pair {chunk!r} must be 'RegionA|RegionB'")
        pairs.append(tuple(sorted((sides[0].strip(), sides[1].strip()))))
    return tuple(pairs)


def config_from_mapping(
    mapping: dict[str, str], base_dir: Optional[Path] = None
) -> PipelineConfig:
    kwargs: dict = {}
    for key, value in mapping.items():
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            if key in _PATH_KEYS:
                if value == "":
                    continue
                p = Path(value)
                if base_dir is not None and not p.is_absolute():
                    p = base_dir / p
                kwargs[key] = p
            elif key in _BOOL_KEYS:
                kwargs[key] = _parse_bool(key, value)
            elif key in _INT_KEYS:
                kwargs[key] = int(value)
            elif key in _FLOAT_KEYS:
                kwargs[key] = float(value)
            elif key in _STR_KEYS:
                kwargs[key] = value
            elif key == "if_bin_edges":
                kwargs[key] = tuple(float(v) for v in _split_list(value))
            elif key == "threshold_sweep":
                kwargs[key] = tuple(float(v) for v in _split_list(value))
            elif key == "pairs":
                kwargs[key] = _parse_pairs(value)
            elif key == "if_bins":
                kwargs[key] = tuple(int(v) for v in _split_list(value))
            else:  # areas, fields, bri_classes
                kwargs[key] = tuple(_split_list(value))
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from exc
    return PipelineConfig(**kwargs)


def load_config(path: Path) -> PipelineConfig:
    """Parse `key = value` lines; '#' starts a comment, blanks ignored."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    mapping: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if key in mapping:
            raise ConfigError(f"{path}:{line_no}: duplicate key {key!r}")
        mapping[key] = value.strip()
    return config_from_mapping(mapping, base_dir=path.parent)
