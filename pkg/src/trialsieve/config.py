"""Run configuration: plain-text key=value file, overridable by CLI flags."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .corpus import DEFAULT_DATE_PATTERNS, DEFAULT_SEPARATOR_PATTERN
from .temporal import DEFAULT_HISTORY_THRESHOLD_DAYS


class ConfigError(Exception):
    pass


@dataclass
class Config:
    store_path: str = "trialsieve.db"
    rules_dir: str = "rules"
    output_dir: str = "out"
    history_threshold_days: int = DEFAULT_HISTORY_THRESHOLD_DAYS
    parallelism: int = 1
    separator_pattern: str = DEFAULT_SEPARATOR_PATTERN
    date_patterns: tuple = DEFAULT_DATE_PATTERNS
    serve_address: str = "127.0.0.1:8711"

    def validate(self) -> None:
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        if self.history_threshold_days < 0:
            raise ConfigError("history_threshold_days must be >= 0")


_INT_KEYS = {"history_threshold_days", "parallelism"}


def load_config(path=None, overrides: dict | None = None) -> Config:
    """Read key = value lines; '#' starts a comment; flags win over file."""
    cfg = Config()
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            _apply(cfg, key, value, f"{path}:{lineno}")
    for key, value in (overrides or {}).items():
        if value is not None:
            _apply(cfg, key, value, "flag")
    cfg.validate()
    return cfg


def _apply(cfg: Config, key: str, value, where: str) -> None:
    if key == "date_patterns":
        cfg.date_patterns = tuple(p for p in str(value).split("|||") if p)
        return
    if key not in {f.name for f in fields(Config)}:
        raise ConfigError(f"{where}: unknown config key {key!r}")
    if key in _INT_KEYS:
        try:
            value = int(value)
        except ValueError:
            raise ConfigError(f"{where}: {key} must be an integer") from None
    setattr(cfg, key, value)
