"""Run configuration: one global seed fanned out to named components, and a
line-oriented config file merged under command-line flags.

Resolution order for every setting is flag > file > built-in default.
"""

import hashlib
from dataclasses import dataclass

DEFAULT_SEED = 1
DEFAULT_BOW_K = 5000
DEFAULT_CLUSTER_K = 50
DEFAULT_THRESHOLD = 0.5
DEFAULT_TRAIN_FRACTION = 0.8
DEFAULT_MIN_COUNT = 5


def derive_seed(seed: int, component: str) -> int:
    """Stable 64-bit stream seed for one named component of the pipeline."""
    digest = hashlib.sha256(f"{component}:{seed}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class PipelineConfig:
    seed: int = DEFAULT_SEED
    bow_k: int = DEFAULT_BOW_K
    cluster_k: int = DEFAULT_CLUSTER_K
    threshold: float = DEFAULT_THRESHOLD
    train_fraction: float = DEFAULT_TRAIN_FRACTION
    min_count: int = DEFAULT_MIN_COUNT

    def __post_init__(self):
        if self.bow_k < 1:
            raise ValueError("bow_k must be >= 1")
        if self.cluster_k < 1:
            raise ValueError("cluster_k must be >= 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must be within [0, 1]")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be within (0, 1)")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")


def parse_config_file(path: str) -> dict[str, str]:
    """`key = value` lines; '#' starts a comment; blank lines skipped."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            key = key.strip()
            value = value.strip()
            if not key:
                raise ValueError(f"{path}:{lineno}: empty key")
            if key in out:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = value
    return out


def resolve(flag, file_value: str | None, default, convert):
    """Single authority order: an explicit flag, then the file, then the default."""
    if flag is not None:
        return flag
    if file_value is not None:
        return convert(file_value)
    return default
