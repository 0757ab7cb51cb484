"""
Runtime configuration for the misinformation analysis toolkit.

Settings are read once at import from the process environment, after
loading an optional .env file from the working directory. Every setting
has a typed default so nothing needs to be configured for normal use.

Environment variables:
- MISINFO_TOLERANCE: spread threshold for declaring consensus (1e-10)
- MISINFO_MAX_EVENTS: meeting events before a run is abandoned (1000000)
- MISINFO_TRIALS: default Monte Carlo trials per initial condition (1000)
- MISINFO_EXACT_CUT_LIMIT: largest n for exhaustive cut enumeration (22)
- MISINFO_BLOCK_SIZE: uniform triples drawn per generator refill (256)
- MISINFO_WORKERS: thread pool size for simulator trials (1)
- MISINFO_DECIMATION: keep every k-th spread value in traces (1)
- MISINFO_OUTPUT_DIR: directory for script artifacts ("tmp")

The random seed is not a setting: randomness enters only through
--seed / SimulationConfig.seed.

Used by: gossip_simulator, cuts_clustering, analysis_report, cli, scripts
"""

import os
from dataclasses import dataclass, asdict
from typing import Callable, Dict, TypeVar

from dotenv import load_dotenv

load_dotenv()

T = TypeVar("T", int, float)


def _read(name: str, default: T, cast: Callable[[str], T], minimum: T) -> T:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = cast(raw)
    except ValueError:
        raise ValueError(f"{name} must be a {cast.__name__}, got {raw!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class Settings:
    """Typed view of the environment configuration."""

    tolerance: float = 1e-10
    max_events: int = 1_000_000
    trials: int = 1000
    exact_cut_limit: int = 22
    block_size: int = 256
    workers: int = 1
    decimation: int = 1
    output_dir: str = "tmp"

    def to_dict(self) -> Dict:
        return asdict(self)


def load_settings() -> Settings:
    """
    Build Settings from the current environment.

    Raises:
        ValueError: If a variable is set but not a positive number
    """
    tolerance = _read("MISINFO_TOLERANCE", 1e-10, float, 0.0)
    if tolerance == 0.0:
        raise ValueError("MISINFO_TOLERANCE must be > 0, got 0")
    return Settings(
        tolerance=tolerance,
        max_events=_read("MISINFO_MAX_EVENTS", 1_000_000, int, 1),
        trials=_read("MISINFO_TRIALS", 1000, int, 1),
        exact_cut_limit=_read("MISINFO_EXACT_CUT_LIMIT", 22, int, 2),
        block_size=_read("MISINFO_BLOCK_SIZE", 256, int, 1),
        workers=_read("MISINFO_WORKERS", 1, int, 1),
        decimation=_read("MISINFO_DECIMATION", 1, int, 1),
        output_dir=os.getenv("MISINFO_OUTPUT_DIR", "tmp"),
    )


SETTINGS = load_settings()
