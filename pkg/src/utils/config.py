"""
Configuration loading: defaults, YAML file, environment and flags
"""
import os
from dataclasses import dataclass, asdict, field, fields
from pathlib import Path
from typing import Dict, List, Optional

import yaml

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "config" / "default.yaml"


@dataclass(frozen=True)
class Tolerances:
    """Every numeric tolerance used across the package"""
    norm: float = 1e-10
    hermitian: float = 1e-10
    trace: float = 1e-10
    psd: float = -1e-9
    classify: float = 1e-6
    channel: float = 1e-8
    branch: float = 1e-12
    branch_sum: float = 1e-9


TOLERANCES = Tolerances()


@dataclass
class RunConfig:
    """Parameters shared by all CLI commands"""
    protocol: str = "detect"
    p_values: List[float] = field(default_factory=lambda: [1e-3])
    trials: int = 1000
    seed: Optional[int] = None
    level: int = 1
    variant: str = "full"
    starred: bool = False
    idle_divisor: float = 100.0
    threads: int = 1
    output_dir: str = "output"
    fmt: str = "csv"
    fit_source: str = "golden"
    targets: List[float] = field(default_factory=lambda: [1e-6, 1e-7, 1e-8, 1e-9])
    max_weight: int = 1
    subsample: Optional[int] = None
    budget: int = 5_000_000
    raw_log: bool = False

    def to_dict(self) -> Dict:
        return asdict(self)


def _read_yaml(path: Path) -> Dict:
    with open(path, "r") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be a mapping")
    return data


def load_config(config_file: Optional[str] = None, overrides: Optional[Dict] = None) -> RunConfig:
    """Merge defaults < default.yaml < config file < non-None overrides"""

    merged: Dict = {}

    if DEFAULT_CONFIG_PATH.exists():
        merged.update(_read_yaml(DEFAULT_CONFIG_PATH))

    env_output = os.getenv("FLAGMAGIC_OUTPUT_DIR")
    if env_output:
        merged["output_dir"] = env_output

    if config_file:
        merged.update(_read_yaml(Path(config_file)))

    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    known = {f.name for f in fields(RunConfig)}
    unknown = set(merged) - known
    if unknown:
        raise ValueError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")

    if "p_values" in merged:
        merged["p_values"] = [float(p) for p in merged["p_values"]]
    if "targets" in merged:
        merged["targets"] = [float(t) for t in merged["targets"]]

    return RunConfig(**merged)
