"""
Input validation utilities
"""
import math
from typing import Optional

import validators

from src.circuits.protocols import PROTOCOLS

OUTPUT_FORMATS = ('csv', 'json')


def validate_probability(p: float, allow_zero: bool = True) -> bool:
    """Validate a physical error rate"""
    if p is None or not math.isfinite(p):
        return False
    if p == 0:
        return allow_zero
    return 0 < p < 1


def validate_trials(trials: int) -> bool:
    return isinstance(trials, int) and trials >= 1


def validate_protocol_name(name: str) -> bool:
    """Validate protocol name against the registry"""
    return bool(name) and name in PROTOCOLS


def validate_output_format(fmt: str) -> bool:
    return bool(fmt) and fmt.lower() in OUTPUT_FORMATS


def validate_seed(seed: Optional[int]) -> bool:
    """Simulations need an explicit non-negative seed"""
    return isinstance(seed, int) and seed >= 0


def validate_source_url(source: Optional[str]) -> bool:
    """Validate an optional provenance URL for emitted fit files"""
    if not source:
        return True
    return bool(validators.url(source))
