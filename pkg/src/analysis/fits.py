"""
Polynomial error models: fitting, evaluation, recursion and the golden data file
"""
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import yaml

from src.errors import FitError, ProbabilityOverflowError

logger = logging.getLogger(__name__)

GOLDEN_FITS_PATH = Path(__file__).resolve().parents[2] / "data" / "golden_fits.yaml"

ACCEPT = 'accept'
Terms = List[Tuple[int, float]]


def _poly(terms: Terms, p: float) -> float:
    return float(sum(c * p ** k for k, c in terms))


@dataclass
class ErrorModelFit:
    """
    Per-class polynomials sum_k c(k) p^k, plus an optional acceptance
    (base polynomial raised to accept_power).
    """
    name: str
    terms: Dict[str, Terms]
    valid_p_max: float = 1.0
    accept_power: float = 1.0
    residuals: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {cls: [(int(k), float(c)) for k, c in terms] for cls, terms in self.terms.items()}
        for cls, terms in self.terms.items():
            for k, c in terms:
                if not np.isfinite(c):
                    raise FitError(f"{self.name}: non-finite coefficient for {cls} p^{k}")

    @property
    def error_classes(self) -> List[str]:
        return [cls for cls in self.terms if cls != ACCEPT]

    def evaluate(self, cls: str, p: float) -> float:
        if cls not in self.terms:
            return 0.0
        return _poly(self.terms[cls], p)

    def total(self, p: float) -> float:
        return sum(self.evaluate(cls, p) for cls in self.error_classes)

    def acceptance(self, p: float) -> float:
        if ACCEPT not in self.terms:
            return 1.0
        base = self.evaluate(ACCEPT, p)
        return max(base, 0.0) ** self.accept_power

    def check_range(self, p: float) -> None:
        if p > self.valid_p_max:
            raise ProbabilityOverflowError(f"{self.name}: p={p:.3e} above valid range {self.valid_p_max:.1e}")

    def to_dict(self) -> Dict:
        data = {
            'valid_p_max': self.valid_p_max,
            'errors': {cls: [[k, c] for k, c in terms] for cls, terms in self.terms.items() if cls != ACCEPT},
        }
        if ACCEPT in self.terms:
            data['accept'] = {'terms': [[k, c] for k, c in self.terms[ACCEPT]], 'power': self.accept_power}
        if self.residuals:
            data['residuals'] = dict(self.residuals)
        return data

    @classmethod
    def from_dict(cls, name: str, data: Mapping) -> 'ErrorModelFit':
        terms = {k: [tuple(t) for t in v] for k, v in (data.get('errors') or {}).items()}
        power = 1.0
        if data.get('accept'):
            terms[ACCEPT] = [tuple(t) for t in data['accept']['terms']]
            power = float(data['accept'].get('power', 1.0))
        valid = data.get('valid_p_max')
        return cls(name=name, terms=terms, valid_p_max=float(valid) if valid is not None else 1.0,
                   accept_power=power, residuals=dict(data.get('residuals') or {}))


@dataclass
class PiecewiseModel:
    """Several models combined: errors add, rejection is the largest of the pieces"""
    name: str
    pieces: List[ErrorModelFit]

    @property
    def error_classes(self) -> List[str]:
        return sorted({cls for piece in self.pieces for cls in piece.error_classes})

    @property
    def valid_p_max(self) -> float:
        return max(piece.valid_p_max for piece in self.pieces)

    def evaluate(self, cls: str, p: float) -> float:
        return sum(piece.evaluate(cls, p) for piece in self.pieces)

    def total(self, p: float) -> float:
        return sum(self.evaluate(cls, p) for cls in self.error_classes)

    def acceptance(self, p: float) -> float:
        return min(piece.acceptance(p) for piece in self.pieces)

    def check_range(self, p: float) -> None:
        if p > self.valid_p_max:
            raise ProbabilityOverflowError(f"{self.name}: p={p:.3e} above valid range {self.valid_p_max:.1e}")


@dataclass
class DistilledRound:
    """
    A further distillation round fed by the outputs of previous.

    Its error is quadratic * e^2 with e the error of previous at p; encoded
    Clifford failures one level up are orders of magnitude smaller and left
    out. Acceptance is that of previous.
    """
    name: str
    previous: PiecewiseModel
    quadratic: float

    @property
    def valid_p_max(self) -> float:
        return self.previous.valid_p_max

    def total(self, p: float) -> float:
        return self.quadratic * self.previous.total(p) ** 2

    def acceptance(self, p: float) -> float:
        return self.previous.acceptance(p)

    def check_range(self, p: float) -> None:
        self.previous.check_range(p)


def _least_squares(ps: np.ndarray, ys: np.ndarray, errs: np.ndarray,
                   exponents: Sequence[int]) -> Tuple[np.ndarray, float]:
    if len(ps) < len(exponents):
        raise FitError(f"{len(ps)} points cannot determine {len(exponents)} coefficients")
    if not np.all(np.isfinite(errs)):
        raise FitError("rate errors must be finite")
    positive = errs[errs > 0]
    sigma = np.where(errs > 0, errs, positive.min() if positive.size else 1.0)
    design = np.column_stack([ps ** k for k in exponents]) / sigma[:, None]
    target = ys / sigma
    if np.linalg.matrix_rank(design) < len(exponents):
        raise FitError("design matrix is singular for these exponents")
    coeffs, _, _, _ = np.linalg.lstsq(design, target, rcond=None)
    dof = max(len(ps) - len(exponents), 1)
    chi2 = float(np.sum((design @ coeffs - target) ** 2)) / dof
    return coeffs, chi2


def _warn_negative(name: str, cls: str, exponents: Sequence[int], coeffs: np.ndarray) -> None:
    for k, c in zip(exponents, coeffs):
        if c < 0:
            message = f"{name}: negative fitted coefficient {c:.3e} for {cls} p^{k}"
            logger.warning(message)
            warnings.warn(message)


def fit_error_model(data: Sequence[Tuple[float, float, float]], exponents: Sequence[int],
                    name: str = 'fit', cls: str = 'total') -> ErrorModelFit:
    """Weighted least squares of (p, rate, err) points on the given powers of p"""
    exponents = list(exponents)
    arr = np.asarray(data, dtype=float).reshape(-1, 3)
    coeffs, chi2 = _least_squares(arr[:, 0], arr[:, 1], arr[:, 2], exponents)
    _warn_negative(name, cls, exponents, coeffs)
    return ErrorModelFit(name=name, terms={cls: list(zip(exponents, coeffs))}, residuals={cls: chi2})


def fit_acceptance(data: Sequence[Tuple[float, float, float]], exponents: Sequence[int],
                   name: str = 'fit') -> Tuple[Terms, float]:
    """Acceptance as 1 - sum_k c(k) p^k; returns its terms and reduced chi-square"""
    exponents = list(exponents)
    arr = np.asarray(data, dtype=float).reshape(-1, 3)
    coeffs, chi2 = _least_squares(arr[:, 0], 1.0 - arr[:, 1], arr[:, 2], exponents)
    _warn_negative(name, ACCEPT, exponents, coeffs)
    return [(0, 1.0)] + [(k, -c) for k, c in zip(exponents, coeffs)], chi2


def fit_estimate_records(records: Sequence[Mapping], exponents: Sequence[int],
                         accept_exponents: Sequence[int] = (1,), name: str = 'fit',
                         classes: Sequence[str] = ('X', 'Y', 'Z')) -> ErrorModelFit:
    """Fit every Pauli class and the acceptance of a sweep of estimate records"""
    terms: Dict[str, Terms] = {}
    residuals: Dict[str, float] = {}
    for letter in classes:
        column = f"p{letter.lower()}"
        points = [(r['p'], r[column], r[column + '_err']) for r in records if column in r]
        if not points:
            continue
        fit = fit_error_model(points, exponents, name=name, cls=letter)
        terms.update(fit.terms)
        residuals.update(fit.residuals)
    points = [(r['p'], r['accept'], r['accept_err']) for r in records]
    terms[ACCEPT], residuals[ACCEPT] = fit_acceptance(points, accept_exponents, name=name)
    fit = ErrorModelFit(name=name, terms=terms, valid_p_max=max(r['p'] for r in records), residuals=residuals)
    logger.info(f"Fitted {name} on {len(records)} points")
    return fit


def gamma_recursion(fit, p: float, levels: int) -> List[float]:
    """Gamma^(1..levels) with Gamma^(0) = p and Gamma^(l) = total(Gamma^(l-1))"""
    values = []
    current = p
    for _ in range(levels):
        fit.check_range(current)
        current = fit.total(current)
        values.append(current)
    return values


def round2_piecewise(golden: Optional[Mapping[str, ErrorModelFit]] = None) -> PiecewiseModel:
    """Second distillation round from its ideal-|H> and ideal-stabilizer runs"""
    golden = golden if golden is not None else load_fits()
    return PiecewiseModel('mek-round2-piecewise', [golden['mek-round2-ideal-stabilizer-l3'],
                                                   golden['mek-round2-ideal-h-l3']])


def round3_distilled(golden: Optional[Mapping[str, ErrorModelFit]] = None) -> DistilledRound:
    """
    Third full-MEK round (level 4) on top of the second.

    The quadratic suppression is the p^2 coefficient of the first round,
    whose inputs fail at the physical rate.
    """
    golden = golden if golden is not None else load_fits()
    first = golden['mek-round1-l2']
    quadratic = sum(c for cls in first.error_classes for k, c in first.terms[cls] if k == 2)
    return DistilledRound('mek-round3-distilled', round2_piecewise(golden), quadratic)


def load_fits(path: Optional[Path] = None) -> Dict[str, ErrorModelFit]:
    """Read every named model from a fits file (the golden file by default)"""
    path = Path(path) if path is not None else GOLDEN_FITS_PATH
    with open(path, "r") as fh:
        data = yaml.safe_load(fh) or {}
    fits = {name: ErrorModelFit.from_dict(name, entry) for name, entry in (data.get('fits') or {}).items()}
    logger.debug(f"Loaded {len(fits)} fits from {path}")
    return fits


def load_unassigned_acceptance(path: Optional[Path] = None) -> List[Terms]:
    """Published parallel-preparation acceptance polynomials, kept without a (quantity, level) slot"""
    path = Path(path) if path is not None else GOLDEN_FITS_PATH
    with open(path, "r") as fh:
        data = yaml.safe_load(fh) or {}
    return [[(int(k), float(c)) for k, c in row['terms']] for row in data.get('parallel_acceptance_unassigned', [])]


def save_fits(fits: Mapping[str, ErrorModelFit], path: Path, source: Optional[str] = None) -> None:
    document = {'fits': {name: fit.to_dict() for name, fit in fits.items()}}
    if source:
        document['source'] = source
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        yaml.safe_dump(document, fh, sort_keys=False)
    logger.info(f"Wrote {len(fits)} fits to {path}")
