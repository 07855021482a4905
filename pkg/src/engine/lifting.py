"""
Concatenation-level lifting: lower-level logical failure models used as location noise
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from src.analysis.fits import ErrorModelFit, fit_error_model, gamma_recursion
from src.circuits.circuit import Circuit, Location
from src.circuits.ec import cnot, meas
from src.circuits.protocols import (DetectScheme, Executor, FtPrep, Protocol, ProtocolResult, SteaneEC,
                                    get_protocol)
from src.codes.stabilizer import StabilizerCode, steane
from src.engine.trials import UNCLASSIFIED, RateEstimate, run_trials
from src.errors import ProbabilityOverflowError
from src.pauli.noise import MEASUREMENT_FLIP, Effect, NoiseModel, fault_support
from src.pauli.paulistring import PauliString
from src.statevec.gates import KET_0, KET_PLUS, GateKind

logger = logging.getLogger(__name__)

# Kinds whose level-1 Rec is simulated with the Steane code
CLIFFORD_REC_KINDS = (
    GateKind.IDLE, GateKind.PREP_0, GateKind.PREP_PLUS, GateKind.MEAS_X, GateKind.MEAS_Y, GateKind.MEAS_Z,
    GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.Y_HALF, GateKind.Y_HALF_DAG,
    GateKind.Z_HALF, GateKind.Z_HALF_DAG, GateKind.CNOT, GateKind.CY, GateKind.CZ,
)

# Stages of the |H> preparation that the starred variant runs with detect-mode EC
STARRED_STAGES = ('hprep', 'hmeas')


def location_group(kind: GateKind) -> str:
    if kind is GateKind.PREP_H:
        return 'H'
    if kind.arity == 2:
        return 'two_qubit'
    if kind.is_prep:
        return 'prep'
    if kind.is_measurement:
        return 'meas'
    if kind is GateKind.IDLE:
        return 'idle'
    return 'single'


def _effects(kind: GateKind, rates: Mapping[str, float]) -> List[Tuple[float, Effect]]:
    """Turn per-class logical rates into a location channel"""
    rates = {cls: max(rate, 0.0) for cls, rate in rates.items() if set(cls) != {'I'}}
    if 'total' in rates:
        support = fault_support(kind)
        return [(rates['total'] / len(support), effect) for effect in support if rates['total'] > 0]
    if kind.is_measurement:
        total = sum(rates.values())
        return [(total, MEASUREMENT_FLIP)] if total > 0 else []
    channel = []
    for cls, rate in sorted(rates.items()):
        if rate <= 0:
            continue
        if len(cls) != kind.arity:
            raise ValueError(f"class '{cls}' does not fit a {kind.name} location")
        channel.append((rate, PauliString.from_label(cls)))
    return channel


@dataclass
class LiftedNoise:
    """Location noise taken from lower-level logical failure rates"""
    p: float
    channels: Dict[GateKind, List[Tuple[float, Effect]]] = field(default_factory=dict)

    def __post_init__(self):
        for kind, channel in self.channels.items():
            if any(prob < 0 for prob, _ in channel):
                raise ProbabilityOverflowError(f"negative probability at {kind.name}")
            total = sum(prob for prob, _ in channel)
            if total >= 1.0:
                raise ProbabilityOverflowError(f"{kind.name} failure probability {total:.3f} at p={self.p:.3e}")

    def channel(self, kind: GateKind) -> List[Tuple[float, Effect]]:
        if kind not in self.channels:
            raise KeyError(f"no lifted noise for {kind.name} locations")
        return self.channels[kind]

    def total_probability(self, kind: GateKind) -> float:
        return sum(prob for prob, _ in self.channel(kind))

    def for_stage(self, stage: str) -> 'LiftedNoise':
        return self


@dataclass
class StagedNoise:
    """A default noise model with replacements for named stages"""
    default: object
    per_stage: Dict[str, object] = field(default_factory=dict)

    @property
    def p(self) -> float:
        return self.default.p

    def channel(self, kind: GateKind):
        return self.default.channel(kind)

    def for_stage(self, stage: str):
        return self.per_stage.get(stage, self.default)


@dataclass
class ComposedFit:
    """A Rec model stacked depth times: classes evaluated at Gamma^(depth-1)"""
    fit: ErrorModelFit
    depth: int = 1

    @property
    def name(self) -> str:
        return f"{self.fit.name}^{self.depth}"

    @property
    def error_classes(self) -> List[str]:
        return self.fit.error_classes

    def _point(self, p: float) -> float:
        if self.depth <= 1:
            return p
        return gamma_recursion(self.fit, p, self.depth - 1)[-1]

    def evaluate(self, cls: str, p: float) -> float:
        return self.fit.evaluate(cls, self._point(p))

    def total(self, p: float) -> float:
        return self.fit.total(self._point(p))

    def check_range(self, p: float) -> None:
        self.fit.check_range(self._point(p))


def level_lift(fits: Mapping[str, object], p: float) -> LiftedNoise:
    """
    Evaluate every model at p and install it as location noise.

    Models are looked up by kind value (e.g. 'CNOT', 'PREPH') and then by
    location group ('two_qubit', 'prep', 'meas', 'idle', 'single', 'H').
    """
    channels = {}
    for kind in GateKind:
        fit = fits.get(kind.value) or fits.get(location_group(kind))
        if fit is None:
            continue
        fit.check_range(p)
        channels[kind] = _effects(kind, {cls: fit.evaluate(cls, p) for cls in fit.error_classes})
    logger.debug(f"Lifted noise at p={p:.3e} for {len(channels)} location kinds")
    return LiftedNoise(p, channels)


# Level-1 Rec simulation

class RecProtocol(Protocol):
    """
    One encoded location followed by its trailing Steane EC.

    Preparations use the flagged |0>/|+> preparation; measurements are
    transversal and decoded classically.
    """

    def __init__(self, kind: GateKind, ec_mode: str = 'correct'):
        self.kind = kind
        self.ec_mode = ec_mode
        self.name = f"rec_{kind.value}" + ('_detect' if ec_mode == 'detect' else '')
        self.clifford_only = True
        self.num_qubits = 17 if kind.arity == 2 else (11 if kind.is_prep else 10)
        self.data = tuple(range(14)) if kind.arity == 2 else tuple(range(7))
        if kind in (GateKind.PREP_0, GateKind.MEAS_Z, GateKind.MEAS_Y):
            self.reference = (KET_0,)
        elif kind in (GateKind.PREP_PLUS, GateKind.MEAS_X):
            self.reference = (KET_PLUS,)
        else:
            self.reference = ()

    @property
    def code(self) -> StabilizerCode:
        return steane()

    def layer(self) -> Circuit:
        """The transversal location itself"""
        if self.kind.arity == 2:
            circuit = Circuit(f"transversal_{self.kind.value}", 14)
            circuit.step(*(Location(self.kind, (q, q + 7)) for q in range(7)))
            return circuit
        circuit = Circuit(f"transversal_{self.kind.value}", 7)
        circuit.step(*(Location(self.kind, (q,)) for q in range(7)))
        return circuit

    def _ec_blocks(self) -> List[SteaneEC]:
        if self.kind.arity == 2:
            return [SteaneEC(self.ec_mode, tuple(range(7)) + (14, 15, 16)),
                    SteaneEC(self.ec_mode, tuple(range(7, 14)) + (14, 15, 16))]
        return [SteaneEC(self.ec_mode)]

    def circuits(self) -> List[Circuit]:
        return [self.layer()]

    def execute(self, ex: Executor) -> ProtocolResult:
        if self.kind.is_measurement:
            record = ex.run(self.layer(), range(7), 'rec')
            return self._result(ex, True, outcomes=[record[k] for k in sorted(record)])
        if self.kind.is_prep:
            FtPrep('0' if self.kind is GateKind.PREP_0 else '+').execute(ex)
        else:
            ex.run(self.layer(), self.data, 'rec')
        accepted = all(ec.apply(ex) for ec in self._ec_blocks())
        return self._result(ex, accepted)

    def frame_error(self, ex: Executor, result: ProtocolResult) -> PauliString:
        if not self.kind.is_measurement:
            return ex.error(self.data)
        flipped = [q for q, outcome in enumerate(result.outcomes) if outcome == -1]
        if self.kind is GateKind.MEAS_X:
            return PauliString.z_type(7, flipped)
        return PauliString.x_type(7, flipped)


def fit_rec_models(p_values: Sequence[float], trials: int, seed: int, threads: int = 1,
                   kinds: Sequence[GateKind] = CLIFFORD_REC_KINDS, ec_mode: str = 'correct',
                   exponents: Sequence[int] = (2,), idle_divisor: float = 100.0) -> Dict[str, ErrorModelFit]:
    """Per-class Rec failure polynomials from frame-simulated sweeps, keyed by kind value"""
    fits = {}
    for kind in kinds:
        protocol = RecProtocol(kind, ec_mode)
        results = [run_trials(protocol, NoiseModel(p, idle_divisor), trials, seed, threads) for p in p_values]
        classes = sorted({cls for r in results for cls in r.class_counts
                          if cls != UNCLASSIFIED and set(cls) != {'I'}})
        terms = {}
        residuals = {}
        for cls in classes:
            points = []
            for r in results:
                est = RateEstimate.from_counts(r.class_counts.get(cls, 0), r.accepted)
                points.append((r.p, est.value, est.err))
            fit = fit_error_model(points, exponents, name=protocol.name, cls=cls)
            terms.update(fit.terms)
            residuals.update(fit.residuals)
        fits[kind.value] = ErrorModelFit(protocol.name, terms, valid_p_max=max(p_values), residuals=residuals)
        logger.info(f"{protocol.name}: fitted {len(classes)} logical classes")
    return fits


def h_fits_by_level(fits: Mapping[str, ErrorModelFit], starred: bool = False) -> Dict[int, ErrorModelFit]:
    """|H>-preparation models per level from a fits file (detect-l1, detect-l2[-starred], ...)"""
    levels = {}
    for level in (1, 2, 3):
        name = f"detect-l{level}"
        if starred and level > 1 and f"{name}-starred" in fits:
            name = f"{name}-starred"
        if name in fits:
            levels[level] = fits[name]
    return levels


def noise_for_level(level: int, p: float, rec_fits: Optional[Mapping[str, ErrorModelFit]] = None,
                    h_fits: Optional[Mapping[int, ErrorModelFit]] = None,
                    starred_rec_fits: Optional[Mapping[str, ErrorModelFit]] = None,
                    idle_divisor: float = 100.0):
    """
    Location noise for simulating the level-1 circuits at a given level.

    Level 1 is the physical model. Higher levels replace Clifford locations
    by level-(level-1) Rec models and |H> preparations, T and T^dagger by the
    level-(level-1) |H>-preparation model.
    """
    if level <= 1:
        return NoiseModel(p, idle_divisor=idle_divisor)
    if not rec_fits or not h_fits or (level - 1) not in h_fits:
        raise ValueError(f"level {level} needs Rec models and a level-{level - 1} |H> model")
    h_fit = h_fits[level - 1]

    def lifted(recs):
        fits = {name: ComposedFit(fit, level - 1) for name, fit in recs.items()}
        for kind in (GateKind.PREP_H, GateKind.T, GateKind.T_DAG):
            fits[kind.value] = h_fit
        return level_lift(fits, p)

    default = lifted(rec_fits)
    if not starred_rec_fits:
        return default
    inner = lifted(starred_rec_fits)
    return StagedNoise(default, {stage: inner for stage in STARRED_STAGES})


def protocol_for_level(name: str, level: int) -> Protocol:
    """Above level 1 the detection scheme takes its T gates from |H> resources"""
    if level >= 2 and name == 'detect':
        return DetectScheme(gadget_t=True)
    return get_protocol(name)
