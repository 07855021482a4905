"""
Monte-Carlo trials: fault sampling, post-selection, ideal decoding and aggregation
"""
import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import beta

from src.circuits.protocols import Protocol
from src.codes.decoder import SyndromeTable, ideal_decode, lookup_table
from src.codes.stabilizer import StabilizerCode, syndrome
from src.engine.executors import FrameExecutor, StateVectorExecutor, trial_rng
from src.errors import ChannelReconstructionError, ClassificationError, DecoderError, DimensionMismatchError
from src.pauli.noise import NoiseModel
from src.pauli.paulistring import PauliString
from src.statevec.gates import KET_H, PAULI_X, PAULI_Z
from src.statevec.simulator import DensityMatrix, StateVector, accumulate_density, apply_pauli, partial_trace
from src.utils.config import TOLERANCES

logger = logging.getLogger(__name__)

# Trials per work item; fixed so results do not depend on the thread count
CHUNK = 256
# Below this many successes or failures, intervals are exact
RARE_COUNT = 25
UNCLASSIFIED = 'unclassified'
PAULI_CLASSES = ('I', 'X', 'Y', 'Z')

REPEAT_STAGES = {'n_rec1': 'ec1', 'n_rec2': 'ec2', 'n_ed2': 'ed2', 'n_zs': 'zs', 'n_xs': 'xs'}
CSV_COLUMNS = ['p', 'trials', 'accept', 'accept_err', 'px', 'px_err', 'py', 'py_err', 'pz', 'pz_err',
               'n_rec1', 'n_rec2', 'n_ed2', 'n_zs', 'n_xs']

_LETTERS = {(False, False): 'I', (True, False): 'X', (True, True): 'Y', (False, True): 'Z'}
_RHO_H = np.outer(KET_H, KET_H.conj())

_tables: Dict[str, SyndromeTable] = {}


def _table(code: StabilizerCode) -> SyndromeTable:
    if code.name not in _tables:
        _tables[code.name] = lookup_table(code)
    return _tables[code.name]


# Statistics

def clopper_pearson(k: int, n: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Exact binomial interval for k successes in n trials"""
    alpha = 1.0 - confidence
    low = 0.0 if k == 0 else float(beta.ppf(alpha / 2, k, n - k + 1))
    high = 1.0 if k == n else float(beta.ppf(1 - alpha / 2, k + 1, n - k))
    return low, high


@dataclass
class RateEstimate:
    """A binomial rate with its standard error and 95% interval"""
    value: float
    err: float
    low: float
    high: float
    method: str = 'normal'

    @classmethod
    def from_counts(cls, k: int, n: int) -> 'RateEstimate':
        if n == 0:
            return cls(0.0, 0.0, 0.0, 1.0, 'empty')
        value = k / n
        if min(k, n - k) < RARE_COUNT:
            low, high = clopper_pearson(k, n)
            return cls(value, (high - low) / 2, low, high, 'clopper-pearson')
        err = math.sqrt(value * (1 - value) / n)
        return cls(value, err, max(0.0, value - 1.96 * err), min(1.0, value + 1.96 * err))

    def to_dict(self) -> Dict:
        return {'value': self.value, 'err': self.err, 'low': self.low, 'high': self.high, 'method': self.method}


# Logical classification

def classify_logical(decoded: StateVector, reference: StateVector) -> str:
    """The Pauli P with |<decoded|P reference>| = 1"""
    if decoded.num_qubits != 1 or reference.num_qubits != 1:
        raise DimensionMismatchError("classification works on single-qubit outputs")
    for letter in PAULI_CLASSES:
        image = apply_pauli(reference, PauliString.from_label(letter))
        if abs(abs(decoded.overlap(image)) - 1.0) <= TOLERANCES.classify:
            return letter
    raise ClassificationError("decoded state is not a Pauli image of the reference")


def _insensitive(ket: np.ndarray) -> Tuple[bool, bool]:
    """Whether X and Z act trivially (up to phase) on a single-qubit ket"""
    ket = np.asarray(ket, dtype=complex)

    def trivial(op):
        return abs(abs(np.vdot(ket, op @ ket)) - 1.0) <= TOLERANCES.classify

    return trivial(PAULI_X), trivial(PAULI_Z)


def frame_logical_class(error: PauliString, code: StabilizerCode,
                        reference: Sequence[np.ndarray] = ()) -> str:
    """
    Logical class per code block of a residual Pauli after ideal correction.

    A block with a reference ket drops the components that act trivially
    on it, e.g. only Z matters for |+>.
    """
    letters = []
    for b, start in enumerate(range(0, error.num_qubits, code.n)):
        block = error.restrict(range(start, start + code.n))
        residual = _table(code).lookup(syndrome(code, block)) * block
        x = not residual.commutes_with(code.logical_z[0])
        z = not residual.commutes_with(code.logical_x[0])
        if b < len(reference):
            x_trivial, z_trivial = _insensitive(reference[b])
            x, z = x and not x_trivial, z and not z_trivial
        letters.append(_LETTERS[(x, z)])
    return ''.join(letters)


# Channel extraction

def h_channel_state(p_x: float, p_z: float) -> DensityMatrix:
    """(1 - p_x - p_z) rho_H + p_x X rho_H X + p_z Z rho_H Z"""
    rho = ((1 - p_x - p_z) * _RHO_H + p_x * PAULI_X @ _RHO_H @ PAULI_X
           + p_z * PAULI_Z @ _RHO_H @ PAULI_Z)
    return DensityMatrix(rho)


def extract_channel(rho: DensityMatrix) -> Tuple[float, float]:
    """Pauli-channel parameters (p_x, p_z) reproducing a single-qubit output from rho_H"""
    if rho.entries.shape != (2, 2):
        raise DimensionMismatchError(f"expected a 2x2 density matrix, got {rho.entries.shape}")
    root2 = math.sqrt(2)
    p_x = (1 + root2 - 2 * root2 * rho.entries[0, 0].real) / 2
    p_z = (1 - 2 * root2 * rho.entries[0, 1].real) / 2
    residual = float(np.max(np.abs(h_channel_state(p_x, p_z).entries - rho.entries)))
    if residual > TOLERANCES.channel:
        raise ChannelReconstructionError(f"Pauli channel on rho_H misses the output by {residual:.3e}")
    return float(p_x), float(p_z)


# Single trials

@dataclass
class TrialResult:
    """One sampled run: the post-selection verdict and, if accepted, what came out"""
    accepted: bool
    outcome: Optional[str] = None
    state: Optional[StateVector] = None
    repeats: Counter = field(default_factory=Counter)
    fault_count: int = 0

    def to_dict(self) -> Dict:
        return {
            'accepted': self.accepted,
            'outcome': self.outcome,
            'repeats': dict(self.repeats),
            'fault_count': self.fault_count,
        }


def run_trial(protocol: Protocol, noise, seed: int, trial: int) -> TrialResult:
    rng = trial_rng(seed, trial)
    code = protocol.code

    if protocol.clifford_only:
        ex = FrameExecutor(protocol.num_qubits, noise, rng, scope=protocol.noisy)
        result = protocol.execute(ex)
        outcome = None
        if result.accepted:
            outcome = frame_logical_class(protocol.frame_error(ex, result), code, protocol.reference)
        return TrialResult(result.accepted, outcome, None, result.counters, ex.fault_count)

    ex = StateVectorExecutor(protocol.num_qubits, noise, rng, scope=protocol.noisy)
    result = protocol.execute(ex)
    if not result.accepted:
        return TrialResult(False, repeats=result.counters, fault_count=ex.fault_count)

    draws = rng.random(len(code.syndrome_order))
    try:
        decoded, _ = ideal_decode(ex.state, code, protocol.data, table=_table(code), draws=draws)
        if code.k > 1:
            return TrialResult(True, None, decoded, result.counters, ex.fault_count)
        outcome = classify_logical(decoded, StateVector.from_product([protocol.reference[0]]))
    except (ClassificationError, DecoderError) as exc:
        logger.debug(f"{protocol.name} trial {trial}: {exc}")
        outcome = UNCLASSIFIED
    return TrialResult(True, outcome, None, result.counters, ex.fault_count)


# Aggregation

@dataclass
class Tally:
    """Mergeable counters over a block of trials"""
    trials: int = 0
    accepted: int = 0
    classes: Counter = field(default_factory=Counter)
    repeats: Counter = field(default_factory=Counter)
    faults: int = 0
    density: Optional[np.ndarray] = None
    density_count: int = 0
    raw: List[Dict] = field(default_factory=list)

    def add(self, result: TrialResult) -> None:
        self.trials += 1
        self.faults += result.fault_count
        self.repeats.update(result.repeats)
        if result.accepted:
            self.accepted += 1
            if result.outcome is not None:
                self.classes[result.outcome] += 1

    def add_states(self, states: List[StateVector]) -> None:
        if not states:
            return
        block = accumulate_density(states).entries * len(states)
        self.density = block if self.density is None else self.density + block
        self.density_count += len(states)

    def merge(self, other: 'Tally') -> None:
        self.trials += other.trials
        self.accepted += other.accepted
        self.classes.update(other.classes)
        self.repeats.update(other.repeats)
        self.faults += other.faults
        if other.density is not None:
            self.density = other.density if self.density is None else self.density + other.density
            self.density_count += other.density_count
        self.raw.extend(other.raw)


def _run_chunk(protocol: Protocol, noise, seed: int, bounds: Tuple[int, int], keep_raw: bool) -> Tally:
    tally = Tally()
    states = []
    for trial in range(*bounds):
        result = run_trial(protocol, noise, seed, trial)
        tally.add(result)
        if result.state is not None:
            states.append(result.state)
        if keep_raw:
            tally.raw.append({'trial': trial, **result.to_dict()})
    tally.add_states(states)
    return tally


@dataclass
class EstimateResult:
    """Acceptance, logical error rates and repeat averages at one noise strength"""
    protocol: str
    p: float
    trials: int
    accepted: int
    class_counts: Dict[str, int] = field(default_factory=dict)
    repeat_totals: Dict[str, int] = field(default_factory=dict)
    channels: List[Tuple[float, float]] = field(default_factory=list)
    mean_faults: float = 0.0
    raw: List[Dict] = field(default_factory=list)

    @classmethod
    def from_tally(cls, protocol: str, p: float, tally: Tally) -> 'EstimateResult':
        channels = []
        if tally.density is not None:
            rho = DensityMatrix(tally.density / tally.density_count)
            k = int(round(math.log2(rho.dim)))
            channels = [extract_channel(partial_trace(rho, q, k)) for q in range(k)]
        return cls(protocol=protocol, p=p, trials=tally.trials, accepted=tally.accepted,
                   class_counts=dict(tally.classes), repeat_totals=dict(tally.repeats), channels=channels,
                   mean_faults=tally.faults / tally.trials if tally.trials else 0.0, raw=tally.raw)

    @property
    def acceptance(self) -> RateEstimate:
        return RateEstimate.from_counts(self.accepted, self.trials)

    @property
    def unclassified(self) -> int:
        return self.class_counts.get(UNCLASSIFIED, 0)

    def rate(self, letter: str) -> RateEstimate:
        """Per-Pauli logical error rate among accepted trials"""
        if self.channels:
            if letter == 'Y':
                return RateEstimate(0.0, 0.0, 0.0, 0.0, 'channel')
            value = self.channels[0][0 if letter == 'X' else 1]
            n = max(self.accepted, 1)
            err = math.sqrt(max(value * (1 - value), 0.0) / n)
            return RateEstimate(value, err, max(0.0, value - 1.96 * err), min(1.0, value + 1.96 * err), 'channel')
        k = sum(count for outcome, count in self.class_counts.items() if outcome == letter)
        return RateEstimate.from_counts(k, self.accepted)

    @property
    def logical_error(self) -> RateEstimate:
        if self.channels:
            value = sum(self.channels[0])
            n = max(self.accepted, 1)
            err = math.sqrt(max(value * (1 - value), 0.0) / n)
            return RateEstimate(value, err, max(0.0, value - 1.96 * err), min(1.0, value + 1.96 * err), 'channel')
        failures = sum(count for outcome, count in self.class_counts.items()
                       if outcome not in ('I', UNCLASSIFIED) and set(outcome) != {'I'})
        return RateEstimate.from_counts(failures, self.accepted)

    @property
    def repeat_stats(self) -> Dict[str, float]:
        return {column: self.repeat_totals.get(stage, 0) / self.trials if self.trials else 0.0
                for column, stage in REPEAT_STAGES.items()}

    def to_record(self) -> Dict[str, float]:
        """Flat record with the CSV columns"""
        accept = self.acceptance
        record = {'p': self.p, 'trials': self.trials, 'accept': accept.value, 'accept_err': accept.err}
        for letter in 'XYZ':
            rate = self.rate(letter)
            record[f"p{letter.lower()}"] = rate.value
            record[f"p{letter.lower()}_err"] = rate.err
        record.update(self.repeat_stats)
        return record

    def to_dict(self) -> Dict:
        return {
            'protocol': self.protocol,
            **self.to_record(),
            'accepted': self.accepted,
            'class_counts': dict(self.class_counts),
            'unclassified': self.unclassified,
            'channels': [list(c) for c in self.channels],
            'mean_faults': self.mean_faults,
        }


def run_trials(protocol: Protocol, noise, trials: int, seed: int, threads: int = 1,
               keep_raw: bool = False) -> EstimateResult:
    """
    Independent trials of protocol under noise, merged in trial order.

    Each trial draws from its own stream keyed by (seed, trial), so the
    result is identical for any thread count.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    chunks = [(start, min(start + CHUNK, trials)) for start in range(0, trials, CHUNK)]

    def work(bounds):
        return _run_chunk(protocol, noise, seed, bounds, keep_raw)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            tallies = list(pool.map(work, chunks))
    else:
        tallies = [work(bounds) for bounds in chunks]

    total = Tally()
    for tally in tallies:
        total.merge(tally)

    result = EstimateResult.from_tally(protocol.name, float(getattr(noise, 'p', 0.0)), total)
    if result.unclassified:
        logger.warning(f"{protocol.name}: {result.unclassified} accepted outputs were not a Pauli image "
                       f"of the reference")
    logger.info(f"{protocol.name} p={result.p:.3e}: accept {result.acceptance.value:.4f}, "
                f"logical error {result.logical_error.value:.3e} over {trials} trials")
    return result


def estimate_repeat_stats(protocol: Protocol, noise, trials: int, seed: int, threads: int = 1) -> Dict[str, float]:
    """Mean executions per run of each repeatable EC and syndrome round"""
    return run_trials(protocol, noise, trials, seed, threads).repeat_stats


def sweep_idle_divisor(protocol: Protocol, p: float, divisors: Sequence[float], trials: int, seed: int,
                       threads: int = 1) -> List[EstimateResult]:
    """One estimate per idle-noise divisor at fixed p"""
    results = []
    for divisor in divisors:
        logger.debug(f"idle divisor {divisor}")
        results.append(run_trials(protocol, NoiseModel(p, idle_divisor=divisor), trials, seed, threads))
    return results
