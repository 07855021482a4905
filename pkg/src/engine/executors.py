"""
Executors: state-vector (sampled or scripted) and Pauli-frame
"""
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.circuits.circuit import Circuit, condition_met, outcome_key
from src.circuits.frame import flips, propagate
from src.circuits.protocols import Executor, Record
from src.codes.decoder import encode_into
from src.codes.stabilizer import StabilizerCode
from src.errors import FrameUnavailableError
from src.pauli.noise import Effect, FaultEvent, FaultLocation, sample_fault
from src.pauli.paulistring import PauliString
from src.statevec.gates import GateKind
from src.statevec.simulator import StateVector, apply_gate, apply_pauli, project
from src.utils.config import TOLERANCES

# (stage, occurrence, timestep, slot)
SiteKey = Tuple[str, int, int, int]
Scope = Callable[[GateKind], bool]


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """
    Independent counter-based stream for one trial.

    There is one Philox stream per (seed, trial). Fault draws, outcome draws
    and decoder draws consume it in execution order, so a trial replays
    exactly whatever thread runs it.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, trial))))


def _everywhere(kind: GateKind) -> bool:
    return True


class _Sampling:
    """Fault and outcome choices shared by the sampled executors"""

    def __init__(self, noise=None, rng: Optional[np.random.Generator] = None, scope: Optional[Scope] = None):
        self.noise = noise
        self.rng = rng if rng is not None else np.random.default_rng()
        self.scope = scope or _everywhere
        self.fault_count = 0

    def sample(self, stage: str, location: FaultLocation) -> Optional[FaultEvent]:
        if self.noise is None or not self.scope(location.kind):
            return None
        fault = sample_fault(location, self.noise.for_stage(stage), self.rng.random())
        if fault is not None:
            self.fault_count += 1
        return fault


class StateVectorExecutor(Executor):
    """Exact state-vector execution with sampled faults and Born-rule outcomes"""

    def __init__(self, num_qubits: int, noise=None, rng: Optional[np.random.Generator] = None,
                 scope: Optional[Scope] = None):
        super().__init__(num_qubits)
        self.state = StateVector.zero_state(num_qubits)
        self.sampling = _Sampling(noise, rng, scope)

    @property
    def fault_count(self) -> int:
        return self.sampling.fault_count

    def _fault(self, key: SiteKey, location: FaultLocation) -> Optional[FaultEvent]:
        return self.sampling.sample(key[0], location)

    def _choose(self, prob_plus: float) -> int:
        if prob_plus >= 1 - TOLERANCES.branch:
            return +1
        if prob_plus <= TOLERANCES.branch:
            return -1
        return +1 if self.sampling.rng.random() < prob_plus else -1

    def _measure(self, qubit: int, basis: str) -> int:
        prob_plus, plus_state = project(self.state, qubit, basis, +1)
        outcome = self._choose(prob_plus)
        if outcome == +1:
            self.state = plus_state
        else:
            _, self.state = project(self.state, qubit, basis, -1)
        return outcome

    def _execute(self, circuit: Circuit, mapping: List[int], site: Tuple[str, int]) -> Record:
        record: Record = {}
        for t, slot, loc in circuit.locations():
            qubits = tuple(mapping[q] for q in loc.qubits)
            kind = loc.kind if condition_met(loc.cond, record) else GateKind.IDLE
            fault = self._fault((site[0], site[1], t, slot), FaultLocation(t, slot, kind, qubits))
            if kind.is_measurement:
                outcome = self._measure(qubits[0], kind.basis)
                if fault is not None and fault.is_flip:
                    outcome = -outcome
                record[outcome_key(t, loc.qubits[0])] = outcome
                continue
            self.state = apply_gate(self.state, kind, qubits)
            if fault is not None and not fault.is_flip:
                self.state = apply_pauli(self.state, fault.effect.embed(self.num_qubits, qubits))
        return record

    def correct(self, pauli: PauliString, qubits: Sequence[int]) -> None:
        self.state = apply_pauli(self.state, pauli.embed(self.num_qubits, qubits))

    def hadamards(self, qubits: Sequence[int]) -> None:
        for q in qubits:
            self.state = apply_gate(self.state, GateKind.H, [q])

    def prepare_logical(self, code: StabilizerCode, qubits: Sequence[int], ket: np.ndarray) -> None:
        self.state = encode_into(self.state, code, qubits, ket)

    def error(self, qubits: Sequence[int]) -> PauliString:
        raise FrameUnavailableError("state-vector runs are judged by ideal decoding, not by a Pauli frame")


class InjectedExecutor(StateVectorExecutor):
    """
    Given faults only, with measurement outcomes taken from a script.

    Past the script the likelier outcome is followed (ties to +1) and the
    other one, when possible, is noted as an unexplored branch. Every
    executed site is listed so a fault-free run enumerates the sites.
    """

    def __init__(self, num_qubits: int, faults: Optional[Dict[SiteKey, Effect]] = None,
                 script: Sequence[int] = ()):
        super().__init__(num_qubits)
        self.faults = dict(faults or {})
        self.script = tuple(script)
        self.outcomes: List[int] = []
        self.branches: List[Tuple[int, int]] = []
        self.probability = 1.0
        self.sites: List[Tuple[SiteKey, FaultLocation]] = []

    @property
    def fault_count(self) -> int:
        return len(self.faults)

    def _fault(self, key: SiteKey, location: FaultLocation) -> Optional[FaultEvent]:
        self.sites.append((key, location))
        effect = self.faults.get(key)
        return FaultEvent(location, effect) if effect is not None else None

    def _choose(self, prob_plus: float) -> int:
        index = len(self.outcomes)
        if index < len(self.script):
            outcome = self.script[index]
        else:
            outcome = +1 if prob_plus >= 0.5 else -1
            other = 1 - prob_plus if outcome == +1 else prob_plus
            if other > TOLERANCES.branch:
                self.branches.append((index, -outcome))
        self.probability *= prob_plus if outcome == +1 else 1 - prob_plus
        self.outcomes.append(outcome)
        return outcome

    def alternatives(self) -> List[Tuple[int, ...]]:
        """Scripts reaching each branch this run passed by"""
        return [tuple(self.outcomes[:index]) + (outcome,) for index, outcome in self.branches]


class FrameExecutor(Executor):
    """
    Pauli-frame execution of Clifford protocols.

    Outcomes are reported relative to the fault-free reference run, so the
    register is assumed to start in the ideal input state.
    """

    def __init__(self, num_qubits: int, noise=None, rng: Optional[np.random.Generator] = None,
                 scope: Optional[Scope] = None, faults: Optional[Dict[SiteKey, Effect]] = None):
        super().__init__(num_qubits)
        self.x = np.zeros(num_qubits, dtype=bool)
        self.z = np.zeros(num_qubits, dtype=bool)
        self.sampling = _Sampling(noise, rng, scope)
        self.faults = dict(faults or {})

    @property
    def fault_count(self) -> int:
        return self.sampling.fault_count + len(self.faults)

    def _fault(self, key: SiteKey, location: FaultLocation) -> Optional[FaultEvent]:
        effect = self.faults.get(key)
        if effect is not None:
            return FaultEvent(location, effect)
        return self.sampling.sample(key[0], location)

    def _execute(self, circuit: Circuit, mapping: List[int], site: Tuple[str, int]) -> Record:
        record: Record = {}
        for t, slot, loc in circuit.locations():
            qubits = tuple(mapping[q] for q in loc.qubits)
            kind = loc.kind if condition_met(loc.cond, record) else GateKind.IDLE
            fault = self._fault((site[0], site[1], t, slot), FaultLocation(t, slot, kind, qubits))
            if kind.is_measurement:
                flipped = flips(self.x, self.z, kind, qubits[0])
                if fault is not None and fault.is_flip:
                    flipped = not flipped
                record[outcome_key(t, loc.qubits[0])] = -1 if flipped else +1
                continue
            propagate(self.x, self.z, kind, qubits)
            if fault is not None and not fault.is_flip:
                for i, q in enumerate(qubits):
                    self.x[q] ^= fault.effect.x_bits[i]
                    self.z[q] ^= fault.effect.z_bits[i]
        return record

    def correct(self, pauli: PauliString, qubits: Sequence[int]) -> None:
        idx = list(qubits)
        self.x[idx] ^= pauli.x_bits
        self.z[idx] ^= pauli.z_bits

    def hadamards(self, qubits: Sequence[int]) -> None:
        for q in qubits:
            self.x[q], self.z[q] = self.z[q], self.x[q]

    def prepare_logical(self, code: StabilizerCode, qubits: Sequence[int], ket: np.ndarray) -> None:
        # The reference run already holds the ideal state
        return None

    def error(self, qubits: Sequence[int]) -> PauliString:
        idx = list(qubits)
        return PauliString(self.x[idx], self.z[idx])
