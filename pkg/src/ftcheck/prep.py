"""
Fault-tolerance of state preparation by exhaustive fault injection.

Every fault set of weight s <= t is injected into an exact simulation and
every measurement branch is followed. An accepted branch passes when each
syndrome outcome is fixed by a correction of weight at most s and the
ideally decoded state equals the fault-free output.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.circuits.protocols import CorrectScheme, Protocol, ProtocolResult
from src.codes.decoder import SyndromeTable, extract_logical, lookup_table, syndrome_branches
from src.codes.stabilizer import StabilizerCode
from src.engine.executors import InjectedExecutor, SiteKey
from src.errors import DecoderError, EnumerationBudgetError
from src.ftcheck.report import DECODING, WEIGHT, FtReport, Violation
from src.pauli.noise import FaultEvent, FaultLocation, location_faults
from src.statevec.simulator import StateVector, apply_pauli
from src.utils.config import TOLERANCES

logger = logging.getLogger(__name__)

FaultSet = Tuple[Tuple[SiteKey, FaultEvent], ...]

# Final logical correction for each triple of Hadamard-measurement outcomes
CASE_TABLE = {'+++': 'I', '---': 'Y', '+--': 'Y', '-++': 'I', '+-+': 'I', '++-': 'I'}


@dataclass
class Leaf:
    """One fully resolved measurement branch"""
    probability: float
    result: ProtocolResult
    state: StateVector
    outcomes: Tuple[int, ...]
    sites: List[Tuple[SiteKey, FaultLocation]]

    @property
    def pattern(self) -> str:
        return signs(self.outcomes)


def signs(outcomes: Sequence[int]) -> str:
    return ''.join('+' if o > 0 else '-' for o in outcomes)


def explore(protocol: Protocol, faults: FaultSet = ()) -> List[Leaf]:
    """Run every measurement branch reachable with non-negligible probability"""
    effects = {key: fault.effect for key, fault in faults}
    leaves = []
    pending: List[Tuple[int, ...]] = [()]
    while pending:
        script = pending.pop()
        ex = InjectedExecutor(protocol.num_qubits, effects, script)
        result = protocol.execute(ex)
        leaves.append(Leaf(ex.probability, result, ex.state, tuple(ex.outcomes), ex.sites))
        pending.extend(ex.alternatives())
    return leaves


def _noisy_sites(protocol: Protocol, leaves: Sequence[Leaf]) -> Dict[SiteKey, FaultLocation]:
    sites = {}
    for leaf in leaves:
        for key, location in leaf.sites:
            if protocol.noisy(location.kind):
                sites.setdefault(key, location)
    return sites


def _singles(sites: Dict[SiteKey, FaultLocation]) -> List[FaultSet]:
    return [((key, fault),) for key, location in sites.items() for fault in location_faults(location)]


def _pair_count(sites: Dict[SiteKey, FaultLocation]) -> int:
    sizes = [len(location_faults(location)) for location in sites.values()]
    return (sum(sizes) ** 2 - sum(s * s for s in sizes)) // 2


def _all_pairs(sites: Dict[SiteKey, FaultLocation]) -> Iterator[FaultSet]:
    items = list(sites.items())
    for i, (key_a, loc_a) in enumerate(items):
        for key_b, loc_b in items[i + 1:]:
            for first in location_faults(loc_a):
                for second in location_faults(loc_b):
                    yield (key_a, first), (key_b, second)


def _sampled_pairs(sites: Dict[SiteKey, FaultLocation], count: int, seed: int) -> Iterator[FaultSet]:
    rng = np.random.default_rng(seed)
    items = list(sites.items())
    for _ in range(count):
        i, j = rng.choice(len(items), size=2, replace=False)
        (key_a, loc_a), (key_b, loc_b) = items[i], items[j]
        faults_a, faults_b = location_faults(loc_a), location_faults(loc_b)
        yield ((key_a, faults_a[rng.integers(len(faults_a))]),
               (key_b, faults_b[rng.integers(len(faults_b))]))


def _describe(faults: FaultSet) -> Tuple[str, ...]:
    return tuple(f"{key[0]}#{key[1]}:{fault.describe()}" for key, fault in faults)


class _Checker:
    """Criteria applied to each accepted branch"""

    def __init__(self, protocol: Protocol, code: StabilizerCode):
        self.protocol = protocol
        self.code = code
        self.table: SyndromeTable = lookup_table(code)
        self.reference = StateVector.from_product(list(protocol.reference))

    def check(self, leaf: Leaf, faults: FaultSet) -> List[Violation]:
        if not leaf.result.accepted:
            return []
        s = len(faults)
        data = self.protocol.data
        violations = []
        for prob, bits, projected in syndrome_branches(leaf.state, self.code, data):
            if prob <= TOLERANCES.branch:
                continue
            correction = self.table.lookup(bits)
            record = f"{leaf.pattern}/{''.join(str(int(b)) for b in bits)}"
            wx, wz = self.code.reduced_weight(correction)
            if max(wx, wz) > s:
                violations.append(Violation(_describe(faults), correction.to_label(), record, WEIGHT,
                                            f"weight ({wx}, {wz}) after {s} fault(s)"))
            corrected = apply_pauli(projected, correction.embed(projected.num_qubits, data))
            try:
                decoded = extract_logical(corrected, self.code, data)
            except DecoderError as exc:
                violations.append(Violation(_describe(faults), correction.to_label(), record, DECODING, str(exc)))
                continue
            if not decoded.equal_up_to_phase(self.reference):
                violations.append(Violation(_describe(faults), correction.to_label(), record, DECODING,
                                            "decoded state differs from the fault-free output"))
        return violations


LeafCheck = Callable[[Leaf, FaultSet], List[Violation]]


def _run(protocol: Protocol, code: StabilizerCode, t: int, budget: Optional[int], subsample: Optional[int],
         seed: int, extra: Optional[LeafCheck] = None, target: str = '') -> FtReport:
    if t not in (1, 2):
        raise ValueError("t must be 1 or 2")
    checker = _Checker(protocol, code)
    report = FtReport(target or protocol.name)

    def visit(faults: FaultSet) -> List[Leaf]:
        leaves = explore(protocol, faults)
        total = sum(leaf.probability for leaf in leaves)
        if abs(total - 1.0) > TOLERANCES.branch_sum:
            report.notes.append(f"{_describe(faults)}: branch probabilities sum to {total:.12f}")
            logger.warning(f"{protocol.name}: branch probabilities sum to {total:.12f}")
        for leaf in leaves:
            report.violations.extend(checker.check(leaf, faults))
            if extra is not None:
                report.violations.extend(extra(leaf, faults))
        report.checked_fault_sets += 1
        return leaves

    first_sites = _noisy_sites(protocol, visit(()))
    singles = _singles(first_sites)
    if budget is not None and len(singles) > budget and not subsample:
        raise EnumerationBudgetError(f"{len(singles)} single faults exceed budget {budget}")
    if subsample and len(singles) > subsample:
        rng = np.random.default_rng(seed)
        chosen = rng.choice(len(singles), size=subsample, replace=False)
        singles = [singles[i] for i in sorted(chosen)]
        report.notes.append(f"single faults subsampled to {subsample}")

    second_sites: Dict[SiteKey, FaultLocation] = dict(first_sites)
    for i, faults in enumerate(singles):
        leaves = visit(faults)
        if t == 2:
            for key, location in _noisy_sites(protocol, leaves).items():
                second_sites.setdefault(key, location)
        if i % 500 == 0:
            logger.debug(f"{protocol.name}: {i}/{len(singles)} single faults checked")

    if t == 2:
        needed = _pair_count(second_sites)
        if budget is not None and needed > budget:
            if not subsample:
                raise EnumerationBudgetError(f"{needed} fault pairs exceed budget {budget}")
            pairs = _sampled_pairs(second_sites, subsample, seed)
            report.notes.append(f"fault pairs subsampled to {subsample} of {needed}")
        else:
            pairs = _all_pairs(second_sites)
        for faults in pairs:
            visit(faults)

    logger.info(f"{report.target}: {report.checked_fault_sets} fault sets, {len(report.violations)} violations")
    return report


def check_state_prep_ft(protocol: Protocol, code: Optional[StabilizerCode] = None, t: int = 1,
                        budget: Optional[int] = None, subsample: Optional[int] = None,
                        seed: int = 0) -> FtReport:
    """Both fault-tolerance criteria for every fault set of weight at most t"""
    return _run(protocol, code or protocol.code, t, budget, subsample, seed)


def verify_case_table(protocol: Optional[CorrectScheme] = None, budget: Optional[int] = None) -> FtReport:
    """
    Single-fault check of the correction scheme that also requires every
    outcome triple to be a row of CASE_TABLE with the matching logical fix.
    """
    protocol = protocol or CorrectScheme()
    seen = set()

    def rows(leaf: Leaf, faults: FaultSet) -> List[Violation]:
        triple = signs(leaf.result.outcomes)
        seen.add(triple)
        if triple not in CASE_TABLE:
            return [Violation(_describe(faults), '', triple, DECODING, "outcome pattern outside the case table")]
        if protocol.logical_fix(leaf.result.outcomes) != CASE_TABLE[triple]:
            return [Violation(_describe(faults), leaf.result.logical_fix, triple, DECODING,
                              f"expected logical fix {CASE_TABLE[triple]}")]
        return []

    report = _run(protocol, protocol.code, 1, budget, None, 0, extra=rows, target='case_table')
    report.notes.append(f"outcome patterns: {', '.join(sorted(seen))}")
    return report
