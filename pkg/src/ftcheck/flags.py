"""
Flag properties: v <= v_max faults that leave a data error of weight above v
must raise a flag
"""
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Set, Tuple, Union

import numpy as np

from src.circuits.circuit import Circuit, Location
from src.circuits.ec import SyndromeRound
from src.circuits.frame import run_frame
from src.circuits.gadgets import HadamardMeasurement
from src.circuits.support import SpreadError, single_spreads, spread
from src.codes.stabilizer import StabilizerCode
from src.errors import EnumerationBudgetError
from src.ftcheck.report import WEIGHT, FtReport, Violation, describe_faults
from src.pauli.noise import FaultEvent, count_fault_sets, enumerate_fault_sets
from src.pauli.paulistring import PauliString
from src.statevec.gates import GateKind

logger = logging.getLogger(__name__)

Target = Union[SyndromeRound, HadamardMeasurement]


def css_weight(code: StabilizerCode, error: PauliString) -> int:
    wx, wz = code.reduced_weight(error)
    return max(wx, wz)


def check_flag_property(target: Target, code: StabilizerCode, v_max: int = 1, budget: Optional[int] = None,
                        subsample: Optional[int] = None, seed: int = 0) -> FtReport:
    """Every unflagged set of v <= v_max faults leaves a data error of reduced weight at most v"""
    if v_max not in (1, 2):
        raise ValueError("v_max must be 1 or 2")
    if isinstance(target, HadamardMeasurement):
        return _check_hadamard(target, code, v_max, budget, subsample, seed)
    return _check_round(target, code, v_max, budget)


def _round_flagged(rnd: SyndromeRound, record: Dict[str, int]) -> bool:
    # Without dedicated flag qubits the check ancillas act as flags
    return rnd.flagged(record) if rnd.flags else rnd.nontrivial(record)


def _check_round(rnd: SyndromeRound, code: StabilizerCode, v_max: int, budget: Optional[int]) -> FtReport:
    report = FtReport(rnd.circuit.name)
    data = list(range(code.n))
    for faults in enumerate_fault_sets(rnd.circuit, v_max, budget):
        report.checked_fault_sets += 1
        frame, record = run_frame(rnd.circuit, faults)
        error = frame.restrict(data)
        if _round_flagged(rnd, record):
            continue
        weight = css_weight(code, error)
        if weight > len(faults):
            report.violations.append(Violation(describe_faults(faults), error.to_label(), rnd.pattern(record),
                                               WEIGHT, f"unflagged weight {weight}"))
    logger.info(f"{rnd.circuit.name}: flag property v<={v_max}, {len(report.violations)} violations")
    return report


@dataclass(frozen=True)
class _Masks:
    """Bit-mask image of a spread for quick pair screening"""
    support: int
    hadamards: int
    fired: int


def _masks(error: SpreadError, flag_bits: Dict[str, int]) -> _Masks:
    support = 0
    for q in error.pauli.support():
        support |= 1 << q
    for q in error.arbitrary:
        support |= 1 << q
    hadamards = 0
    for q in error.hadamards:
        hadamards |= 1 << q
    fired = 0
    for name in error.fired:
        fired |= flag_bits[name]
    return _Masks(support, hadamards, fired)


def _bound(support: int, hadamards: int, full: int) -> int:
    return min(bin(support | hadamards).count('1'), bin(support | (full & ~hadamards)).count('1'))


def _exact_weight(error: SpreadError, code: StabilizerCode) -> int:
    return max(css_weight(code, branch) for branch in error.branches())


def _violation(faults: Tuple[FaultEvent, ...], error: SpreadError, weight: int) -> Violation:
    return Violation(describe_faults(faults), error.describe(), ','.join(sorted(error.fired)), WEIGHT,
                     f"unflagged weight {weight}")


def _check_hadamard(hm: HadamardMeasurement, code: StabilizerCode, v_max: int, budget: Optional[int],
                    subsample: Optional[int], seed: int) -> FtReport:
    report = FtReport(hm.circuit.name)
    singles = single_spreads(hm)
    for fault, error in singles:
        report.checked_fault_sets += 1
        if error.fired or error.weight() <= 1:
            continue
        weight = _exact_weight(error, code)
        if weight > 1:
            report.violations.append(_violation((fault,), error, weight))
    if v_max == 2:
        _check_pairs(hm, code, singles, report, budget, subsample, seed)
    logger.info(f"{hm.circuit.name}: flag property v<={v_max}, {report.checked_fault_sets} fault sets, "
                f"{len(report.violations)} violations")
    return report


def _pairs_from(singles: List[Tuple[FaultEvent, SpreadError]], subsample: Optional[int],
                seed: int, needed: int) -> Iterator[Tuple[int, int]]:
    if subsample is None:
        for i in range(len(singles)):
            for j in range(i + 1, len(singles)):
                yield i, j
        return
    rng = np.random.default_rng(seed)
    for _ in range(min(subsample, needed)):
        i, j = sorted(rng.choice(len(singles), size=2, replace=False))
        yield int(i), int(j)


def _check_pairs(hm: HadamardMeasurement, code: StabilizerCode, singles: List[Tuple[FaultEvent, SpreadError]],
                 report: FtReport, budget: Optional[int], subsample: Optional[int], seed: int) -> None:
    """
    Two-fault sets. Spreads are combined by union, which covers every branch
    of the joint spread; pairs over the bound are propagated jointly.
    """
    locations = hm.circuit.fault_locations()
    needed = count_fault_sets(locations, 2) - count_fault_sets(locations, 1)
    if budget is not None and needed > budget and subsample is None:
        raise EnumerationBudgetError(f"{needed} fault pairs exceed budget {budget}")
    full = (1 << len(hm.data)) - 1
    flag_bits = {name: 1 << i for i, name in enumerate(sorted(hm.flags))}
    masks = [_masks(error, flag_bits) for _, error in singles]
    suspects: Set[Tuple[int, int]] = set()

    if subsample is None:
        # Unflagged pairs need equal flag sets, so pairs are formed within groups
        groups: Dict[int, List[int]] = defaultdict(list)
        for i, m in enumerate(masks):
            if m.support or m.hadamards:
                groups[m.fired].append(i)
        for members in groups.values():
            for a, i in enumerate(members):
                mi = masks[i]
                for j in members[a + 1:]:
                    mj = masks[j]
                    if _bound(mi.support | mj.support, mi.hadamards ^ mj.hadamards, full) > 2:
                        suspects.add((i, j))
        report.checked_fault_sets += needed
    else:
        for i, j in _pairs_from(singles, subsample, seed, needed):
            report.checked_fault_sets += 1
            mi, mj = masks[i], masks[j]
            if mi.fired != mj.fired:
                continue
            if _bound(mi.support | mj.support, mi.hadamards ^ mj.hadamards, full) > 2:
                suspects.add((i, j))
        report.notes.append(f"fault pairs subsampled to {subsample} of {needed}")

    logger.debug(f"{hm.circuit.name}: {len(suspects)} pairs propagated jointly")
    for i, j in sorted(suspects):
        first, second = singles[i][0], singles[j][0]
        if first.location.position == second.location.position:
            continue
        joint = spread(hm, [first, second])
        if joint.fired or joint.weight() <= 2:
            continue
        weight = _exact_weight(joint, code)
        if weight > 2:
            report.violations.append(_violation((first, second), joint, weight))


# EC hooks

def canonical_component(bits: np.ndarray, group: np.ndarray) -> Tuple[int, ...]:
    """Lowest-weight, then lexicographically first, support in a stabilizer coset"""
    coset = group ^ bits.astype(np.uint8)
    weights = coset.sum(axis=1)
    best = [tuple(int(q) for q in np.flatnonzero(row)) for row in coset[weights == weights.min()]]
    return min(best)


def hook_errors(rnd: SyndromeRound, code: StabilizerCode) -> Set[Tuple[str, Tuple[int, ...]]]:
    """
    X and Z components of reduced weight >= 2 left by single faults, as
    ('X' | 'Z', canonical support) pairs.
    """
    hooks = set()
    data = list(range(code.n))
    for (fault,) in enumerate_fault_sets(rnd.circuit, 1):
        frame, _ = run_frame(rnd.circuit, [fault])
        error = frame.restrict(data)
        wx, wz = code.reduced_weight(error)
        if wx >= 2:
            hooks.add(('X', canonical_component(error.x_bits, code.x_stabilizer_group)))
        if wz >= 2:
            hooks.add(('Z', canonical_component(error.z_bits, code.z_stabilizer_group)))
    return hooks


def hook_of(letter: str, support, code: StabilizerCode) -> Tuple[str, Tuple[int, ...]]:
    bits = np.zeros(code.n, dtype=np.uint8)
    bits[list(support)] = 1
    group = code.x_stabilizer_group if letter == 'X' else code.z_stabilizer_group
    return letter, canonical_component(bits, group)


# Weight-2 components a single fault can leave behind the first EC half.
# With this visiting order the X hook on qubits 2 and 6 reads "++-" on the
# flags; the other common order reads "+--". Both keep it apart from every
# other single-fault pattern.
EC1_HOOKS = (('Z', (3, 5)), ('Z', (2, 6)), ('X', (2, 6)))


def check_hooks(rnd: SyndromeRound, code: StabilizerCode, expected=EC1_HOOKS) -> FtReport:
    """The set of single-fault hooks must equal expected, up to stabilizers"""
    report = FtReport(f"{rnd.circuit.name}_hooks")
    found = hook_errors(rnd, code)
    wanted = {hook_of(letter, support, code) for letter, support in expected}
    report.checked_fault_sets = len(rnd.circuit.fault_locations())
    for letter, support in sorted(found - wanted):
        report.violations.append(Violation((), f"{letter}{support}", '', WEIGHT, "unexpected hook"))
    for letter, support in sorted(wanted - found):
        report.violations.append(Violation((), f"{letter}{support}", '', WEIGHT, "expected hook not produced"))
    report.notes.append("hooks: " + ", ".join(f"{letter}{list(support)}" for letter, support in sorted(found)))
    return report


# Harness self-test

def without_flag_couplings(hm: HadamardMeasurement) -> HadamardMeasurement:
    """The same measurement with every CNOT onto a flag qubit replaced by idles"""
    flag_qubits = {q for q, role in hm.circuit.roles.items() if role == 'flag'}
    circuit = Circuit(f"{hm.circuit.name}_unflagged", hm.circuit.num_qubits, roles=dict(hm.circuit.roles))
    for layer in hm.circuit.timesteps:
        rebuilt = []
        for loc in layer:
            if loc.kind is GateKind.CNOT and loc.qubits[1] in flag_qubits:
                rebuilt.extend(Location(GateKind.IDLE, (q,)) for q in loc.qubits)
            else:
                rebuilt.append(loc)
        circuit.add_timestep(rebuilt, fill_idle=False)
    return HadamardMeasurement(circuit, hm.control, hm.data, hm.order, dict(hm.flags))
