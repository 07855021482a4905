"""
Qubit and gate overhead of the concatenated |H> preparation schemes.

Detection-scheme costs follow the level recursion for the Hadamard
measurement circuit with parallel resource-state preparation; MEK costs
are built on the same primitives (|0>, |+>, EC, T) plus teleportation.
"""
import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import binom

from src.analysis.fits import ErrorModelFit, round2_piecewise, round3_distilled
from src.errors import ProbabilityOverflowError, UnreachableTargetError

logger = logging.getLogger(__name__)

MAX_LEVEL = 3
# Full MEK needs one more level than detection to reach the same targets
MEK_MAX_LEVEL = 4
M_CAP = 10_000
AT_LEAST_ONE = 'one'
AT_LEAST_TWO = 'two'

# Acceptance targets for the parallel preparations, largest first
TARGET_GRID = (1 - 1e-3, 0.99, 0.98, 0.97, 0.96)

EC_QUBITS = 10
STATE_PREP_QUBITS = 11

# Time steps of the level-l Hadamard measurement needing one / two resource states
ONE_RESOURCE_STEPS = 3
TWO_RESOURCE_STEPS = 6


def solve_parallel_counts(p_a: float, target: float, mode: str = AT_LEAST_ONE) -> int:
    """Smallest m such that at least one (or two) of m preparations passes with probability >= target"""
    if not 0 < p_a <= 1:
        raise ValueError(f"acceptance must be in (0, 1], got {p_a}")
    if not 0 < target < 1:
        raise ValueError(f"target must be in (0, 1), got {target}")
    if mode not in (AT_LEAST_ONE, AT_LEAST_TWO):
        raise ValueError(f"unknown mode '{mode}'")
    needed = 1 if mode == AT_LEAST_ONE else 2
    counts = np.arange(needed, M_CAP + 1)
    tails = binom.sf(needed - 1, counts, p_a)
    reached = np.flatnonzero(tails >= target - 1e-12)
    if reached.size == 0:
        raise UnreachableTargetError(f"p_A={p_a:.4g} cannot reach {target} with at most {M_CAP} preparations")
    return int(counts[reached[0]])


@dataclass
class RepeatAverages:
    """Average executions per run of the repeatable rounds at one level"""
    n_rec1: float = 1.0
    n_rec2: float = 1.0
    n_ed2: float = 1.0
    n_zs0: float = 0.0
    n_xs0: float = 0.0
    n_zs_plus: float = 0.0
    n_xs_plus: float = 0.0

    def __post_init__(self):
        if self.n_rec1 < 1:
            raise ValueError("EC1 runs at least once")
        for name, value in asdict(self).items():
            if value < 0:
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def from_records(cls, ec: Mapping, zero: Optional[Mapping] = None,
                     plus: Optional[Mapping] = None) -> 'RepeatAverages':
        """From simulated records (CSV columns n_rec1, n_rec2, n_ed2, n_zs, n_xs)"""
        zero = zero or {}
        plus = plus or {}
        return cls(
            n_rec1=max(float(ec.get('n_rec1', 1.0)), 1.0),
            n_rec2=float(ec.get('n_rec2', 1.0)),
            n_ed2=float(ec.get('n_ed2', 1.0)),
            n_zs0=float(zero.get('n_zs', 0.0)),
            n_xs0=float(zero.get('n_xs', 0.0)),
            n_zs_plus=float(plus.get('n_zs', 0.0)),
            n_xs_plus=float(plus.get('n_xs', 0.0)),
        )


@dataclass
class OverheadInputs:
    """
    Everything the detection-scheme calculators need at one physical rate.

    acceptance[l] is p_A^{H(l)}(p). m1/m2 and targets may be pinned per level;
    levels left out are grid-searched.
    """
    level: int
    p: float
    acceptance: Dict[int, float]
    repeats: Dict[int, RepeatAverages] = field(default_factory=dict)
    m1: Dict[int, int] = field(default_factory=dict)
    m2: Dict[int, int] = field(default_factory=dict)
    targets: Dict[int, Tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.level <= MAX_LEVEL:
            raise ValueError(f"level must be between 1 and {MAX_LEVEL}")
        for level, m in self.m1.items():
            if m < 1:
                raise ValueError(f"m1 at level {level} must be at least 1")
        for level, m in self.m2.items():
            if m < 2:
                raise ValueError(f"m2 at level {level} must be at least 2")

    def accept(self, level: int) -> float:
        if level not in self.acceptance:
            raise ValueError(f"no acceptance for level {level}")
        value = self.acceptance[level]
        if value <= 0:
            raise ProbabilityOverflowError(f"level-{level} acceptance {value:.3e} at p={self.p:.3e}")
        return value

    def repeats_at(self, level: int) -> RepeatAverages:
        return self.repeats.get(level, RepeatAverages())

    @classmethod
    def from_fits(cls, level: int, p: float, h_fits: Mapping[int, ErrorModelFit],
                  repeats: Optional[Dict[int, RepeatAverages]] = None) -> 'OverheadInputs':
        acceptance = {l: h_fits[l].acceptance(p) for l in range(1, level + 1)}
        return cls(level=level, p=p, acceptance=acceptance, repeats=dict(repeats or {}))


@dataclass
class OverheadReport:
    """Expected qubit and gate counts; each total is the sum of its breakdown"""
    scheme: str
    level: int
    p: float
    qubit_breakdown: Dict[str, float] = field(default_factory=dict)
    gate_breakdown: Dict[str, float] = field(default_factory=dict)
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def qubits(self) -> float:
        return float(sum(self.qubit_breakdown.values()))

    @property
    def gates(self) -> float:
        return float(sum(self.gate_breakdown.values()))

    def to_dict(self) -> Dict:
        return {
            'scheme': self.scheme,
            'level': self.level,
            'p': self.p,
            'qubits': self.qubits,
            'gates': self.gates,
            'qubit_breakdown': dict(self.qubit_breakdown),
            'gate_breakdown': dict(self.gate_breakdown),
            'details': dict(self.details),
        }


# Qubits

@dataclass(frozen=True)
class _ParallelChoice:
    m1: int
    m2: int
    target1: float
    target2: float
    qubits: float


def _parallel_choice(inputs: OverheadInputs, level: int, previous: float) -> _ParallelChoice:
    p_prev = inputs.accept(level - 1)
    p_a = inputs.accept(level)
    pinned = inputs.targets.get(level)
    grid = [pinned] if pinned else [(t1, t2) for t1 in TARGET_GRID for t2 in TARGET_GRID]
    best: Optional[_ParallelChoice] = None
    for target1, target2 in grid:
        # A pinned count fixes its acceptance to the achieved binomial tail
        m1 = inputs.m1.get(level)
        if m1:
            target1 = float(binom.sf(0, m1, p_prev))
        else:
            m1 = solve_parallel_counts(p_prev, target1, AT_LEAST_ONE)
        m2 = inputs.m2.get(level)
        if m2:
            target2 = float(binom.sf(1, m2, p_prev))
        else:
            m2 = solve_parallel_counts(p_prev, target2, AT_LEAST_TWO)
        numerator = (m1 + 2 * m2) * previous + 9 * STATE_PREP_QUBITS ** (level - 1)
        qubits = numerator / (p_a * target1 ** ONE_RESOURCE_STEPS * target2 ** TWO_RESOURCE_STEPS)
        # Strict improvement only, so ties keep the larger targets
        if best is None or qubits < best.qubits:
            best = _ParallelChoice(m1, m2, target1, target2, qubits)
    logger.debug(f"level {level}: m1={best.m1} m2={best.m2} targets=({best.target1}, {best.target2})")
    return best


def qubit_overhead_detect(inputs: OverheadInputs) -> OverheadReport:
    """Average qubit count of the detection scheme at inputs.level"""
    report = OverheadReport('detect', inputs.level, inputs.p)
    qubits = EC_QUBITS / inputs.accept(1)
    report.qubit_breakdown = {'ec': qubits}
    for level in range(2, inputs.level + 1):
        choice = _parallel_choice(inputs, level, qubits)
        scale = 1.0 / (inputs.accept(level) * choice.target1 ** ONE_RESOURCE_STEPS
                       * choice.target2 ** TWO_RESOURCE_STEPS)
        report.qubit_breakdown = {
            'resource_states': (choice.m1 + 2 * choice.m2) * qubits * scale,
            'ancilla_states': 9 * STATE_PREP_QUBITS ** (level - 1) * scale,
        }
        qubits = choice.qubits
        report.details.update({f"m1_l{level}": choice.m1, f"m2_l{level}": choice.m2,
                               f"p_ap1_l{level}": choice.target1, f"p_ap2_l{level}": choice.target2})
    return report


# Gates

@dataclass
class Primitives:
    """Gate counts of the building blocks at one level"""
    level: int
    ec1: float
    ec2: float
    ec: float
    zero: float
    plus: float
    zs: float
    xs: float
    t: float
    h_nf: float
    h_meas: float
    ed: float
    h: float

    @classmethod
    def physical(cls) -> 'Primitives':
        return cls(level=0, ec1=0.0, ec2=0.0, ec=0.0, zero=1.0, plus=1.0, zs=0.0, xs=0.0, t=1.0,
                   h_nf=0.0, h_meas=0.0, ed=0.0, h=1.0)


def _level_one(rep: RepeatAverages, p_a: float) -> Primitives:
    # Level-0 locations all cost one gate
    ec1 = 46 + 14 + 2 * (1 + 1) + 1 + 1
    ec2 = 46 + 14 + 2 * (1 + 1) + 1 + 1
    zs = 48 + 11 + 3 * (1 + 1)
    xs = 48 + 11 + 3 * (1 + 1)
    zero = 73 + 15 + 8 + 3 * (1 + 1) + 1 + rep.n_zs0 * zs + rep.n_xs0 * xs
    plus = 73 + 15 + 8 + 3 * (1 + 1) + 1 + rep.n_zs_plus * zs + rep.n_xs_plus * xs
    h_nf = 3 * (1 + 1) + 1 + 11 + 6
    h_meas = 2 + 7 * (1 + 1 + 1) + 1 + 1 + 191 + 1 + 1
    ed = ec1 + rep.n_ed2 * ec2
    return Primitives(
        level=1, ec1=ec1, ec2=ec2, ec=rep.n_rec1 * ec1 + rep.n_rec2 * ec2, zero=zero, plus=plus, zs=zs, xs=xs,
        t=1 + 3 * 0 + 4 * 7, h_nf=h_nf, h_meas=h_meas, ed=ed, h=(h_nf + h_meas + ed) / p_a,
    )


def _next_level(prev: Primitives, rep: RepeatAverages, p_a: float) -> Primitives:
    level = prev.level + 1
    block = 7 ** level
    ec1 = 2 * prev.zero + prev.plus + 73 * prev.ec + 63 * block
    ec2 = 2 * prev.plus + prev.zero + 66 * prev.ec + 63 * block
    zs = 3 * prev.zero + 62 * block + 70 * prev.ec
    xs = 3 * prev.plus + 62 * block + 70 * prev.ec
    zero = 8 * prev.zero + 3 * prev.plus + 100 * prev.ec + 92 * block + rep.n_zs0 * zs + rep.n_xs0 * xs
    plus = 8 * prev.plus + 3 * prev.zero + 100 * prev.ec + 92 * block + rep.n_zs_plus * zs + rep.n_xs_plus * xs
    t = prev.h + 3 * prev.ec + 4 * block
    h_nf = 3 * (prev.plus + prev.zero) + prev.h + 28 * prev.ec + 17 * 7 ** (level - 1)
    h_meas = prev.plus + prev.zero + 202 * block + 14 * t + 129 * prev.ec
    ed = ec1 + rep.n_ed2 * ec2
    return Primitives(
        level=level, ec1=ec1, ec2=ec2, ec=rep.n_rec1 * ec1 + rep.n_rec2 * ec2, zero=zero, plus=plus,
        zs=zs, xs=xs, t=t, h_nf=h_nf, h_meas=h_meas, ed=ed, h=(h_nf + h_meas + ed) / p_a,
    )


def gate_primitives(inputs: OverheadInputs) -> List[Primitives]:
    """Primitives for levels 0..inputs.level"""
    chain = [Primitives.physical(), _level_one(inputs.repeats_at(1), inputs.accept(1))]
    for level in range(2, inputs.level + 1):
        chain.append(_next_level(chain[-1], inputs.repeats_at(level), inputs.accept(level)))
    return chain


def gate_overhead_detect(inputs: OverheadInputs) -> OverheadReport:
    """Average gate count of the detection scheme at inputs.level"""
    top = gate_primitives(inputs)[-1]
    p_a = inputs.accept(inputs.level)
    return OverheadReport('detect', inputs.level, inputs.p, gate_breakdown={
        'h_nonft': top.h_nf / p_a,
        'h_measurement': top.h_meas / p_a,
        'error_detection': top.ed / p_a,
    }, details={'n_ec': top.ec, 'n_zero': top.zero, 'n_plus': top.plus, 'n_t': top.t})


def detect_overhead(inputs: OverheadInputs) -> OverheadReport:
    report = qubit_overhead_detect(inputs)
    gates = gate_overhead_detect(inputs)
    report.gate_breakdown = gates.gate_breakdown
    report.details.update(gates.details)
    return report


# MEK

@dataclass
class MekAcceptance:
    """Acceptance of one distillation round at levels 2 to 4 and for detect-prepared inputs at level 3"""
    level2: float = 1.0
    level3: float = 1.0
    level4: float = 1.0
    hybrid3: float = 1.0

    def at(self, level: int) -> float:
        return {2: self.level2, 3: self.level3, 4: self.level4}[level]

    @classmethod
    def from_fits(cls, fits: Mapping[str, ErrorModelFit], p: float) -> 'MekAcceptance':
        return cls(level2=fits['mek-round1-l2'].acceptance(p),
                   level3=round2_piecewise(fits).acceptance(p),
                   level4=round3_distilled(fits).acceptance(p),
                   hybrid3=fits['mek-hybrid-l3'].acceptance(p))


def _teleport_decoder(chain: Sequence[Primitives], level: int) -> float:
    top = chain[level]
    if level == 2:
        low = chain[1]
        return (4 * (top.plus + low.plus) + 3 * (top.zero + low.zero) + 16 * (low.ec + top.ec)
                + 8 * (7 ** 2 + 7))
    return 4 * top.plus + 3 * top.zero + 16 * top.ec + 8 * 7 ** level


def _lift_gates(chain: Sequence[Primitives], level: int) -> float:
    """Teleporting one |H> from level-1 to level, decoder included"""
    top, low = chain[level], chain[level - 1]
    return (top.plus + top.zero + 2 * top.ec + 3 * low.ec + 7 ** level + 7 ** (level - 1)
            + _teleport_decoder(chain, level))


def _mek_round_gates(chain: Sequence[Primitives], level: int, teleports: float) -> float:
    top = chain[level]
    return 4 * teleports + 2 * top.plus + top.zero + 48 * 7 ** level + 177 * top.ec


def mek_overhead(variant: str, p: float, accept: MekAcceptance, inputs: Optional[OverheadInputs] = None,
                 level: int = MAX_LEVEL) -> OverheadReport:
    """
    Per-output-state cost of a distillation round.

    'full' teleports physical |H> states up to level 2 and distils, then
    lifts the outputs one level and distils again up to level (at most 4);
    'hybrid' teleports detect-prepared level-2 states to level 3.
    inputs supplies the Clifford primitives and, for 'hybrid', the level-2
    detection-scheme costs.
    """
    if variant not in ('full', 'hybrid'):
        raise ValueError(f"unknown MEK variant '{variant}'")
    if variant == 'hybrid':
        level = 3
    if not 2 <= level <= MEK_MAX_LEVEL:
        raise ValueError(f"MEK is costed at levels 2 to {MEK_MAX_LEVEL}")
    for name, value in asdict(accept).items():
        if value <= 0:
            raise ProbabilityOverflowError(f"MEK acceptance {name} is {value:.3e} at p={p:.3e}")
    inputs = inputs or OverheadInputs(level=3, p=p, acceptance={1: 1.0, 2: 1.0, 3: 1.0})
    chain = gate_primitives(OverheadInputs(
        level=3, p=p, acceptance=inputs.acceptance, repeats=inputs.repeats,
        m1=inputs.m1, m2=inputs.m2, targets=inputs.targets))
    for top in range(MAX_LEVEL + 1, level + 1):
        # Distillation never consumes the level-4 |H> preparation; its acceptance stays at one
        chain.append(_next_level(chain[-1], inputs.repeats_at(top), 1.0))
    report = OverheadReport(f"mek-{variant}", level, p)

    teleport_q02 = 2 * STATE_PREP_QUBITS ** 2 + 1
    states_q2 = 3 * STATE_PREP_QUBITS ** 2
    teleport_g02 = (chain[2].plus + chain[2].zero + 2 * chain[2].ec + _teleport_decoder(chain, 2)
                    + 7 ** 2 + 4)
    mek2_gates = _mek_round_gates(chain, 2, teleport_g02) / accept.level2
    report.details.update({'n_q02': teleport_q02, 'n_g02': teleport_g02})

    if variant == 'full' and level == 2:
        report.qubit_breakdown = {'states': states_q2 / accept.level2 / 2,
                                  'teleports': 4 * teleport_q02 / accept.level2 / 2}
        report.gate_breakdown = {'round': mek2_gates / 2}
        report.details['numerator'] = states_q2 + 4 * teleport_q02
        return report

    if variant == 'hybrid':
        detect = qubit_overhead_detect(OverheadInputs(
            level=2, p=p, acceptance=inputs.acceptance, repeats=inputs.repeats,
            m1=inputs.m1, m2=inputs.m2, targets=inputs.targets))
        rounds = [(3, accept.hybrid3, detect.qubits, chain[2].h)]
    else:
        rounds = [(top, accept.at(top), None, None) for top in range(3, level + 1)]

    # Per-state cost of the round below, fed into the next teleport
    per_state_qubits = (states_q2 + 4 * teleport_q02) / accept.level2 / 2
    per_state_gates = mek2_gates / 2
    for top, a, fed_qubits, fed_gates in rounds:
        states_q = 3 * STATE_PREP_QUBITS ** top
        teleport_q = 2 * STATE_PREP_QUBITS ** top + (per_state_qubits if fed_qubits is None else fed_qubits)
        teleport_g = _lift_gates(chain, top) + (per_state_gates if fed_gates is None else fed_gates)
        numerator = states_q + 4 * teleport_q
        report.qubit_breakdown = {'states': states_q / a / 2, 'teleports': 4 * teleport_q / a / 2}
        report.gate_breakdown = {'round': _mek_round_gates(chain, top, teleport_g) / a / 2}
        report.details.update({f"n_q{top - 1}{top}": teleport_q, f"n_g{top - 1}{top}": teleport_g,
                               'numerator': numerator})
        per_state_qubits = report.qubits
        per_state_gates = report.gates
    return report


def teleport_bound(k: int, p: float, bounds: Sequence[float], decoder_locations: int) -> float:
    """
    Upper bound on the failure of teleporting a physical |H> to level k.

    bounds holds the level-1..k gate failure bounds p^(j); p^(0) is p.
    """
    if len(bounds) != k:
        raise ValueError(f"expected {k} level bounds, got {len(bounds)}")
    levels = [p] + list(bounds)
    if any(b > a for a, b in zip(levels, levels[1:])):
        raise ValueError("level bounds must not increase with level")
    return 3 * levels[k] + decoder_locations * sum(levels[:k]) + 4 * p


# Level choice

def _logical_error(model, p: float) -> Optional[float]:
    try:
        model.check_range(p)
    except ProbabilityOverflowError:
        return None
    return model.total(p)


def scheme_models(scheme: str, fits: Mapping[str, ErrorModelFit], starred: bool = False) -> Dict[int, object]:
    """Output error models per level for 'detect', 'mek' or 'hybrid'"""
    if scheme == 'detect':
        models = {}
        for level in range(1, MAX_LEVEL + 1):
            name = f"detect-l{level}"
            if starred and f"{name}-starred" in fits:
                name = f"{name}-starred"
            if name in fits:
                models[level] = fits[name]
        return models
    if scheme == 'mek':
        return {2: fits['mek-round1-l2'], 3: round2_piecewise(fits), 4: round3_distilled(fits)}
    if scheme == 'hybrid':
        return {3: fits['mek-hybrid-l3']}
    raise ValueError(f"unknown scheme '{scheme}'")


def min_level_for_target(p: float, target: float, scheme: str, fits: Mapping[str, ErrorModelFit],
                         starred: bool = False) -> int:
    """Smallest level whose output logical error is at most target"""
    for level, model in sorted(scheme_models(scheme, fits, starred).items()):
        error = _logical_error(model, p)
        if error is not None and error <= target:
            return level
    top = max(scheme_models(scheme, fits, starred))
    raise UnreachableTargetError(f"{scheme} cannot reach {target:.1e} at p={p:.2e} within level {top}")


def compare_schemes(p: float, target: float, fits: Mapping[str, ErrorModelFit],
                    repeats: Optional[Dict[int, RepeatAverages]] = None,
                    starred: bool = False) -> List[OverheadReport]:
    """Detect, full-MEK and hybrid costs at the lowest level meeting target; unreachable schemes are skipped"""
    h_fits = scheme_models('detect', fits, starred)
    reports = []
    for scheme in ('detect', 'mek', 'hybrid'):
        try:
            level = min_level_for_target(p, target, scheme, fits, starred)
        except UnreachableTargetError as exc:
            logger.info(str(exc))
            continue
        inputs = OverheadInputs.from_fits(MAX_LEVEL, p, h_fits, repeats)
        if scheme == 'detect':
            inputs.level = level
            report = detect_overhead(inputs)
        else:
            variant = 'full' if scheme == 'mek' else 'hybrid'
            report = mek_overhead(variant, p, MekAcceptance.from_fits(fits, p), inputs, level)
        report.details['target'] = target
        reports.append(report)
    logger.debug(f"p={p:.2e} target={target:.0e}: " + ", ".join(
        f"{r.scheme} {r.qubits:.4g} qubits" for r in reports))
    return reports
