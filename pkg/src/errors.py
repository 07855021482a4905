"""
Exception hierarchy for flagmagic
"""


class FlagMagicError(Exception):
    """Base class for all flagmagic errors"""


class GateArityError(FlagMagicError):
    """Gate applied to the wrong number of qubits"""


class QubitIndexError(FlagMagicError):
    """Qubit index out of range or repeated"""


class DimensionMismatchError(FlagMagicError):
    """Operands of incompatible size"""


class DecoderError(FlagMagicError):
    """Residual state left the code space after correction"""


class ClassificationError(FlagMagicError):
    """Decoded state is not a Pauli image of the reference"""


class ChannelReconstructionError(FlagMagicError):
    """Output density matrix is not reproduced by a Pauli channel on rho_H"""


class IndistinguishableFaultsError(FlagMagicError):
    """Two logically inequivalent single-fault errors share a lookup key"""

    def __init__(self, message: str, first=None, second=None):
        super().__init__(message)
        self.first = first
        self.second = second


class ProbabilityOverflowError(FlagMagicError):
    """Fitted error model leaves its valid range at this p"""


class FitError(FlagMagicError):
    """Least-squares fit could not be performed"""


class UnreachableTargetError(FlagMagicError):
    """Parallel preparation count would exceed the cap"""


class CircuitFormatError(FlagMagicError):
    """Malformed circuit text"""


class UnmeasuredOutcomeError(FlagMagicError):
    """A predicate referenced a measurement that has not happened"""


class EnumerationBudgetError(FlagMagicError):
    """Fault enumeration would exceed the configured budget"""


class FrameUnavailableError(FlagMagicError):
    """Executor keeps no Pauli frame to read a residual error from"""
