"""Exception hierarchy for the tdse package.

Two families matter for callers: ``CaseError`` (bad input data, CLI exit
code 2) and ``NumericalError`` (solver failure, CLI exit code 3).
"""


class TdseError(Exception):
    """Base class for all errors raised by this package."""


class CaseError(TdseError):
    """Invalid network case, plan, or configuration data."""


class CaseFormatError(CaseError):
    """Case file failed to parse or violates the schema."""


class DuplicateBusIdError(CaseError):
    """Two bus records share the same id."""


class DisconnectedNetworkError(CaseError):
    """The network graph is not connected."""


class NotRadialError(CaseError):
    """A distribution case is not a radial tree."""


class MissingBoundaryLinkError(CaseError):
    """A feeder has no boundary link (or more than one)."""


class ZeroImpedanceBranchError(CaseError):
    """Branch with r = x = 0 cannot be stamped into the admittance matrix."""


class PlanError(CaseError):
    """Measurement plan references an unknown element or a forbidden kind."""


class NumericalError(TdseError):
    """Numerical failure inside a solver."""


class PowerFlowDivergenceError(NumericalError):
    """A power-flow iteration exceeded its iteration budget."""


class SingularGainError(NumericalError):
    """Gain matrix is singular or indefinite."""


class RankDeficiencyError(NumericalError):
    """Normal-equation matrix does not have full column rank."""

    def __init__(self, n_states: int, rank: int, message: str | None = None):
        self.n_states = n_states
        self.rank = rank
        self.deficiency = n_states - rank
        super().__init__(
            message
            or f"rank deficient system: rank {rank} of {n_states} states "
            f"({self.deficiency} unobservable directions)"
        )


class UnobservableError(RankDeficiencyError):
    """Measurement plan does not observe the full state.

    ``rank`` is the size of the maximal observable subspace.
    """
