"""Exception hierarchy for the stableflow package."""


class StableFlowError(Exception):
    """Base class for all stableflow errors."""


# -- network construction / validation --------------------------------------

class NetworkValidationError(StableFlowError):
    """An instance violates a structural invariant of the network model."""


class EdgeIntoSource(NetworkValidationError):
    pass


class EdgeOutOfSink(NetworkValidationError):
    pass


class DuplicateEdge(NetworkValidationError):
    pass


class LoopEdge(NetworkValidationError):
    pass


class BadCapacity(NetworkValidationError):
    pass


class TerminalOverlap(NetworkValidationError):
    pass


class BadPreferencePermutation(NetworkValidationError):
    pass


class PreferenceListOnTerminal(NetworkValidationError):
    pass


class InfeasibleParameters(StableFlowError):
    """Random-instance parameters cannot produce a legal network."""


# -- verification ------------------------------------------------------------

class ModeMismatch(StableFlowError):
    """Assignment does not satisfy the precondition of the requested mode."""


class NotAPreflow(StableFlowError):
    pass


# -- solvers -----------------------------------------------------------------

class SolverError(StableFlowError):
    pass


class IterationGuardExceeded(SolverError):
    """Safety valve tripped; indicates a solver bug, not a user error."""


class NoPositiveInEdge(SolverError):
    """Balancing found no positive in-edge; state is not a preflow."""


class PartitionViolation(SolverError):
    """An edge is both active and critical; solver state is corrupt."""


class DegenerateCycle(SolverError):
    """A proper cycle admitted no positive shift; solver state is corrupt."""


class TraceOverflow(SolverError):
    pass


# -- lattice / decomposition -------------------------------------------------

class NotACirculation(StableFlowError):
    """Difference of the two assignments is not a circulation; the inputs
    were not a pair of flows agreeing on terminal-incident edges."""


class MixedOrientation(StableFlowError):
    """A difference component carries both left and right evidence; the
    inputs were not both stable."""


class StateReconstructionFailed(StableFlowError):
    """Preflow completion could not produce a verified stable flow."""


# -- oracle ------------------------------------------------------------------

class InstanceTooLarge(StableFlowError):
    pass


class CrossCheckFailure(StableFlowError):
    def __init__(self, claim: str, detail: str = ""):
        self.claim = claim
        super().__init__(f"{claim}: {detail}" if detail else claim)


# -- text formats ------------------------------------------------------------

class InstanceParseError(StableFlowError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")
