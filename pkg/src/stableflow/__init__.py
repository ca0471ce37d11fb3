"""Stable flows in preference-ordered networks via the preflow method.

Provides the basic and O(nm) fast solvers, stability verification for
flows / gamma-preflows / quasiflows, the reductions behind the quasiflow
generalizations, lattice operations on stable flows, and a brute-force
oracle for desk-scale instances.
"""

from .accel import NUMBA_ENABLED
from .errors import (
    BadCapacity,
    BadPreferencePermutation,
    CrossCheckFailure,
    DegenerateCycle,
    DuplicateEdge,
    EdgeIntoSource,
    EdgeOutOfSink,
    InfeasibleParameters,
    InstanceParseError,
    InstanceTooLarge,
    IterationGuardExceeded,
    LoopEdge,
    MixedOrientation,
    ModeMismatch,
    NetworkValidationError,
    NoPositiveInEdge,
    NotACirculation,
    NotAPreflow,
    PartitionViolation,
    PreferenceListOnTerminal,
    StableFlowError,
    StateReconstructionFailed,
    TerminalOverlap,
)
from .flow import (
    FlowAssignment,
    FlowClass,
    classify,
    compute_excesses,
    format_flow,
    is_free,
    is_middle,
    is_saturated,
    parse_flow,
    value_of,
)
from .io import parse_allocation, parse_instance, serialize_instance
from .lattice import (
    DiffCycle,
    DiffDecomposition,
    classify_components,
    complete_preflow,
    decompose_difference,
    dominates,
    join_meet,
    terminal_agreement,
)
from .network import (
    AllocationInstance,
    Network,
    build_network,
    from_allocation,
    random_instance,
)
from .oracle import (
    CrossCheckReport,
    StableSet,
    cross_check,
    definition_stable,
    enumerate_stable,
)
from .quasiflow import (
    BoundsSpec,
    QuasiflowSolution,
    ReductionMapping,
    reduce_beta_gamma,
    reduce_gamma,
    solve_quasiflow,
    solve_quasiflow_full,
)
from .solver_basic import SolverState, balance, initial_iteration, push, run_basic
from .solver_fast import (
    BigIterationOutcome,
    FastState,
    GammaGraph,
    ProperWalk,
    TreeForest,
    advance_big_iteration,
    build_gamma,
    cancel_cycle,
    drain_trees,
    run_fast,
    start_fast,
)
from .stability import (
    StabilityMode,
    StabilityWitness,
    find_witness,
    is_fully_blocking,
    is_stable,
)

__version__ = "0.1.0"
