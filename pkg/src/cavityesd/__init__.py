"""Two qubits coupled to a damped cavity mode: master-equation dynamics,
concurrence, and entanglement-sudden-death analysis with and without the
rotating-wave approximation."""

__version__ = "0.1.0"

from .entanglement import (
    BellState,
    QubitState,
    bell_transform,
    concurrence_bell,
    concurrence_block,
    concurrence_wootters,
    partial_trace_cavity,
)
from .errors import (
    CavityEsdError,
    ConfigParseError,
    IntegrationError,
    LayoutError,
    NumericalDomainError,
    ValidationError,
)
from .evolution import FullState, Trajectory, evolve, lindblad_rhs
from .experiment import (
    AuditResult,
    ConvergenceReport,
    DeadInterval,
    SweepResult,
    SweepSpec,
    convergence_audit,
    detect_dead_intervals,
    run_sweep,
)
from .model import (
    CouplingPair,
    Mode,
    SystemConfig,
    build_hamiltonian,
    coupling_constants,
    initial_state,
)
from .operators import (
    Operator,
    SpaceLayout,
    annihilation,
    embed,
    qubit_basis_state,
    total_excitation,
)

__all__ = [
    "__version__",
    "AuditResult",
    "BellState",
    "CavityEsdError",
    "ConfigParseError",
    "ConvergenceReport",
    "CouplingPair",
    "DeadInterval",
    "FullState",
    "IntegrationError",
    "LayoutError",
    "Mode",
    "NumericalDomainError",
    "Operator",
    "QubitState",
    "SpaceLayout",
    "SweepResult",
    "SweepSpec",
    "SystemConfig",
    "Trajectory",
    "ValidationError",
    "annihilation",
    "bell_transform",
    "build_hamiltonian",
    "concurrence_bell",
    "concurrence_block",
    "concurrence_wootters",
    "convergence_audit",
    "coupling_constants",
    "detect_dead_intervals",
    "embed",
    "evolve",
    "initial_state",
    "lindblad_rhs",
    "partial_trace_cavity",
    "qubit_basis_state",
    "run_sweep",
    "total_excitation",
]
