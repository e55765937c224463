"""Heat rectification and amplification in networks of coupled two-level systems."""
from .closedform import (
    ReducedTransistorState,
    amplification_approx,
    diode_current_approx,
    reduce_degenerate,
    reduced_currents,
    transistor_currents_approx,
    transistor_populations_approx,
)
from .dynamics import (
    PreciseSteadyState,
    RateMatrix,
    bose_einstein,
    build_rate_matrix,
    evolve,
    precise_steady_state,
    rate_coefficients,
    relaxation_time,
    steady_state,
)
from .errors import (
    DegenerateInput,
    InvalidNetwork,
    NoBracket,
    NoInteriorMinimum,
    NonConvergenceWarning,
    RegimeWarning,
    SingularSystem,
)
from .model import (
    BasisState,
    TlsNetwork,
    Transition,
    TransitionSet,
    allowed_transitions,
    diode,
    enumerate_states,
    transistor,
)
from .observables import (
    AmplificationReport,
    CurrentReport,
    amplification,
    find_jm_minimum,
    find_jm_zero,
    heat_currents,
    net_rate,
    rectification_ratio,
    solution_currents,
    solve_currents,
)

__version__ = "0.1.0"

__all__ = [
    "allowed_transitions",
    "amplification",
    "amplification_approx",
    "AmplificationReport",
    "BasisState",
    "bose_einstein",
    "build_rate_matrix",
    "CurrentReport",
    "DegenerateInput",
    "diode",
    "diode_current_approx",
    "enumerate_states",
    "evolve",
    "find_jm_minimum",
    "find_jm_zero",
    "heat_currents",
    "InvalidNetwork",
    "net_rate",
    "NoBracket",
    "NoInteriorMinimum",
    "NonConvergenceWarning",
    "precise_steady_state",
    "PreciseSteadyState",
    "rate_coefficients",
    "RateMatrix",
    "rectification_ratio",
    "reduce_degenerate",
    "reduced_currents",
    "ReducedTransistorState",
    "RegimeWarning",
    "relaxation_time",
    "SingularSystem",
    "solution_currents",
    "solve_currents",
    "steady_state",
    "TlsNetwork",
    "transistor",
    "transistor_currents_approx",
    "transistor_populations_approx",
    "Transition",
    "TransitionSet",
]
