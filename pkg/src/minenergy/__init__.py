"""Minimum-energy open-loop inputs for discrete-time LTI systems.

The inputs can be computed from a known model (controllability matrix or
Gramian) or directly from the final states of control experiments run
with arbitrary inputs.
"""

from .datagen import (
    ExperimentSet,
    InputDesign,
    NoiseModel,
    add_noise,
    design_inputs,
    random_system,
    run_experiments,
)
from .errors import (
    AssumptionViolatedError,
    ConfigurationError,
    DimensionError,
    EmptyDataError,
    InvalidHorizonError,
    InvalidInputError,
    MinEnergyError,
)
from .estimators import (
    CombinationWeights,
    ControlSolution,
    ControlTask,
    combination_weights,
    dd_asymptotic,
    dd_kernel,
    dd_kernel_x0,
    dd_output,
    dd_pinv,
    me_ctrb,
    me_gramian,
)
from .matops import KernelBasis, RankInfo, coimage_projector, kernel_basis, pinv, rank_info
from .sysmodel import (
    LtiSystem,
    StackedInput,
    Trajectory,
    ctrb_matrix,
    gramian,
    output_ctrb_matrix,
    reachable,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolatedError",
    "CombinationWeights",
    "ConfigurationError",
    "ControlSolution",
    "ControlTask",
    "DimensionError",
    "EmptyDataError",
    "ExperimentSet",
    "InputDesign",
    "InvalidHorizonError",
    "InvalidInputError",
    "KernelBasis",
    "LtiSystem",
    "MinEnergyError",
    "NoiseModel",
    "RankInfo",
    "StackedInput",
    "Trajectory",
    "add_noise",
    "coimage_projector",
    "combination_weights",
    "ctrb_matrix",
    "dd_asymptotic",
    "dd_kernel",
    "dd_kernel_x0",
    "dd_output",
    "dd_pinv",
    "design_inputs",
    "gramian",
    "kernel_basis",
    "me_ctrb",
    "me_gramian",
    "output_ctrb_matrix",
    "pinv",
    "random_system",
    "rank_info",
    "reachable",
    "run_experiments",
    "simulate",
]
