"""Spin-1/2 Stern-Gerlach quantum eraser: closed-form evolution, a split-operator
oracle, and fringe analysis of the screen patterns."""

from .core import (
    DEFAULT_PARAMS,
    Axis,
    Branch,
    ComplexGaussian,
    DensityField,
    FringeReport,
    GridSpec,
    ParamError,
    PhysParams,
    SpinorState,
    gaussian_eval,
    validate_params,
)
from .analytic import (
    basis_rewrite_sx,
    basis_rewrite_sz,
    density_eraser,
    density_no_eraser,
    eraser_evolve,
    evaluate_state,
    free_evolve,
    initial_state,
    screen_grid,
    whichway_evolve,
)
from .oracle import HamiltonianSpec, SpinorGrid, compare_l2, discretize, run_schedule, split_step
from .fringes import analyze

__version__ = "0.1.0"
