"""Flatness-preserving discretization of dynamically linearizable control systems."""

from .diffeo import Diffeomorphism, TangentVector, numeric_jacobian, tangent_lift, tangent_lift_inverse
from .discmap import AxiomReport, DiscretizationMap, alpha_map, check_axioms, lift_map
from .errors import (
    ArgumentError,
    ChartError,
    ConvergenceError,
    DomainError,
    FlatdiscError,
    SingularityError,
    StepsizeError,
)
from .scheme import (
    DiscreteScheme,
    LinearDiscretization,
    build_generic_stepper,
    build_lifted_stepper,
    discretize_linear,
    measure_order,
)
from .systems import ControlSystem, ExtendedSystem, LinearSystem, brunovsky, controllability_rank, eval_dynamics

__version__ = "0.1.0"
