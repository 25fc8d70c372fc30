"""Injectivity and stability analysis of finite frames under ReLU, saturation,
phase retrieval and gating measurements."""

from .config import DEFAULT_CONFIG, AnalysisConfig
from .errors import (
    ConstructionFailed,
    DegenerateDomain,
    DimensionMismatch,
    FrameError,
    FramelipError,
    IterationLimit,
    NoConvergence,
    NonSymmetric,
    NotInjective,
    NotPhaseRetrievable,
    NoUpperBound,
    OutsideDomain,
    TooManyIndices,
    WrongElementCount,
    ZeroDistance,
    ZeroVectorInFrame,
)
from .frames import (
    Frame,
    FrameBounds,
    bottom_eigvec,
    frame_bounds,
    load_frame,
    make_doubled,
    make_mercedes_benz,
    make_random,
    make_simplex_funtf,
    make_standard_basis,
    mask_indices,
    measure,
    save_frame,
    sub_frame_lower_bound,
    to_mask,
)
from .gating import GateOperator, gate_apply, gate_injectivity, gated_set
from .linalg import Halfspace, lp_feasible, min_norm_in_polytope, sym_eig
from .lipschitz import LipschitzReport, estimate_kappa, ratio, sweep_open_problem
from .patterns import enum_relu_patterns, enum_sat_patterns, enum_sign_chambers
from .phase import IntensityOperator, a_abs, complement_property, intensity_apply, pr_lipschitz_bounds
from .relu import (
    ReluLayer,
    active_set,
    doubled_frame_kappa,
    relu_apply,
    relu_injectivity,
    relu_lipschitz_bounds,
    relu_pointwise_lower,
)
from .saturation import (
    SatOperator,
    critical_lambda,
    delta_data,
    sat_apply,
    sat_injectivity,
    sat_lipschitz_bounds,
    sat_lipschitz_bounds_nplus1,
    sat_pointwise_lower,
)

__version__ = "0.1.0"
