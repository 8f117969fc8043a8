"""Fusion frames, LMMSE estimation under subspace erasures, and Grassmannian packing certificates."""

__version__ = "0.1.0"

from .errors import FFKitError
from .matcore import DEFAULT_TOLERANCES, Tolerances
from .frames import (
    FusionFrame,
    Subspace,
    certify_equidistance_tight,
    chordal_distance_sq,
    distance_table,
    embed_on_sphere,
    frame_bounds,
    frame_operator,
    principal_angles,
    proposition5_bound,
    simplex_bound,
    subspace_from_vectors,
)
from .estimation import (
    ErasurePattern,
    NoiseModel,
    SignalModel,
    error_covariance,
    erasure_report,
    extra_mse,
    k_erasure_formula,
    lmmse_estimate,
    mse_no_erasure,
    one_erasure_mse,
    optimal_dimension,
)
from .constructions import (
    e8_frame,
    eisenstein_e6_frame,
    partition_frame,
    quadratic_residue_frame,
    random_frame,
)
from .simulation import SimConfig, SimResult, run_monte_carlo

__all__ = [
    "__version__",
    "FusionFrame",
    "Subspace",
    "certify_equidistance_tight",
    "chordal_distance_sq",
    "distance_table",
    "embed_on_sphere",
    "frame_bounds",
    "frame_operator",
    "principal_angles",
    "proposition5_bound",
    "simplex_bound",
    "subspace_from_vectors",
    "ErasurePattern",
    "NoiseModel",
    "SignalModel",
    "error_covariance",
    "erasure_report",
    "extra_mse",
    "k_erasure_formula",
    "lmmse_estimate",
    "mse_no_erasure",
    "one_erasure_mse",
    "optimal_dimension",
    "e8_frame",
    "eisenstein_e6_frame",
    "partition_frame",
    "quadratic_residue_frame",
    "random_frame",
    "FFKitError",
    "DEFAULT_TOLERANCES",
    "Tolerances",
    "SimConfig",
    "SimResult",
    "run_monte_carlo",
]
