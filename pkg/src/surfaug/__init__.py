"""Augmentation of scalar signals on triangulated surface meshes.

Two unbiased resampling methods generate new per-vertex signals whose
per-class vertex-wise mean matches the real data:

* eigenfunction-coefficient permutation (``lb_eig_da``), which permutes
  spectral coefficients of the Laplace-Beltrami operator across
  observations, and
* bandpass-filter permutation (``c_pda``), which permutes Chebyshev
  polynomial bandpass outputs computed by a fused three-term recurrence
  on the normalized operator, never forming eigenvectors.
"""

from .mesh import (
    TriMesh,
    MeshError,
    MeshParseError,
    load_mesh,
    save_mesh,
    make_synthetic,
    tetrahedron,
    icosphere,
    uv_sphere,
)
from .operator import (
    LBOperator,
    NormalizedOperator,
    ConvergenceError,
    assemble,
    spectral_radius,
    normalize,
    export_operator,
)
from .spectrum import (
    EigenBasis,
    eigendecompose,
    forward,
    inverse,
    save_basis,
    load_basis,
)
from .filters import (
    FilterBank,
    RecurrenceDivergenceError,
    band_coefficients,
    bank_coefficients,
    design_uniform,
    design_dyadic,
    evaluate_response,
    apply_recurrence,
    reconstruct,
    transition_width,
    save_bank,
    load_bank,
)
from .augment import (
    SignalSet,
    PermutationPlan,
    make_plan,
    lb_eig_da,
    c_pda,
    augment_dataset,
    save_signals,
    load_signals,
)
from .simulate import SimulationConfig, generate, select_patch

__version__ = "0.1.0"

__all__ = [
    "TriMesh", "MeshError", "MeshParseError", "load_mesh", "save_mesh",
    "make_synthetic", "tetrahedron", "icosphere", "uv_sphere",
    "LBOperator", "NormalizedOperator", "ConvergenceError", "assemble",
    "spectral_radius", "normalize", "export_operator",
    "EigenBasis", "eigendecompose", "forward", "inverse", "save_basis",
    "load_basis",
    "FilterBank", "RecurrenceDivergenceError", "band_coefficients",
    "bank_coefficients", "design_uniform", "design_dyadic",
    "evaluate_response", "apply_recurrence", "reconstruct",
    "transition_width", "save_bank", "load_bank",
    "SignalSet", "PermutationPlan", "make_plan", "lb_eig_da", "c_pda",
    "augment_dataset", "save_signals", "load_signals",
    "SimulationConfig", "generate", "select_patch",
]
