"""Numerical laboratory for random Stinespring channels: minimum output Renyi
entropies, the product channel on a maximally entangled input, and exact
fourth-moment Haar averages."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .bounds import (
    SubspaceParams,
    entangled_input_entropy_bound,
    entanglement_floor,
    failure_probability_bound,
    lipschitz_bound,
    single_eigenvalue_entropy_bound,
    subspace_dimension,
    violation_gap_prediction,
)
from .channel import (
    Channel,
    apply,
    apply_product_to_phi,
    conjugate,
    kraus_operators,
    phi_overlap,
)
from .entropy import (
    binary_entropy,
    entropy_from_max_p_norm,
    grouping_decomposition,
    max_p_norm_from_entropy,
    renyi_entropy,
    residual_h2_lower_bound,
    von_neumann_entropy,
)
from .errors import (
    DegenerateSpectrumError,
    InfeasibleParametersError,
    InvalidArgumentError,
    InvalidDimensionError,
    InvariantViolationError,
    PnormLabError,
    ResourceLimitError,
    SingularGramError,
)
from .linalg import (
    RegisterDims,
    eigenvalues_hermitian,
    haar_unitary,
    maximally_entangled_state,
    partial_trace,
    partial_trace_pure,
)
from .minimize import MinEntropyEstimate, OptimizerConfig, min_output_entropy_estimate
from .weingarten import (
    Permutation,
    all_permutations,
    average_purity_exact,
    average_purity_monte_carlo,
    dominant_term,
    weingarten_table,
)

__version__ = "0.1.0"
