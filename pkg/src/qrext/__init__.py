"""qrext: quantum Renyi conditional entropies and the strong converse exponent
of composable randomness extraction against quantum side information.

Internal values are in nats; the CLI converts to bits by default.
"""

from ._optimize import OptimizerOptions
from .conditional import (
    EntropyQuery,
    OptimizerReport,
    classical_club_closed_form,
    club_objective,
    club_objective_depolarized,
    club_sandwiched,
    coarse_grain_entropy_check,
    conditional_entropy,
    default_lambda,
    duality_club,
    gibbs_check,
    h_down_half,
    le_cond_entropy,
    le_objective,
    renyi_cond,
    variational_le,
    vn_cond_entropy,
)
from .divergences import (
    DivergenceParams,
    fidelity,
    log_euclidean,
    log_euclidean_variational,
    purified_distance,
    renyi_divergence,
    umegaki,
)
from .exponent import (
    ComparisonBounds,
    EpaSolver,
    ExponentCurve,
    comparison_bounds,
    critical_rate,
    epa,
    epa_curve,
    g_variational,
)
from .hashing import (
    HashFunction,
    SimReport,
    all_hashes,
    apply_hash,
    best_hash_exhaustive,
    fidelity_to_ideal,
    finite_n_table,
    oneshot_converse_check,
)
from .linalg import (
    DomainError,
    SpectralDecomposition,
    SpectralProjectors,
    UnsupportedSizeError,
    ValidationError,
    eigh_cluster,
    intersection_projector,
    matrix_function,
    partial_trace,
    pinch,
    ptrace,
    schatten_norm,
    support_projector,
    tensor,
)
from .states import (
    CQState,
    DensityOperator,
    cq_from_joint,
    cq_power,
    depolarize,
    embed,
    marginal_e,
    marginal_x,
    purify,
    random_classical_cq,
    random_cq,
    random_density,
    uniform_cq,
)
from .stateio import fig1_state, load_state, save_state, write_curve
from .symmetry import (
    CharacterTable,
    UniversalState,
    dominance_check,
    isotypic_projections,
    permutation_unitary,
    sn_characters,
    universal_state,
)

__version__ = "0.1.0"
