"""Entropic characteristics of finite-dimensional quantum channels.

Constrained Holevo capacity, mutual information and entropy exchange,
structural criteria for when the capacity meets its upper bounds, the
noise-gap functional ``D(Phi)``, and a symplectic classifier for Gaussian
channel parameters.
"""

from .capacity import (
    CapacityResult,
    OptimizerConfig,
    constrained_holevo_capacity,
    ensemble_from_isometry,
    gap_D,
    maximize_gap,
)
from .channels import (
    QuantumChannel,
    apply,
    apply_raw,
    cd_channel,
    choi,
    complement,
    compose,
    cq_channel,
    dephasing,
    depolarizing,
    identity,
    is_completely_depolarizing,
    is_discrete_cq,
    kraus_from_choi,
    random_channel,
    subchannel,
    truncation_channel,
    validate,
)
from .entropic import (
    INF,
    Ensemble,
    chi_out,
    chi_quantity,
    entropy_exchange,
    mutual_information,
    rel_entropy,
    vn_entropy,
)
from .equality import (
    EqualityReport,
    OrthogonalFamily,
    channel_kernel,
    eigenbasis_in_Pi,
    equality_test,
    family_in_Pi,
    family_in_Pi_hat,
    hat_equality_test,
    orthogonal_decomposition,
    two_rank_separation,
)
from .gaussian import (
    GaussianChannelParams,
    GaussianClassification,
    SymplecticSpace,
    classify_complementary,
    classify_direct,
    comp_rel_subspace,
    one_mode_type,
    skew_complement,
    symplectic_content,
    validate_nid,
)
from .numerics import hermitian_eig, kron, min_eig_hermitian, nullspace, partial_trace

__version__ = "0.1.0"
