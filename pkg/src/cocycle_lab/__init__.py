"""Lyapunov exponents and lower bounds for the generalized Harper cocycle."""

from .cocycle import (
    GOLDEN_MEAN,
    ModelParams,
    PhasePoint,
    RescaledProduct,
    TransferMatrix,
    lemma31_lower_bound,
    potential_value,
    product_log_norm,
    transfer_matrix,
)
from .engine import (
    LEEstimate,
    LEProfile,
    Membership,
    Regime,
    acceleration_at,
    asymptote_residual,
    classify_profile,
    le_estimate,
    le_profile,
    spectrum_membership,
)
from .tolerances import Tolerances

__version__ = "0.1.0"
