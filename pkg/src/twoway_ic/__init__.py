"""Capacity bounds, achievable rates and constant-gap checks for the symmetric two-way Gaussian IC."""

from .achievable import RateSet, RegimeError, Scheme, achievable_sym_rate, hk_sym_rate, low_inr_sym_rate, sato_sym_rate, very_strong_rate
from .channel import ChannelGains, ChannelParams, Regime, RegimeClass, classify, db_to_linear, linear_to_db
from .gap_analysis import GapReport, GridSpec, TableRow, boundary_continuity_check, gap_at, verify_gap_table
from .outer_bounds import (
    BoundSet,
    LambdaPoint,
    bound_set,
    full_adapt_sym_bound,
    lambda_maximizer,
    lambda_objective,
    partial_bwd_sym_bound,
    partial_fwd_sym_bound,
    partial_single_rate_bound,
)

__version__ = "0.1.0"
