"""Closed-form outer bounds on the symmetric rates, in bits per channel use."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import BackwardBranch, ChannelParams, backward_branch

__all__ = [
    "BoundSet",
    "LambdaPoint",
    "full_adapt_sym_bound",
    "partial_single_rate_bound",
    "partial_fwd_sym_bound",
    "partial_bwd_sym_bound",
    "forward_conditional_variance",
    "backward_conditional_variance",
    "lambda_objective",
    "lambda_objective_values",
    "lambda_maximizer",
    "bound_set",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LambdaPoint:
    """Correlation E[X2 X4*] given as |lambda| and the angle of g21 g41* lambda."""

    magnitude: float
    theta: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.magnitude <= 1.0):
            raise ValueError(f"|lambda| must lie in [0, 1], got {self.magnitude!r}")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        object.__setattr__(self, "magnitude", float(self.magnitude))
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)


@dataclass(frozen=True)
class BoundSet:
    full_sym: float
    partial_single: float
    partial_fwd_sym: float
    partial_bwd_sym: float
    bwd_branch: BackwardBranch


def full_adapt_sym_bound(params: ChannelParams) -> float:
    """Per-user symmetric rate bound when all four nodes may adapt."""
    snr, inr = params.snr, params.inr
    return 0.5 * math.log2(1.0 + snr + inr + 2.0 * math.sqrt(snr * inr)) + 0.5 * math.log2(
        1.0 + snr / (1.0 + inr)
    )


def partial_single_rate_bound(params: ChannelParams) -> float:
    return math.log2(1.0 + params.snr)


def forward_conditional_variance(params: ChannelParams) -> float:
    """Var(g12 X1 + g32 X3 + Z2 | g14 X1 + Z4) for independent unit-power inputs."""
    snr, inr = params.snr, params.inr
    return 1.0 + inr + snr - snr * inr / (1.0 + inr)


def partial_fwd_sym_bound(params: ChannelParams) -> float:
    return math.log2(forward_conditional_variance(params))


def partial_bwd_sym_bound(params: ChannelParams) -> tuple[float, BackwardBranch]:
    """Backward-direction bound under partial adaptation and the branch used."""
    snr, inr = params.snr, params.inr
    branch = backward_branch(snr, inr)
    if branch is BackwardBranch.SNR_LE_INR_CUBED:
        return math.log2(1.0 + inr + snr / inr), branch
    return math.log2(1.0 + (math.sqrt(snr) + math.sqrt(inr)) ** 2 / (1.0 + inr)), branch


def lambda_objective_values(params: ChannelParams, magnitude, theta):
    """Backward conditional variance over arrays of (|lambda|, theta).

    Broadcasts like numpy.  Returns the variance, not its log.
    """
    snr, inr = params.snr, params.inr
    a = np.asarray(magnitude, dtype=float)
    c = np.cos(np.asarray(theta, dtype=float))
    root = math.sqrt(snr * inr)
    cross = snr * inr + inr**2 * a**2 + 2.0 * math.sqrt(snr) * inr**1.5 * a * c
    return 1.0 + inr + snr + 2.0 * a * c * root - cross / (1.0 + inr)


def backward_conditional_variance(params: ChannelParams, pt: LambdaPoint) -> float:
    """Var(g21 X2 + g41 X4 + Z1 | g23 X2 + Z3) with E[X2 X4*] set by ``pt``."""
    return float(lambda_objective_values(params, pt.magnitude, pt.theta))


def lambda_objective(params: ChannelParams, pt: LambdaPoint) -> float:
    v = backward_conditional_variance(params, pt)
    # unreachable for |lambda| <= 1: the value is a conditional variance >= 1
    assert v > 0, f"nonpositive conditional variance {v!r}"
    return math.log2(v)


def lambda_maximizer(params: ChannelParams) -> LambdaPoint:
    snr, inr = params.snr, params.inr
    if inr == 0:
        # objective does not depend on lambda
        return LambdaPoint(0.0, 0.0)
    return LambdaPoint(min(1.0, math.sqrt(snr * inr) / inr**2), 0.0)


def bound_set(params: ChannelParams) -> BoundSet:
    bwd, branch = partial_bwd_sym_bound(params)
    return BoundSet(
        full_sym=full_adapt_sym_bound(params),
        partial_single=partial_single_rate_bound(params),
        partial_fwd_sym=partial_fwd_sym_bound(params),
        partial_bwd_sym=bwd,
        bwd_branch=branch,
    )
