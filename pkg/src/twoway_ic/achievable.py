"""Achievable symmetric rates of non-adaptive schemes run independently per direction."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .channel import ChannelParams, RegimeClass, WeakSub, classify

__all__ = [
    "Scheme",
    "RateSet",
    "RegimeError",
    "very_strong_rate",
    "sato_sym_rate",
    "hk_branches",
    "hk_sym_rate",
    "low_inr_sym_rate",
    "achievable_sym_rate",
]


class RegimeError(ValueError):
    """A rate formula was asked for outside the regime it is stated for."""


class Scheme(str, enum.Enum):
    DECODE_INTERFERENCE_FIRST = "decode_interference_first"
    SIMULTANEOUS_DECODING = "simultaneous_decoding"
    HK1 = "hk1"
    HK2 = "hk2"
    LOW_INR_HK = "low_inr_hk"


@dataclass(frozen=True)
class RateSet:
    rate_sym: float
    scheme: Scheme
    hk1: float | None = None
    hk2: float | None = None
    clamped: bool = False


def very_strong_rate(params: ChannelParams) -> float:
    """Decode the interferer first, then the own message: log2(1 + SNR)."""
    snr, inr = params.snr, params.inr
    if inr < snr * (1.0 + snr):
        raise RegimeError(f"not very strong interference: INR={inr} < SNR(1+SNR)={snr * (1 + snr)}")
    return math.log2(1.0 + snr)


def sato_sym_rate(params: ChannelParams) -> float:
    # closed band SNR <= INR <= SNR(1+SNR): both edges are needed for continuity checks
    snr, inr = params.snr, params.inr
    if not (snr <= inr <= snr * (1.0 + snr)):
        raise RegimeError(f"not strong-but-not-very-strong interference: SNR={snr}, INR={inr}")
    return 0.5 * math.log2(1.0 + snr + inr)


def hk_branches(snr: float, inr: float) -> tuple[float, float]:
    hk1 = 0.5 * math.log2(1.0 + inr + snr) + 0.5 * math.log2(2.0 + snr / inr) - 1.0
    hk2 = math.log2(1.0 + inr + snr / inr) - 1.0
    return hk1, hk2


def hk_sym_rate(params: ChannelParams) -> RateSet:
    """Han-Kobayashi rate with private messages at the noise level.

    Valid for 1 <= INR <= SNR.  The smaller branch is active; a tie reports
    HK1.  A negative minimum is clamped to zero and flagged.
    """
    snr, inr = params.snr, params.inr
    if inr < 1.0:
        raise RegimeError(f"HK rate needs INR >= 1, got {inr}")
    if inr > snr:
        raise RegimeError(f"not weak interference: INR={inr} > SNR={snr}")
    hk1, hk2 = hk_branches(snr, inr)
    scheme = Scheme.HK1 if hk1 <= hk2 else Scheme.HK2
    rate = min(hk1, hk2)
    clamped = rate < 0
    return RateSet(max(rate, 0.0), scheme, hk1, hk2, clamped)


def low_inr_sym_rate(params: ChannelParams) -> float:
    if params.inr >= 1.0:
        raise RegimeError(f"low-INR rate needs INR < 1, got {params.inr}")
    return math.log2(1.0 + params.snr / (1.0 + params.inr))


def achievable_sym_rate(params: ChannelParams) -> RateSet:
    regime = classify(params)
    if regime.cls is RegimeClass.VERY_STRONG:
        return RateSet(very_strong_rate(params), Scheme.DECODE_INTERFERENCE_FIRST)
    if regime.cls is RegimeClass.STRONG:
        return RateSet(sato_sym_rate(params), Scheme.SIMULTANEOUS_DECODING)
    if regime.weak_sub is WeakSub.INR_AT_LEAST_ONE:
        return hk_sym_rate(params)
    return RateSet(low_inr_sym_rate(params), Scheme.LOW_INR_HK)
