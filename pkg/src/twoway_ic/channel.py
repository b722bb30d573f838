"""Operating point of the symmetric two-way Gaussian interference channel.

Nodes 1 and 3 talk to nodes 2 and 4 respectively in the forward direction,
and 2, 4 answer back to 1, 3 in the backward direction.  Noise is unit
variance and every node has unit transmit power, so SNR and INR are squared
gain magnitudes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ChannelParams",
    "ChannelGains",
    "RegimeClass",
    "WeakSub",
    "BackwardBranch",
    "Regime",
    "classify",
    "db_to_linear",
    "linear_to_db",
    "DIRECT_LINKS",
    "CROSS_LINKS",
]

# (transmitter, receiver) pairs, 1-based node labels
DIRECT_LINKS = ((1, 2), (2, 1), (3, 4), (4, 3))
CROSS_LINKS = ((1, 4), (4, 1), (2, 3), (3, 2))


def db_to_linear(x: float) -> float:
    return 10.0 ** (x / 10.0)


def linear_to_db(x: float) -> float:
    if not x > 0:
        raise ValueError(f"linear value must be positive, got {x!r}")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class ChannelParams:
    """Symmetric operating point in linear power units."""

    snr: float
    inr: float

    def __post_init__(self):
        for name in ("snr", "inr"):
            v = getattr(self, name)
            if not isinstance(v, (int, float, np.floating, np.integer)):
                raise TypeError(f"{name} must be a real number, got {type(v).__name__}")
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {v!r}")
            object.__setattr__(self, name, float(v))

    @classmethod
    def from_db(cls, snr_db: float, inr_db: float) -> "ChannelParams":
        if not (math.isfinite(snr_db) and math.isfinite(inr_db)):
            raise ValueError("dB values must be finite")
        return cls(db_to_linear(snr_db), db_to_linear(inr_db))


@dataclass(frozen=True)
class ChannelGains:
    """Complex gains ``g[j][k]`` from node j to node k (1-based).

    Self terms ``g[j][j]`` are kept at zero: every node cancels its own
    signal exactly, so they never enter a conditional variance.  Links
    between 1-3 and 2-4 (same-side nodes) do not exist in this channel.
    """

    g: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.asarray(self.g, dtype=np.complex128)
        if g.shape != (4, 4):
            raise ValueError(f"gain matrix must be 4x4, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ValueError("gains must be finite")
        g = g.copy()
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    def __call__(self, j: int, k: int) -> complex:
        return complex(self.g[j - 1, k - 1])

    @classmethod
    def symmetric(cls, params: ChannelParams, phases=None, rng=None) -> "ChannelGains":
        """Build gains whose magnitudes match ``params``.

        ``phases`` maps (j, k) link tuples to radians.  Links missing from
        it get a uniform random phase from ``rng`` if one is given, else 0.
        """
        phases = dict(phases or {})
        g = np.zeros((4, 4), dtype=np.complex128)
        for links, power in ((DIRECT_LINKS, params.snr), (CROSS_LINKS, params.inr)):
            for j, k in links:
                if (j, k) in phases:
                    phi = phases[(j, k)]
                elif rng is not None:
                    phi = rng.uniform(0.0, 2.0 * math.pi)
                else:
                    phi = 0.0
                g[j - 1, k - 1] = math.sqrt(power) * complex(math.cos(phi), math.sin(phi))
        return cls(g)

    def params(self, rtol: float = 1e-12) -> ChannelParams:
        """Project back to (SNR, INR); raises if the magnitudes are not symmetric."""
        direct = [abs(self(j, k)) ** 2 for j, k in DIRECT_LINKS]
        cross = [abs(self(j, k)) ** 2 for j, k in CROSS_LINKS]
        for vals, name in ((direct, "direct"), (cross, "cross")):
            if max(vals) - min(vals) > rtol * max(1.0, max(vals)):
                raise ValueError(f"{name} link powers are not symmetric: {vals}")
        return ChannelParams(float(np.mean(direct)), float(np.mean(cross)))


class RegimeClass(str, enum.Enum):
    VERY_STRONG = "very_strong"
    STRONG = "strong"
    WEAK = "weak"


class WeakSub(str, enum.Enum):
    INR_BELOW_ONE = "inr_below_one"
    INR_AT_LEAST_ONE = "inr_at_least_one"


class BackwardBranch(str, enum.Enum):
    SNR_LE_INR_CUBED = "snr_le_inr_cubed"
    SNR_GT_INR_CUBED = "snr_gt_inr_cubed"


@dataclass(frozen=True)
class Regime:
    cls: RegimeClass
    backward_sub: BackwardBranch
    weak_sub: WeakSub | None = None

    def __str__(self):
        return self.cls.value


def backward_branch(snr: float, inr: float) -> BackwardBranch:
    # INR = 0 goes to the second branch; the first one divides by INR
    if inr > 0 and snr <= inr**3:
        return BackwardBranch.SNR_LE_INR_CUBED
    return BackwardBranch.SNR_GT_INR_CUBED


def classify(params: ChannelParams) -> Regime:
    """Interference regime of ``params``.

    Boundaries go to the stronger class: INR = SNR(1+SNR) is very strong and
    INR = SNR is strong.
    """
    snr, inr = params.snr, params.inr
    bwd = backward_branch(snr, inr)
    if inr >= snr * (1.0 + snr):
        return Regime(RegimeClass.VERY_STRONG, bwd)
    if inr >= snr:
        return Regime(RegimeClass.STRONG, bwd)
    sub = WeakSub.INR_BELOW_ONE if inr < 1.0 else WeakSub.INR_AT_LEAST_ONE
    return Regime(RegimeClass.WEAK, bwd, sub)
