"""Independent numerical checks of the closed forms.

Two routes: an exhaustive grid over (|lambda24|, theta) for the backward
bound's maximizer, and Monte-Carlo estimates of the conditional variances
that the partial-adaptation bounds are built from.

Monte-Carlo samples are drawn in fixed blocks, each seeded from
``SeedSequence(seed, spawn_key=(block,))`` on PCG64.  Block moment sums are
merged in block order, so the estimate does not depend on how many worker
threads produced the blocks.  The same blocks drive the jackknife.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelGains, ChannelParams
from .gap_analysis import map_ordered
from .outer_bounds import (
    TWO_PI,
    LambdaPoint,
    backward_conditional_variance,
    forward_conditional_variance,
    lambda_maximizer,
    lambda_objective,
    lambda_objective_values,
)

__all__ = [
    "LambdaSearchResult",
    "lambda_grid_search",
    "McConfig",
    "McEstimate",
    "mc_conditional_variance",
    "mc_entropy_check",
    "mc_theta_sweep",
    "MIN_SAMPLES",
    "RNG_ID",
]

MIN_SAMPLES = 16
MAX_BLOCKS = 20
RNG_ID = "numpy.PCG64/SeedSequence(seed,spawn_key=(block,))/v1"
QUANTITIES = ("fwd_var", "bwd_var")


def _circular_distance(a: float, b: float) -> float:
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class LambdaSearchResult:
    best: LambdaPoint
    best_value: float
    grid_resolution: tuple[float, float]
    closed_form: LambdaPoint
    closed_form_value: float
    value_diff: float
    point_diff: tuple[float, float]
    value_tol: float

    @property
    def passed(self) -> bool:
        d_mag, d_theta = self.grid_resolution
        slack = 1e-12
        return (
            self.value_diff <= self.value_tol
            and self.point_diff[0] <= d_mag + slack
            and _circular_distance(self.best.theta, 0.0) <= d_theta + slack
        )


def lambda_grid_search(
    params: ChannelParams, n_mag: int = 2001, n_theta: int = 720, value_tol: float = 1e-6
) -> LambdaSearchResult:
    """Brute-force argmax of the backward bound over |lambda| in [0, 1] and theta in [0, 2pi)."""
    if n_mag < 2 or n_theta < 2:
        raise ValueError(f"grid needs n_mag >= 2 and n_theta >= 2, got {n_mag}x{n_theta}")
    if params.inr <= 0:
        raise ValueError("lambda search needs INR > 0")
    mags = np.linspace(0.0, 1.0, n_mag)
    thetas = np.arange(n_theta) * (TWO_PI / n_theta)
    values = lambda_objective_values(params, mags[:, None], thetas[None, :])
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    best = LambdaPoint(float(mags[i]), float(thetas[j]))
    best_value = math.log2(float(values[i, j]))

    closed = lambda_maximizer(params)
    closed_value = lambda_objective(params, closed)
    return LambdaSearchResult(
        best=best,
        best_value=best_value,
        grid_resolution=(1.0 / (n_mag - 1), TWO_PI / n_theta),
        closed_form=closed,
        closed_form_value=closed_value,
        value_diff=abs(best_value - closed_value),
        point_diff=(abs(best.magnitude - closed.magnitude), _circular_distance(best.theta, closed.theta)),
        value_tol=value_tol,
    )


@dataclass(frozen=True)
class McConfig:
    samples: int
    seed: int
    correlation: LambdaPoint = field(default_factory=lambda: LambdaPoint(0.0, 0.0))

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValueError(f"samples must be a positive integer, got {self.samples!r}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    quantity: str
    estimate: float
    closed_form: float
    std_error: float
    samples: int
    seed: int
    n_sigma: float = 3.0
    rng: str = RNG_ID

    @property
    def z(self) -> float:
        return abs(self.estimate - self.closed_form) / self.std_error if self.std_error > 0 else math.inf

    @property
    def passed(self) -> bool:
        return abs(self.estimate - self.closed_form) <= self.n_sigma * self.std_error


def _block_sizes(samples: int) -> list[int]:
    n_blocks = min(MAX_BLOCKS, samples // 2)
    base, extra = divmod(samples, n_blocks)
    return [base + (1 if b < extra else 0) for b in range(n_blocks)]


def _complex_normals(rng: np.random.Generator, k: int, m: int) -> np.ndarray:
    # k independent CN(0, 1) rows of length m
    z = rng.standard_normal((k, m, 2)).view(np.complex128)[..., 0]
    return z * math.sqrt(0.5)


def _lambda24(gains: ChannelGains, pt: LambdaPoint) -> complex:
    # theta is the angle of g21 g41* lambda24
    ref = cmath.phase(gains(2, 1) * gains(4, 1).conjugate())
    return pt.magnitude * cmath.exp(1j * (pt.theta - ref))


def _draw(quantity: str, gains: ChannelGains, lam: complex, rng, m: int):
    """Return (observation, side information, observation noise) sample vectors."""
    u = _complex_normals(rng, 4, m)
    if quantity == "fwd_var":
        x1, x3, z2, z4 = u
        y = gains(1, 2) * x1 + gains(3, 2) * x3 + z2
        s = gains(1, 4) * x1 + z4
        return y, s, z2
    w, v, z1, z3 = u
    x2 = w
    x4 = lam.conjugate() * w + math.sqrt(max(0.0, 1.0 - abs(lam) ** 2)) * v
    y = gains(2, 1) * x2 + gains(4, 1) * x4 + z1
    s = gains(2, 3) * x2 + z3
    return y, s, z1


def _moments(y, s, z) -> np.ndarray:
    return np.array(
        [
            len(y),
            y.sum(),
            s.sum(),
            z.sum(),
            np.vdot(y, y).real,
            np.vdot(s, s).real,
            np.vdot(z, z).real,
            np.vdot(s, y),  # sum y s*
        ],
        dtype=np.complex128,
    )


def _conditional_stats(m: np.ndarray) -> tuple[float, float]:
    """(Var(Y | S), Var(Z)) from merged raw moments, via the Schur complement."""
    n = m[0].real
    sy, ss, sz = m[1], m[2], m[3]
    cyy = (m[4].real - abs(sy) ** 2 / n) / (n - 1)
    css = (m[5].real - abs(ss) ** 2 / n) / (n - 1)
    czz = (m[6].real - abs(sz) ** 2 / n) / (n - 1)
    cys = (m[7] - sy * ss.conjugate() / n) / (n - 1)
    cond = cyy - abs(cys) ** 2 / css if css > 0 else cyy
    return float(cond), float(czz)


def _block_moments(quantity, gains, cfg, threads):
    lam = _lambda24(gains, cfg.correlation)
    sizes = _block_sizes(cfg.samples)

    def run(b):
        ss = np.random.SeedSequence(int(cfg.seed), spawn_key=(b,))
        rng = np.random.Generator(np.random.PCG64(ss))
        return _moments(*_draw(quantity, gains, lam, rng, sizes[b]))

    return np.array(map_ordered(run, list(range(len(sizes))), threads))


def _jackknife(blocks: np.ndarray, stat) -> tuple[float, float]:
    total = blocks.sum(axis=0)
    full = stat(total)
    loo = np.array([stat(total - b) for b in blocks])
    k = len(blocks)
    se = math.sqrt((k - 1) / k * float(np.sum((loo - loo.mean()) ** 2)))
    return full, se


def _check_inputs(gains, cfg, quantity):
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}, got {quantity!r}")
    if cfg.samples < MIN_SAMPLES:
        raise ValueError(f"samples too small: need at least {MIN_SAMPLES}, got {cfg.samples}")
    return gains.params()


def _closed_variance(params, cfg, quantity):
    if quantity == "fwd_var":
        return forward_conditional_variance(params)
    return backward_conditional_variance(params, cfg.correlation)


def mc_conditional_variance(
    gains: ChannelGains, cfg: McConfig, quantity: str, threads: int | None = None
) -> McEstimate:
    """Monte-Carlo estimate of a conditional variance against its closed form.

    ``fwd_var`` is Var(g12 X1 + g32 X3 + Z2 | g14 X1 + Z4) and ``bwd_var`` is
    Var(g21 X2 + g41 X4 + Z1 | g23 X2 + Z3) with E[X2 X4*] set by
    ``cfg.correlation``.  All other inputs are independent.
    """
    params = _check_inputs(gains, cfg, quantity)
    blocks = _block_moments(quantity, gains, cfg, threads)
    est, se = _jackknife(blocks, lambda m: _conditional_stats(m)[0])
    return McEstimate(quantity, est, _closed_variance(params, cfg, quantity), se, cfg.samples, int(cfg.seed))


def _entropy_stat(m):
    cond, noise = _conditional_stats(m)
    return math.log2(cond / noise)


def mc_entropy_check(
    gains: ChannelGains, cfg: McConfig, quantity: str = "fwd_var", threads: int | None = None
) -> McEstimate:
    """h(Y | S) - h(Z) in bits for Gaussian inputs, against log2 of the closed-form variance.

    For complex Gaussians this is log2 of a variance ratio; the pi*e factor
    cancels in the difference.
    """
    params = _check_inputs(gains, cfg, quantity)
    blocks = _block_moments(quantity, gains, cfg, threads)
    est, se = _jackknife(blocks, _entropy_stat)
    closed = math.log2(_closed_variance(params, cfg, quantity))
    name = quantity.replace("_var", "_entropy")
    return McEstimate(name, est, closed, se, cfg.samples, int(cfg.seed))


def mc_theta_sweep(
    gains: ChannelGains, cfg: McConfig, thetas, threads: int | None = None
) -> list[McEstimate]:
    """Backward entropy term at fixed |lambda24| for each theta in ``thetas``."""
    out = []
    for theta in thetas:
        c = McConfig(cfg.samples, cfg.seed, LambdaPoint(cfg.correlation.magnitude, theta))
        out.append(mc_entropy_check(gains, c, "bwd_var", threads))
    return out
