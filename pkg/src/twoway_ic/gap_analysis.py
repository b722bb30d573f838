"""Gaps between outer bounds and achievable rates, checked against the constant-gap table."""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import achievable as ach
from . import outer_bounds as ob
from .channel import BackwardBranch, ChannelParams, Regime, RegimeClass, WeakSub, classify

__all__ = [
    "Direction",
    "Adaptation",
    "TableRow",
    "TABLE_CEILINGS",
    "GapReport",
    "GridSpec",
    "RowSummary",
    "GapTableSummary",
    "ContinuityCheck",
    "ContinuityError",
    "gap_at",
    "grid_points",
    "verify_gap_table",
    "boundary_continuity_check",
    "worker_count",
]


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    BOTH = "both"


class Adaptation(str, enum.Enum):
    FULL = "full"
    PARTIAL = "partial"


class TableRow(str, enum.Enum):
    VERY_STRONG = "very_strong"
    STRONG = "strong"
    WEAK_INR_LT_1 = "weak_inr_lt_1"
    WEAK_HK1 = "weak_hk1"
    WEAK_HK2_FWD = "weak_hk2_fwd"
    WEAK_HK2_BWD_CASE1 = "weak_hk2_bwd_case1"
    WEAK_HK2_BWD_CASE2 = "weak_hk2_bwd_case2"


TABLE_CEILINGS = {
    TableRow.VERY_STRONG: 0.0,
    TableRow.STRONG: 1.0,
    TableRow.WEAK_INR_LT_1: 1.0,
    TableRow.WEAK_HK1: 1.5,
    TableRow.WEAK_HK2_FWD: 1.0,
    TableRow.WEAK_HK2_BWD_CASE1: 1.0,
    TableRow.WEAK_HK2_BWD_CASE2: 2.0,
}

# (bound op, achievable op, adaptation, direction) per table row
_PAIRINGS = {
    TableRow.VERY_STRONG: ("partial_single_rate_bound", "very_strong_rate", Adaptation.PARTIAL, Direction.BOTH),
    TableRow.STRONG: ("full_adapt_sym_bound", "sato_sym_rate", Adaptation.FULL, Direction.BOTH),
    TableRow.WEAK_INR_LT_1: ("full_adapt_sym_bound", "low_inr_sym_rate", Adaptation.FULL, Direction.BOTH),
    TableRow.WEAK_HK1: ("full_adapt_sym_bound", "hk_sym_rate.hk1", Adaptation.FULL, Direction.BOTH),
    TableRow.WEAK_HK2_FWD: ("partial_fwd_sym_bound", "hk_sym_rate.hk2", Adaptation.PARTIAL, Direction.FORWARD),
    TableRow.WEAK_HK2_BWD_CASE1: ("partial_bwd_sym_bound", "hk_sym_rate.hk2", Adaptation.PARTIAL, Direction.BACKWARD),
    TableRow.WEAK_HK2_BWD_CASE2: ("partial_bwd_sym_bound", "hk_sym_rate.hk2", Adaptation.PARTIAL, Direction.BACKWARD),
}


@dataclass(frozen=True)
class GapReport:
    params: ChannelParams
    regime: Regime
    row: TableRow
    direction: Direction
    adaptation: Adaptation
    bound_used: str
    achievable_used: str
    gap_bits: float
    ceiling_bits: float
    passed: bool
    skipped: bool = False


def _report(params, regime, row, bound, rate, tol, ceilings, skipped=False):
    bound_used, achievable_used, adaptation, direction = _PAIRINGS[row]
    gap = bound - rate
    ceiling = ceilings[row]
    return GapReport(
        params=params,
        regime=regime,
        row=row,
        direction=direction,
        adaptation=adaptation,
        bound_used=bound_used,
        achievable_used=achievable_used,
        gap_bits=gap,
        ceiling_bits=ceiling,
        passed=skipped or gap <= ceiling + tol,
        skipped=skipped,
    )


def gap_at(params: ChannelParams, tol: float = 1e-9, ceilings=None) -> list[GapReport]:
    """Every gap claim that applies at ``params``, paired the way the table pairs them."""
    ceilings = {**TABLE_CEILINGS, **{TableRow(k): v for k, v in (ceilings or {}).items()}}
    regime = classify(params)
    bounds = ob.bound_set(params)

    if regime.cls is RegimeClass.VERY_STRONG:
        rate = ach.very_strong_rate(params)
        return [_report(params, regime, TableRow.VERY_STRONG, bounds.partial_single, rate, tol, ceilings)]
    if regime.cls is RegimeClass.STRONG:
        rate = ach.sato_sym_rate(params)
        return [_report(params, regime, TableRow.STRONG, bounds.full_sym, rate, tol, ceilings)]
    if regime.weak_sub is WeakSub.INR_BELOW_ONE:
        rate = ach.low_inr_sym_rate(params)
        return [_report(params, regime, TableRow.WEAK_INR_LT_1, bounds.full_sym, rate, tol, ceilings)]

    rates = ach.hk_sym_rate(params)
    if rates.scheme is ach.Scheme.HK1:
        return [
            _report(params, regime, TableRow.WEAK_HK1, bounds.full_sym, rates.rate_sym, tol, ceilings, rates.clamped)
        ]
    bwd_row = (
        TableRow.WEAK_HK2_BWD_CASE1
        if bounds.bwd_branch is BackwardBranch.SNR_LE_INR_CUBED
        else TableRow.WEAK_HK2_BWD_CASE2
    )
    return [
        _report(params, regime, TableRow.WEAK_HK2_FWD, bounds.partial_fwd_sym, rates.rate_sym, tol, ceilings, rates.clamped),
        _report(params, regime, bwd_row, bounds.partial_bwd_sym, rates.rate_sym, tol, ceilings, rates.clamped),
    ]


@dataclass(frozen=True)
class GridSpec:
    """Inclusive dB ranges ``(start, stop, step)`` for SNR and INR."""

    snr_db: tuple[float, float, float]
    inr_db: tuple[float, float, float]

    def __post_init__(self):
        for name in ("snr_db", "inr_db"):
            start, stop, step = (float(v) for v in getattr(self, name))
            if not all(math.isfinite(v) for v in (start, stop, step)):
                raise ValueError(f"{name}: range values must be finite")
            if step <= 0:
                raise ValueError(f"{name}: step must be positive, got {step}")
            if start > stop:
                raise ValueError(f"{name}: start {start} exceeds stop {stop}")
            object.__setattr__(self, name, (start, stop, step))

    @staticmethod
    def _axis(rng):
        start, stop, step = rng
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(n)]

    @property
    def snr_values(self) -> list[float]:
        return self._axis(self.snr_db)

    @property
    def inr_values(self) -> list[float]:
        return self._axis(self.inr_db)

    def __len__(self):
        return len(self.snr_values) * len(self.inr_values)

    @classmethod
    def parse(cls, snr: str, inr: str) -> "GridSpec":
        """From ``start:stop:step`` strings; a bare number is a one-point axis."""
        return cls(_parse_range(snr), _parse_range(inr))


def _parse_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) == 1:
        v = float(parts[0])
        return (v, v, 1.0)
    if len(parts) != 3:
        raise ValueError(f"expected start:stop:step, got {text!r}")
    return tuple(float(p) for p in parts)


def grid_points(grid: GridSpec) -> list[tuple[float, float]]:
    """(snr_db, inr_db) pairs, SNR outer and INR inner."""
    inrs = grid.inr_values
    return [(s, i) for s in grid.snr_values for i in inrs]


def worker_count(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get("TWOWAY_IC_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def map_ordered(fn, items, threads: int | None = None) -> list:
    """``[fn(x) for x in items]``, optionally on a thread pool; order is always preserved."""
    n = worker_count(threads)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))


@dataclass
class RowSummary:
    row: TableRow
    ceiling_bits: float
    count: int = 0
    skipped: int = 0
    max_gap: float | None = None
    argmax: tuple[float, float] | None = None  # (snr_db, inr_db)
    passed: bool = True


@dataclass
class GapTableSummary:
    rows: dict[TableRow, RowSummary]
    n_points: int
    tol: float
    reports: list[GapReport] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows.values())


def verify_gap_table(
    grid: GridSpec,
    tol: float = 1e-9,
    ceilings=None,
    threads: int | None = None,
    keep_reports: bool = False,
) -> GapTableSummary:
    """Evaluate ``gap_at`` over ``grid`` and reduce to per-row maxima."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    pts = grid_points(grid)
    if not pts:
        raise ValueError("empty grid")
    merged = {**TABLE_CEILINGS, **{TableRow(k): v for k, v in (ceilings or {}).items()}}

    def evaluate(pt):
        return gap_at(ChannelParams.from_db(*pt), tol=tol, ceilings=merged)

    per_point = map_ordered(evaluate, pts, threads)
    rows = {row: RowSummary(row, merged[row]) for row in TableRow}
    all_reports = []
    for pt, reports in zip(pts, per_point):
        for rep in reports:
            s = rows[rep.row]
            if rep.skipped:
                s.skipped += 1
                continue
            s.count += 1
            if s.max_gap is None or rep.gap_bits > s.max_gap:
                s.max_gap, s.argmax = rep.gap_bits, pt
            s.passed = s.passed and rep.passed
        if keep_reports:
            all_reports.extend(reports)
    return GapTableSummary(rows, len(pts), tol, all_reports)


class ContinuityError(AssertionError):
    pass


@dataclass(frozen=True)
class ContinuityCheck:
    identity: str
    at: dict
    lhs: float
    rhs: float

    @property
    def diff(self) -> float:
        return abs(self.lhs - self.rhs)


CONTINUITY_VALUES = (0.5, 1.0, 2.0, 5.0, 10.0, 100.0)


def boundary_continuity_check(values=CONTINUITY_VALUES, tol: float = 1e-9) -> list[ContinuityCheck]:
    """Check that rates and bounds agree across regime edges.

    Raises ContinuityError naming the first identity that fails.
    """
    checks = []
    for snr in values:
        p = ChannelParams(snr, snr * (1.0 + snr))
        checks.append(ContinuityCheck("very_strong_eq_sato", {"snr": snr}, ach.very_strong_rate(p), ach.sato_sym_rate(p)))
    for inr in values:
        p = ChannelParams(inr**3, inr)
        case1 = math.log2(1.0 + inr + p.snr / inr)
        case2 = math.log2(1.0 + (math.sqrt(p.snr) + math.sqrt(inr)) ** 2 / (1.0 + inr))
        checks.append(ContinuityCheck("backward_branches_agree", {"inr": inr}, case1, case2))
    for snr in values:
        if snr < 1.0:
            continue  # HK needs 1 <= INR <= SNR
        hk1, hk2 = ach.hk_branches(snr, 1.0)
        checks.append(ContinuityCheck("hk1_eq_hk2_at_inr_1", {"snr": snr}, hk1, hk2))
    for c in checks:
        if not c.diff <= tol:
            raise ContinuityError(f"{c.identity} violated at {c.at}: {c.lhs!r} vs {c.rhs!r}")
    return checks

