"""Construction of the concentrated-pair levels and their global assembly.

A level at parameter n consists of

* a support set: 2d+1 intervals of length 1/L at integer-multiple
  positions jN (a periodic set with integer period N), total measure 2^-n
  by construction, with [k+0.4, k+0.6) always empty;
* a cell set: one cell of width 2/(nN) centered in each period of length
  1/N, spanning [-N, N] (the n=2 cells are clipped to the full period);
* the evaluable product f(t) = P(N t) * g(t/L) / L, where P is the
  half-period-shifted kernel from choose_degree and g the tabulated bump
  transform.  By construction the transform of f lives on the support set.

Scales N are chosen by a doubling search so that the certified tail bound
plus the measured off-cell mass stays below target_c/n of the total.
The global assembly translates the cell sets far apart so that the union
has checkably vanishing density while each block stays ~1/n thin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import concentration as conc
from .bump import BumpSpec, get_default_bump
from .errors import ScaleSearchError
from .intervals import Interval, IntervalSet, PeriodicBlockUnion, PeriodicIntervalSet
from .trig import DegreeCertificate, ScaledTrigPoly, TrigPoly, choose_degree, shifted_fejer

__all__ = [
    "LevelParams",
    "Level",
    "ScaleSearch",
    "Family",
    "GAP",
    "GAP_PERIOD",
    "build_support_set",
    "build_cell_set",
    "choose_scale",
    "build_level",
    "assemble_family",
    "build_family",
]

# the common gap every support set must avoid, with unit period
GAP = Interval(0.4, 0.6)
GAP_PERIOD = 1.0


@dataclass(frozen=True)
class LevelParams:
    """n, kernel degree d, scale N and compression L = 2^n (2d+1)."""

    n: int
    d: int
    N: int
    L: int

    def __post_init__(self):
        if self.n < 2 or self.d < 1:
            raise ValueError("need n >= 2 and d >= 1")
        if self.L != 2**self.n * (2 * self.d + 1):
            raise ValueError("L must equal 2^n (2d+1)")
        if self.N < self.L:
            raise ValueError("scale N must be at least L")


def build_support_set(params: LevelParams) -> PeriodicIntervalSet:
    """2d+1 intervals [jN, jN + 1/L) for |j| <= d, as a periodic set.

    The periodic representation keeps the measure exact: float endpoints
    jN + 1/L would absorb the tiny length entirely once jN is large.
    """
    pattern = IntervalSet([(0.0, 1.0 / params.L)])
    return PeriodicIntervalSet(pattern, float(params.N), -params.d, params.d)


def _cell_bounds_u(n: int) -> tuple[float, float]:
    hw = min(1.0 / n, 0.5)
    return 0.5 - hw, 0.5 + hw


def build_cell_set(params: LevelParams) -> PeriodicIntervalSet:
    """One cell per 1/N period, centered at half-integers over [-N, N]."""
    period = 1.0 / params.N
    ulo, uhi = _cell_bounds_u(params.n)
    pattern = IntervalSet([(ulo * period, uhi * period)])
    n_sq = params.N * params.N
    return PeriodicIntervalSet(pattern, period, -n_sq + 1, n_sq - 1)


@dataclass(frozen=True)
class Level:
    """One built level: sets, kernel, bump and (optionally) its report."""

    params: LevelParams
    poly: TrigPoly
    degree_cert: DegreeCertificate
    bump: BumpSpec
    support_set: PeriodicIntervalSet
    cell_set: PeriodicIntervalSet
    offset: float = 0.0
    report: conc.ConcentrationReport | None = None

    @property
    def cell_u(self) -> tuple[float, float]:
        return _cell_bounds_u(self.params.n)

    @property
    def window(self) -> tuple[float, float]:
        return (self.offset - self.params.N, self.offset + self.params.N)

    @property
    def scaled_poly(self) -> ScaledTrigPoly:
        return ScaledTrigPoly(self.poly, self.params.N)

    def cell_center(self, j: int) -> float:
        return self.offset + (j + 0.5) / self.params.N

    def eval_f_flagged(self, t) -> tuple[np.ndarray, np.ndarray]:
        """f at t (shifted by the block offset); envelope-bound beyond table.

        Values where the flag is set are |.|-bounds from the decay envelope,
        not evaluations.  Precision degrades once N*|t| nears 2^53; the mass
        integrators never evaluate here, they work in period coordinates.
        """
        p = self.params
        tt = np.asarray(t, dtype=np.float64) - self.offset
        pv = self.poly.eval(tt * p.N)
        g, beyond = self.bump.hat_signed_or_bound(tt / p.L)
        return pv * g / p.L, beyond

    def eval_f(self, t):
        vals, _ = self.eval_f_flagged(t)
        return float(vals) if np.ndim(t) == 0 else vals

    def translate(self, offset: float) -> "Level":
        return replace(self, offset=offset)

    def to_json(self) -> dict:
        p = self.params
        out = {
            "params": {"n": p.n, "d": p.d, "N": p.N, "L": p.L},
            "offset": self.offset,
            "support_set": self.support_set.to_json(),
            "cell_set": self.cell_set.to_json(),
            "bump": {"kind": self.bump.kind, "table_digest": self.bump.table_digest()},
            "degree_cert": {
                "m": self.degree_cert.m,
                "measured_max": self.degree_cert.measured_max,
                "analytic_bound": self.degree_cert.analytic_bound,
            },
        }
        if self.report is not None:
            r = self.report
            out["report"] = {
                "total_mass": r.total_mass,
                "mass_on_q": r.mass_on_q,
                "mass_off_q_in_window": r.mass_off_q_in_window,
                "tail_bound": r.tail_bound,
                "ratio": r.ratio,
                "method": r.method,
            }
        return out


@dataclass(frozen=True)
class ScaleCandidate:
    N: int
    total: float
    off: float
    tail: float
    accepted: bool


@dataclass(frozen=True)
class ScaleSearch:
    n: int
    target_ratio: float
    candidates: tuple[ScaleCandidate, ...]

    @property
    def accepted_N(self) -> int:
        return self.candidates[-1].N


def _level_at(n: int, N: int, bump: BumpSpec, cert: DegreeCertificate) -> Level:
    params = LevelParams(n=n, d=cert.degree, N=N, L=2**n * (2 * cert.degree + 1))
    return Level(
        params=params,
        poly=shifted_fejer(cert.m),
        degree_cert=cert,
        bump=bump,
        support_set=build_support_set(params),
        cell_set=build_cell_set(params),
    )


def choose_scale(
    n: int,
    *,
    bump: BumpSpec | None = None,
    target_c: float = 3.0,
    n_cap: int = 2**24,
    min_scale: float | None = None,
    method: str = "auto",
) -> tuple[Level, ScaleSearch]:
    """Double N from L until tail + off-cell mass <= (target_c/n) * total.

    Acceptance additionally forces the tail alone below half the budget,
    and N stays of the form L * 2^k so tail ratios between candidates are
    exact powers of 8.
    """
    if bump is None:
        bump = get_default_bump()
    cert = choose_degree(n)
    L = 2**n * (2 * cert.degree + 1)
    N = L
    while min_scale is not None and N < min_scale:
        N *= 2
    target = target_c / n
    rows = []
    while True:
        if N > n_cap:
            raise ScaleSearchError(
                f"n={n}: scale cap {n_cap} exceeded; candidates: "
                + ", ".join(f"(N={r.N}, off={r.off:.3e}, tail={r.tail:.3e})" for r in rows)
            )
        level = _level_at(n, N, bump, cert)
        masses = conc.window_masses(level, method=method)
        tail = conc.tail_bound(level.params, float(N), bump)
        off = masses.off_cells + masses.est_error
        ok = tail <= 0.5 * target * masses.total and tail + off <= target * masses.total
        rows.append(ScaleCandidate(N=N, total=masses.total, off=off, tail=tail, accepted=ok))
        if ok:
            return level, ScaleSearch(n=n, target_ratio=target, candidates=tuple(rows))
        N *= 2


def build_level(
    n: int,
    *,
    bump: BumpSpec | None = None,
    target_c: float = 3.0,
    n_cap: int = 2**24,
    min_scale: float | None = None,
    method: str = "auto",
) -> Level:
    level, _ = choose_scale(
        n, bump=bump, target_c=target_c, n_cap=n_cap, min_scale=min_scale, method=method
    )
    return replace(level, report=conc.concentration_ratio(level, method=method))


@dataclass(frozen=True)
class PlacementRow:
    n: int
    N: int
    offset: float
    left_edge: float
    right_edge: float
    block_measure: float
    cum_before: float
    density_at_left: float | None  # cum_before / left_edge, None for the first block


@dataclass(frozen=True)
class Family:
    """The assembled pair: union of supports and far-translated cell blocks."""

    levels: tuple[Level, ...]
    support_union: IntervalSet
    cell_union: PeriodicBlockUnion
    placements: tuple[PlacementRow, ...]
    target_c: float

    @property
    def reports(self) -> list[conc.ConcentrationReport]:
        return [lv.report for lv in self.levels if lv.report is not None]

    def to_json(self) -> dict:
        return {
            "target_c": self.target_c,
            "levels": [lv.to_json() for lv in self.levels],
            "support_union": self.support_union.to_json(),
            "cell_union": self.cell_union.to_json(),
            "placements": [
                {
                    "n": p.n,
                    "N": p.N,
                    "offset": p.offset,
                    "left_edge": p.left_edge,
                    "right_edge": p.right_edge,
                    "block_measure": p.block_measure,
                    "cum_before": p.cum_before,
                    "density_at_left": p.density_at_left,
                }
                for p in self.placements
            ],
        }


def assemble_family(levels, target_c: float = 3.0) -> Family:
    """Translate cell blocks apart and union the supports.

    Block n goes to offset M = N + max(previous right edge, n^2 * mass
    already placed, N): the left edge then dominates n^2 times the placed
    mass, which caps |Q ∩ (0, left)| / left by 1/n^2, while staying within
    a fixed multiple of N so each block keeps its ~1/n thinness.
    Translating a level moves f and its cells together, so reports are
    unaffected; supports are never translated.
    """
    levels = sorted(levels, key=lambda lv: lv.params.n)
    placed: list[Level] = []
    placements: list[PlacementRow] = []
    blocks = []
    cum = 0.0
    prev_right = 0.0
    support = IntervalSet.empty()
    for lv in levels:
        n, N = lv.params.n, float(lv.params.N)
        left = max(prev_right, n * n * cum, N)
        offset = N + left
        moved = lv.translate(offset)
        placed.append(moved)
        blocks.append((offset, lv.cell_set))
        bm = lv.cell_set.measure()
        placements.append(
            PlacementRow(
                n=n,
                N=lv.params.N,
                offset=offset,
                left_edge=left,
                right_edge=offset + N,
                block_measure=bm,
                cum_before=cum,
                density_at_left=(cum / left) if cum > 0 else None,
            )
        )
        cum += bm
        prev_right = offset + N
        support = support.union(lv.support_set.materialize_all())
    return Family(
        levels=tuple(placed),
        support_union=support,
        cell_union=PeriodicBlockUnion(blocks),
        placements=tuple(placements),
        target_c=target_c,
    )


def build_family(
    n_lo: int,
    n_hi: int,
    *,
    bump: BumpSpec | None = None,
    target_c: float = 3.0,
    n_cap: int = 2**24,
    method: str = "auto",
    enforce_decreasing: bool = True,
) -> Family:
    """Build levels n_lo..n_hi sequentially and assemble them.

    Each scale search starts no lower than n^2 times the mass of the cells
    already placed and twice the previous right edge; with the placement
    rule this pins the assembled density and thinness trends.  If a
    concentration ratio fails to drop below its predecessor the scale is
    doubled until it does.
    """
    if bump is None:
        bump = get_default_bump()
    if n_lo < 2 or n_hi < n_lo:
        raise ValueError("need 2 <= n_lo <= n_hi")
    levels: list[Level] = []
    cum = 0.0
    prev_right = 0.0
    prev_ratio = math.inf
    for n in range(n_lo, n_hi + 1):
        min_scale = max(n * n * cum, 2.0 * prev_right)
        level, _ = choose_scale(
            n, bump=bump, target_c=target_c, n_cap=n_cap, min_scale=min_scale, method=method
        )
        report = conc.concentration_ratio(level, method=method)
        while enforce_decreasing and report.ratio >= prev_ratio:
            bigger = level.params.N * 2
            if bigger > n_cap:
                raise ScaleSearchError(
                    f"n={n}: cannot drive ratio below previous level within cap {n_cap}"
                )
            level = _level_at(n, bigger, bump, level.degree_cert)
            report = conc.concentration_ratio(level, method=method)
        level = replace(level, report=report)
        levels.append(level)
        prev_ratio = report.ratio
        # mirror the placement bookkeeping to constrain the next level
        N = float(level.params.N)
        left = max(prev_right, n * n * cum, N)
        prev_right = left + 2.0 * N
        cum += level.cell_set.measure()
    return assemble_family(levels, target_c=target_c)
