"""Exact algebra for finite and periodic unions of half-open intervals.

Every set here is a finite disjoint union of [lo, hi) intervals stored as
sorted endpoint arrays, or a lazily repeated pattern
(:class:`PeriodicIntervalSet`) that is only ever expanded against a bounded
window.  Endpoints are float64 compared exactly: adjacent intervals merge
only on exact endpoint equality, so no epsilon ever leaks into measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import GapCheckError

__all__ = [
    "Interval",
    "IntervalSet",
    "PeriodicIntervalSet",
    "PeriodicBlockUnion",
    "MultiplicityProfile",
    "GapNormalization",
    "ThinnessReport",
    "union",
    "intersect",
    "complement_within",
    "measure",
    "measure_within",
    "density_profile",
    "epsilon_thin_check",
    "periodic_gap_check",
    "projection_and_multiplicity",
    "sigma_from_gap",
]

# Refuse to expand periodic sets past this many intervals; counting paths
# exist for every global quantity, so hitting it means a caller bug.
MAX_MATERIALIZED = 20_000_000


@dataclass(frozen=True)
class Interval:
    """A nonempty half-open interval [lo, hi)."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"endpoints must be finite, got [{self.lo}, {self.hi})")
        if not self.lo < self.hi:
            raise ValueError(f"empty or inverted interval [{self.lo}, {self.hi})")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x < self.hi

    def translate(self, dt: float) -> "Interval":
        return Interval(self.lo + dt, self.hi + dt)


def _canonicalize(los: np.ndarray, his: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    keep = los < his
    los, his = los[keep], his[keep]
    if los.size == 0:
        return los, his
    order = np.argsort(los, kind="stable")
    los, his = los[order], his[order]
    running = np.maximum.accumulate(his)
    starts = np.empty(los.size, dtype=bool)
    starts[0] = True
    starts[1:] = los[1:] > running[:-1]
    idx = np.nonzero(starts)[0]
    return los[idx], np.maximum.reduceat(running, idx)


class IntervalSet:
    """Canonical finite disjoint union of half-open intervals.

    Invariants: intervals sorted, pairwise disjoint, with strictly positive
    gaps between consecutive ones (touching intervals are merged exactly).
    Instances are immutable; all operations return new sets.
    """

    __slots__ = ("_los", "_his")

    def __init__(self, pairs: Sequence = ()):
        pairs = list(pairs)
        los = np.array([p[0] for p in pairs], dtype=np.float64)
        his = np.array([p[1] for p in pairs], dtype=np.float64)
        if los.size and not (np.all(np.isfinite(los)) and np.all(np.isfinite(his))):
            raise ValueError("interval endpoints must be finite")
        if np.any(los > his):
            raise ValueError("inverted interval in input")
        self._los, self._his = _canonicalize(los, his)
        self._los.flags.writeable = False
        self._his.flags.writeable = False

    @classmethod
    def _from_canonical(cls, los: np.ndarray, his: np.ndarray) -> "IntervalSet":
        out = object.__new__(cls)
        out._los = los
        out._his = his
        los.flags.writeable = False
        his.flags.writeable = False
        return out

    @classmethod
    def from_arrays(cls, los, his) -> "IntervalSet":
        """Build from endpoint arrays, canonicalizing as needed."""
        los = np.asarray(los, dtype=np.float64)
        his = np.asarray(his, dtype=np.float64)
        if los.size and not (np.all(np.isfinite(los)) and np.all(np.isfinite(his))):
            raise ValueError("interval endpoints must be finite")
        l, h = _canonicalize(los.copy(), his.copy())
        return cls._from_canonical(l, h)

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls()

    # -- basic queries ----------------------------------------------------

    @property
    def los(self) -> np.ndarray:
        return self._los

    @property
    def his(self) -> np.ndarray:
        return self._his

    def __len__(self) -> int:
        return int(self._los.size)

    def __bool__(self) -> bool:
        return self._los.size > 0

    def __iter__(self) -> Iterator[Interval]:
        for lo, hi in zip(self._los, self._his):
            yield Interval(float(lo), float(hi))

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return np.array_equal(self._los, other._los) and np.array_equal(self._his, other._his)

    def __hash__(self):
        return hash((self._los.tobytes(), self._his.tobytes()))

    def __repr__(self) -> str:
        if len(self) <= 4:
            body = ", ".join(f"[{lo}, {hi})" for lo, hi in zip(self._los, self._his))
        else:
            body = f"{len(self)} intervals over [{self._los[0]}, {self._his[-1]})"
        return f"IntervalSet({body})"

    def span(self) -> tuple[float, float]:
        if not self:
            return (0.0, 0.0)
        return float(self._los[0]), float(self._his[-1])

    def measure(self) -> float:
        return float(np.sum(self._his - self._los))

    def measure_within(self, lo: float, hi: float) -> float:
        if not self or hi <= lo:
            return 0.0
        l = np.clip(self._los, lo, hi)
        h = np.clip(self._his, lo, hi)
        return float(np.sum(np.maximum(h - l, 0.0)))

    def contains_points(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if not self:
            return np.zeros(xs.shape, dtype=bool)
        idx = np.searchsorted(self._los, xs, side="right") - 1
        ok = idx >= 0
        return ok & (xs < self._his[np.clip(idx, 0, len(self) - 1)])

    def contains(self, x: float) -> bool:
        return bool(self.contains_points(np.array([x]))[0])

    # -- algebra -----------------------------------------------------------

    def union(self, other: "IntervalSet") -> "IntervalSet":
        los = np.concatenate([self._los, other._los])
        his = np.concatenate([self._his, other._his])
        return IntervalSet._from_canonical(*_canonicalize(los, his))

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        if not self or not other:
            return IntervalSet.empty()
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        parts_lo, parts_hi = [], []
        for lo, hi in zip(small._los, small._his):
            i0 = np.searchsorted(big._his, lo, side="right")
            i1 = np.searchsorted(big._los, hi, side="left")
            if i1 > i0:
                parts_lo.append(np.maximum(big._los[i0:i1], lo))
                parts_hi.append(np.minimum(big._his[i0:i1], hi))
        if not parts_lo:
            return IntervalSet.empty()
        los = np.concatenate(parts_lo)
        his = np.concatenate(parts_hi)
        # pieces inherit sortedness and strict gaps from the operands
        return IntervalSet._from_canonical(los, his)

    def complement_within(self, window: Interval) -> "IntervalSet":
        clipped = self.intersect(IntervalSet([(window.lo, window.hi)]))
        los = np.concatenate([[window.lo], clipped._his])
        his = np.concatenate([clipped._los, [window.hi]])
        keep = los < his
        return IntervalSet._from_canonical(los[keep].copy(), his[keep].copy())

    def translate(self, dt: float) -> "IntervalSet":
        if dt == 0.0 or not self:
            return self
        return IntervalSet._from_canonical(self._los + dt, self._his + dt)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> list:
        return [[float(lo), float(hi)] for lo, hi in zip(self._los, self._his)]

    @classmethod
    def from_json(cls, data) -> "IntervalSet":
        return cls(data)


class PeriodicIntervalSet:
    """A base pattern repeated at k*period for index_lo <= k <= index_hi.

    The pattern must lie inside [0, period).  Copies are never expanded
    except against a bounded window; measures over windows are computed by
    counting whole copies and materializing at most the two edge copies.
    """

    __slots__ = ("pattern", "period", "index_lo", "index_hi")

    def __init__(self, pattern: IntervalSet, period: float, index_lo: int, index_hi: int):
        if not (math.isfinite(period) and period > 0):
            raise ValueError("period must be positive and finite")
        if index_lo > index_hi:
            raise ValueError("index_lo must not exceed index_hi")
        if pattern:
            lo, hi = pattern.span()
            if lo < 0 or hi > period:
                raise ValueError("pattern must be contained in [0, period)")
        self.pattern = pattern
        self.period = float(period)
        self.index_lo = int(index_lo)
        self.index_hi = int(index_hi)

    def __repr__(self) -> str:
        return (
            f"PeriodicIntervalSet({len(self.pattern)}-interval pattern, period={self.period}, "
            f"k={self.index_lo}..{self.index_hi})"
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, PeriodicIntervalSet):
            return NotImplemented
        return (
            self.pattern == other.pattern
            and self.period == other.period
            and self.index_lo == other.index_lo
            and self.index_hi == other.index_hi
        )

    @property
    def copy_count(self) -> int:
        return self.index_hi - self.index_lo + 1

    def measure(self) -> float:
        return self.copy_count * self.pattern.measure()

    def span(self) -> tuple[float, float]:
        if not self.pattern:
            return (0.0, 0.0)
        plo, phi = self.pattern.span()
        return self.index_lo * self.period + plo, self.index_hi * self.period + phi

    def _copies_overlapping(self, lo: float, hi: float) -> tuple[int, int]:
        if not self.pattern:
            return (0, -1)
        plo, phi = self.pattern.span()
        ka = math.ceil((lo - phi) / self.period)
        while ka * self.period + phi <= lo:
            ka += 1
        kb = math.floor((hi - plo) / self.period)
        while kb * self.period + plo >= hi:
            kb -= 1
        return max(ka, self.index_lo), min(kb, self.index_hi)

    def materialize(self, lo: float, hi: float, max_intervals: int = MAX_MATERIALIZED) -> IntervalSet:
        """Expand the copies overlapping [lo, hi) and clip to the window."""
        ka, kb = self._copies_overlapping(lo, hi)
        if kb < ka:
            return IntervalSet.empty()
        n = (kb - ka + 1) * len(self.pattern)
        if n > max_intervals:
            raise MemoryError(f"materialization of {n} intervals exceeds guard {max_intervals}")
        offs = np.arange(ka, kb + 1, dtype=np.float64) * self.period
        los = (offs[:, None] + self.pattern.los[None, :]).ravel()
        his = (offs[:, None] + self.pattern.his[None, :]).ravel()
        np.clip(los, lo, hi, out=los)
        np.clip(his, lo, hi, out=his)
        return IntervalSet.from_arrays(los, his)

    def materialize_all(self, max_intervals: int = MAX_MATERIALIZED) -> IntervalSet:
        lo, hi = self.span()
        return self.materialize(lo, hi + self.period, max_intervals)

    def intersect(self, other: IntervalSet) -> IntervalSet:
        if not other or not self.pattern:
            return IntervalSet.empty()
        lo, hi = other.span()
        return self.materialize(lo, hi).intersect(other)

    def measure_within(self, lo: float, hi: float) -> float:
        """|self ∩ [lo, hi)| by counting whole copies; O(pattern) time."""
        if hi <= lo or not self.pattern:
            return 0.0
        ka, kb = self._copies_overlapping(lo, hi)
        if kb < ka:
            return 0.0
        if kb - ka <= 1:
            return sum(
                self.pattern.measure_within(lo - k * self.period, hi - k * self.period)
                for k in range(ka, kb + 1)
            )
        # copies strictly between the edge copies are entirely inside [lo, hi)
        inner = (kb - ka - 1) * self.pattern.measure()
        edges = self.pattern.measure_within(
            lo - ka * self.period, hi - ka * self.period
        ) + self.pattern.measure_within(lo - kb * self.period, hi - kb * self.period)
        return inner + edges

    def contains_points(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if not self.pattern:
            return np.zeros(xs.shape, dtype=bool)
        k = np.floor(xs / self.period)
        resid = xs - k * self.period
        low = resid < 0.0
        k[low] -= 1.0
        resid[low] += self.period
        high = resid >= self.period
        k[high] += 1.0
        resid[high] -= self.period
        ok = (k >= self.index_lo) & (k <= self.index_hi)
        return ok & self.pattern.contains_points(resid)

    def contains(self, x: float) -> bool:
        return bool(self.contains_points(np.array([x]))[0])

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern.to_json(),
            "period": self.period,
            "index_lo": self.index_lo,
            "index_hi": self.index_hi,
        }

    @classmethod
    def from_json(cls, data) -> "PeriodicIntervalSet":
        return cls(
            IntervalSet.from_json(data["pattern"]),
            data["period"],
            data["index_lo"],
            data["index_hi"],
        )


class PeriodicBlockUnion:
    """Disjoint union of translated periodic sets (offset, block)."""

    __slots__ = ("blocks",)

    def __init__(self, blocks: Sequence[tuple[float, PeriodicIntervalSet]]):
        self.blocks = sorted(
            ((float(off), b) for off, b in blocks), key=lambda ob: ob[0] + ob[1].span()[0]
        )

    def __len__(self) -> int:
        return len(self.blocks)

    def measure(self) -> float:
        return sum(b.measure() for _, b in self.blocks)

    def span(self) -> tuple[float, float]:
        spans = [(off + b.span()[0], off + b.span()[1]) for off, b in self.blocks]
        return min(s[0] for s in spans), max(s[1] for s in spans)

    def measure_within(self, lo: float, hi: float) -> float:
        return sum(b.measure_within(lo - off, hi - off) for off, b in self.blocks)

    def contains_points(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        out = np.zeros(xs.shape, dtype=bool)
        for off, b in self.blocks:
            out |= b.contains_points(xs - off)
        return out

    def materialize(self, lo: float, hi: float, max_intervals: int = MAX_MATERIALIZED) -> IntervalSet:
        acc = IntervalSet.empty()
        for off, b in self.blocks:
            acc = acc.union(b.materialize(lo - off, hi - off, max_intervals).translate(off))
        return acc

    def to_json(self) -> dict:
        return {"blocks": [{"offset": off, "set": b.to_json()} for off, b in self.blocks]}

    @classmethod
    def from_json(cls, data) -> "PeriodicBlockUnion":
        return cls(
            [(blk["offset"], PeriodicIntervalSet.from_json(blk["set"])) for blk in data["blocks"]]
        )


SetLike = IntervalSet | PeriodicIntervalSet | PeriodicBlockUnion


# -- module-level operations ------------------------------------------------


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.union(b)


def intersect(a: IntervalSet | PeriodicIntervalSet, b: IntervalSet) -> IntervalSet:
    return a.intersect(b)


def complement_within(a: IntervalSet, window: Interval) -> IntervalSet:
    return a.complement_within(window)


def measure(a: SetLike) -> float:
    return a.measure()


def measure_within(a: SetLike, lo: float, hi: float) -> float:
    return a.measure_within(lo, hi)


def density_profile(q: SetLike, radii) -> list[tuple[float, float]]:
    """Ratios |q ∩ (-r, r)| / r; a density-zero audit wants these small."""
    out = []
    for r in radii:
        r = float(r)
        if r <= 0:
            raise ValueError("radii must be positive")
        out.append((r, q.measure_within(-r, r) / r))
    return out


@dataclass(frozen=True)
class ThinnessReport:
    passed: bool
    worst_ratio: float
    worst_probe: float
    eps: float

    @property
    def required_eps(self) -> float:
        """Smallest eps for which every probe would pass."""
        return self.worst_ratio * self.eps


def epsilon_thin_check(q: SetLike, eps: float, probes) -> ThinnessReport:
    """Check |q ∩ [x-rho, x+rho]| <= 2*eps*rho(x), rho(x) = min(1, 1/|x|)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    worst = -1.0
    worst_x = 0.0
    for x in np.asarray(probes, dtype=np.float64).ravel():
        rho = 1.0 if abs(x) <= 1.0 else 1.0 / abs(x)
        ratio = q.measure_within(x - rho, x + rho) / (2.0 * eps * rho)
        if ratio > worst:
            worst, worst_x = ratio, float(x)
    return ThinnessReport(passed=bool(worst <= 1.0), worst_ratio=worst, worst_probe=worst_x, eps=eps)


def _interval_meets_translates(lo, hi, gap: Interval, period, k_lo_lim, k_hi_lim) -> bool:
    # candidates k with (gap + k*period) ∩ [lo, hi) nonempty
    ka = math.floor((lo - gap.hi) / period) + 1
    while gap.hi + ka * period <= lo:
        ka += 1
    kb = math.ceil((hi - gap.lo) / period) - 1
    while gap.lo + kb * period >= hi:
        kb -= 1
    ka = max(ka, k_lo_lim) if k_lo_lim is not None else ka
    kb = min(kb, k_hi_lim) if k_hi_lim is not None else kb
    return ka <= kb


def periodic_gap_check(
    s: IntervalSet | PeriodicIntervalSet,
    gap: Interval,
    period: float,
    window: Interval | None = None,
) -> bool:
    """True iff s ∩ (gap + k*period) = ∅ for every translate meeting window."""
    if period <= 0:
        raise ValueError("period must be positive")
    k_lo_lim = k_hi_lim = None
    if window is not None:
        k_lo_lim = math.floor((window.lo - gap.hi) / period) + 1
        k_hi_lim = math.ceil((window.hi - gap.lo) / period) - 1
    if isinstance(s, PeriodicIntervalSet):
        ratio = s.period / period
        if abs(ratio - round(ratio)) < 1e-12 and round(ratio) >= 1:
            # every copy sees the same translates modulo the gap period
            return periodic_gap_check(s.pattern, gap, period, window=None)
        lo, hi = s.span()
        s = s.materialize(lo, hi + s.period)
    for lo, hi in zip(s.los, s.his):
        if _interval_meets_translates(lo, hi, gap, period, k_lo_lim, k_hi_lim):
            return False
    return True


@dataclass(frozen=True)
class GapNormalization:
    """Gap length relative to a unit period, plus where the gap sits."""

    sigma: float
    offset: float


def sigma_from_gap(
    s: IntervalSet | PeriodicIntervalSet, period: float, gap: Interval
) -> GapNormalization:
    if not periodic_gap_check(s, gap, period):
        raise GapCheckError(
            f"gap [{gap.lo}, {gap.hi}) with period {period} intersects the set"
        )
    return GapNormalization(
        sigma=gap.length / period, offset=(gap.lo % period) / period
    )


class MultiplicityProfile:
    """Piecewise-constant w(t) on [0, 1): how many integer translates of t
    land in the source set.  Breakpoints are exact endpoint images."""

    __slots__ = ("ts", "ws")

    def __init__(self, ts: np.ndarray, ws: np.ndarray):
        self.ts = np.asarray(ts, dtype=np.float64)
        self.ws = np.asarray(ws, dtype=np.int64)
        if self.ts.size != self.ws.size or self.ts.size == 0 or self.ts[0] != 0.0:
            raise ValueError("profile must start at t=0 with matching arrays")

    @property
    def breakpoints(self) -> list[tuple[float, int]]:
        return [(float(t), int(w)) for t, w in zip(self.ts, self.ws)]

    def _edges(self) -> np.ndarray:
        return np.concatenate([self.ts, [1.0]])

    def integral(self) -> float:
        return float(np.sum(self.ws * np.diff(self._edges())))

    def value_at(self, t: float) -> int:
        if not 0.0 <= t < 1.0:
            raise ValueError("t must lie in [0, 1)")
        return int(self.ws[np.searchsorted(self.ts, t, side="right") - 1])

    def superlevel(self, threshold: float) -> IntervalSet:
        """{t : w(t) > threshold} as an interval set."""
        edges = self._edges()
        mask = self.ws > threshold
        return IntervalSet.from_arrays(edges[:-1][mask], edges[1:][mask])

    def support(self) -> IntervalSet:
        return self.superlevel(0.5)

    def max_value(self) -> int:
        return int(self.ws.max()) if self.ws.size else 0


def projection_and_multiplicity(s: IntervalSet | PeriodicIntervalSet) -> MultiplicityProfile:
    """Fold a bounded set into [0, 1) and count overlapping translates."""
    if isinstance(s, PeriodicIntervalSet):
        s = s.materialize_all()
    if not s:
        return MultiplicityProfile(np.array([0.0]), np.array([0]))
    los, his = s.los, s.his
    cell0 = np.floor(los)
    counts = (np.ceil(his) - cell0).astype(np.int64)
    counts = np.maximum(counts, 1)
    total = int(counts.sum())
    if total > MAX_MATERIALIZED:
        raise MemoryError("set spans too many integer cells to project")
    rep_lo = np.repeat(los, counts)
    rep_hi = np.repeat(his, counts)
    base = np.repeat(cell0, counts)
    inner = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    cells = base + inner
    plo = np.maximum(rep_lo, cells) - cells
    phi = np.minimum(rep_hi, cells + 1.0) - cells
    keep = phi > plo
    plo, phi = plo[keep], phi[keep]
    pos = np.concatenate([plo, phi, [0.0, 1.0]])
    deltas = np.concatenate(
        [np.ones(plo.size, np.int64), -np.ones(phi.size, np.int64), [0, 0]]
    )
    order = np.argsort(pos, kind="stable")
    pos, deltas = pos[order], deltas[order]
    levels = np.cumsum(deltas)
    last_of_run = np.empty(pos.size, dtype=bool)
    last_of_run[:-1] = pos[:-1] != pos[1:]
    last_of_run[-1] = True
    ts = pos[last_of_run]
    ws = levels[last_of_run]
    inside = ts < 1.0
    ts, ws = ts[inside], ws[inside]
    changed = np.empty(ts.size, dtype=bool)
    changed[0] = True
    changed[1:] = ws[1:] != ws[:-1]
    return MultiplicityProfile(ts[changed], ws[changed])
