"""Shifted-lattice counting against exclusion sets.

All counts are exact: integers k with k+alpha inside a half-open interval
are counted with ceil arithmetic on the endpoints, and periodic sets whose
period is the reciprocal of an integer are counted in O(pattern) time via
the resonance of the unit lattice with the period (every lattice point has
the same residue).  Nothing here samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AvoidanceError, IdentityError, InsufficientAlphasError
from .intervals import (
    Interval,
    IntervalSet,
    MultiplicityProfile,
    PeriodicBlockUnion,
    PeriodicIntervalSet,
    projection_and_multiplicity,
)

__all__ = [
    "lattice_points_in_set",
    "lattice_density",
    "IdentityReport",
    "averaged_identity",
    "high_density_alphas",
    "BlockCertificate",
    "block_certificate",
    "BlockAudit",
    "block_audit",
    "van_der_corput",
    "PointAssembly",
    "assemble_points",
]


def _count_half_open(beta: float, lo: float, hi: float, kmin: int, kmax: int) -> int:
    """#{k in [kmin, kmax] : k + beta in [lo, hi)}."""
    ka = max(math.ceil(lo - beta), kmin)
    kb = min(math.ceil(hi - beta) - 1, kmax)
    return max(0, kb - ka + 1)


def _count_in_plain(s: IntervalSet, beta: float, kmin: int, kmax: int) -> int:
    if not s or kmax < kmin:
        return 0
    ka = np.maximum(np.ceil(s.los - beta), float(kmin))
    kb = np.minimum(np.ceil(s.his - beta) - 1.0, float(kmax))
    return int(np.sum(np.maximum(kb - ka + 1.0, 0.0)))


def _count_in_periodic(pset: PeriodicIntervalSet, beta: float, kmin: int, kmax: int) -> int:
    if not pset.pattern or kmax < kmin:
        return 0
    inv = round(1.0 / pset.period)
    if inv >= 1 and abs(inv * pset.period - 1.0) <= 1e-9:
        # unit-lattice resonance: k + beta has one residue mod the period
        z0 = inv * beta
        f0 = math.floor(z0)
        rho = z0 - f0
        hit = any(lo * inv <= rho < hi * inv for lo, hi in zip(pset.pattern.los, pset.pattern.his))
        if not hit:
            return 0
        # copy index of k + beta is inv*k + f0; clamp to the index range
        ka = max(kmin, -((f0 - pset.index_lo) // inv))
        kb = min(kmax, (pset.index_hi - f0) // inv)
        return max(0, kb - ka + 1)
    lo, hi = kmin + beta, kmax + beta + 1.0
    return _count_in_plain(pset.materialize(lo, hi), beta, kmin, kmax)


def lattice_points_in_set(q, alpha: float, kmin: int, kmax: int) -> int:
    """#{k in [kmin, kmax] : k + alpha in q}, exactly."""
    if isinstance(q, IntervalSet):
        return _count_in_plain(q, alpha, kmin, kmax)
    if isinstance(q, PeriodicIntervalSet):
        return _count_in_periodic(q, alpha, kmin, kmax)
    if isinstance(q, PeriodicBlockUnion):
        return sum(_count_in_periodic(b, alpha - off, kmin, kmax) for off, b in q.blocks)
    raise TypeError(f"unsupported set type {type(q).__name__}")


def lattice_density(alpha: float, r: float, q) -> float:
    """#[(alpha + Z) ∩ q^c ∩ (0, r)] / r with the window open on both sides."""
    if r <= 0:
        raise ValueError("r must be positive")
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    kmin = math.floor(-alpha) + 1
    kmax = math.ceil(r - alpha) - 1
    total = max(0, kmax - kmin + 1)
    if total == 0:
        return 0.0
    return (total - lattice_points_in_set(q, alpha, kmin, kmax)) / r


@dataclass(frozen=True)
class IdentityReport:
    lhs: float  # exact integral over alpha of the lattice density
    rhs: float  # |q^c ∩ (0, r)| / r
    r: float

    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)


def _free_set(q, r: float) -> IntervalSet:
    window = Interval(0.0, r)
    if isinstance(q, IntervalSet):
        inside = q
    else:
        inside = q.materialize(0.0, r)
    return inside.complement_within(window)


def averaged_identity(q, r: float, tol: float = 1e-12) -> IdentityReport:
    """Check that the alpha-average of the lattice density is |q^c ∩ (0,r)|/r.

    The density is piecewise constant in alpha with breakpoints at the
    fractional parts of the endpoints, so the left side is an exact step
    integral (it is the multiplicity profile of the free set).  Violation
    beyond tol means endpoint bookkeeping broke somewhere; raise.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    free = _free_set(q, r)
    profile = projection_and_multiplicity(free)
    lhs = profile.integral() / r
    rhs = free.measure() / r
    rep = IdentityReport(lhs=lhs, rhs=rhs, r=r)
    if rep.gap > tol:
        raise IdentityError(f"averaged identity off by {rep.gap} at r={r}")
    return rep


def high_density_alphas(q, r: float, sigma: float) -> IntervalSet:
    """{alpha in [0,1) : lattice density at radius r exceeds 1 - sigma/4}."""
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")
    if r <= 0:
        raise ValueError("r must be positive")
    profile = projection_and_multiplicity(_free_set(q, r))
    return profile.superlevel((1.0 - sigma / 4.0) * r)


@dataclass(frozen=True)
class BlockCertificate:
    """Lattice count against q over one dyadic block [2^j, 2^{j+1})."""

    alpha: float
    j: int
    count: int
    threshold: float
    passed: bool


def block_certificate(alpha: float, j: int, q, sigma: float) -> BlockCertificate:
    if j < 0:
        raise ValueError("block index must be nonnegative")
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie in (0, 1)")
    lo, hi = float(2**j), float(2 ** (j + 1))
    kmin = math.ceil(lo - alpha)
    kmax = math.ceil(hi - alpha) - 1
    total = max(0, kmax - kmin + 1)
    inside = lattice_points_in_set(q, alpha, kmin, kmax)
    count = total - inside
    threshold = (1.0 - sigma / 2.0) * 2**j
    return BlockCertificate(
        alpha=alpha, j=j, count=count, threshold=threshold, passed=count > threshold
    )


@dataclass(frozen=True)
class BlockAudit:
    alpha: float
    certificates: tuple[BlockCertificate, ...]
    n_passed: int
    largest_passing_j: int  # -1 when nothing passed
    largest_failing_j: int  # -1 when everything passed

    def tail_passes_from(self, j_start: int) -> bool:
        return all(c.passed for c in self.certificates if c.j >= j_start)


def block_audit(alpha: float, q, sigma: float, j_max: int) -> BlockAudit:
    """Certificates for every block j <= j_max.

    This is a finite prefix only: it can report how far the passing blocks
    reach, never the infinite condition itself.
    """
    certs = tuple(block_certificate(alpha, j, q, sigma) for j in range(j_max + 1))
    passing = [c.j for c in certs if c.passed]
    failing = [c.j for c in certs if not c.passed]
    return BlockAudit(
        alpha=alpha,
        certificates=certs,
        n_passed=len(passing),
        largest_passing_j=max(passing, default=-1),
        largest_failing_j=max(failing, default=-1),
    )


def van_der_corput(j: int) -> float:
    """Binary radical inverse of j >= 1; dense and equidistributed in [0,1)."""
    if j < 1:
        raise ValueError("index must be >= 1")
    value = 0.0
    scale = 0.5
    while j > 0:
        value += (j & 1) * scale
        j >>= 1
        scale /= 2.0
    return value


@dataclass(frozen=True)
class PointAssembly:
    """Merged shifted-lattice points avoiding q, with audit bookkeeping."""

    alphas: tuple[float, ...]
    skipped_alphas: tuple[float, ...]
    points: np.ndarray
    per_alpha_counts: tuple[int, ...]
    window: tuple[float, float]
    audit_tail_start: int

    def to_json(self) -> dict:
        return {
            "alphas": list(self.alphas),
            "skipped_alphas": list(self.skipped_alphas),
            "window": list(self.window),
            "audit_tail_start": self.audit_tail_start,
            "per_alpha_counts": list(self.per_alpha_counts),
            "points": [float(x) for x in self.points],
        }


def assemble_points(
    q,
    sigma: float,
    count: int,
    window: Interval,
    audit_j_max: int,
    *,
    max_candidates: int | None = None,
) -> PointAssembly:
    """Merge (Z + alpha_j) ∩ q^c over audited radical-inverse shifts.

    A shift is accepted when every block in the top quarter of the audited
    range passes (the finite stand-in for "infinitely many blocks").
    Emitted points are re-checked against q; any hit raises.
    """
    if count < 1:
        raise ValueError("need count >= 1")
    if max_candidates is None:
        max_candidates = 8 * count + 64
    tail_start = max(0, audit_j_max - max(2, audit_j_max // 4))
    used: list[float] = []
    skipped: list[float] = []
    chunks: list[np.ndarray] = []
    per_counts: list[int] = []
    j = 1
    while len(used) < count and j <= max_candidates:
        alpha = van_der_corput(j)
        j += 1
        audit = block_audit(alpha, q, sigma, audit_j_max)
        if not audit.tail_passes_from(tail_start):
            skipped.append(alpha)
            continue
        kmin = math.ceil(window.lo - alpha)
        kmax = math.ceil(window.hi - alpha) - 1
        pts = np.arange(kmin, kmax + 1, dtype=np.float64) + alpha
        pts = pts[~q.contains_points(pts)]
        used.append(alpha)
        per_counts.append(int(pts.size))
        chunks.append(pts)
    if len(used) < count:
        raise InsufficientAlphasError(
            f"only {len(used)} of {count} shifts passed the audit "
            f"({len(skipped)} skipped, {j - 1} tried)"
        )
    points = np.unique(np.concatenate(chunks)) if chunks else np.empty(0)
    if points.size and bool(np.any(q.contains_points(points))):
        raise AvoidanceError("an emitted point lies inside the excluded set")
    return PointAssembly(
        alphas=tuple(used),
        skipped_alphas=tuple(skipped),
        points=points,
        per_alpha_counts=tuple(per_counts),
        window=(window.lo, window.hi),
        audit_tail_start=tail_start,
    )
