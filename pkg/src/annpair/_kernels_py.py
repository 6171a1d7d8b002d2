"""NumPy implementations of the hot kernels.

These are the reference semantics for the compiled extension in
``_kernels.pyx``; both backends must agree to ~1e-12 relative.  Everything
here is vectorized and chunked so peak memory stays bounded even for
quadratures with ~1e8 sample points.
"""

from __future__ import annotations

import numpy as np

# Soft cap on scratch array size used when batching quadrature samples.
_CHUNK_POINTS = 1 << 22


def cos_series_eval(half_coeffs: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Evaluate c0 + 2*sum_k c_k cos(2*pi*k*t) for k = 1..d.

    ``half_coeffs`` holds c_0..c_d of a real even trigonometric polynomial.
    Uses the cosine multiple-angle recurrence so only one cos() per point is
    needed; arguments are range-reduced with fmod first (exact in IEEE).
    """
    c = np.ascontiguousarray(half_coeffs, dtype=np.float64)
    t = np.asarray(ts, dtype=np.float64)
    u = np.fmod(t, 1.0)
    acc = np.full(u.shape, c[0])
    if c.size == 1:
        return acc
    c1 = np.cos(2.0 * np.pi * u)
    prev = np.ones_like(u)  # cos(0)
    cur = c1.copy()  # cos(2*pi*u)
    acc += 2.0 * c[1] * cur
    for k in range(2, c.size):
        prev, cur = cur, 2.0 * c1 * cur - prev
        acc += 2.0 * c[k] * cur
    return acc


def cubic_interp(table: np.ndarray, x0: float, dx: float, xs: np.ndarray) -> np.ndarray:
    """Catmull-Rom interpolation on a uniform grid.

    The stencil needs one point on each side of the query cell, so valid
    queries lie in [x0 + dx, x0 + (n-2)*dx]; callers pad their tables.
    Out-of-range queries are clamped to the nearest valid cell.
    """
    tab = np.ascontiguousarray(table, dtype=np.float64)
    x = np.asarray(xs, dtype=np.float64)
    pos = (x - x0) / dx
    i = np.clip(np.floor(pos).astype(np.int64), 1, tab.size - 3)
    lam = pos - i
    p0 = tab[i - 1]
    p1 = tab[i]
    p2 = tab[i + 1]
    p3 = tab[i + 2]
    return 0.5 * (
        2.0 * p1
        + lam
        * (
            (p2 - p0)
            + lam * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) + lam * (3.0 * (p1 - p2) + p3 - p0))
        )
    )


def _simpson_weights(npts: int) -> np.ndarray:
    w = np.full(npts, 2.0)
    w[1::2] = 4.0
    w[0] = 1.0
    w[-1] = 1.0
    return w


def _eval_sq(half_coeffs, freq, inv_l, table, x0, dx, ts):
    vals = cos_series_eval(half_coeffs, freq * ts)
    env = cubic_interp(table, x0, dx, np.abs(ts * inv_l))
    prod = vals * env * inv_l
    return prod * prod


def fused_sq_mass(
    half_coeffs: np.ndarray,
    freq: float,
    inv_l: float,
    table: np.ndarray,
    x0: float,
    dx: float,
    piece_los: np.ndarray,
    piece_his: np.ndarray,
    max_step: float,
) -> tuple[float, int, int]:
    """Composite Simpson quadrature of (P(freq*t) * env(t*inv_l) * inv_l)^2.

    Integrates over every [lo, hi) piece with a local step <= max_step and
    returns (mass, total sample points, samples beyond the table range).
    Pieces are batched by their point count so the work stays vectorized.
    """
    los = np.asarray(piece_los, dtype=np.float64)
    his = np.asarray(piece_his, dtype=np.float64)
    if los.size == 0:
        return 0.0, 0, 0
    lens = his - los
    # odd point counts, at least 5 per piece
    npts = 2 * np.ceil(lens / (2.0 * max_step)).astype(np.int64) + 1
    npts = np.maximum(npts, 5)
    s_hi = x0 + (table.size - 2) * dx
    total = 0.0
    total_pts = 0
    clamped = 0
    for m in np.unique(npts):
        sel = np.nonzero(npts == m)[0]
        h = lens[sel] / (m - 1)
        w = _simpson_weights(int(m))
        rows_per_chunk = max(1, _CHUNK_POINTS // int(m))
        for start in range(0, sel.size, rows_per_chunk):
            idx = sel[start : start + rows_per_chunk]
            hh = h[start : start + rows_per_chunk]
            ts = los[idx][:, None] + hh[:, None] * np.arange(int(m))[None, :]
            sq = _eval_sq(half_coeffs, freq, inv_l, table, x0, dx, ts.ravel())
            clamped += int(np.count_nonzero(np.abs(ts.ravel() * inv_l) > s_hi))
            sq = sq.reshape(ts.shape)
            total += float(np.sum((sq @ w) * (hh / 3.0)))
            total_pts += ts.size
    return total, total_pts, clamped
