"""Real even 1-periodic trigonometric polynomials and kernel certificates.

Evaluation goes through the selected backend kernel (compiled or NumPy) as
a cosine sum c0 + 2*sum c_k cos(2*pi*k*t); coefficients are kept real so no
complex arithmetic is needed anywhere on the hot paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import cos_series_eval
from .errors import CertificateError

__all__ = [
    "TrigPoly",
    "ScaledTrigPoly",
    "DegreeCertificate",
    "fejer",
    "shifted_fejer",
    "fejer_closed_form",
    "minimal_bandwidth",
    "choose_degree",
    "scale_to_period",
    "squared_moments",
]


class TrigPoly:
    """Trigonometric polynomial with symmetric real coefficients c_{-k} = c_k.

    Stores the half list c_0..c_d.  eval(t) = sum_{|k|<=d} c_k e^{2 pi i k t},
    which is real by symmetry; l2_norm_sq is the Parseval sum over all 2d+1
    coefficients.
    """

    __slots__ = ("half_coeffs",)

    def __init__(self, half_coeffs):
        hc = np.ascontiguousarray(half_coeffs, dtype=np.float64)
        if hc.ndim != 1 or hc.size == 0:
            raise ValueError("need at least the constant coefficient")
        self.half_coeffs = hc
        hc.flags.writeable = False

    @classmethod
    def from_symmetric(cls, coeffs) -> "TrigPoly":
        c = np.asarray(coeffs, dtype=np.float64)
        if c.size % 2 == 0:
            raise ValueError("symmetric coefficient list must have odd length")
        d = c.size // 2
        if not np.array_equal(c[:d], c[:d:-1]):
            raise ValueError("coefficients must satisfy c_{-k} = c_k")
        return cls(c[d:])

    @property
    def degree(self) -> int:
        return self.half_coeffs.size - 1

    @property
    def symmetric_coeffs(self) -> np.ndarray:
        return np.concatenate([self.half_coeffs[:0:-1], self.half_coeffs])

    def eval(self, t):
        t_arr = np.asarray(t, dtype=np.float64)
        out = cos_series_eval(self.half_coeffs, np.atleast_1d(t_arr))
        return float(out[0]) if t_arr.ndim == 0 else out.reshape(t_arr.shape)

    def l2_norm_sq(self) -> float:
        hc = self.half_coeffs
        return float(hc[0] ** 2 + 2.0 * np.sum(hc[1:] ** 2))

    def eval_at_zero(self) -> float:
        hc = self.half_coeffs
        return float(hc[0] + 2.0 * np.sum(hc[1:]))

    def __repr__(self) -> str:
        return f"TrigPoly(degree={self.degree})"


def fejer(m: int) -> TrigPoly:
    """Nonnegative kernel of degree m-1 with coefficients 1 - |k|/m."""
    if m < 1:
        raise ValueError("order must be a positive integer")
    k = np.arange(m, dtype=np.float64)
    return TrigPoly(1.0 - k / m)


def shifted_fejer(m: int) -> TrigPoly:
    """fejer(m) translated by half a period; peak value m sits at t = 1/2."""
    if m < 1:
        raise ValueError("order must be a positive integer")
    k = np.arange(m, dtype=np.float64)
    signs = np.where(np.arange(m) % 2 == 0, 1.0, -1.0)
    return TrigPoly((1.0 - k / m) * signs)


def fejer_closed_form(m: int, t) -> np.ndarray:
    """(1/m) (sin(pi m t)/sin(pi t))^2, continuously extended at integers.

    Arguments are reduced to [-1/2, 1/2] before the sines: evaluating
    sin(pi x) directly loses all relative accuracy next to integer x.
    """
    t = np.asarray(t, dtype=np.float64)
    r = t - np.rint(t)
    denom = np.sin(np.pi * r)
    at_int = denom == 0.0
    safe = np.where(at_int, 1.0, denom)
    vals = (np.sin(np.pi * m * r) / safe) ** 2 / m
    return np.where(at_int, float(m), vals)


def minimal_bandwidth(n: int) -> int:
    """Smallest m with 1/(m sin^2(pi/n)) <= 1/n, i.e. ceil(n / sin^2(pi/n)).

    The quotient is snapped to the nearest integer first: for n in {2,3,4,6}
    it is exactly an integer and raw float rounding may land a hair above it.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    x = n / math.sin(math.pi / n) ** 2
    r = round(x)
    if abs(x - r) <= 1e-9 * x:
        return int(r)
    return int(math.ceil(x))


@dataclass(frozen=True)
class DegreeCertificate:
    """Outcome of the off-peak smallness check for shifted_fejer(m).

    measured_max is the grid maximum of |P| outside
    [1/2 - 1/n, 1/2 + 1/n]; the certificate holds iff it is <= 1/n.
    """

    n: int
    m: int
    degree: int
    threshold: float
    analytic_bound: float
    measured_max: float
    grid_points: int


def choose_degree(n: int, grid_factor: int = 10_000) -> DegreeCertificate:
    """Pick the minimal order and verify the off-peak bound on a dense grid.

    The grid covers [0, 1/2 - 1/n] and [1/2 + 1/n, 1] (inclusive endpoints;
    by continuity the closure maximum equals the open-set supremum) with at
    least grid_factor * m points total.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    m = minimal_bandwidth(n)
    poly = shifted_fejer(m)
    threshold = 1.0 / n
    analytic = 1.0 / (m * math.sin(math.pi / n) ** 2)
    seg_hi = 0.5 - 1.0 / n
    measured = 0.0
    total_pts = 0
    if seg_hi > 0:
        half_pts = max(grid_factor * m // 2, 2)
        left = np.linspace(0.0, seg_hi, half_pts)
        right = np.linspace(0.5 + 1.0 / n, 1.0, half_pts)
        vals = np.abs(poly.eval(np.concatenate([left, right])))
        measured = float(vals.max())
        total_pts = 2 * half_pts
    if measured > threshold:
        raise CertificateError(
            f"grid maximum {measured} exceeds 1/n = {threshold} for n={n}, m={m}"
        )
    return DegreeCertificate(
        n=n,
        m=m,
        degree=m - 1,
        threshold=threshold,
        analytic_bound=analytic,
        measured_max=measured,
        grid_points=total_pts,
    )


@dataclass(frozen=True)
class ScaledTrigPoly:
    """P(scale * t): period 1/scale, spikes at integer multiples of scale."""

    poly: TrigPoly
    scale: int

    def __post_init__(self):
        if self.scale < 1:
            raise ValueError("scale must be a positive integer")

    @property
    def period(self) -> float:
        return 1.0 / self.scale

    def eval(self, t):
        return self.poly.eval(np.asarray(t, dtype=np.float64) * self.scale)

    def spike_train(self) -> tuple[np.ndarray, np.ndarray]:
        """Frequencies k*scale and weights c_k of the transform's spikes."""
        d = self.poly.degree
        freqs = np.arange(-d, d + 1, dtype=np.int64) * self.scale
        return freqs, self.poly.symmetric_coeffs


def scale_to_period(poly: TrigPoly, scale: int) -> ScaledTrigPoly:
    return ScaledTrigPoly(poly=poly, scale=scale)


def squared_moments(poly: TrigPoly, pieces, center: float, qmax: int = 2) -> np.ndarray:
    """Closed-form moments of P(u)^2 over a union of sub-intervals.

    Returns [I_0, ..., I_qmax] with I_q = integral over the pieces of
    P(u)^2 (u - center)^q du.  P^2 is expanded by coefficient convolution,
    so each piece costs O(d) complex exponentials instead of a fine grid.
    """
    sym = poly.symmetric_coeffs
    auto = np.convolve(sym, sym)
    two_d = poly.degree * 2
    a0 = auto[two_d]
    a_pos = auto[two_d + 1 :]
    omega = 2.0 * np.pi * np.arange(1, two_d + 1)
    iw = 1j * omega
    out = np.zeros(qmax + 1)
    for a, b in pieces:
        if b <= a:
            continue
        alpha = a - center
        beta = b - center
        # exponentials at the original coordinates absorb the e^{i w c} phase
        e_a = np.exp(iw * a)
        e_b = np.exp(iw * b)
        j_prev = (e_b - e_a) / iw
        pa, pb = 1.0, 1.0  # alpha^q, beta^q
        for q in range(qmax + 1):
            if q == 0:
                j_q = j_prev
            else:
                pa *= alpha
                pb *= beta
                j_q = (pb * e_b - pa * e_a) / iw - (q / iw) * j_prev
                j_prev = j_q
            out[q] += a0 * (beta ** (q + 1) - alpha ** (q + 1)) / (q + 1)
            out[q] += 2.0 * float(np.real(np.dot(a_pos, j_q)))
    return out
