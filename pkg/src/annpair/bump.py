"""Compactly supported smooth bumps and their tabulated Fourier transforms.

The default shape is exp(-1/(t(1-t))) on (0,1), rescaled to unit L2 norm.
Its transform has no closed form, so it is tabulated once from an
oversampled, zero-padded FFT of the time samples.  Because the shape is
symmetric about t = 1/2 the transform is e^{-i pi s} times a real even
function g(s); we store g (smooth, no |.| kinks) and interpolate with a
uniform-grid cubic.  Everything downstream only consumes |psi_hat| = |g|.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad

from ._backend import cubic_interp
from .errors import ConvergenceError, TableRangeError

__all__ = ["BumpSpec", "BUMP_SHAPES", "build_bump", "get_default_bump"]


def _standard_shape(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    inside = (t > 0.0) & (t < 1.0)
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (ti * (1.0 - ti)))
    return out


BUMP_SHAPES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "standard": _standard_shape,
}


def _transform_table(shape, scale: float, grid_per_unit: int, zero_pad: int, n_entries: int):
    samples = scale * shape(np.arange(grid_per_unit) / grid_per_unit)
    spectrum = np.fft.rfft(samples, n=grid_per_unit * zero_pad) / grid_per_unit
    spectrum = spectrum[:n_entries]
    s = np.arange(n_entries) / zero_pad
    rotated = np.exp(1j * np.pi * s) * spectrum
    return np.real(rotated), float(np.max(np.abs(np.imag(rotated))))


@dataclass(eq=False)
class BumpSpec:
    """A normalized bump plus a certified table of its transform."""

    kind: str
    scale: float
    table: np.ndarray  # padded: entry 0 is the even reflection at s = -step
    table_step: float
    s_max: float
    c1: float
    c1_at: float
    band_ratios: np.ndarray
    refinement_error: float
    l2_time: float
    l2_freq: float
    integral: float
    grid_per_unit: int
    zero_pad: int
    _shape: Callable = field(repr=False)
    _prefix_sq: np.ndarray = field(repr=False)

    @property
    def s_max_eval(self) -> float:
        return self.s_max - 2.0 * self.table_step

    def _interp_args(self) -> tuple[np.ndarray, float, float]:
        return self.table, -self.table_step, self.table_step

    def psi(self, t) -> np.ndarray:
        return self.scale * self._shape(np.asarray(t, dtype=np.float64))

    def hat_signed(self, s) -> np.ndarray:
        """g(|s|) by cubic interpolation; |psi_hat(s)| = |g(s)|."""
        s_arr = np.abs(np.asarray(s, dtype=np.float64))
        if np.any(s_arr > self.s_max_eval):
            raise TableRangeError(
                f"|s| up to {float(np.max(s_arr))} exceeds tabulated range {self.s_max_eval}"
            )
        tab, x0, dx = self._interp_args()
        out = cubic_interp(tab, x0, dx, np.atleast_1d(s_arr))
        return float(out[0]) if s_arr.ndim == 0 else out.reshape(s_arr.shape)

    def hat_envelope(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        return self.c1 / (1.0 + s * s)

    def hat_signed_or_bound(self, s) -> tuple[np.ndarray, np.ndarray]:
        """(g values, mask): envelope magnitude where untabulated."""
        s = np.abs(np.asarray(s, dtype=np.float64))
        beyond = s > self.s_max_eval
        vals = np.where(
            beyond,
            self.hat_envelope(s),
            self.hat_signed(np.where(beyond, 0.0, s)),
        )
        return vals, beyond

    def hat_abs_or_bound(self, s) -> tuple[np.ndarray, np.ndarray]:
        """(|psi_hat| values, mask) with envelope bounds where untabulated."""
        vals, beyond = self.hat_signed_or_bound(s)
        return np.abs(vals), beyond

    def hat_sq_integral(self, s_hi: float) -> tuple[float, float]:
        """(integral of g^2 over [0, min(s_hi, s_max)], envelope bound beyond).

        The second entry bounds the untabulated remainder via
        int (c1/(1+s^2))^2 ds <= c1^2 int s^-4 ds.
        """
        if s_hi <= 0:
            return 0.0, 0.0
        h = self.table_step
        n = self._prefix_sq.size
        pos = min(s_hi, self.s_max) / h
        i = min(int(pos), n - 2)
        lam = pos - i
        val = float(self._prefix_sq[i] * (1 - lam) + self._prefix_sq[i + 1] * lam)
        rem = 0.0
        if s_hi > self.s_max:
            rem = self.c1**2 * (self.s_max**-3 - s_hi**-3) / 3.0
        return val, rem

    def table_digest(self) -> str:
        return hashlib.sha256(self.table.tobytes()).hexdigest()[:16]


def build_bump(
    kind: str = "standard",
    *,
    grid_per_unit: int = 1024,
    zero_pad: int = 2048,
    s_max: float = 256.0,
    refine: bool = True,
) -> BumpSpec:
    """Normalize a registered shape and tabulate its transform.

    The table covers s in [0, s_max] at spacing 1/zero_pad; a doubled-rate
    rebuild certifies the aliasing error.  Shapes must be symmetric about
    t = 1/2 (checked through the residual imaginary part).
    """
    shape = BUMP_SHAPES[kind]
    sq_norm, quad_err = quad(lambda t: float(shape(np.array([t]))[0]) ** 2, 0.0, 1.0, epsabs=1e-15)
    if quad_err > 1e-10 or sq_norm <= 0:
        raise ConvergenceError(f"normalization quadrature error {quad_err} too large")
    scale = 1.0 / math.sqrt(sq_norm)

    n_entries = int(round(s_max * zero_pad)) + 1
    if n_entries > grid_per_unit * zero_pad // 2:
        raise ValueError("s_max exceeds the Nyquist range of the sampling")
    g, imag_resid = _transform_table(shape, scale, grid_per_unit, zero_pad, n_entries)
    peak = float(np.max(np.abs(g)))
    if imag_resid > 1e-10 * peak:
        raise ConvergenceError("shape is not symmetric about 1/2 (rotated transform not real)")
    refinement_error = 0.0
    if refine:
        g2, _ = _transform_table(shape, scale, 2 * grid_per_unit, zero_pad, n_entries)
        refinement_error = float(np.max(np.abs(g - g2)))
        if refinement_error > 1e-10 * peak:
            raise ConvergenceError(
                f"transform table not converged: doubling the rate moved it by {refinement_error}"
            )
        g = g2

    s = np.arange(n_entries) / zero_pad
    weighted = np.abs(g) * (1.0 + s * s)
    c1_idx = int(np.argmax(weighted))
    c1 = float(weighted[c1_idx])

    # per-octave maxima of |g|(1+s^2)/c1: must not grow past the peak octave
    n_bands = int(math.floor(math.log2(s_max)))
    ratios = np.empty(n_bands)
    for k in range(n_bands):
        lo = int(2**k * zero_pad)
        hi = min(int(2 ** (k + 1) * zero_pad), n_entries)
        ratios[k] = float(weighted[lo:hi].max()) / c1

    samples = scale * shape(np.arange(grid_per_unit) / grid_per_unit)
    l2_time = float(np.sum(samples**2) / grid_per_unit)
    l2_freq = 2.0 * float(np.trapezoid(g**2, dx=1.0 / zero_pad))

    padded = np.concatenate([[g[1]], g, [0.0]])
    prefix = np.concatenate([[0.0], np.cumsum((g[1:] ** 2 + g[:-1] ** 2) / 2.0)]) / zero_pad

    return BumpSpec(
        kind=kind,
        scale=scale,
        table=padded,
        table_step=1.0 / zero_pad,
        s_max=float(s_max),
        c1=c1,
        c1_at=float(s[c1_idx]),
        band_ratios=ratios,
        refinement_error=refinement_error,
        l2_time=l2_time,
        l2_freq=l2_freq,
        integral=float(g[0]),
        grid_per_unit=grid_per_unit,
        zero_pad=zero_pad,
        _shape=shape,
        _prefix_sq=prefix,
    )


@lru_cache(maxsize=2)
def get_default_bump() -> BumpSpec:
    return build_bump("standard")
