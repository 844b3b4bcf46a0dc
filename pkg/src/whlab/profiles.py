"""Smooth profile functions: bumps, plateaus, mollifiers, summability kernels.

These are the compactly-supported smooth surrogates used as probes,
quasi-eigenvector envelopes, and kernel mollifiers.  All evaluators are
vectorised over numpy arrays.
"""

from __future__ import annotations

import numpy as np
from scipy.special import sici

from .errors import GridSpanError
from .gridfn import Grid, SampledFunction


def smoothstep(t: np.ndarray) -> np.ndarray:
    """Order-7 polynomial smoothstep: 0 -> 1 on [0, 1], C^3 at both ends."""
    t = np.clip(t, 0.0, 1.0)
    return t ** 4 * (35.0 - 84.0 * t + 70.0 * t ** 2 - 20.0 * t ** 3)


def plateau(x: np.ndarray, lo: float, hi: float, ramp: float) -> np.ndarray:
    """Smooth plateau: 0 outside [lo, hi], 1 on [lo + ramp, hi - ramp]."""
    if hi - lo < 2.0 * ramp:
        raise ValueError("plateau window shorter than the two ramps")
    return smoothstep((x - lo) / ramp) * smoothstep((hi - x) / ramp)


def bump(x: np.ndarray, center: float, radius: float) -> np.ndarray:
    """C-infinity bump supported on (center - radius, center + radius), peak 1."""
    u = (x - center) / radius
    out = np.zeros_like(np.asarray(u, dtype=float))
    inside = np.abs(u) < 1.0
    ui = u[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui ** 2))
    return out


def gaussian(x: np.ndarray, center: float = 0.0, sigma: float = 1.0,
             amplitude: float = 1.0) -> np.ndarray:
    return amplitude * np.exp(-((x - center) ** 2) / (2.0 * sigma ** 2))


def sample(grid: Grid, fn, *args, **kwargs) -> SampledFunction:
    """Evaluate a profile on a grid as a :class:`SampledFunction`."""
    return SampledFunction(grid, fn(grid.points, *args, **kwargs).astype(np.complex128))


def mollifier(grid: Grid, scale: int) -> SampledFunction:
    """Positive C-infinity bump supported in [0, 1/scale] with unit discrete mass.

    The discrete normalisation (h * sum = 1 exactly) keeps deconvolution
    by the mollifier transform self-consistent on the grid.
    """
    width = 1.0 / scale
    if grid.step > width / 8.0:
        raise GridSpanError(
            f"grid step {grid.step} too coarse to resolve a mollifier of width {width}",
            required_span=width)
    vals = bump(grid.points, width / 2.0, width / 2.0)
    mass = grid.step * vals.sum()
    if mass <= 0:
        raise GridSpanError("mollifier support does not meet the grid")
    return SampledFunction(grid, (vals / mass).astype(np.complex128))


def fejer_kernel(grid: Grid, n: int) -> SampledFunction:
    """Positive summability kernel (1 - cos(n x)) / (pi n x^2), value n/(2 pi) at 0."""
    x = grid.points
    vals = np.empty_like(x)
    small = np.abs(x) < 1e-12
    xs = np.where(small, 1.0, x)
    vals = (1.0 - np.cos(n * xs)) / (np.pi * n * xs ** 2)
    vals[small] = n / (2.0 * np.pi)
    return SampledFunction(grid, vals.astype(np.complex128))


def fejer_tail_mass(n: int, cut: float) -> float:
    """Exact integral of the summability kernel over |x| > cut.

    Via integration by parts the one-sided tail is
    (1/(pi n)) * [ (1 - cos(n cut))/cut + n (pi/2 - Si(n cut)) ],
    which complements a finite-window quadrature to full-line mass.
    """
    si, _ = sici(n * cut)
    one_sided = ((1.0 - np.cos(n * cut)) / cut + n * (np.pi / 2.0 - si)) / (np.pi * n)
    return 2.0 * float(one_sided)


def triangular_window(xi: np.ndarray, n: float) -> np.ndarray:
    """Triangular frequency window: (1 - |xi|/n) on [-n, n], 0 outside."""
    return np.maximum(0.0, 1.0 - np.abs(xi) / n)
