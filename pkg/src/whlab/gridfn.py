"""Uniform grids, sampled complex functions, and twisted Fourier transforms.

Everything downstream works with functions sampled on a uniform grid.  The
Fourier convention is fixed once and for all as

    F f (xi) = integral f(x) exp(-i xi x) dx,
    F^{-1} g (x) = (1/2pi) integral g(xi) exp(i xi x) dxi,

realised by Riemann sums on the grid (for compactly supported smooth
functions the endpoint terms vanish, so this coincides with the
trapezoidal rule and is spectrally accurate).

The ``twist`` operation multiplies a function by exp(a x).  Evaluating a
transform after a twist is the same as evaluating the plain transform at
the complex frequency ``xi + i a``; ``strip_eval`` computes the latter by
direct quadrature and is the cross-check used throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import fft, fftfreq, ifft, next_fast_len

from .errors import AlignmentError, InvalidInputError, TwistOverflowError

# exp() overflows just above this in float64; kept conservative so that
# downstream products with O(1) factors stay finite
_LOG_OVERFLOW = 700.0


@dataclass(frozen=True)
class Grid:
    """Uniform grid: ``count`` points starting at ``origin`` with step ``step``.

    ``origin`` is 0 for half-line grids and may be negative for grids that
    cover kernel supports on both sides of the origin.
    """

    origin: float
    step: float
    count: int

    def __post_init__(self):
        if not (self.step > 0):
            raise InvalidInputError(f"grid step must be positive, got {self.step}")
        if self.count < 2:
            raise InvalidInputError(f"grid needs at least 2 points, got {self.count}")

    @property
    def span(self) -> float:
        return self.step * (self.count - 1)

    @property
    def points(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.count)

    @property
    def last(self) -> float:
        return self.origin + self.span

    @classmethod
    def from_span(cls, origin: float, span: float, step: float) -> "Grid":
        """Grid covering at least ``[origin, origin + span]``.

        The point count is rounded up to an FFT-friendly (highly composite)
        length, so the realised span may slightly exceed the request.
        """
        n = int(np.ceil(span / step)) + 1
        return cls(origin, step, next_fast_len(n))

    def freq_grid(self) -> "Grid":
        """Frequency grid of the transform: step 2pi/(N h) covering [-pi/h, pi/h)."""
        dxi = 2.0 * np.pi / (self.count * self.step)
        origin = -dxi * (self.count // 2)
        return Grid(origin, dxi, self.count)

    def index_of(self, x: float) -> int:
        """Index of the grid node at position ``x`` (must lie on the grid)."""
        idx = (x - self.origin) / self.step
        j = int(round(idx))
        if abs(idx - j) > 1e-9 * max(1.0, abs(idx)) + 1e-9:
            raise AlignmentError(f"position {x} is not a grid node (step {self.step})")
        if not (0 <= j < self.count):
            raise AlignmentError(f"position {x} lies outside the grid")
        return j

    def commensurate(self, other: "Grid") -> bool:
        """True if both grids share the step and their origins differ by a multiple of it."""
        if abs(self.step - other.step) > 1e-12 * self.step:
            return False
        off = (other.origin - self.origin) / self.step
        return abs(off - round(off)) < 1e-9


def _check_finite(values: np.ndarray, what: str) -> None:
    if not (np.all(np.isfinite(values.real)) and np.all(np.isfinite(values.imag))):
        raise InvalidInputError(f"{what} contains non-finite values")


@dataclass(frozen=True)
class SampledFunction:
    """Complex samples on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.grid.count,):
            raise InvalidInputError(
                f"value count {vals.shape} does not match grid count {self.grid.count}")
        _check_finite(vals, "sampled function")

    @property
    def x(self) -> np.ndarray:
        return self.grid.points

    def l2_norm(self) -> float:
        """Unweighted L2 norm by the grid quadrature."""
        return float(np.sqrt(self.grid.step * np.sum(np.abs(self.values) ** 2)))

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        if other.grid != self.grid:
            raise AlignmentError("grids differ")
        return SampledFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "SampledFunction") -> "SampledFunction":
        if other.grid != self.grid:
            raise AlignmentError("grids differ")
        return SampledFunction(self.grid, self.values - other.values)

    def __mul__(self, c: complex) -> "SampledFunction":
        return SampledFunction(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class FrequencyFunction:
    """Complex samples on a frequency grid (ascending frequencies)."""

    freq_grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.freq_grid.count,):
            raise InvalidInputError(
                f"value count {vals.shape} does not match grid count {self.freq_grid.count}")
        _check_finite(vals, "frequency function")

    @property
    def xi(self) -> np.ndarray:
        return self.freq_grid.points

    def __sub__(self, other: "FrequencyFunction") -> "FrequencyFunction":
        if other.freq_grid != self.freq_grid:
            raise AlignmentError("frequency grids differ")
        return FrequencyFunction(self.freq_grid, self.values - other.values)


def embed(f: SampledFunction, grid: Grid) -> SampledFunction:
    """Copy ``f`` into a larger commensurate grid, zero elsewhere.

    Raises if any nonzero part of ``f`` would be dropped.
    """
    if not grid.commensurate(f.grid):
        raise AlignmentError("target grid is not commensurate with the source")
    off = int(round((f.grid.origin - grid.origin) / grid.step))
    out = np.zeros(grid.count, dtype=np.complex128)
    lo, hi = max(0, off), min(grid.count, off + f.grid.count)
    src_lo, src_hi = lo - off, hi - off
    if np.any(f.values[:src_lo] != 0) or np.any(f.values[src_hi:] != 0):
        raise AlignmentError("embedding would drop nonzero samples")
    out[lo:hi] = f.values[src_lo:src_hi]
    return SampledFunction(grid, out)


def restrict(f: SampledFunction, grid: Grid) -> SampledFunction:
    """Samples of ``f`` on a commensurate sub-grid; zero outside ``f``'s grid.

    This is the discrete form of restricting a function on the line to the
    half-line: targets below or above ``f``'s grid read zero.
    """
    if not grid.commensurate(f.grid):
        raise AlignmentError("target grid is not commensurate with the source")
    off = int(round((grid.origin - f.grid.origin) / grid.step))
    out = np.zeros(grid.count, dtype=np.complex128)
    lo, hi = max(0, off), min(f.grid.count, off + grid.count)
    out[lo - off:hi - off] = f.values[lo:hi]
    return SampledFunction(grid, out)


def forward_transform(f: SampledFunction) -> FrequencyFunction:
    """Riemann-sum Fourier transform on the derived frequency grid.

    Exact linearity; spectrally accurate for smooth functions that decay
    to zero at both grid ends.
    """
    g = f.grid
    spectrum = fft(f.values)
    xi = 2.0 * np.pi * fftfreq(g.count, g.step)
    vals = g.step * np.exp(-1j * xi * g.origin) * spectrum
    order = np.argsort(xi, kind="stable")
    fg = Grid(float(xi[order][0]), 2.0 * np.pi / (g.count * g.step), g.count)
    return FrequencyFunction(fg, vals[order])


def inverse_transform(F: FrequencyFunction, grid: Grid | None = None) -> SampledFunction:
    """Inverse of :func:`forward_transform`; exact round-trip on the same grid.

    ``grid`` fixes the spatial origin; by default the spatial grid starts
    at 0 with the step implied by the frequency grid.
    """
    n = F.freq_grid.count
    h = 2.0 * np.pi / (n * F.freq_grid.step)
    if grid is None:
        grid = Grid(0.0, h, n)
    if grid.count != n or abs(grid.step - h) > 1e-12 * h:
        raise AlignmentError("grid incompatible with the frequency grid")
    xi_sorted = F.freq_grid.points
    vals = F.values * np.exp(1j * xi_sorted * grid.origin)
    # undo the ascending-frequency ordering before the inverse FFT
    xi_nat = 2.0 * np.pi * fftfreq(n, grid.step)
    order = np.argsort(xi_nat, kind="stable")
    nat = np.empty(n, dtype=np.complex128)
    nat[order] = vals
    out = ifft(nat) / grid.step
    return SampledFunction(grid, out)


def _twisted_values(values: np.ndarray, x: np.ndarray, a: float) -> np.ndarray:
    """values * exp(a x), formed in log space to dodge spurious overflow.

    Samples whose magnitude sits below the normal floating-point range are
    treated as zero; they are hundreds of digits below the function scale.
    """
    mag = np.abs(values)
    live = mag > 1e-300
    with np.errstate(divide="ignore"):
        logmag = np.where(live, np.log(np.where(live, mag, 1.0)), -np.inf)
    s = logmag + a * x
    bad = s > _LOG_OVERFLOW
    if np.any(bad):
        j = int(np.argmax(s))
        raise TwistOverflowError(
            f"twist by {a} overflows at sample {j} (x = {x[j]:.6g}, "
            f"log-magnitude {s[j]:.3g})", index=j, position=float(x[j]))
    with np.errstate(over="ignore", invalid="ignore"):
        phase = np.where(live, values / np.where(live, mag, 1.0), 0.0)
    return np.exp(s, where=np.isfinite(s), out=np.zeros_like(s)) * phase


def twist(f: SampledFunction, a: float) -> SampledFunction:
    """Pointwise multiplication by exp(a x); a group action in ``a``."""
    if a == 0.0:
        return f
    return SampledFunction(f.grid, _twisted_values(f.values, f.x, a))


def strip_eval(phi: SampledFunction, z: complex | np.ndarray) -> complex | np.ndarray:
    """Transform of ``phi`` at complex frequency z by direct quadrature.

    Agrees with :func:`forward_transform` for real z and with
    ``forward_transform(twist(phi, a))`` at ``z = xi + i a``; accepts an
    array of z values.
    """
    z_arr = np.asarray(z, dtype=np.complex128)
    zs = np.atleast_1d(z_arr).reshape(-1)
    x = phi.x
    a_max = float(np.max(zs.imag))
    a_min = float(np.min(zs.imag))
    mag = np.abs(phi.values)
    if np.any(mag > 0):
        with np.errstate(divide="ignore"):
            logmag = np.where(mag > 0, np.log(np.where(mag > 0, mag, 1.0)), -np.inf)
        worst = np.max(logmag + np.maximum(a_max * x, a_min * x))
        if worst > _LOG_OVERFLOW:
            raise TwistOverflowError(
                f"strip evaluation at Im z in [{a_min:.3g}, {a_max:.3g}] "
                "overflows on this grid")
    # chunk over z to bound the temporary (len(z) x len(x)) matrix
    out = np.empty(zs.size, dtype=np.complex128)
    step = max(1, int(4e6 / max(1, x.size)))
    for k in range(0, zs.size, step):
        zk = zs[k:k + step, None]
        out[k:k + step] = phi.grid.step * np.sum(
            phi.values[None, :] * np.exp(-1j * zk * x[None, :]), axis=1)
    if z_arr.shape == ():
        return complex(out[0])
    return out.reshape(z_arr.shape)
