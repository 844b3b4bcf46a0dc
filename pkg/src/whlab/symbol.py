"""Operator symbols on the admissible twist strip, and their verification.

At each admissible twist level ``a`` the operator acts, after twisting by
exp(a x), as a frequency multiplier: applying the operator and twisting
equals cutting the inverse transform of (multiplier * transform of the
twisted input) to the half-line.  The multiplier is the level-``a``
symbol; for a kernel operator it is the kernel transform evaluated on the
horizontal line Im z = a, and for the unit shift it is exp(a - i xi).

Stacking the levels over the whole interval gives the strip symbol; when
the strip has interior the stack must be jointly analytic, which is what
``verify_analyticity`` tests by a Cauchy-Riemann residual on the stack
(spectral derivative in the frequency direction, high-order finite
differences across levels).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (InvalidInputError, ProbeError, ScaleError, StripError)
from .gridfn import (FrequencyFunction, Grid, SampledFunction, embed,
                     forward_transform, inverse_transform, restrict,
                     strip_eval, twist)
from .operators import (BlackBoxOperator, KernelOperator, RecoveryResult,
                        ShiftOperator, WienerHopfOperator, recover_kernel,
                        twisted_apply)
from .profiles import bump, mollifier
from .spaces import Weight
from .operators import strip_interval


# -- strip bookkeeping --------------------------------------------------------

@dataclass(frozen=True)
class StripSpec:
    """Admissible twist interval with the levels actually sampled."""

    a_min: float
    a_max: float
    levels: tuple[float, ...]

    def __post_init__(self):
        if self.a_min > self.a_max + 1e-12:
            raise InvalidInputError("strip interval is empty")
        for a in self.levels:
            if not (self.a_min - 1e-9 <= a <= self.a_max + 1e-9):
                raise StripError(f"level {a} outside [{self.a_min}, {self.a_max}]")
        if tuple(sorted(self.levels)) != tuple(self.levels):
            raise InvalidInputError("levels must be sorted")

    @property
    def degenerate(self) -> bool:
        return abs(self.a_max - self.a_min) < 1e-12

    @classmethod
    def from_weight(cls, w: Weight, p: float = 2.0, n_levels: int = 33,
                    n_max: int = 64, x_max: float = 512.0) -> "StripSpec":
        a_lo, a_hi = strip_interval(w, p, n_max, x_max)
        if abs(a_hi - a_lo) < 1e-12:
            mid = 0.5 * (a_lo + a_hi)
            return cls(mid, mid, (mid,))
        return cls(a_lo, a_hi, tuple(np.linspace(a_lo, a_hi, n_levels)))

    def contains(self, a: float, tol: float = 1e-9) -> bool:
        return self.a_min - tol <= a <= self.a_max + tol


# -- per-level symbols --------------------------------------------------------

def symbol_of_kernel(phi: SampledFunction, a: float, count: int | None = None,
                     strip: StripSpec | None = None) -> FrequencyFunction:
    """Level-``a`` symbol of the convolution kernel ``phi``.

    Computed as the transform of the twisted kernel; ``count`` zero-pads to
    a chosen transform length so the result lands on the frequency grid of
    a larger working grid with the same step.
    """
    if strip is not None and not strip.contains(a):
        raise StripError(f"level {a} outside the admissible strip "
                         f"[{strip.a_min}, {strip.a_max}]")
    if count is not None:
        if count < phi.grid.count:
            raise InvalidInputError("transform length shorter than the kernel")
        phi = embed(phi, Grid(phi.grid.origin, phi.grid.step, count))
    return forward_transform(twist(phi, a))


def shift_symbol(amount: float, freq_grid: Grid, a: float,
                 scale: complex = 1.0) -> FrequencyFunction:
    """Closed-form symbol of the scaled translation: scale * exp((a - i xi) t)."""
    xi = freq_grid.points
    return FrequencyFunction(freq_grid, scale * np.exp((a - 1j * xi) * amount))


def operator_symbol(T: WienerHopfOperator, a: float, count: int, step: float,
                    strip: StripSpec | None = None) -> FrequencyFunction:
    """Level-``a`` symbol of a kernel or shift operator on an (count, step) grid."""
    if strip is not None and not strip.contains(a):
        raise StripError(f"level {a} outside the admissible strip")
    if isinstance(T, KernelOperator):
        return symbol_of_kernel(T.kernel, a, count)
    if isinstance(T, ShiftOperator):
        fg = Grid(0.0, step, count).freq_grid()
        return shift_symbol(T.amount, fg, a, T.scale)
    raise InvalidInputError("direct symbols exist for kernel and shift operators; "
                            "use extract_symbol for black boxes")


# -- the strip-stacked table --------------------------------------------------

@dataclass
class SymbolTable:
    """Per-level symbols stacked over the strip, plus provenance metadata."""

    strip: StripSpec
    levels: list[float]
    data: list[FrequencyFunction]
    space_grid: Grid
    operator_label: str = ""
    operator_norm: float | None = None

    def __post_init__(self):
        if sorted(self.levels) != list(self.levels):
            raise InvalidInputError("levels must be sorted")
        if len(self.levels) != len(self.data):
            raise InvalidInputError("one frequency function per level")

    def level(self, a: float) -> FrequencyFunction:
        for ai, F in zip(self.levels, self.data):
            if abs(ai - a) < 1e-12:
                return F
        raise StripError(f"level {a} not stored")

    def sup_values(self) -> list[float]:
        return [float(np.max(np.abs(F.values))) for F in self.data]

    def norm_ratios(self) -> list[float] | None:
        """Per-level sup |symbol| / operator norm, the empirical bound ratio."""
        if not self.operator_norm:
            return None
        return [s / self.operator_norm for s in self.sup_values()]

    def to_jsonable(self) -> dict:
        return {
            "strip": {"a_min": self.strip.a_min, "a_max": self.strip.a_max},
            "levels": list(map(float, self.levels)),
            "frequency_grid": {
                "origin": self.data[0].freq_grid.origin,
                "step": self.data[0].freq_grid.step,
                "count": self.data[0].freq_grid.count,
            },
            "space_grid": {
                "origin": self.space_grid.origin,
                "step": self.space_grid.step,
                "count": self.space_grid.count,
            },
            "operator": self.operator_label,
            "operator_norm": self.operator_norm,
            "values": [[[float(v.real), float(v.imag)] for v in F.values]
                       for F in self.data],
        }

    @classmethod
    def from_jsonable(cls, obj: dict) -> "SymbolTable":
        fg = Grid(obj["frequency_grid"]["origin"], obj["frequency_grid"]["step"],
                  obj["frequency_grid"]["count"])
        sg = Grid(obj["space_grid"]["origin"], obj["space_grid"]["step"],
                  obj["space_grid"]["count"])
        levels = list(obj["levels"])
        data = [FrequencyFunction(fg, np.array([complex(re, im) for re, im in row]))
                for row in obj["values"]]
        strip = StripSpec(obj["strip"]["a_min"], obj["strip"]["a_max"],
                          tuple(sorted(set(levels))))
        return cls(strip, levels, data, sg, obj.get("operator", ""),
                   obj.get("operator_norm"))


def padded_grid(grid: Grid, pad: float) -> Grid:
    """Extend a half-line grid to the left so truncation effects are visible.

    The returned grid keeps the step, reaches down to about -pad, and has
    an FFT-friendly length; the original grid is a sub-grid.
    """
    h = grid.step
    k = int(np.ceil(pad / h))
    from scipy.fft import next_fast_len
    n = next_fast_len(grid.count + k)
    k = n - grid.count
    return Grid(grid.origin - k * h, h, n)


def build_symbol_table(T: WienerHopfOperator, grid: Grid, strip: StripSpec,
                       pad: float = 16.0, label: str = "",
                       norm_value: float | None = None) -> SymbolTable:
    """Stack exact per-level symbols of a kernel/shift operator over the strip."""
    G = padded_grid(grid, pad)
    data = [operator_symbol(T, a, G.count, G.step, strip) for a in strip.levels]
    return SymbolTable(strip, list(strip.levels), data, G,
                       label or T.kind, norm_value)


# -- representation check -----------------------------------------------------

@dataclass
class RepresentationReport:
    residuals: list[float]
    max_residual: float
    tol: float
    passed: bool
    level: float


def representation_probes(grid: Grid, n: int = 5, support: tuple[float, float] | None = None,
                          seed: int = 5) -> list[SampledFunction]:
    """Deterministic smooth compactly supported probes inside ``support``."""
    rng = np.random.default_rng(seed)
    if support is None:
        support = (grid.origin + 0.05 * grid.span, grid.origin + 0.45 * grid.span)
    lo, hi = support
    x = grid.points
    probes = []
    for _ in range(n):
        vals = np.zeros(grid.count, dtype=complex)
        for _ in range(3):
            c = rng.uniform(lo + 0.15 * (hi - lo), hi - 0.15 * (hi - lo))
            r = rng.uniform(0.05, 0.15) * (hi - lo)
            vals += rng.normal() * bump(x, c, r) * np.exp(1j * rng.normal(0, 2) * x)
        probes.append(SampledFunction(grid, vals))
    return probes


def _check_probe(f: SampledFunction) -> None:
    mags = np.abs(f.values)
    m = float(mags.max(initial=0.0))
    if m == 0:
        raise ProbeError("probe is identically zero")
    if mags[0] > 1e-13 * m or mags[-1] > 1e-13 * m:
        raise ProbeError("probe support touches the grid ends")


def verify_representation(T: WienerHopfOperator, nu: FrequencyFunction, a: float,
                          probes: list[SampledFunction], tol: float = 1e-5,
                          ) -> RepresentationReport:
    """Residual of the twisted-multiplier representation on each probe.

    Both sides are computed independently: the left by applying the
    operator and twisting, the right by twisting, transforming, applying
    the stored multiplier, inverting on a left-padded grid, and cutting
    back to the half-line.  The relative plain-L2 mismatch is reported.
    """
    residuals = []
    for f in probes:
        _check_probe(f)
        G = f.grid
        n_pad = nu.freq_grid.count
        if n_pad < G.count:
            raise InvalidInputError("symbol grid shorter than the probe grid")
        dxi = 2.0 * np.pi / (n_pad * G.step)
        if abs(nu.freq_grid.step - dxi) > 1e-9 * dxi:
            raise InvalidInputError("symbol frequency grid does not match the probe grid")
        Gp = Grid(G.origin - (n_pad - G.count) * G.step, G.step, n_pad)
        fa = twist(embed(f, Gp), a)
        rhs_full = inverse_transform(
            FrequencyFunction(nu.freq_grid, nu.values * forward_transform(fa).values), Gp)
        rhs = restrict(rhs_full, G)
        lhs = twisted_apply(T, f, a)
        num = (lhs - rhs).l2_norm()
        den = lhs.l2_norm()
        residuals.append(num / den if den > 0 else num)
    mx = float(max(residuals)) if residuals else 0.0
    return RepresentationReport(residuals, mx, tol, mx <= tol, a)


# -- black-box symbol extraction ----------------------------------------------

@dataclass
class ExtractedSymbol:
    nu: FrequencyFunction
    valid: np.ndarray
    floor: float
    recovery: RecoveryResult

    @property
    def window(self) -> tuple[float, float]:
        xi = self.nu.xi[self.valid]
        return (float(xi.min()), float(xi.max()))


def extract_symbol(T: WienerHopfOperator, grid: Grid, a: float, scale: int,
                   kernel_extent: float, x0: float | None = None,
                   count: int | None = None, deconv_floor: float = 0.1,
                   strip: StripSpec | None = None) -> ExtractedSymbol:
    """Level symbol of a black-box operator through its mollified kernel.

    Recovers the smoothed kernel by probing, takes its level symbol, and
    divides out the mollifier transform on the band where that transform
    stays above ``deconv_floor`` (noise amplification at most 1/floor).
    """
    if strip is not None and not strip.contains(a):
        raise StripError(f"level {a} outside the admissible strip")
    if x0 is None:
        x0 = grid.origin + 0.45 * grid.span
    rec = recover_kernel(T, grid, scale, x0, kernel_extent)
    n_tr = count if count is not None else rec.kernel.grid.count
    nu_smooth = symbol_of_kernel(rec.kernel, a, n_tr)
    width = 1.0 / scale
    theta = mollifier(Grid.from_span(0.0, width + 4 * grid.step, grid.step), scale)
    theta_hat = strip_eval(theta, nu_smooth.xi + 1j * a)
    valid = np.abs(theta_hat) >= deconv_floor
    if not np.any(valid):
        raise ScaleError(
            f"mollifier transform stays below {deconv_floor}; increase the scale")
    vals = np.where(valid, nu_smooth.values / np.where(valid, theta_hat, 1.0), 0.0)
    return ExtractedSymbol(FrequencyFunction(nu_smooth.freq_grid, vals), valid,
                           deconv_floor, rec)


# -- strip bound --------------------------------------------------------------

@dataclass
class StripBoundReport:
    max_abs: float
    bound: float
    slack: float
    passed: bool
    argmax: complex
    lattice_shape: tuple[int, int]


def verify_strip_bound(phi: SampledFunction, strip: StripSpec, T_norm: float,
                       xi_range: tuple[float, float] = (-20.0, 20.0),
                       n_xi: int = 81, n_levels: int | None = None,
                       slack: float = 1e-3) -> StripBoundReport:
    """Max of |kernel transform| over a strip lattice against the norm bound.

    Passes when the lattice max does not exceed T_norm * (1 + slack); on
    trivial weights the two sides agree to the slack, i.e. the bound is
    tight.
    """
    if n_levels is None:
        levels = np.asarray(strip.levels if not strip.degenerate else [strip.a_min])
    else:
        levels = np.linspace(strip.a_min, strip.a_max, n_levels)
    xi = np.linspace(*xi_range, n_xi)
    lattice = xi[None, :] + 1j * levels[:, None]
    vals = np.abs(strip_eval(phi, lattice))
    j = int(np.argmax(vals))
    mx = float(vals.flat[j])
    return StripBoundReport(mx, T_norm, slack, mx <= T_norm * (1.0 + slack),
                            complex(lattice.flat[j]), lattice.shape)


# -- analyticity of the stack -------------------------------------------------

@dataclass
class AnalyticityReport:
    skipped: bool
    cr_residual: float | None
    cross_level_error: float | None
    sup_ratio: float | None
    cr_tol: float
    cross_tol: float
    passed: bool
    note: str = ""


def spectral_xi_derivative(F: FrequencyFunction, space_grid: Grid) -> np.ndarray:
    """Exact d/dxi of the trigonometric interpolant behind a level symbol.

    Round-trips through the spatial side: the derivative of a transform is
    the transform of (-i x) times the function.
    """
    f = inverse_transform(F, space_grid)
    return forward_transform(
        SampledFunction(space_grid, (-1j * space_grid.points) * f.values)).values


def _fd4(stack: np.ndarray, delta: float) -> np.ndarray:
    """Fourth-order central difference along axis 0, interior points only."""
    return (stack[:-4] - 8 * stack[1:-3] + 8 * stack[3:-1] - stack[4:]) / (12.0 * delta)


def verify_analyticity(table: SymbolTable, kernel: SampledFunction | None = None,
                       cr_tol: float = 1e-4, cross_tol: float = 1e-6,
                       xi_window: float = 20.0) -> AnalyticityReport:
    """Joint analyticity of the level stack over the open strip.

    Two checks: (i) when the kernel is available, an interior level is
    recomputed by direct complex quadrature and compared with the stored
    one; (ii) the Cauchy-Riemann residual d/da - i d/dxi on interior
    lattice points, with the frequency derivative taken spectrally and the
    level derivative by fourth-order differences.  Degenerate strips skip
    with a notice.  The sup of |symbol| across levels relative to the
    operator norm is reported alongside.
    """
    sup_ratio = None
    if table.operator_norm:
        sup_ratio = max(table.sup_values()) / table.operator_norm
    if table.strip.degenerate or len(table.levels) < 5:
        return AnalyticityReport(True, None, None, sup_ratio, cr_tol, cross_tol, True,
                                 "strip has no usable interior; stack checks skipped")
    levels = np.asarray(table.levels)
    deltas = np.diff(levels)
    if np.max(np.abs(deltas - deltas[0])) > 1e-9 * abs(deltas[0]):
        raise InvalidInputError("analyticity check needs uniformly spaced levels")
    da = float(deltas[0])

    xi = table.data[0].xi
    keep = np.abs(xi) <= xi_window
    stack = np.stack([F.values for F in table.data], axis=0)
    d_xi = np.stack([spectral_xi_derivative(F, table.space_grid)
                     for F in table.data], axis=0)
    cr = _fd4(stack, da) - 1j * d_xi[2:-2]
    cr_res = float(np.max(np.abs(cr[:, keep])))

    cross = None
    if kernel is not None:
        mid = len(levels) // 2
        direct = strip_eval(kernel, xi[keep] + 1j * levels[mid])
        cross = float(np.max(np.abs(direct - stack[mid][keep])))

    passed = cr_res <= cr_tol and (cross is None or cross <= cross_tol)
    return AnalyticityReport(False, cr_res, cross, sup_ratio, cr_tol, cross_tol, passed)
