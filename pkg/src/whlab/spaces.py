"""Weight families, admissibility checks, and norms of weighted function spaces.

A weight is a positive function on the half-line whose translation ratios
sup_x w(x+y)/w(x) and sup_x w(x)/w(x+y) are finite for every offset y.
On the weighted p-norm space the translation operator by y has norm equal
to the first ratio (shift left of the argument, i.e. translation right of
the function) and the co-translation has norm equal to the second; these
ratios drive every spectral computation downstream, so each built-in
family carries its closed form when one exists.

Built-in families
-----------------
constant             w = 1
power(alpha)         w = (1 + x)^alpha
exponential(beta)    w = exp(beta x)
capped_exponential   w = exp(beta min(x, cap))
dyadic_zigzag(beta)  w = exp(beta s(x)), s piecewise linear with slope
                     alternating +1/-1 on blocks [0,1), [1,2), [2,4), [4,8), ...
custom               arbitrary positive evaluator; ratios by sampled sup

The zigzag family is the workhorse: its forward and backward translation
norms are both exp(|beta| y), so the admissible twist interval
[-ln rho(backward), ln rho(forward)] has non-empty interior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, InvalidInputError, WeightError
from .gridfn import Grid, SampledFunction

_ZIGZAG_MAX_BLOCK = 62  # boundaries up to 2**62 cover any float grid in practice


def _zigzag_boundaries(x_max: float) -> np.ndarray:
    ks = int(max(1, np.ceil(np.log2(max(2.0, x_max))))) + 1
    return np.concatenate(([0.0], 2.0 ** np.arange(0, min(ks, _ZIGZAG_MAX_BLOCK))))


def zigzag_profile(x: np.ndarray) -> np.ndarray:
    """Piecewise-linear profile with slope (-1)^k on the k-th dyadic block."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -1e-9):
        raise InvalidInputError("zigzag profile is defined on the half-line")
    x = np.maximum(x, 0.0)
    bounds = _zigzag_boundaries(float(np.max(x, initial=1.0)))
    lengths = np.diff(bounds)
    slopes = np.where(np.arange(lengths.size) % 2 == 0, 1.0, -1.0)
    anchor = np.concatenate(([0.0], np.cumsum(slopes * lengths)))
    idx = np.clip(np.searchsorted(bounds, x, side="right") - 1, 0, lengths.size - 1)
    return anchor[idx] + slopes[idx] * (x - bounds[idx])


@dataclass(frozen=True)
class Weight:
    """Named weight family with evaluator and optional exact translation ratios."""

    family: str
    params: dict = field(default_factory=dict)
    evaluator: Callable[[np.ndarray], np.ndarray] | None = None
    log_evaluator: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.exp(self.log_eval(x))

    def log_eval(self, x) -> np.ndarray:
        """log w(x); the form used by every overflow-sensitive quadrature."""
        x = np.asarray(x, dtype=float)
        fam, p = self.family, self.params
        if fam == "constant":
            return np.zeros_like(x)
        if fam == "power":
            return p["alpha"] * np.log1p(x)
        if fam == "exponential":
            return p["beta"] * x
        if fam == "capped_exponential":
            return p["beta"] * np.minimum(x, p["cap"])
        if fam == "dyadic_zigzag":
            return p["beta"] * zigzag_profile(x)
        if fam == "custom":
            if self.log_evaluator is not None:
                return np.asarray(self.log_evaluator(x), dtype=float)
            w = np.asarray(self.evaluator(x), dtype=float)
            if np.any(~np.isfinite(w)) or np.any(w <= 0):
                raise WeightError("custom weight evaluator must be finite and positive")
            return np.log(w)
        raise WeightError(f"unknown weight family {fam!r}")

    def exact_log_ratio(self, y: float) -> float | None:
        """log sup_x w(x+y)/w(x) over the whole half-line, when closed-form.

        Negative ``y`` means the reverse ratio log sup_x w(x)/w(x+|y|).
        Returns None for families without a closed form.
        """
        fam, p = self.family, self.params
        up = y >= 0
        y = abs(float(y))
        if fam == "constant":
            return 0.0
        if fam == "power":
            a = p["alpha"]
            # the growing direction attains |alpha| log(1+y) at x = 0; the
            # shrinking direction has supremum 1 (approached as x -> inf)
            grow = abs(a) * math.log1p(y)
            if a >= 0:
                return grow if up else 0.0
            return 0.0 if up else grow
        if fam == "exponential":
            return p["beta"] * y if up else -p["beta"] * y
        if fam == "capped_exponential":
            b, c = p["beta"], p["cap"]
            gain = abs(b) * min(y, c)
            if b >= 0:
                return gain if up else 0.0
            return 0.0 if up else gain
        if fam == "dyadic_zigzag":
            # slope is +-1, so |s(x+y)-s(x)| <= y, and dyadic blocks grow
            # without bound, so both signs are attained exactly
            return abs(p["beta"]) * y
        return None


def constant_weight() -> Weight:
    return Weight("constant")


def power_weight(alpha: float) -> Weight:
    return Weight("power", {"alpha": float(alpha)})


def exponential_weight(beta: float) -> Weight:
    return Weight("exponential", {"beta": float(beta)})


def capped_exponential_weight(beta: float, cap: float) -> Weight:
    if cap <= 0:
        raise WeightError("cap must be positive")
    return Weight("capped_exponential", {"beta": float(beta), "cap": float(cap)})


def dyadic_zigzag_weight(beta: float) -> Weight:
    return Weight("dyadic_zigzag", {"beta": float(beta)})


def custom_weight(evaluator: Callable[[np.ndarray], np.ndarray] | None = None,
                  label: str = "custom",
                  log_evaluator: Callable[[np.ndarray], np.ndarray] | None = None) -> Weight:
    if evaluator is None and log_evaluator is None:
        raise WeightError("custom weight needs an evaluator")
    return Weight("custom", {"label": label}, evaluator=evaluator,
                  log_evaluator=log_evaluator)


WEIGHT_FAMILIES = {
    "constant": "w(x) = 1",
    "power": "w(x) = (1 + x)^alpha  [alpha]",
    "exponential": "w(x) = exp(beta x)  [beta]",
    "capped_exponential": "w(x) = exp(beta min(x, cap))  [beta, cap]",
    "dyadic_zigzag": "w(x) = exp(beta s(x)), s zigzag on dyadic blocks  [beta]",
}


# -- admissibility ----------------------------------------------------------

@dataclass
class AdmissibilityReport:
    offsets: list[float]
    up_ratios: list[float]
    down_ratios: list[float]
    passed: bool
    ceiling: float
    notes: list[str]


def _sampled_sup_log_ratio(w: Weight, y: float, x_max: float, sign: float = 1.0,
                           coarse: int = 4096, refine: int = 24) -> float:
    """sup over [0, x_max] of sign * (log w(x+y) - log w(x)).

    Coarse scan plus golden-section refinement; the refinement pass matters
    for zigzag-type weights whose ratio has a sharp argmax at block starts.
    """
    xs = np.linspace(0.0, x_max, coarse)
    vals = sign * (w.log_eval(xs + y) - w.log_eval(xs))
    j = int(np.argmax(vals))
    a = xs[max(0, j - 1)]
    b = xs[min(coarse - 1, j + 1)]
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    best = float(np.max(vals))
    for _ in range(refine):
        c = b - gr * (b - a)
        d = a + gr * (b - a)
        fc = float(sign * (w.log_eval(np.array([c + y])) - w.log_eval(np.array([c])))[0])
        fd = float(sign * (w.log_eval(np.array([d + y])) - w.log_eval(np.array([d])))[0])
        if fc > fd:
            b = d
        else:
            a = c
        best = max(best, fc, fd)
    return best


def translation_log_norm(w: Weight, n: float, x_max: float = 512.0) -> float:
    """log of the translation-by-n operator norm on the weighted space.

    Positive n: forward translation (zero-fill at the origin); negative n:
    backward.  Uses the family's closed form when available, otherwise a
    sampled supremum over [0, x_max].  The value is independent of the
    integrability exponent p.
    """
    exact = w.exact_log_ratio(n)
    if exact is not None:
        return exact
    if n >= 0:
        return _sampled_sup_log_ratio(w, float(n), x_max, sign=1.0)
    return _sampled_sup_log_ratio(w, abs(float(n)), x_max, sign=-1.0)


def translation_norm(w: Weight, p: float, n: float, x_max: float = 512.0) -> float:
    """Norm of the translation by n on the weighted L^p space (p-independent)."""
    if p < 1:
        raise InvalidInputError("p must be at least 1")
    return float(math.exp(translation_log_norm(w, n, x_max)))


def check_admissibility(w: Weight, probe_offsets: Sequence[float], grid: Grid,
                        ceiling: float = 1e9) -> AdmissibilityReport:
    """Two-sided sampled translation-ratio check over the grid range.

    Fails when a ratio exceeds ``ceiling`` (the numerical surrogate of
    "unbounded") or the weight fails positivity on the grid.
    """
    x = grid.points[grid.points >= 0]
    vals = w(x)
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        raise WeightError("weight must be finite and positive on the grid")
    ups, downs, notes = [], [], []
    ok = True
    x_max = float(x.max())
    for y in probe_offsets:
        if y <= 0:
            raise InvalidInputError("probe offsets must be positive")
        up = math.exp(translation_log_norm(w, y, x_max))
        down = math.exp(translation_log_norm(w, -y, x_max))
        ups.append(up)
        downs.append(down)
        for name, r in (("up", up), ("down", down)):
            if not (0.0 < r < ceiling):
                ok = False
                notes.append(f"offset {y}: {name}-ratio {r:.3e} outside (0, {ceiling:.1e})")
    return AdmissibilityReport(list(map(float, probe_offsets)), ups, downs, ok, ceiling, notes)


# -- Orlicz machinery -------------------------------------------------------

@dataclass(frozen=True)
class OrliczFunction:
    """Young-type function A with A(0) = 0 and A(y)/y non-decreasing."""

    name: str
    params: dict = field(default_factory=dict)
    fn: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.name == "power":
            return y ** self.params["p"]
        if self.name == "exp_minus_one":
            return np.expm1(y)
        if self.name == "custom":
            return np.asarray(self.fn(y), dtype=float)
        raise InvalidInputError(f"unknown Orlicz family {self.name!r}")

    def check_shape(self, probes: np.ndarray | None = None) -> bool:
        """A(0) = 0 and A(y)/y non-decreasing on a log-spaced probe set."""
        if probes is None:
            probes = np.logspace(-6, 1.5, 60)
        if abs(float(self(0.0))) > 1e-12:
            return False
        ratio = self(probes) / probes
        return bool(np.all(np.diff(ratio) >= -1e-12 * np.maximum(ratio[:-1], 1e-300)))


def orlicz_power(p: float) -> OrliczFunction:
    return OrliczFunction("power", {"p": float(p)})


def orlicz_exp_minus_one() -> OrliczFunction:
    return OrliczFunction("exp_minus_one")


ORLICZ_FAMILIES = {
    "power": "A(y) = y^p  [p]",
    "exp_minus_one": "A(y) = exp(y) - 1",
}


# -- space specification and norms ------------------------------------------

@dataclass(frozen=True)
class SpaceSpec:
    """A function space: weighted L^p, Orlicz, or weighted Orlicz."""

    kind: str  # "lp" | "orlicz"
    p: float = 2.0
    weight: Weight = field(default_factory=constant_weight)
    orlicz: OrliczFunction | None = None

    def __post_init__(self):
        if self.kind == "lp":
            if not (1.0 <= self.p < np.inf):
                raise InvalidInputError("p must lie in [1, inf)")
        elif self.kind == "orlicz":
            if self.orlicz is None:
                raise InvalidInputError("orlicz spaces need an Orlicz function")
        else:
            raise InvalidInputError(f"unknown space kind {self.kind!r}")

    def norm(self, f: SampledFunction) -> float:
        if self.kind == "lp":
            return lp_norm(f, self.p, self.weight)
        return luxemburg_norm(f, self.orlicz, self.weight)

    def describe(self) -> str:
        if self.kind == "lp":
            return f"L^{self.p}_w  (w: {self.weight.family})"
        return f"Orlicz {self.orlicz.name} (w: {self.weight.family})"


def lp_norm(f: SampledFunction, p: float, w: Weight | None = None) -> float:
    """Weighted p-norm ( integral |f|^p w^p dx )^(1/p), overflow-safe.

    The integrand is assembled in log space so that weights like
    exp(beta x) over long grids do not overflow before the p-th root.
    """
    if p < 1:
        raise InvalidInputError("p must be at least 1")
    x = f.x
    mask = x >= 0
    mag = np.abs(f.values[mask])
    if not np.any(mag > 0):
        return 0.0
    logw = np.zeros_like(x[mask]) if w is None else w.log_eval(x[mask])
    with np.errstate(divide="ignore"):
        s = np.where(mag > 0, np.log(np.where(mag > 0, mag, 1.0)), -np.inf) + logw
    m = float(np.max(s))
    acc = float(np.sum(np.exp(p * (s - m))))
    return math.exp(m + math.log(f.grid.step * acc) / p)


def orlicz_integral(f: SampledFunction, A: OrliczFunction, t: float,
                    w: Weight | None = None) -> float:
    """integral A(|f|/t) dmu with dmu = w dx (w = 1 when absent)."""
    x = f.x
    mask = x >= 0
    mag = np.abs(f.values[mask])
    wv = np.ones_like(mag) if w is None else np.asarray(w(x[mask]), dtype=float)
    return float(f.grid.step * np.sum(A(mag / t) * wv))


def luxemburg_norm(f: SampledFunction, A: OrliczFunction, w: Weight | None = None,
                   integral_tol: float = 1e-10, t_range: tuple[float, float] = (1e-12, 1e12)) -> float:
    """inf { t > 0 : integral A(|f|/t) dmu <= 1 } by bracketed root finding.

    The map t -> integral is non-increasing, so the infimum is the root of
    integral = 1; the returned t* satisfies |integral(t*) - 1| <= integral_tol
    (or the bracket certifies the infimum for discontinuous integrands).
    """
    mag = np.abs(f.values[f.x >= 0])
    if not np.any(mag > 0):
        return 0.0

    def g(t: float) -> float:
        return orlicz_integral(f, A, t, w) - 1.0

    # geometric expansion from a scale guess to a sign-changing bracket
    t0 = max(float(np.max(mag)), 1e-300)
    lo = hi = t0
    glo = g(lo)
    for _ in range(200):
        if glo > 0 or lo <= t_range[0]:
            break
        hi, lo = lo, lo / 2.0
        glo = g(lo)
    ghi = g(hi)
    for _ in range(200):
        if ghi < 0 or hi >= t_range[1]:
            break
        lo, hi = hi, hi * 2.0
        ghi = g(hi)
    glo, ghi = g(lo), g(hi)
    if not (glo >= 0 >= ghi):
        raise BracketError(
            f"could not bracket the unit Orlicz integral in [{lo:.3e}, {hi:.3e}]",
            lo=lo, hi=hi)
    if glo == 0.0:
        return float(lo)
    t_star = brentq(g, lo, hi, xtol=1e-300, rtol=8.881784197001252e-16, maxiter=300)
    # brentq terminates on t-resolution; walk down to the integral tolerance
    if abs(g(t_star)) > integral_tol:
        lo2, hi2 = t_star * (1 - 1e-12), t_star * (1 + 1e-12)
        for _ in range(100):
            mid = 0.5 * (lo2 + hi2)
            if g(mid) > 0:
                lo2 = mid
            else:
                hi2 = mid
            if abs(g(mid)) <= integral_tol:
                return float(mid)
        t_star = hi2
    return float(t_star)
