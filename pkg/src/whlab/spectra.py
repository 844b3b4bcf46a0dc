"""Quantitative spectral certificates for translation operators.

The central dichotomy: the moduli between the reciprocal backward growth
rate and the forward growth rate form an annulus; every point of it lies
in the intersection of the forward spectrum with the reciprocal backward
spectrum, and everything outside is excluded by a convergent resolvent
series.  Certificates make both sides checkable numbers:

* inside: a witness function with small relative residual against the
  translation, found two ways: a closed-form windowed power profile, and
  the optimal window witness from the smallest singular value of a
  rectangular finite section (input window strictly inside the output
  window, so the residual is exact, not a truncation artifact);
* outside: a truncated Neumann series for the resolvent with a certified
  geometric remainder, whose reciprocal is a floor on any candidate
  residual.

The cut-off builder produces the compactly supported function with the
three frequency-side bounds (band-tail, total mass, unit peak) that the
exclusion argument needs; bounds are measured with the unitary transform
normalisation so the stated constants are convention-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix, eye
from scipy.sparse.linalg import splu
from scipy.special import erfcinv

from .errors import (ConvergenceError, GridSpanError, InvalidInputError,
                     TwistOverflowError)
from .gridfn import Grid, SampledFunction, forward_transform
from .operators import (KernelOperator, ShiftOperator, WienerHopfOperator,
                        apply_shift, spectral_radius)
from .profiles import plateau
from .spaces import SpaceSpec, Weight, lp_norm, translation_log_norm
from .gridfn import strip_eval


# -- cut-off construction -----------------------------------------------------

@dataclass(frozen=True)
class CutoffRequest:
    eps: float
    C0: float
    eta0: float
    delta: float

    def __post_init__(self):
        if not (0 < self.eps < 1):
            raise InvalidInputError("eps must lie in (0, 1)")
        if self.C0 <= 0 or self.delta <= 0 or self.eta0 <= 0:
            raise InvalidInputError("C0, eta0, delta must be positive")


@dataclass
class CutoffResult:
    f: SampledFunction
    gauss_width: float
    t0: float
    tail_outside_band: float
    total_mass: float
    peak: float
    envelope_decay: float
    targets: dict
    passed: bool


def build_cutoff(req: CutoffRequest, step: float = 0.01,
                 max_t0: float = 4096.0) -> CutoffResult:
    """Compactly supported smooth f with the three frequency-side bounds.

    f is a frequency-localised unit-peak Gaussian wave packet centred at
    t0, cut by a smooth window supported in (1/2, 2 t0 - 1/2).  The
    Gaussian width is fixed from the closed-form band-tail budget, then t0
    grows until the window correction is provably negligible.  Transform
    integrals are measured with the unitary normalisation (divide the
    analysis transform by sqrt(2 pi)), which is the convention in which
    the total-mass constant 2 sqrt(2 pi) is stated.
    """
    eps, C0, eta0, delta = req.eps, req.C0, req.eta0, req.delta
    # band tail of the pure packet: sqrt(2 pi) erfc(delta / (sqrt2 a)) <= eps/(2 C0)
    arg = eps / (2.0 * C0 * math.sqrt(2.0 * math.pi))
    if arg >= 1.0:
        a = delta
    else:
        a = delta / (math.sqrt(2.0) * float(erfcinv(arg)))
    a *= 0.98  # strictness margin against quadrature error

    window_target = eps / (2.0 * math.pi * C0)
    t0 = 8.0
    while t0 <= max_t0:
        span = 2.0 * t0
        grid = Grid.from_span(0.0, span, step)
        x = grid.points
        t0g = x[grid.index_of(round(t0 / step) * step)]
        win = plateau(x, 0.5, 2.0 * t0g - 0.5, 0.5)
        packet = np.exp(-(a ** 2) * (x - t0g) ** 2 / 2.0 + 1j * (x - t0g) * eta0)
        fvals = win * packet
        # window correction: the cut part of the packet, with polynomial
        # frequency weight; small once the packet clears the window edges
        Fc = SampledFunction(grid, (win - 1.0) * packet)
        Fhat = forward_transform(Fc)
        wcorr = float(np.max((1.0 + Fhat.xi ** 2) * np.abs(Fhat.values))) / math.sqrt(2.0 * math.pi)
        if wcorr <= window_target:
            f = SampledFunction(grid, fvals)
            Fh = forward_transform(f)
            absu = np.abs(Fh.values) / math.sqrt(2.0 * math.pi)
            dxi = Fh.freq_grid.step
            outside = np.abs(Fh.xi - eta0) > delta
            tail = float(dxi * np.sum(absu[outside]))
            total = float(dxi * np.sum(absu))
            peak = float(np.abs(f.values[grid.index_of(t0g)]))
            targets = {
                "tail_outside_band": eps / C0,
                "total_mass": 2.0 * math.sqrt(2.0 * math.pi),
                "peak_low": 1.0 - 1e-9,
                "peak_high": 1.0 + 1e-9,
            }
            ok = (tail <= targets["tail_outside_band"]
                  and total <= targets["total_mass"]
                  and targets["peak_low"] <= peak <= targets["peak_high"])
            return CutoffResult(f, a, float(t0g), tail, total, peak, wcorr,
                                targets, ok)
        t0 *= 2.0
    raise GridSpanError(
        f"window correction would need t0 > {max_t0}", required_span=2 * max_t0)


# -- quasi-eigenvectors -------------------------------------------------------

def quasi_eigenvector(lam: complex, window: tuple[float, float], grid_step: float,
                      direction: str = "forward", ramp_frac: float = 0.25,
                      ) -> SampledFunction:
    """Windowed power profile: lam^(-x) (forward) or lam^x (backward), windowed.

    The translate differs from lam times the function only on the ramp
    bands, so the relative residual decays as the window grows wherever
    the weight allows.  The profile is normalised so its largest magnitude
    is 1 (the residual is scale-free, and big windows would overflow).
    """
    if lam == 0:
        raise InvalidInputError("lam must be nonzero")
    lo, hi = window
    if lo < 0 or hi <= lo:
        raise InvalidInputError(f"bad window {window}")
    L = hi - lo
    ramp = ramp_frac * L
    g = Grid(0.0, grid_step, int(round((hi + 1.0) / grid_step)) + 2)
    x = g.points
    log_lam = complex(np.log(lam))
    sgn = -1.0 if direction == "forward" else 1.0
    expo = sgn * x * log_lam.real
    x_ref = float(x[np.argmax(np.where((x >= lo) & (x <= hi), expo, -np.inf))])
    env = plateau(x, lo, hi, ramp)
    mag = np.where(env > 0, np.exp(np.where(env > 0, expo - sgn * x_ref * log_lam.real, 0.0)), 0.0)
    phase = np.exp(1j * sgn * x * log_lam.imag)
    vals = mag * env * phase
    return SampledFunction(g, vals)


def shift_residual(f: SampledFunction, lam: complex, space: SpaceSpec,
                   amount: float = 1.0) -> float:
    """Relative residual |S f - lam f| / |f| in the space norm."""
    nf = space.norm(f)
    if nf == 0:
        raise InvalidInputError("witness must be nonzero")
    moved = apply_shift(f, amount)
    diff = SampledFunction(f.grid, moved.values - lam * f.values)
    return space.norm(diff) / nf


# -- rectangular finite sections of the translation pair ----------------------

def _section_sigma_min(w: Weight, lam: complex, X: float, h: float,
                       direction: str) -> tuple[float, np.ndarray, np.ndarray]:
    """Smallest singular value of the rectangular window section.

    Input window [0, X]; for the forward translation the output window is
    [0, X+1] so the image is captured in full and the value is the exact
    minimum of |(S - lam) f| / |f| over window functions.  Returns
    (sigma_min, witness in weighted coordinates, node positions).
    """
    m = int(round(1.0 / h))
    if abs(m * h - 1.0) > 1e-12:
        raise InvalidInputError("step must divide the unit translation")
    M = int(round(X / h)) + 1
    xs = h * np.arange(M)
    logw = w.log_eval(xs)
    if direction == "forward":
        ratios = np.exp(w.log_eval(xs + 1.0) - logw)
        rows = np.concatenate([np.arange(M), m + np.arange(M)])
        cols = np.concatenate([np.arange(M), np.arange(M)])
        vals = np.concatenate([np.full(M, -lam, dtype=complex),
                               ratios.astype(complex)])
        A = csr_matrix((vals, (rows, cols)), shape=(M + m, M))
    elif direction == "backward":
        # reading one unit to the right; columns j < m fall off the grid
        ratios_hi = np.exp(w.log_eval(xs[m:] - 1.0) - logw[m:])
        rows = np.concatenate([np.arange(M), np.arange(M - m)])
        cols = np.concatenate([np.arange(M), m + np.arange(M - m)])
        vals = np.concatenate([np.full(M, -lam, dtype=complex),
                               ratios_hi.astype(complex)])
        A = csr_matrix((vals, (rows, cols)), shape=(M, M))
    else:
        raise InvalidInputError("direction must be 'forward' or 'backward'")

    if M <= 256:
        dense = A.toarray()
        u, s, vh = np.linalg.svd(dense)
        return float(s[-1]), vh[-1].conj(), xs

    # inverse iteration on the normal matrix; the banded LU factorisation
    # makes each step linear in the window size
    B = (A.getH() @ A).tocsc()
    try:
        lu = splu(B)
    except RuntimeError:
        tiny = 1e-14 * float(np.abs(B.diagonal()).max())
        lu = splu((B + tiny * eye(M, format="csc", dtype=complex)).tocsc())
    rng = np.random.default_rng(12345)
    v = rng.normal(size=M) + 1j * rng.normal(size=M)
    v /= np.linalg.norm(v)
    ray_prev = None
    for _ in range(100):
        u = lu.solve(v)
        v = u / np.linalg.norm(u)
        ray = float(np.real(np.vdot(v, B @ v)))
        if ray_prev is not None and abs(ray - ray_prev) <= 1e-4 * abs(ray) + 1e-300:
            break
        ray_prev = ray
    sig = math.sqrt(max(ray, 0.0))
    return sig, v, xs


def section_witness(w: Weight, lam: complex, X: float, h: float,
                    direction: str = "forward") -> tuple[float, SampledFunction]:
    """Optimal window witness: (residual, witness function on [0, X+1+2h])."""
    sig, v, xs = _section_sigma_min(w, lam, X, h, direction)
    m = int(round(1.0 / h))
    g = Grid(0.0, h, xs.size + m + 2)
    vals = np.zeros(g.count, dtype=complex)
    vals[:xs.size] = v * np.exp(-w.log_eval(xs))
    peak = float(np.max(np.abs(vals)))
    if peak > 0:
        vals = vals / peak
    return sig, SampledFunction(g, vals)


# -- Neumann exclusion --------------------------------------------------------

@dataclass
class NeumannBound:
    bound: float
    floor: float
    terms: int
    growth_base: float
    remainder: float


def neumann_resolvent_bound(w: Weight, lam_abs: float, direction: str = "forward",
                            n_terms: int = 256, n0_max: int = 64,
                            x_max: float = 512.0) -> NeumannBound:
    """Certified bound on the resolvent of the translation at |lam|.

    Sums translation norms against powers of |lam| and closes the series
    with a geometric remainder from submultiplicativity; valid exactly
    when some computed root ||S_n||^(1/n) drops below |lam|.
    """
    sgn = 1.0 if direction == "forward" else -1.0
    best_q = None
    n0 = 1
    while n0 <= n0_max:
        q = translation_log_norm(w, sgn * n0, x_max) / n0
        best_q = q if best_q is None else min(best_q, q)
        n0 *= 2
    if math.exp(best_q) >= lam_abs:
        raise ConvergenceError(
            f"no computed growth root below |lam| = {lam_abs}; cannot certify exclusion")
    log_lam = math.log(lam_abs)
    log_norms = [translation_log_norm(w, sgn * n, x_max) for n in range(n_terms)]
    total = sum(math.exp(ln - (n + 1) * log_lam) for n, ln in enumerate(log_norms))
    log_M = max(ln - n * best_q for n, ln in enumerate(log_norms))
    r = math.exp(best_q - log_lam)
    remainder = math.exp(log_M) * r ** n_terms / (lam_abs * (1.0 - r))
    bound = total + remainder
    return NeumannBound(bound, 1.0 / bound, n_terms, math.exp(best_q), remainder)


# -- annulus certificates -----------------------------------------------------

@dataclass
class SpectralCertificate:
    lam: complex
    status: str  # "inside" | "outside" | "outside_zero"
    residual: float | None = None
    ladder: list = field(default_factory=list)
    witness_forward: SampledFunction | None = None
    witness_backward: SampledFunction | None = None
    witness_residual_forward: float | None = None
    witness_residual_backward: float | None = None
    witness_step: float | None = None
    resolvent_bound: float | None = None
    residual_floor: float | None = None
    side: str | None = None
    annulus: tuple[float, float] | None = None
    note: str = ""

    def jsonable_row(self) -> dict:
        return {
            "re": self.lam.real, "im": self.lam.imag, "status": self.status,
            "residual": self.residual, "resolvent_bound": self.resolvent_bound,
            "residual_floor": self.residual_floor, "note": self.note,
        }


def annulus_certificate(lam: complex, w: Weight, p: float = 2.0,
                        h: float = 0.25,
                        ladder: tuple[float, ...] = (64.0, 128.0, 256.0, 512.0, 1024.0),
                        inside_tol: float = 5e-2,
                        stop_early: bool = True) -> SpectralCertificate:
    """Membership certificate for the annulus intersection set at ``lam``.

    Inside the annulus both the forward translation at lam and the
    backward translation at 1/lam must admit decaying-residual witnesses;
    the certificate ladder records, per window, the better of the closed
    form profile and the optimal section witness, for both directions.
    Outside, a Neumann bound on the corresponding resolvent gives a floor
    that no residual can beat.
    """
    rho_f = spectral_radius(w, p, "forward").value
    rho_b = spectral_radius(w, p, "backward").value
    r_lo, r_hi = 1.0 / rho_b, rho_f
    mod = abs(lam)
    if lam == 0:
        return SpectralCertificate(
            lam, "outside_zero", annulus=(r_lo, r_hi),
            note="zero is outside the characterised intersection: the forward "
                 "translation is injective with closed range off 0")
    if mod > r_hi * (1.0 + 1e-12):
        nb = neumann_resolvent_bound(w, mod, "forward")
        return SpectralCertificate(
            lam, "outside", resolvent_bound=nb.bound, residual_floor=nb.floor,
            side="forward", annulus=(r_lo, r_hi),
            note=f"Neumann series for the forward translation, {nb.terms} terms")
    if mod < r_lo * (1.0 - 1e-12):
        nb = neumann_resolvent_bound(w, 1.0 / mod, "backward")
        return SpectralCertificate(
            lam, "outside", resolvent_bound=nb.bound, residual_floor=nb.floor,
            side="backward", annulus=(r_lo, r_hi),
            note=f"Neumann series for the backward translation at 1/lam, {nb.terms} terms")

    sp = SpaceSpec("lp", p, w)
    mu = 1.0 / lam
    rows = []
    best_f = best_b = math.inf
    wit_f = wit_b = None
    for X in ladder:
        sig_f, cand_f = section_witness(w, lam, X, h, "forward")
        sig_b, cand_b = section_witness(w, mu, X, h, "backward")
        try:
            qe = quasi_eigenvector(lam, (max(h, 0.05 * X), X), h, "forward")
            qe_f = shift_residual(qe, lam, sp, 1.0)
        except (TwistOverflowError, OverflowError):
            qe, qe_f = None, math.inf
        try:
            qeb = quasi_eigenvector(mu, (max(h, 0.05 * X), X), h, "backward")
            qe_b = shift_residual(qeb, mu, sp, -1.0)
        except (TwistOverflowError, OverflowError):
            qeb, qe_b = None, math.inf
        res_f = min(sig_f, qe_f)
        res_b = min(sig_b, qe_b)
        rows.append((float(X), float(res_f), float(res_b)))
        if res_f < best_f:
            best_f = res_f
            wit_f = cand_f if sig_f <= qe_f else qe
        if res_b < best_b:
            best_b = res_b
            wit_b = cand_b if sig_b <= qe_b else qeb
        if stop_early and max(best_f, best_b) <= 0.5 * inside_tol:
            break
    combined = max(best_f, best_b)
    wr_f = shift_residual(wit_f, lam, sp, 1.0) if wit_f is not None else None
    wr_b = shift_residual(wit_b, mu, sp, -1.0) if wit_b is not None else None
    return SpectralCertificate(
        lam, "inside", residual=float(combined), ladder=rows,
        witness_forward=wit_f, witness_backward=wit_b,
        witness_residual_forward=wr_f, witness_residual_backward=wr_b,
        witness_step=h, annulus=(r_lo, r_hi),
        note=f"forward best {best_f:.3e}, backward best {best_b:.3e}")


def recompute_witness_residual(cert: SpectralCertificate, w: Weight,
                               p: float = 2.0) -> float:
    """Residual of the stored forward witness, recomputed from scratch."""
    if cert.witness_forward is None:
        raise InvalidInputError("certificate has no stored witness")
    sp = SpaceSpec("lp", p, w)
    return shift_residual(cert.witness_forward, cert.lam, sp, 1.0)


# -- symbol-point inclusion ---------------------------------------------------

@dataclass
class InclusionPoint:
    alpha: complex
    target: complex
    residuals: list
    final: float
    decaying: bool


@dataclass
class InclusionReport:
    points: list
    max_final: float
    all_decaying: bool


def symbol_spectrum_inclusion(T: KernelOperator, alpha_lattice,
                              windows: tuple[float, ...] = (50.0, 100.0, 200.0),
                              x_start: float | None = None,
                              ramp_frac: float = 0.25,
                              decay_slack: float = 1.05) -> InclusionReport:
    """Residual ladders for modulated-plateau witnesses at symbol points.

    For each strip point alpha, the target is the kernel transform there;
    the witness exp(i alpha x) times a smooth plateau turns the operator
    into approximately that scalar away from the boundary, so the residual
    decays as the plateau grows.
    """
    phi = T.kernel
    sp = T.space
    ext = max(abs(phi.grid.origin), abs(phi.grid.last))
    if x_start is None:
        x_start = ext + 2.0
    pts = []
    worst = 0.0
    all_dec = True
    for alpha in np.atleast_1d(np.asarray(alpha_lattice, dtype=complex)):
        target = complex(strip_eval(phi, complex(alpha)))
        residuals = []
        for L in windows:
            lo, hi = x_start, x_start + L
            g = Grid(0.0, phi.grid.step,
                     int(round((hi + ext + 2.0) / phi.grid.step)) + 1)
            x = g.points
            a_im = float(np.imag(alpha))
            expo = -a_im * x
            env = plateau(x, lo, hi, ramp_frac * L)
            x_ref = float(x[np.argmax(np.where(env > 0, expo, -np.inf))])
            mag = np.where(env > 0, np.exp(np.where(env > 0, expo + a_im * x_ref, 0.0)), 0.0)
            f = SampledFunction(g, mag * env * np.exp(1j * np.real(alpha) * x))
            nf = sp.norm(f)
            out = T.apply(f)
            diff = SampledFunction(g, out.values - target * f.values)
            residuals.append(sp.norm(diff) / nf)
        dec = all(residuals[k + 1] <= residuals[k] * decay_slack
                  for k in range(len(residuals) - 1))
        pts.append(InclusionPoint(complex(alpha), target, residuals,
                                  residuals[-1], dec))
        worst = max(worst, residuals[-1])
        all_dec = all_dec and dec
    return InclusionReport(pts, worst, all_dec)
