"""Experiment drivers: run a configured verification suite, emit a report.

Reports are deterministic: a fixed config and seed produce byte-identical
``report.json`` and CSV tables.  Wall-clock data lives in a separate
``run_meta.json`` that is excluded from determinism comparisons.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from importlib import metadata as _ilmd
from pathlib import Path

import numpy as np

from .config import (DEFAULT_TOLERANCES, build_operator, build_space,
                     config_hash)
from .errors import ConfigError, WhlabError
from .gridfn import Grid, SampledFunction
from .operators import (KernelOperator, ShiftOperator, commutation_residual,
                        operator_norm, spectral_radius, apply_shift)
from .profiles import bump
from .spaces import (SpaceSpec, check_admissibility, lp_norm, luxemburg_norm,
                     orlicz_power, translation_norm)
from .spectra import (CutoffRequest, annulus_certificate, build_cutoff,
                      shift_residual, symbol_spectrum_inclusion)
from .symbol import (StripSpec, SymbolTable, build_symbol_table,
                     representation_probes, verify_analyticity,
                     verify_representation, verify_strip_bound)
from .vector import (MatrixKernel, VectorFunction, VectorKernelOperator,
                     VectorShiftOperator, VectorSpace, matrix_weight_symbol,
                     mixed_exponential_weight_5x5, scalarize, vector_symbol,
                     vector_spectral_radius)
from .symbol import symbol_of_kernel, padded_grid


def _version() -> str:
    try:
        return _ilmd.version("whlab")
    except _ilmd.PackageNotFoundError:
        return "unknown"


@dataclass
class Verdict:
    name: str
    passed: bool
    measured: float | None
    threshold: float | None
    detail: str = ""

    def jsonable(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed),
                "measured": self.measured, "threshold": self.threshold,
                "detail": self.detail}


@dataclass
class Report:
    experiment: str
    config_digest: str
    verdicts: list[Verdict] = field(default_factory=list)
    tables: dict = field(default_factory=dict)   # name -> {columns, rows}
    plotdata: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def add(self, name: str, passed: bool, measured=None, threshold=None,
            detail: str = "") -> None:
        self.verdicts.append(Verdict(
            name, bool(passed),
            None if measured is None else float(measured),
            None if threshold is None else float(threshold), detail))

    def jsonable(self) -> dict:
        return {
            "experiment": self.experiment,
            "config_hash": self.config_digest,
            "version": _version(),
            "passed": self.passed,
            "verdicts": [v.jsonable() for v in self.verdicts],
            "tables": sorted(self.tables),
            "plotdata": sorted(self.plotdata),
            "metadata": self.metadata,
        }

    def write(self, outdir: str | Path) -> Path:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        report_path = out / "report.json"
        with open(report_path, "w") as fh:
            json.dump(self.jsonable(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        for sub, group in (("tables", self.tables), ("plotdata", self.plotdata)):
            d = out / sub
            if group:
                d.mkdir(exist_ok=True)
            for name in sorted(group):
                spec = group[name]
                with open(d / f"{name}.csv", "w", newline="") as fh:
                    wr = csv.writer(fh)
                    wr.writerow(spec["columns"])
                    for row in spec["rows"]:
                        wr.writerow([_fmt(v) for v in row])
        with open(out / "run_meta.json", "w") as fh:
            json.dump({"written_at_unix": time.time()}, fh)
            fh.write("\n")
        return report_path


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


# ---------------------------------------------------------------------------

def run_experiment(cfg: dict, seed: int | None = None) -> Report:
    """Dispatch a validated config to its experiment driver."""
    cfg = dict(cfg)
    if seed is not None:
        cfg["seed"] = int(seed)
    cfg.setdefault("seed", 0)
    name = cfg["experiment"]
    report = Report(name, config_hash(cfg))
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(cfg.get("tolerances", {}))
    driver = _DRIVERS.get(name)
    if driver is None:
        raise ConfigError(f"unknown experiment {name!r}", pointer="/experiment")
    driver(cfg, tol, report)
    return report


def _grid_from(cfg: dict, default_span: float = 80.0,
               default_step: float = 0.01) -> Grid:
    g = cfg.get("grid", {})
    return Grid.from_span(0.0, g.get("span", default_span),
                          g.get("step", default_step))


# -- symbol ------------------------------------------------------------------

def _run_symbol(cfg: dict, tol: dict, report: Report) -> None:
    params = cfg.get("params", {})
    space = build_space(cfg.get("space"))
    grid = _grid_from(cfg)
    T = build_operator(cfg.get("operator"), space, grid.step)

    strip = StripSpec.from_weight(space.weight, space.p,
                                  n_levels=params.get("levels", 33))
    norm_step = params.get("norm_step", 0.05)
    norm_span = params.get("norm_span", 1024.0)
    norm = operator_norm(T, Grid.from_span(0.0, norm_span, norm_step))
    table = build_symbol_table(T, grid, strip, pad=params.get("pad", 16.0),
                               norm_value=norm.value)

    lo, hi = params.get("probe_support", (0.03 * grid.span, 0.35 * grid.span))
    probes = representation_probes(grid, params.get("probes", 5), (lo, hi),
                                   seed=cfg["seed"] + 5)
    worst = 0.0
    for a in table.levels:
        rep = verify_representation(T, table.level(a), a, probes,
                                    tol["representation"])
        worst = max(worst, rep.max_residual)
    report.add("representation_residual", worst <= tol["representation"],
               worst, tol["representation"],
               f"{len(table.levels)} levels x {len(probes)} probes")

    comm = commutation_residual(T, grid)
    report.add("commutation", comm <= 1e-6, comm, 1e-6)

    if isinstance(T, KernelOperator):
        sb = verify_strip_bound(T.kernel, strip, norm.value,
                                slack=tol["strip_bound_slack"])
        report.add("strip_bound", sb.passed, sb.max_abs,
                   sb.bound * (1 + sb.slack),
                   f"lattice {sb.lattice_shape[0]}x{sb.lattice_shape[1]}")
        an = verify_analyticity(table, T.kernel, cr_tol=tol["cr"],
                                cross_tol=tol["cross_level"])
    else:
        an = verify_analyticity(table, None, cr_tol=tol["cr"],
                                cross_tol=tol["cross_level"])
    if an.skipped:
        report.add("analyticity", True, None, tol["cr"], an.note)
    else:
        report.add("analyticity", an.passed, an.cr_residual, tol["cr"],
                   f"cross-level {an.cross_level_error}")

    sups = table.sup_values()
    ratios = table.norm_ratios() or [math.nan] * len(sups)
    report.tables["levels"] = {
        "columns": ["a", "sup_abs_symbol", "ratio_to_norm"],
        "rows": [[float(a), float(s), float(r)]
                 for a, s, r in zip(table.levels, sups, ratios)],
    }
    mid = table.data[len(table.data) // 2]
    amid = table.levels[len(table.data) // 2]
    report.plotdata[f"symbol_level"] = {
        "columns": ["xi", "abs", "arg"],
        "rows": [[float(x), float(abs(v)), float(np.angle(v))]
                 for x, v in zip(mid.xi[::8], mid.values[::8])],
    }
    report.metadata.update({
        "strip": [strip.a_min, strip.a_max],
        "levels": len(table.levels),
        "operator_norm": norm.value,
        "operator_norm_is_lower_bound": norm.is_lower_bound,
        "grid_count": grid.count,
    })


# -- annulus -----------------------------------------------------------------

def _run_annulus(cfg: dict, tol: dict, report: Report) -> None:
    params = cfg.get("params", {})
    space = build_space(cfg.get("space"))
    w = space.weight
    rho_f = spectral_radius(w, space.p, "forward").value
    rho_b = spectral_radius(w, space.p, "backward").value
    r_lo, r_hi = 1.0 / rho_b, rho_f

    radii = params.get("radii")
    if radii is None:
        radii = list(np.geomspace(0.8 * r_lo, 1.2 * r_hi, 8))
    n_angles = params.get("angles", 8)
    angles = [2.0 * math.pi * k / n_angles for k in range(n_angles)]
    h = params.get("h", 0.25)
    ladder = tuple(params.get("ladder", (64.0, 128.0, 256.0, 512.0, 1024.0)))
    dim = params.get("dimension", 1)

    rows = []
    worst_inside = 0.0
    best_floor = math.inf
    verdict_inside = True
    verdict_outside = True
    vec_agree = True
    for r in radii:
        for th in angles:
            lam = complex(r * math.cos(th), r * math.sin(th))
            cert = annulus_certificate(lam, w, space.p, h, ladder,
                                       inside_tol=tol["inside"])
            in_band = r_lo * (1 - 1e-12) <= abs(lam) <= r_hi * (1 + 1e-12)
            if cert.status == "inside":
                worst_inside = max(worst_inside, cert.residual)
                if not in_band:
                    verdict_inside = False
                rows.append([lam.real, lam.imag, "inside", cert.residual])
                if dim > 1 and cert.witness_forward is not None:
                    vec_agree &= _vector_witness_agrees(cert, w, space.p, dim)
            else:
                if in_band and cert.status != "outside_zero":
                    verdict_outside = False
                floor = cert.residual_floor if cert.residual_floor else math.inf
                best_floor = min(best_floor, floor)
                rows.append([lam.real, lam.imag, cert.status,
                             floor if math.isfinite(floor) else -1.0])

    report.tables["certificates"] = {
        "columns": ["re", "im", "status", "residual_or_floor"], "rows": rows}
    report.add("inside_residuals", verdict_inside and worst_inside <= tol["inside"],
               worst_inside, tol["inside"])
    report.add("outside_certificates", verdict_outside, None, None,
               "every point off the annulus excluded by a resolvent bound")
    if math.isfinite(best_floor) and worst_inside > 0:
        sep = best_floor / worst_inside
        report.add("separation", sep >= tol["separation"], sep, tol["separation"])
    if dim > 1:
        report.add("vector_witness_agreement", vec_agree, None, None,
                   f"witnesses re-validated on the {dim}-component space")
    report.metadata.update({"annulus": [r_lo, r_hi], "h": h,
                            "ladder": list(ladder), "dimension": dim})


def _vector_witness_agrees(cert, w, p, dim, tol_match: float = 1e-10) -> bool:
    """Scalar witness, lifted to a vector function, reproduces its residual."""
    f = cert.witness_forward
    space = VectorSpace(p, w, dim)
    u = np.zeros(dim)
    u[0] = 1.0
    F = VectorFunction.tensor(f, u)
    Sv = VectorShiftOperator(space=space, amount=1.0)
    moved = Sv.apply(F)
    diff = VectorFunction(F.grid, moved.values - cert.lam * F.values)
    res_vec = space.norm(diff) / space.norm(F)
    res_scalar = shift_residual(f, cert.lam, SpaceSpec("lp", p, w), 1.0)
    return abs(res_vec - res_scalar) <= tol_match * max(1.0, res_scalar)


# -- cutoff ------------------------------------------------------------------

def _run_cutoff(cfg: dict, tol: dict, report: Report) -> None:
    params = cfg.get("params", {})
    req = CutoffRequest(params.get("eps", 0.1), params.get("C0", 2.0),
                        params.get("eta0", 5.0), params.get("delta", 1.0))
    res = build_cutoff(req, step=params.get("step", 0.01))
    t = res.targets
    report.add("band_tail", res.tail_outside_band <= t["tail_outside_band"],
               res.tail_outside_band, t["tail_outside_band"])
    report.add("total_mass", res.total_mass <= t["total_mass"] + 1e-6,
               res.total_mass, t["total_mass"])
    peak_ok = t["peak_low"] <= res.peak <= t["peak_high"]
    report.add("unit_peak", peak_ok, res.peak, 1.0)
    report.metadata.update({"gauss_width": res.gauss_width, "t0": res.t0,
                            "envelope_decay": res.envelope_decay})
    from .gridfn import forward_transform
    F = forward_transform(res.f)
    sl = slice(None, None, max(1, F.freq_grid.count // 4000))
    report.plotdata["cutoff_transform"] = {
        "columns": ["xi", "abs_unitary"],
        "rows": [[float(x), float(abs(v) / math.sqrt(2 * math.pi))]
                 for x, v in zip(F.xi[sl], F.values[sl])],
    }


# -- inclusion ---------------------------------------------------------------

def _run_inclusion(cfg: dict, tol: dict, report: Report) -> None:
    params = cfg.get("params", {})
    space = build_space(cfg.get("space"))
    grid = _grid_from(cfg, default_span=40.0)
    T = build_operator(cfg.get("operator", {"kind": "kernel"}), space, grid.step)
    if not isinstance(T, KernelOperator):
        raise ConfigError("inclusion experiment needs a kernel operator",
                          pointer="/operator/kind")
    re_spec = params.get("alpha_re", [-3.0, 3.0, 7])
    ims = params.get("alpha_im", [0.0])
    res = np.linspace(re_spec[0], re_spec[1], int(re_spec[2]))
    lattice = [complex(r, i) for i in ims for r in res]
    windows = tuple(params.get("windows", (50.0, 100.0, 200.0)))
    rep = symbol_spectrum_inclusion(T, lattice, windows)
    report.add("inclusion_residuals", rep.max_final <= tol["inclusion"],
               rep.max_final, tol["inclusion"])
    report.add("inclusion_decay", rep.all_decaying, None, None,
               "residual ladders non-increasing")
    report.tables["inclusion"] = {
        "columns": ["re_alpha", "im_alpha", "re_target", "im_target", "final_residual"],
        "rows": [[p.alpha.real, p.alpha.imag, p.target.real, p.target.imag,
                  float(p.final)] for p in rep.points],
    }
    report.metadata["windows"] = list(windows)


# -- vector-symbol -----------------------------------------------------------

def _run_vector_symbol(cfg: dict, tol: dict, report: Report) -> None:
    params = cfg.get("params", {})
    d = params.get("dimension", 3)
    space_cfg = cfg.get("space") or {"weight": {"family": "dyadic_zigzag", "beta": 1.0}}
    scalar_space = build_space(space_cfg)
    vspace = VectorSpace(scalar_space.p, scalar_space.weight, d)
    grid = _grid_from(cfg, default_span=40.0)
    rng = np.random.default_rng(cfg["seed"] + 17)

    kg = Grid.from_span(-4.0, 8.0, grid.step)
    vals = np.zeros((d, d, kg.count), dtype=complex)
    for i in range(d):
        for j in range(d):
            c = rng.uniform(-1.0, 2.0)
            r = rng.uniform(0.5, 1.5)
            vals[i, j] = rng.normal() * bump(kg.points, c, r) \
                * np.exp(1j * rng.normal(0, 1) * kg.points)
    K = MatrixKernel(kg, vals)
    T = VectorKernelOperator(space=vspace, kernel=K)

    strip = StripSpec.from_weight(vspace.weight, vspace.p, n_levels=5)
    a = params.get("level", strip.levels[len(strip.levels) // 2])
    G = padded_grid(grid, 10.0)
    V = vector_symbol(K, a, count=G.count, strip=strip)

    worst_pair = 0.0
    basis = np.eye(d)
    for i in range(d):
        for j in range(d):
            Tij = scalarize(T, basis[i], basis[j])
            nu = symbol_of_kernel(Tij.kernel, a, count=G.count)
            pv = V.pair(basis[i], basis[j])
            worst_pair = max(worst_pair, float(np.max(np.abs(nu.values - pv.values))))
    report.add("scalarization_identity", worst_pair <= tol["scalarization"],
               worst_pair, tol["scalarization"], f"{d * d} basis pairs")

    probes = []
    for _ in range(params.get("probes", 3)):
        comps = [SampledFunction(grid,
                                 rng.normal() * bump(grid.points,
                                                     rng.uniform(0.2, 0.4) * grid.span,
                                                     rng.uniform(0.03, 0.06) * grid.span)
                                 * np.exp(1j * rng.normal(0, 2) * grid.points))
                 for _ in range(d)]
        probes.append(VectorFunction.from_components(comps))
    from .vector import vector_representation_check
    rep = vector_representation_check(T, V, a, probes, tol["representation"])
    report.add("vector_representation", rep.passed, rep.max_residual,
               tol["representation"])
    rad = vector_spectral_radius(vspace.weight, d, vspace.p)
    report.add("radius_profile_identity", rad.profile_identity_error <= 1e-12,
               rad.profile_identity_error, 1e-12)
    report.metadata.update({"dimension": d, "level": float(a),
                            "radii": [rad.forward, rad.backward]})


# -- weights-report ------------------------------------------------------------

def _run_weights_report(cfg: dict, tol: dict, report: Report) -> None:
    params = cfg.get("params", {})
    space = build_space(cfg.get("space"))
    w = space.weight
    grid = _grid_from(cfg, default_span=64.0, default_step=0.05)
    offsets = params.get("offsets", [0.25, 1.0, 3.0])
    adm = check_admissibility(w, offsets, grid)
    report.add("admissibility", adm.passed, None, adm.ceiling,
               "; ".join(adm.notes) if adm.notes else "two-sided ratios finite")

    ns = [1, 2, 4, 8, 16, 32, 64]
    rows = []
    sub_ok = True
    inv_ok = True
    for n in ns:
        up = translation_norm(w, space.p, n)
        dn = translation_norm(w, space.p, -n)
        rows.append([n, up, dn])
        inv_ok &= up * dn >= 1.0 - 1e-9
    for m, n in [(1, 2), (2, 4), (4, 8), (8, 16)]:
        lhs = translation_norm(w, space.p, m + n)
        sub_ok &= lhs <= translation_norm(w, space.p, m) \
            * translation_norm(w, space.p, n) * (1 + 1e-9)
    report.add("submultiplicative", sub_ok, None, None)
    report.add("inverse_pair_bound", inv_ok, None, None,
               "forward times backward norm at least 1")
    fwd = spectral_radius(w, space.p, "forward")
    bwd = spectral_radius(w, space.p, "backward")
    report.tables["translation_norms"] = {
        "columns": ["n", "forward_norm", "backward_norm"], "rows": rows}
    report.metadata.update({
        "rho_forward": fwd.value, "rho_backward": bwd.value,
        "strip": [-math.log(bwd.value), math.log(fwd.value)],
    })

    if params.get("matrix_weight") == "mixed_exponential_5x5":
        W = mixed_exponential_weight_5x5()
        res = matrix_weight_symbol(
            VectorShiftOperator(space=VectorSpace(space.p, w, 5), amount=1.0),
            W, p=space.p, grid=Grid.from_span(0.0, 48.0, 0.02), x_max=48.0)
        report.add("matrix_weight_admissibility", res.admissibility_passed,
                   None, None, W.label)
        V0 = res.symbols[len(res.symbols) // 2]
        xi = V0.freq_grid.points
        expected = np.exp(V0.level - 1j * xi)
        err = 0.0
        for j in range(5):
            for k in range(5):
                tgt = expected if j == k else np.zeros_like(expected)
                err = max(err, float(np.max(np.abs(V0.values[:, j, k] - tgt))))
        report.add("matrix_weight_shift_symbol", err <= tol["symbol_identity"],
                   err, tol["symbol_identity"],
                   f"level {V0.level:.6f} on the computed strip")
        report.metadata["matrix_weight_strip"] = [res.strip.a_min, res.strip.a_max]


_DRIVERS = {
    "symbol": _run_symbol,
    "annulus": _run_annulus,
    "cutoff": _run_cutoff,
    "inclusion": _run_inclusion,
    "vector-symbol": _run_vector_symbol,
    "weights-report": _run_weights_report,
}
