"""Experiment configuration: JSON schema, validation, and object builders."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np
import jsonschema

from .errors import ConfigError
from .gridfn import Grid, SampledFunction
from .operators import KernelOperator, ShiftOperator, WienerHopfOperator
from .profiles import bump, gaussian, mollifier
from .spaces import (ORLICZ_FAMILIES, WEIGHT_FAMILIES, OrliczFunction, SpaceSpec,
                     Weight, capped_exponential_weight, constant_weight,
                     dyadic_zigzag_weight, exponential_weight, orlicz_exp_minus_one,
                     orlicz_power, power_weight)

EXPERIMENTS = ("symbol", "annulus", "cutoff", "inclusion", "vector-symbol",
               "weights-report")

KERNEL_FAMILIES = {
    "gaussian": "exp(-(x-center)^2 / (2 sigma^2)) * amplitude  [center, sigma, amplitude]",
    "bump": "smooth compactly supported bump  [center, radius, amplitude]",
    "mollified_delta": "unit-mass bump of given width at a position  [position, width]",
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["experiment"],
    "additionalProperties": False,
    "properties": {
        "experiment": {"enum": list(EXPERIMENTS)},
        "seed": {"type": "integer", "minimum": 0},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "span": {"type": "number", "exclusiveMinimum": 0},
                "step": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "space": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "p": {"type": "number", "minimum": 1},
                "weight": {
                    "type": "object",
                    "required": ["family"],
                    "additionalProperties": False,
                    "properties": {
                        "family": {"enum": list(WEIGHT_FAMILIES)},
                        "alpha": {"type": "number"},
                        "beta": {"type": "number"},
                        "cap": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
                "orlicz": {
                    "type": "object",
                    "required": ["family"],
                    "additionalProperties": False,
                    "properties": {
                        "family": {"enum": list(ORLICZ_FAMILIES)},
                        "p": {"type": "number", "minimum": 1},
                    },
                },
            },
        },
        "operator": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["shift", "kernel", "kernel_samples"]},
                "amount": {"type": "number"},
                "family": {"enum": list(KERNEL_FAMILIES)},
                "params": {"type": "object"},
                "grid": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "origin": {"type": "number"},
                        "span": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
                "path": {"type": "string"},
            },
        },
        "params": {"type": "object"},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "representation": {"type": "number", "exclusiveMinimum": 0},
                "strip_bound_slack": {"type": "number", "exclusiveMinimum": 0},
                "cr": {"type": "number", "exclusiveMinimum": 0},
                "cross_level": {"type": "number", "exclusiveMinimum": 0},
                "inside": {"type": "number", "exclusiveMinimum": 0},
                "separation": {"type": "number", "exclusiveMinimum": 0},
                "orlicz_integral": {"type": "number", "exclusiveMinimum": 0},
                "inclusion": {"type": "number", "exclusiveMinimum": 0},
                "scalarization": {"type": "number", "exclusiveMinimum": 0},
                "symbol_identity": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}

DEFAULT_TOLERANCES = {
    "representation": 1e-5,
    "strip_bound_slack": 1e-3,
    "cr": 1e-4,
    "cross_level": 1e-6,
    "inside": 5e-2,
    "separation": 10.0,
    "orlicz_integral": 1e-10,
    "inclusion": 5e-2,
    "scalarization": 1e-8,
    "symbol_identity": 1e-6,
}


def validate_config(cfg: dict) -> None:
    """Schema-validate; raises ConfigError with a JSON pointer on failure."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        pointer = "/" + "/".join(str(p) for p in e.absolute_path)
        raise ConfigError(f"config invalid at {pointer or '/'}: {e.message}",
                          pointer=pointer)


def load_config(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    validate_config(cfg)
    return cfg


def config_hash(cfg: dict) -> str:
    payload = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def build_weight(spec: dict | None) -> Weight:
    if not spec:
        return constant_weight()
    fam = spec["family"]
    if fam == "constant":
        return constant_weight()
    if fam == "power":
        return power_weight(spec.get("alpha", 1.0))
    if fam == "exponential":
        return exponential_weight(spec.get("beta", 1.0))
    if fam == "capped_exponential":
        return capped_exponential_weight(spec.get("beta", 1.0), spec.get("cap", 1.0))
    if fam == "dyadic_zigzag":
        return dyadic_zigzag_weight(spec.get("beta", 1.0))
    raise ConfigError(f"unknown weight family {fam!r}", pointer="/space/weight/family")


def build_orlicz(spec: dict | None) -> OrliczFunction | None:
    if not spec:
        return None
    if spec["family"] == "power":
        return orlicz_power(spec.get("p", 2.0))
    if spec["family"] == "exp_minus_one":
        return orlicz_exp_minus_one()
    raise ConfigError(f"unknown Orlicz family {spec['family']!r}",
                      pointer="/space/orlicz/family")


def build_space(spec: dict | None) -> SpaceSpec:
    spec = spec or {}
    w = build_weight(spec.get("weight"))
    orl = build_orlicz(spec.get("orlicz"))
    if orl is not None:
        return SpaceSpec("orlicz", spec.get("p", 2.0), w, orl)
    return SpaceSpec("lp", spec.get("p", 2.0), w)


def load_kernel_samples(path: str | Path, step_hint: float) -> SampledFunction:
    """Kernel from a CSV sample file with header x,re,im on a uniform grid."""
    xs, res, ims = [], [], []
    with open(path) as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["x", "re", "im"]:
            raise ConfigError(f"kernel file {path} must have header x,re,im")
        for row in reader:
            xs.append(float(row["x"]))
            res.append(float(row["re"]))
            ims.append(float(row["im"]))
    if len(xs) < 2:
        raise ConfigError("kernel file needs at least two samples")
    x = np.asarray(xs)
    h = float(x[1] - x[0])
    if np.max(np.abs(np.diff(x) - h)) > 1e-9 * h:
        raise ConfigError("kernel samples must be uniformly spaced")
    g = Grid(float(x[0]), h, len(xs))
    return SampledFunction(g, np.asarray(res) + 1j * np.asarray(ims))


def build_operator(spec: dict | None, space: SpaceSpec, step: float) -> WienerHopfOperator:
    spec = spec or {"kind": "shift", "amount": 1.0}
    kind = spec["kind"]
    if kind == "shift":
        return ShiftOperator(space=space, amount=spec.get("amount", 1.0))
    if kind == "kernel_samples":
        if "path" not in spec:
            raise ConfigError("kernel_samples needs a path", pointer="/operator/path")
        return KernelOperator(space=space, kernel=load_kernel_samples(spec["path"], step))
    fam = spec.get("family", "gaussian")
    params = spec.get("params", {})
    gspec = spec.get("grid", {})
    origin = gspec.get("origin", -8.0)
    span = gspec.get("span", 16.0)
    g = Grid.from_span(origin, span, step)
    if fam == "gaussian":
        vals = gaussian(g.points, params.get("center", 0.0), params.get("sigma", 1.0),
                        params.get("amplitude", 1.0))
    elif fam == "bump":
        vals = params.get("amplitude", 1.0) * bump(
            g.points, params.get("center", 1.0), params.get("radius", 0.8))
    elif fam == "mollified_delta":
        width = params.get("width", 0.05)
        pos = params.get("position", 0.0)
        scale = int(round(1.0 / width))
        base = mollifier(Grid.from_span(0.0, width + 4 * step, step), scale)
        # relocate so the unit-mass bump is centred at the requested position
        kshift = int(round((pos - width / 2.0 - base.grid.origin) / step))
        gg = Grid(base.grid.origin + kshift * step, step, base.grid.count)
        return KernelOperator(space=space, kernel=SampledFunction(gg, base.values))
    else:
        raise ConfigError(f"unknown kernel family {fam!r}", pointer="/operator/family")
    return KernelOperator(space=space, kernel=SampledFunction(g, vals.astype(complex)))


def builtins_text() -> str:
    lines = ["weight families:"]
    for k, v in WEIGHT_FAMILIES.items():
        lines.append(f"  {k}: {v}")
    lines.append("orlicz families:")
    for k, v in ORLICZ_FAMILIES.items():
        lines.append(f"  orlicz:{k} ({v})")
    lines.append("kernel families:")
    for k, v in KERNEL_FAMILIES.items():
        lines.append(f"  {k}: {v}")
    lines.append("operator weights:")
    lines.append("  identity_scaled: scalar weight times the identity matrix")
    lines.append("  mixed_exponential_5x5: built-in 5x5 matrix weight with growth up to exp(3x)")
    lines.append("experiments:")
    lines.append("  symbol: per-level symbols, representation residuals, strip bound, analyticity")
    lines.append("  annulus: membership certificates over a polar lambda grid")
    lines.append("  cutoff: frequency-localised cut-off construction and its three bounds")
    lines.append("  inclusion: symbol-point residual ladders for a kernel operator")
    lines.append("  vector-symbol: matrix-kernel symbol and scalarization identity")
    lines.append("  weights-report: admissibility, translation norms, growth rates")
    return "\n".join(lines)
