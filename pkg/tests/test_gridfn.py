import math

import numpy as np
import pytest

from whlab.errors import AlignmentError, InvalidInputError, TwistOverflowError
from whlab.gridfn import (Grid, SampledFunction, embed, forward_transform,
                          inverse_transform, restrict, strip_eval, twist)
from whlab.profiles import bump, gaussian, sample


def test_grid_validation():
    with pytest.raises(InvalidInputError):
        Grid(0.0, -0.1, 10)
    with pytest.raises(InvalidInputError):
        Grid(0.0, 0.1, 1)
    g = Grid(0.0, 0.5, 9)
    assert g.span == pytest.approx(4.0)
    fg = g.freq_grid()
    assert fg.step == pytest.approx(2 * np.pi / (9 * 0.5))
    assert fg.points[0] == pytest.approx(-fg.step * 4)


def test_from_span_rounds_up_to_fast_length():
    g = Grid.from_span(0.0, 80.0, 0.01)
    assert g.count >= 8001
    assert g.span >= 80.0


def test_forward_gaussian_closed_form(line_grid):
    # oracle: transform of exp(-x^2/2) is sqrt(2 pi) exp(-xi^2/2)
    f = sample(line_grid, gaussian, 0.0, 1.0)
    F = forward_transform(f)
    mask = np.abs(F.xi) <= 4.0
    exact = np.sqrt(2 * np.pi) * np.exp(-F.xi[mask] ** 2 / 2)
    assert np.max(np.abs(F.values[mask] - exact)) <= 1e-8


def test_forward_zero_is_zero(line_grid):
    f = SampledFunction(line_grid, np.zeros(line_grid.count, dtype=complex))
    assert np.all(forward_transform(f).values == 0)


def test_shift_modulation_identity(half_grid):
    f0 = sample(half_grid, bump, 5.0, 1.5)
    f1 = sample(half_grid, bump, 6.0, 1.5)  # translated by 1
    F0 = forward_transform(f0)
    F1 = forward_transform(f1)
    pred = np.exp(-1j * F0.xi) * F0.values
    assert np.max(np.abs(F1.values - pred)) <= 1e-10


def test_roundtrip(line_grid):
    f = sample(line_grid, gaussian, 0.0, 1.0)
    back = inverse_transform(forward_transform(f), line_grid)
    assert np.max(np.abs(back.values - f.values)) <= 1e-9


def test_inverse_zero(line_grid):
    F = forward_transform(SampledFunction(line_grid, np.zeros(line_grid.count, complex)))
    assert np.all(inverse_transform(F, line_grid).values == 0)


def test_real_even_inverse_is_real(line_grid):
    f = sample(line_grid, gaussian, 0.0, 2.0)  # real, even
    back = inverse_transform(forward_transform(f), line_grid)
    assert np.max(np.abs(back.values.imag)) <= 1e-10


def test_parseval(line_grid):
    f = sample(line_grid, gaussian, 1.0, 0.7)
    F = forward_transform(f)
    lhs = line_grid.step * np.sum(np.abs(f.values) ** 2)
    rhs = F.freq_grid.step / (2 * np.pi) * np.sum(np.abs(F.values) ** 2)
    assert abs(lhs - rhs) <= 1e-8 * lhs


def test_transform_linearity(half_grid):
    rng = np.random.default_rng(0)
    f = sample(half_grid, bump, 4.0, 1.0)
    g = sample(half_grid, bump, 7.0, 2.0)
    for _ in range(3):
        a, b = rng.normal() + 1j * rng.normal(), rng.normal()
        lhs = forward_transform(SampledFunction(half_grid, a * f.values + b * g.values))
        rhs = a * forward_transform(f).values + b * forward_transform(g).values
        assert np.max(np.abs(lhs.values - rhs)) <= 1e-12 * max(1, np.max(np.abs(rhs)))


def test_twist_identity_and_pointwise(half_grid):
    f = sample(half_grid, bump, 2.0, 0.5)
    assert twist(f, 0.0) is f
    t = twist(f, 1.0)
    j = half_grid.index_of(2.0)
    assert t.values[j] == pytest.approx(f.values[j] * 7.389056098930650, rel=1e-12)


def test_twist_group_action(half_grid):
    f = sample(half_grid, bump, 3.0, 1.0)
    lhs = twist(twist(f, 0.7), -0.2)
    rhs = twist(f, 0.5)
    scale = np.max(np.abs(rhs.values))
    assert np.max(np.abs(lhs.values - rhs.values)) <= 1e-12 * scale


def test_twist_inverse(half_grid):
    f = sample(half_grid, bump, 3.0, 1.0)
    back = twist(twist(f, 0.8), -0.8)
    assert np.max(np.abs(back.values - f.values)) <= 1e-12


def test_twist_overflow_names_sample(half_grid):
    f = SampledFunction(half_grid, np.ones(half_grid.count, dtype=complex))
    with pytest.raises(TwistOverflowError) as exc:
        twist(f, 30.0)
    assert exc.value.position is not None


def test_twisted_transform_vs_complex_quadrature(line_grid):
    # oracle: independent trapezoid quadrature of the complex-frequency integrand
    f = sample(line_grid, gaussian, 0.0, 1.0)
    x = line_grid.points
    for a in (-1.0, 0.3, 1.0):
        F = forward_transform(twist(f, a))
        sel = np.abs(F.xi) <= 3.0
        for xi in F.xi[sel][::400]:
            oracle = np.trapezoid(f.values * np.exp(-1j * (xi + 1j * a) * x), dx=line_grid.step)
            got = F.values[np.argmin(np.abs(F.xi - xi))]
            assert abs(got - oracle) <= 1e-7 * max(1.0, abs(oracle))


def test_strip_eval_matches_forward_on_real_axis(line_grid):
    f = sample(line_grid, gaussian, 0.0, 1.0)
    F = forward_transform(f)
    for k in (100, 2000, 3000):
        xi = F.xi[k]
        assert abs(strip_eval(f, complex(xi)) - F.values[k]) <= 1e-9


def test_strip_eval_point_mass():
    # narrow unit-mass bump at 1 behaves like the point evaluation exp(-i z)
    g = Grid.from_span(0.9, 0.2, 1e-4)
    vals = bump(g.points, 1.0, 0.01)
    vals /= g.step * vals.sum()
    f = SampledFunction(g, vals.astype(complex))
    for z in (0.5 + 0.2j, 2.0, -1.0 + 0.5j):
        oracle = np.exp(-1j * z)
        assert abs(strip_eval(f, z) - oracle) <= 1e-3 * abs(oracle)


def test_strip_eval_gaussian_closed_form(line_grid):
    f = sample(line_grid, gaussian, 0.0, 1.0)
    z = 0.3 + 0.5j
    oracle = np.sqrt(2 * np.pi) * np.exp(-z ** 2 / 2)
    assert abs(strip_eval(f, z) - oracle) <= 1e-7


def test_strip_identity_backbone(line_grid):
    # the workhorse identity: strip evaluation equals transform after twist
    f = sample(line_grid, gaussian, 0.0, 1.0)
    for a in (-1.0, -0.25, 0.5, 1.0):
        F = forward_transform(twist(f, a))
        zs = F.xi[::500] + 1j * a
        direct = strip_eval(f, zs)
        assert np.max(np.abs(direct - F.values[::500])) <= 1e-7


def test_embed_restrict_roundtrip(half_grid):
    f = sample(half_grid, bump, 5.0, 1.0)
    big = Grid(half_grid.origin - 2.0, half_grid.step,
               half_grid.count + 200)
    e = embed(f, big)
    r = restrict(e, half_grid)
    assert np.array_equal(r.values, f.values)


def test_nonfinite_rejected(half_grid):
    vals = np.zeros(half_grid.count, dtype=complex)
    vals[3] = np.nan
    with pytest.raises(InvalidInputError):
        SampledFunction(half_grid, vals)


def test_incommensurate_embed_rejected(half_grid):
    f = sample(half_grid, bump, 5.0, 1.0)
    with pytest.raises(AlignmentError):
        embed(f, Grid(0.005, half_grid.step, half_grid.count))
