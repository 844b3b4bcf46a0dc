import math

import numpy as np
import pytest

from whlab.errors import InvalidInputError, WeightError
from whlab.gridfn import Grid, SampledFunction
from whlab.profiles import bump, plateau
from whlab.spaces import (SpaceSpec, check_admissibility, constant_weight,
                          custom_weight, dyadic_zigzag_weight,
                          exponential_weight, lp_norm, luxemburg_norm,
                          orlicz_exp_minus_one, orlicz_power, power_weight,
                          translation_norm, zigzag_profile)


def random_function(grid, rng, n_bumps=3):
    vals = np.zeros(grid.count, dtype=complex)
    for _ in range(n_bumps):
        c = rng.uniform(0.15, 0.8) * grid.span
        r = rng.uniform(0.03, 0.12) * grid.span
        vals += rng.normal() * bump(grid.points, c, r) * np.exp(1j * rng.normal(0, 2) * grid.points)
    return SampledFunction(grid, vals)


# -- zigzag profile -----------------------------------------------------------

def test_zigzag_profile_block_values():
    x = np.array([0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0])
    s = zigzag_profile(x)
    assert np.allclose(s, [0, 1, 0, 2, -2, 6, -10, 22, -42, 86])


def test_zigzag_is_one_lipschitz():
    x = np.linspace(0, 300, 30001)
    s = zigzag_profile(x)
    assert np.max(np.abs(np.diff(s))) <= np.diff(x)[0] * (1 + 1e-9)


# -- admissibility ------------------------------------------------------------

def test_constant_weight_ratios(half_grid):
    rep = check_admissibility(constant_weight(), [0.25, 1.0, 3.0], half_grid)
    assert rep.passed
    assert rep.up_ratios == [1.0, 1.0, 1.0]
    assert rep.down_ratios == [1.0, 1.0, 1.0]


def test_exponential_weight_ratios(half_grid):
    rep = check_admissibility(exponential_weight(1.0), [0.5, 2.0], half_grid)
    assert rep.passed
    assert rep.up_ratios == pytest.approx([math.e ** 0.5, math.e ** 2], rel=1e-12)
    assert rep.down_ratios == pytest.approx([math.e ** -0.5, math.e ** -2], rel=1e-12)


def test_square_exponential_fails():
    grid = Grid.from_span(0.0, 20.0, 0.01)
    w = custom_weight(log_evaluator=lambda x: x ** 2)
    rep = check_admissibility(w, [1.0], grid)
    assert not rep.passed
    assert any("up-ratio" in n for n in rep.notes)


def test_nonpositive_weight_rejected(half_grid):
    w = custom_weight(evaluator=lambda x: np.where(x < 1, 1.0, -1.0))
    with pytest.raises(WeightError):
        check_admissibility(w, [1.0], half_grid)


# -- weighted p-norms -----------------------------------------------------------

def test_lp_norm_indicator_bump():
    grid = Grid.from_span(0.0, 1.6, 5e-5)
    vals = plateau(grid.points, 0.0, 1.0, 0.001)
    f = SampledFunction(grid, vals.astype(complex))
    # quadrature oracle on the explicit profile (endpoints vanish, so the
    # trapezoid rule and the norm's Riemann sum agree exactly)
    oracle = math.sqrt(np.trapezoid(vals ** 2, dx=grid.step))
    got = lp_norm(f, 2.0)
    assert got == pytest.approx(oracle, rel=1e-10)
    assert abs(got - 1.0) <= 1e-3


def test_lp_norm_zero(half_grid):
    f = SampledFunction(half_grid, np.zeros(half_grid.count, complex))
    assert lp_norm(f, 2.0) == 0.0


def test_lp_norm_homogeneity(half_grid):
    rng = np.random.default_rng(1)
    f = random_function(half_grid, rng)
    n1 = lp_norm(f, 2.0, exponential_weight(0.5))
    n2 = lp_norm(2.0 * f, 2.0, exponential_weight(0.5))
    assert n2 == pytest.approx(2.0 * n1, rel=1e-12)


def test_lp_norm_overflow_safe():
    grid = Grid.from_span(0.0, 500.0, 0.05)
    f = SampledFunction(grid, bump(grid.points, 450.0, 20.0).astype(complex))
    val = lp_norm(f, 2.0, exponential_weight(1.0))  # weight ~ exp(450)
    assert np.isfinite(math.log(val))
    assert math.log(val) == pytest.approx(450.0, abs=25.0)


def test_norm_axioms_random_instances(half_grid):
    rng = np.random.default_rng(7)
    spaces = [SpaceSpec("lp", 1.5, dyadic_zigzag_weight(0.5)),
              SpaceSpec("lp", 2.0, power_weight(1.0)),
              SpaceSpec("orlicz", 2.0, exponential_weight(0.2), orlicz_exp_minus_one())]
    for sp in spaces:
        f = random_function(half_grid, rng)
        g = random_function(half_grid, rng)
        nf, ng = sp.norm(f), sp.norm(g)
        assert nf > 0
        assert sp.norm(f + g) <= nf + ng + 1e-9 * (nf + ng)
        c = complex(rng.normal(), rng.normal())
        assert sp.norm(c * f) == pytest.approx(abs(c) * nf, rel=1e-8)


# -- Luxemburg norms -------------------------------------------------------------

def test_luxemburg_matches_lp_for_power():
    # analytic identity: unit Orlicz integral of (|f|/t)^p forces t = p-norm
    grid = Grid.from_span(0.0, 10.0, 0.005)
    rng = np.random.default_rng(3)
    for p in (1.0, 1.5, 2.0, 3.0):
        f = random_function(grid, rng)
        assert luxemburg_norm(f, orlicz_power(p)) == pytest.approx(
            lp_norm(f, p), rel=1e-8)


def test_luxemburg_zero(half_grid):
    f = SampledFunction(half_grid, np.zeros(half_grid.count, complex))
    assert luxemburg_norm(f, orlicz_power(2.0)) == 0.0


def test_luxemburg_homogeneity(half_grid):
    rng = np.random.default_rng(4)
    f = random_function(half_grid, rng)
    A = orlicz_exp_minus_one()
    base = luxemburg_norm(f, A)
    for _ in range(3):
        c = rng.uniform(0.2, 5.0)
        assert luxemburg_norm(c * f, A) == pytest.approx(c * base, rel=1e-8)


def test_weighted_luxemburg_matches_reweighted_lp(half_grid):
    rng = np.random.default_rng(5)
    f = random_function(half_grid, rng)
    p = 2.0
    w = exponential_weight(0.4)
    # measure w dx with A = y^p equals the p-norm with weight w^(1/p)
    wroot = custom_weight(log_evaluator=lambda x: 0.4 * x / p)
    assert luxemburg_norm(f, orlicz_power(p), w) == pytest.approx(
        lp_norm(f, p, wroot), rel=1e-8)


def test_orlicz_shape_checks():
    assert orlicz_power(2.0).check_shape()
    assert orlicz_exp_minus_one().check_shape()


# -- translation norms -----------------------------------------------------------

def test_translation_norm_constant():
    w = constant_weight()
    for n in (0.5, 1.0, 7.0, -3.0):
        assert translation_norm(w, 2.0, n) == 1.0


def test_translation_norm_exponential():
    w = exponential_weight(0.7)
    for n in (1.0, 4.0):
        assert translation_norm(w, 2.0, n) == pytest.approx(math.exp(0.7 * n), rel=1e-12)
        assert translation_norm(w, 2.0, -n) == pytest.approx(math.exp(-0.7 * n), rel=1e-12)


def test_translation_norm_zigzag_brute_force_oracle():
    # oracle: dense scan of the ratio on a fine grid; slope +-1 blocks of
    # dyadically growing length realise both sups exactly
    w = dyadic_zigzag_weight(1.0)
    xs = np.linspace(0.0, 300.0, 300001)
    s = zigzag_profile(xs)
    for n in (1, 2, 4, 8, 64):
        sn = zigzag_profile(xs + n)
        brute_up = np.max(sn - s)
        brute_dn = np.max(s - sn)
        assert brute_up == pytest.approx(float(n), abs=1e-9)
        assert brute_dn == pytest.approx(float(n), abs=1e-9)
        assert translation_norm(w, 2.0, n) == pytest.approx(math.exp(n), rel=1e-12)
        assert translation_norm(w, 2.0, -n) == pytest.approx(math.exp(n), rel=1e-12)


def test_translation_norm_power_weight():
    w = power_weight(2.0)
    assert translation_norm(w, 2.0, 3.0) == pytest.approx(16.0, rel=1e-12)
    assert translation_norm(w, 2.0, -3.0) == 1.0


def test_gelfand_submultiplicativity():
    for w in (dyadic_zigzag_weight(1.0), power_weight(1.5),
              exponential_weight(0.5)):
        for m, n in ((0.5, 1.5), (1.0, 2.0), (4.0, 8.0)):
            lhs = translation_norm(w, 2.0, m + n)
            rhs = translation_norm(w, 2.0, m) * translation_norm(w, 2.0, n)
            assert lhs <= rhs * (1 + 1e-9)


def test_inverse_pair_lower_bound():
    for w in (dyadic_zigzag_weight(1.0), power_weight(2.0),
              exponential_weight(1.0), constant_weight()):
        for n in (0.25, 1.0, 5.0):
            prod = translation_norm(w, 2.0, n) * translation_norm(w, 2.0, -n)
            assert prod >= 1.0 - 1e-9


def test_p_below_one_rejected(half_grid):
    f = SampledFunction(half_grid, np.ones(half_grid.count, complex))
    with pytest.raises(InvalidInputError):
        lp_norm(f, 0.5)
