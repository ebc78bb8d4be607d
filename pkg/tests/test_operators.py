import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fraclab.corpus import expression
from fraclab.errors import ConfigurationError, CostLimitError, SingularEvaluationError
from fraclab.grid import SampledFunction, make_uniform_grid, sample
from fraclab.kernels import KernelSpec, riesz_gamma
from fraclab.operators import (OperatorParams, apply_commutator, apply_fractional_integral,
                               apply_riesz_potential, commutator_terms)

STD = KernelSpec(2, 1, 0.5)
GRID = make_uniform_grid(1, -2, 4, 128)
OUT = GRID.shifted()
CHI = expression("indicator", {"a": 0, "b": 1})


def _value_at(F, x):
    i = int(np.argmin(np.abs(F.grid.axis() - x)))
    assert abs(F.grid.axis()[i] - x) < 1e-12
    return F.values[i]


def test_zero_inputs_give_zero():
    z = SampledFunction(GRID, np.zeros(128))
    f = sample(CHI, GRID)
    assert np.all(apply_fractional_integral(STD, [z, f], OUT).values == 0)
    assert np.all(apply_riesz_potential(0.5, z, OUT).values == 0)


def test_bilinear_indicator_against_closed_form():
    # int_0^1 int_0^1 (4 - y1 - y2)^(-3/2) dy = 4 (2 sqrt3 - sqrt2 - 2)
    exact = 4 * (2 * math.sqrt(3) - math.sqrt(2) - 2)
    f = sample(CHI, GRID)
    assert _value_at(apply_fractional_integral(STD, [f, f], OUT), 2.0) == pytest.approx(exact, rel=0.02)
    fine = make_uniform_grid(1, -2, 4, 512)
    ff = sample(CHI, fine)
    brute = _value_at(apply_fractional_integral(STD, [ff, ff], fine.shifted()), 2.0)
    assert _value_at(apply_fractional_integral(STD, [f, f], OUT), 2.0) == pytest.approx(brute, rel=0.02)


def test_even_inputs_give_even_output():
    g = make_uniform_grid(1, -2, 4, 64)
    f1 = sample(expression("gaussian", {"sigma": 0.5}), g)
    f2 = sample(expression("indicator", {"a": -0.5, "b": 0.5}), g)
    out = apply_fractional_integral(STD, [f1, f2], g.shifted()).values
    # the shifted grid has nodes k h for k = -31..32; mirror pairs are (k, -k)
    x = g.shifted().axis()
    for i in range(len(x)):
        j = int(np.argmin(np.abs(x + x[i])))
        if abs(x[j] + x[i]) < 1e-12:
            assert out[i] == pytest.approx(out[j], rel=1e-12, abs=1e-15)


def test_riesz_anchor():
    g = make_uniform_grid(1, -2, 4, 512)
    val = _value_at(apply_riesz_potential(0.5, sample(CHI, g), g.shifted()), -1.0)
    assert val == pytest.approx(2 * (math.sqrt(2) - 1) / riesz_gamma(0.5, 1), rel=0.01)


def test_riesz_alpha_range():
    with pytest.raises(ConfigurationError):
        apply_riesz_potential(1.0, sample(CHI, GRID), OUT)


def test_riesz_commutator_with_affine_symbol():
    # b(x) = |x + 3| = x + 3 on the box; [b, I] f(-1) = -int_0^1 (1+y)^(1/2) dy / gamma
    g = make_uniform_grid(1, -2, 4, 256)
    spec = KernelSpec(1, 1, 0.5, p0=4.0, kind="riesz")
    b = sample(expression("power_weight", {"a": 1.0, "c": -3.0}), g)
    val = _value_at(apply_commutator(spec, [b], [sample(CHI, g)], g.shifted()), -1.0)
    exact = -(2**1.5 - 1) / 1.5 / riesz_gamma(0.5, 1)
    assert val == pytest.approx(exact, rel=0.02)


def test_constant_symbols_telescope():
    fs = [sample(CHI, GRID), sample(expression("gaussian", {"sigma": 0.4}), GRID)]
    bs = [sample(expression("constant", {"c": 2.5}), GRID),
          sample(expression("constant", {"c": -1.0}), GRID)]
    T = apply_fractional_integral(STD, fs, OUT)
    Tb = apply_commutator(STD, bs, fs, OUT)
    assert np.max(np.abs(Tb.values)) <= 1e-10 * np.max(np.abs(T.values))


def test_constant_symbol_zeroes_its_slot_only():
    fs = [sample(CHI, GRID), sample(expression("gaussian", {"sigma": 0.4}), GRID)]
    bs = [sample(expression("constant", {"c": 3.0}), GRID),
          sample(expression("sign", {"c": 0.25}), GRID)]
    terms = commutator_terms(STD, bs, fs, OUT)
    scale = np.max(np.abs(apply_fractional_integral(STD, fs, OUT).values))
    assert np.max(np.abs(terms[0].values)) <= 1e-12 * scale
    assert np.max(np.abs(terms[1].values)) > 1e-3 * scale


def test_symbol_without_closed_form_rejected():
    fs = [sample(CHI, GRID)] * 2
    raw = SampledFunction(GRID, np.ones(128))
    with pytest.raises(ConfigurationError):
        apply_commutator(STD, [raw, raw], fs, OUT)


def test_unshifted_output_hits_diagonal():
    f = sample(CHI, GRID)
    with pytest.raises(SingularEvaluationError):
        apply_fractional_integral(STD, [f, f], GRID)


def test_arity_grid_and_cost_refusals():
    f = sample(CHI, GRID)
    with pytest.raises(ConfigurationError):
        apply_fractional_integral(STD, [f], OUT)
    other = sample(CHI, make_uniform_grid(1, -2, 4, 64))
    with pytest.raises(ConfigurationError):
        apply_fractional_integral(STD, [f, other], OUT)
    with pytest.raises(CostLimitError):
        apply_fractional_integral(STD, [f, f], OUT, max_cost=1000)


def test_operator_params_preconditions():
    OperatorParams(STD, 0.4, 0.6, 3.0)
    for kw in (dict(delta=1.0), dict(delta=0.4, epsilon=0.3), dict(delta=0.4, t=2.0),
               dict(delta=0.4, t=4.0)):
        with pytest.raises(ConfigurationError):
            OperatorParams(STD, **kw)


coef = st.floats(-3, 3, allow_nan=False)


@given(coef, st.integers(0, 3))
def test_multilinearity(a, which):
    g = make_uniform_grid(1, -2, 4, 32)
    base = [sample(CHI, g), sample(expression("gaussian", {"sigma": 0.5}), g)]
    extra = sample(expression("bump", {"c": 0.3, "r": 0.6}), g)
    slot = which % 2
    mixed = list(base)
    mixed[slot] = base[slot].with_values(a * base[slot].values + extra.values)
    other = list(base)
    other[slot] = extra
    lhs = apply_fractional_integral(STD, mixed, g.shifted()).values
    rhs = a * apply_fractional_integral(STD, base, g.shifted()).values + \
        apply_fractional_integral(STD, other, g.shifted()).values
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.max(np.abs(rhs)))


@given(st.floats(0.01, 100))
def test_riesz_homogeneity_and_positivity(c):
    g = make_uniform_grid(1, -2, 4, 32)
    f = sample(expression("gaussian", {"sigma": 0.5}), g)
    base = apply_riesz_potential(0.5, f, g.shifted()).values
    scaled = apply_riesz_potential(0.5, f.scaled(c), g.shifted()).values
    np.testing.assert_allclose(scaled, c * base, rtol=1e-12)
    assert np.all(base >= 0)


def test_thread_count_does_not_change_results(monkeypatch):
    # full-support inputs at N = 256 split the output nodes into several chunks
    g = make_uniform_grid(1, -2, 4, 256)
    fs = [sample(expression("gaussian", {"sigma": 0.6}), g)] * 2
    monkeypatch.setenv("FRACLAB_THREADS", "1")
    one = apply_fractional_integral(STD, fs, g.shifted()).values
    monkeypatch.setenv("FRACLAB_THREADS", "3")
    three = apply_fractional_integral(STD, fs, g.shifted()).values
    assert np.array_equal(one, three)
    monkeypatch.setenv("FRACLAB_THREADS", "zero")
    with pytest.raises(ConfigurationError):
        apply_fractional_integral(STD, fs, OUT)
