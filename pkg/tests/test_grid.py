import numpy as np
import pytest
from hypothesis import given, strategies as st

from fraclab.corpus import expression
from fraclab.errors import ConfigurationError
from fraclab.grid import (Cube, SampledFunction, cube_family, integrate_region, lattice_family,
                          make_uniform_grid, sample, sample_expression)


def test_nodes_are_cell_midpoints():
    g = make_uniform_grid(1, -2, 4, 8)
    assert g.h == 0.5
    np.testing.assert_allclose(g.axis(), -2 + 4 * (np.arange(8) + 0.5) / 8, rtol=0, atol=0)
    assert make_uniform_grid(1, 0, 1, 8).axis()[0] == 0.0625


def test_two_dimensional_grid():
    g = make_uniform_grid(2, (0, 0), 1, 16)
    assert g.size == 256 and g.h == 1 / 16
    assert g.points().shape == (256, 2)


@pytest.mark.parametrize("N", [12, 4, 0])
def test_grid_rejects_bad_counts(N):
    with pytest.raises(ConfigurationError):
        make_uniform_grid(1, 0, 1, N)


def test_grid_rejects_nonpositive_length():
    with pytest.raises(ConfigurationError):
        make_uniform_grid(1, 0, 0.0, 8)


def test_shift_and_refine():
    g = make_uniform_grid(1, -2, 4, 16)
    s = g.shifted()
    np.testing.assert_allclose(s.axis() - g.axis(), g.h / 2)
    assert g.refined().N == 32 and g.refined().h == g.h / 2


def test_sample_catalog_entries():
    g = make_uniform_grid(1, -2, 4, 8)
    assert np.all(sample_expression("constant", {"c": 1.0}, g).values == 1.0)
    ind = sample_expression("indicator", {"a": 0, "b": 1}, g).values
    x = g.axis()
    np.testing.assert_array_equal(ind, ((x > 0) & (x < 1)).astype(float))
    sg = sample_expression("sign", None, make_uniform_grid(1, -1, 2, 8))
    np.testing.assert_array_equal(sg.values, np.repeat([-1.0, 1.0], 4))


def test_unknown_or_invalid_expression():
    with pytest.raises(ConfigurationError):
        expression("nope")
    with pytest.raises(ConfigurationError):
        expression("indicator", {"a": 1, "b": 0})
    with pytest.raises(ConfigurationError):
        expression("gaussian", {"width": 1.0})


def test_non_finite_values_rejected():
    g = make_uniform_grid(1, -1, 2, 8)
    with pytest.raises(ConfigurationError):
        SampledFunction(g, np.full(8, np.nan))


def test_cube_family_levels():
    g = make_uniform_grid(1, 0, 1, 8)
    F = cube_family(g, 1)
    assert [lv.side for lv in F.levels] == [8, 4]
    assert [lv.stride for lv in F.levels] == [4, 2]
    centers = sorted(c.center[0] for c in F.cubes() if c.side == 0.5)
    np.testing.assert_allclose(centers, [0.25, 0.5, 0.75])
    with pytest.raises(ConfigurationError):
        cube_family(g, 3)
    cube_family(make_uniform_grid(1, -2, 4, 64), 4)


def test_every_node_covered_at_every_level():
    g = make_uniform_grid(2, (0, 0), 1, 16)
    F = cube_family(g, 3)
    for lv in F.levels:
        covered = np.zeros(g.shape, dtype=int)
        w = F.windows(covered, lv)
        assert w.shape[-1] == lv.side
        k = F.corners_per_axis(lv)
        for i in range(k):
            for j in range(k):
                covered[i * lv.stride:i * lv.stride + lv.side,
                        j * lv.stride:j * lv.stride + lv.side] += 1
        assert covered.min() >= 1


def test_lattice_family_contains_dyadic_sides():
    g = make_uniform_grid(1, 0, 1, 16)
    sides = {lv.side for lv in lattice_family(g).levels}
    assert {lv.side for lv in cube_family(g, 3).levels} <= sides


def test_integrals():
    g = make_uniform_grid(1, -2, 4, 64)
    one = sample_expression("constant", None, g)
    assert integrate_region(one, Cube((0.5,), 1.0)) == pytest.approx(1.0, abs=1e-14)
    x = SampledFunction(g, g.axis())
    assert abs(integrate_region(x, Cube((0.0,), 2.0))) < 1e-14
    g01 = make_uniform_grid(1, 0, 1, 64)
    x2 = SampledFunction(g01, g01.axis() ** 2)
    assert abs(integrate_region(x2, Cube((0.5,), 1.0)) - 1 / 3) < 1e-4


def test_partial_cells_weighted_by_overlap():
    g = make_uniform_grid(1, 0, 1, 8)
    one = sample_expression("constant", None, g)
    assert integrate_region(one, Cube((0.3,), 0.3)) == pytest.approx(0.3, abs=1e-14)
    assert integrate_region(one, Cube((5.0,), 1.0)) == 0.0


def test_second_order_convergence():
    errs = []
    for N in (32, 64):
        g = make_uniform_grid(1, 0, 1, N)
        errs.append(abs(integrate_region(SampledFunction(g, g.axis() ** 2)) - 1 / 3))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=1e-6)


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 7), st.integers(1, 8))
def test_midpoint_exact_for_affine_on_aligned_cubes(a, b, start, width):
    g = make_uniform_grid(1, 0, 1, 16)
    f = SampledFunction(g, a * g.axis() + b)
    lo, hi = start / 16, min(start + width, 16) / 16
    exact = a * (hi**2 - lo**2) / 2 + b * (hi - lo)
    Q = Cube(((lo + hi) / 2,), hi - lo)
    assert integrate_region(f, Q) == pytest.approx(exact, abs=1e-12)


@given(st.integers(1, 6), st.integers(7, 15))
def test_integral_additive_and_monotone(cut, end):
    g = make_uniform_grid(1, 0, 1, 16)
    f = sample(expression("gaussian", {"mu": 0.4, "sigma": 0.3}), g)
    left = Cube((cut / 32,), cut / 16)
    right = Cube(((cut + end) / 32, ), (end - cut) / 16)
    whole = Cube((end / 32,), end / 16)
    assert integrate_region(f, left) + integrate_region(f, right) == pytest.approx(
        integrate_region(f, whole), rel=1e-12)
    bigger = f.with_values(np.abs(f.values) + 0.1)
    assert integrate_region(bigger, whole) >= integrate_region(f, whole)
