"""Lattice fields, difference operators, and DTFT identities."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sdwavelab.lattice import (
    FrequencyPoint,
    LatticeField,
    ThetaGrid,
    delta,
    difference,
    discrete_laplacian,
    dtft,
    dtft_on_grid,
    l2_norm_squared,
    parseval_quadrature,
    xi_norm_of_theta,
    xi_of_theta,
)


def random_field(rng, dim, span=8, count=12):
    keys = rng.integers(-span, span + 1, size=(count, dim))
    vals = rng.uniform(-1, 1, count) + 1j * rng.uniform(-1, 1, count)
    return LatticeField.from_pairs(dim, zip(map(tuple, keys), vals))


def test_from_dict_sorting_and_zero_drop():
    f = LatticeField.from_dict(1, {(3,): 1.0, (-2,): 2.0, (0,): 0.0})
    assert f.dim == 1
    assert [tuple(k) for k in f.keys] == [(-2,), (3,)]
    assert f.get((0,)) == 0.0
    assert f.get((3,)) == 1.0


def test_from_pairs_aggregates_duplicates():
    f = LatticeField.from_pairs(2, [((1, 0), 1.0), ((1, 0), 2.5), ((0, 1), -1.0)])
    assert f.get((1, 0)) == 3.5
    assert len(f) == 2


def test_mixed_index_dimensions_rejected():
    with pytest.raises(ValueError):
        LatticeField.from_dict(1, {(0,): 1.0, (0, 1): 2.0})
    f = delta(2)
    with pytest.raises(ValueError):
        f.get((0,))


def test_l2_norm_squared_frozen():
    f = LatticeField.from_dict(1, {(0,): 1.0, (4,): 1j, (-1,): -2.0})
    assert l2_norm_squared(f) == pytest.approx(6.0, rel=1e-15)


def test_forward_difference_of_delta():
    d = difference(delta(1), axis=1, direction="forward")
    assert d.get((-1,)) == 1.0
    assert d.get((0,)) == -1.0
    assert len(d) == 2


def test_backward_difference_of_delta():
    d = difference(delta(1), axis=1, direction="backward")
    assert d.get((0,)) == 1.0
    assert d.get((1,)) == -1.0


def test_difference_validates_axis_and_direction():
    f = delta(2)
    with pytest.raises(ValueError):
        difference(f, axis=3, direction="forward")
    with pytest.raises(ValueError):
        difference(f, axis=0, direction="forward")
    with pytest.raises(ValueError):
        difference(f, axis=1, direction="sideways")


def test_laplacian_of_delta_is_second_difference_stencil():
    lap = discrete_laplacian(delta(1))
    assert lap.get((0,)) == -2.0
    assert lap.get((1,)) == 1.0
    assert lap.get((-1,)) == 1.0


def test_laplacian_matches_composed_differences(rng):
    f = random_field(rng, 2)
    lap = discrete_laplacian(f)
    parts = {}
    for axis in (1, 2):
        g = difference(difference(f, axis, "forward"), axis, "backward")
        for k, v in g.items():
            parts[k] = parts.get(k, 0.0) + v
    composed = LatticeField.from_dict(2, parts)
    for k, v in lap.items():
        assert v == pytest.approx(composed.get(k), abs=1e-15)
    assert len(lap) == len(composed)


angles = st.floats(min_value=-math.pi, max_value=math.pi)


@given(st.integers(0, 2**32 - 1), angles)
def test_forward_difference_symbol_1d(seed, theta):
    f = random_field(np.random.default_rng(seed), 1)
    lhs = dtft(difference(f, 1, "forward"), (theta,))
    rhs = (np.exp(1j * theta) - 1.0) * dtft(f, (theta,))
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@given(st.integers(0, 2**32 - 1), angles, angles)
def test_laplacian_symbol_2d(seed, t1, t2):
    f = random_field(np.random.default_rng(seed), 2)
    theta = (t1, t2)
    lhs = dtft(discrete_laplacian(f), theta)
    rhs = -xi_norm_of_theta(theta) ** 2 * dtft(f, theta)
    np.testing.assert_allclose(lhs, rhs, atol=1e-11)


def test_dtft_is_2pi_periodic(rng):
    # angle reduction keeps the error at the rounding of theta itself
    f = random_field(rng, 1)
    np.testing.assert_allclose(
        dtft(f, (0.7 + 2 * math.pi,)), dtft(f, (0.7,)), rtol=0, atol=1e-13
    )
    np.testing.assert_allclose(
        dtft(f, (0.7 - 6 * math.pi,)), dtft(f, (0.7,)), rtol=0, atol=1e-13
    )


def test_dtft_validates_theta_shape():
    with pytest.raises(ValueError):
        dtft(delta(2), (0.5,))


def test_parseval_on_grid(rng):
    for dim in (1, 2):
        f = random_field(rng, dim)
        grid = ThetaGrid.build(dim)
        lhs = parseval_quadrature(f, grid)
        np.testing.assert_allclose(lhs, l2_norm_squared(f), rtol=1e-10)


def test_theta_grid_structure():
    g = ThetaGrid.build(1, 8)
    np.testing.assert_allclose(g.axis, -math.pi + 2 * math.pi * np.arange(8) / 8)
    assert g.size == 8
    assert g.weight == pytest.approx((2 * math.pi / 8) ** 1)
    g2 = ThetaGrid.build(2, 4)
    assert g2.points.shape == (16, 2)
    assert g2.size == 16
    assert ThetaGrid.build(3).size == 16**3


def test_theta_grid_validation():
    with pytest.raises(ValueError):
        ThetaGrid.build(1, 1)
    with pytest.raises(ValueError):
        ThetaGrid.build(4)


def test_dtft_on_grid_matches_pointwise(rng):
    f = random_field(rng, 2)
    grid = ThetaGrid.build(2, 8)
    values = dtft_on_grid(f, grid)
    for idx in (0, 17, 63):
        theta = tuple(grid.points[idx])
        np.testing.assert_allclose(values[idx], dtft(f, theta), rtol=1e-12)
    with pytest.raises(ValueError):
        dtft_on_grid(delta(1), grid)


def test_frequency_point_values():
    assert xi_norm_of_theta((0.0,)) == 0.0
    assert xi_norm_of_theta((math.pi,)) == pytest.approx(2.0, rel=1e-15)
    p = xi_of_theta((math.pi / 2, math.pi))
    np.testing.assert_allclose(p.xi, [math.sqrt(2.0), 2.0], rtol=1e-15)
    assert p.xi_norm == pytest.approx(math.sqrt(6.0), rel=1e-15)


def test_frequency_point_validation():
    with pytest.raises(ValueError):
        FrequencyPoint((4.0,))
    with pytest.raises(ValueError):
        FrequencyPoint(())
    with pytest.raises(ValueError):
        FrequencyPoint((0.1,) * 4)


@given(st.lists(angles, min_size=1, max_size=3))
def test_xi_norm_bounded_by_2_sqrt_d(theta):
    d = len(theta)
    assert xi_norm_of_theta(tuple(theta)) <= 2 * math.sqrt(d) + 1e-12
