import numpy as np
import pytest

from oslx.corpus import (
    a1_family,
    half_space_example,
    log_abs_demo,
    power_weight,
    random_dyadic_bmo,
    spike,
    two_valued_weight,
)
from oslx.grid import GridError


def test_half_space_fields():
    ex = half_space_example(16, 1)
    assert set(np.unique(ex.func.values)) == {0.0, 2.0}
    assert set(np.unique(ex.analytic_maximal.values)) == {1.0, 2.0}
    mask = ex.func.values > 0
    assert np.all(ex.analytic_maximal.values[mask] == 2.0)
    assert np.all(ex.analytic_maximal.values[~mask] == 1.0)
    assert ex.manifest["boundary_cell"] == 8
    with pytest.raises(GridError):
        half_space_example(16, 1, boundary_cell=0)


def test_half_space_2d_axes():
    ex0 = half_space_example(8, 2, axis=0)
    ex1 = half_space_example(8, 2, axis=1)
    assert np.array_equal(ex0.func.values.T, ex1.func.values)


def test_generators_are_deterministic():
    a = random_dyadic_bmo(32, 1, 4, seed=3)
    b = random_dyadic_bmo(32, 1, 4, seed=3)
    c = random_dyadic_bmo(32, 1, 4, seed=4)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_random_dyadic_bmo_structure():
    f = random_dyadic_bmo(16, 1, 3, seed=0)
    # values are sums of three +-1 levels
    assert np.all(np.abs(f.values) <= 3.0 + 1e-12)
    with pytest.raises(GridError):
        random_dyadic_bmo(16, 1, 5)


def test_power_weight_validity():
    w = power_weight(32, 1, 2.0)
    assert np.all(w.values > 0)
    with pytest.raises(GridError):
        power_weight(32, 1, -1.0)
    w2 = power_weight(16, 2, -1.5)
    assert np.all(np.isfinite(w2.values))


def test_two_valued_weight():
    w = two_valued_weight(8, 1, 5.0)
    assert set(np.unique(w.values)) == {1.0, 5.0}
    with pytest.raises(GridError):
        two_valued_weight(8, 1, 0.0)


def test_spike_has_unit_mass():
    f = spike(16, 1)
    assert f.values.sum() * f.cell_volume == 1.0
    g = spike(8, 2, cell=(1, 2))
    assert g.values[1, 2] == 64.0 and g.values.sum() * g.cell_volume == 1.0


def test_a1_family_range():
    w = a1_family(64, 1, 0.5, seed=7)
    assert np.all(w.values > 0)
    with pytest.raises(GridError):
        a1_family(64, 1, 1.0)


def test_log_abs_demo_center_validation():
    f = log_abs_demo(32, 1, center=0.5)
    assert np.all(np.isfinite(f.values))
    with pytest.raises(GridError):
        log_abs_demo(32, 1, center=1.5)
