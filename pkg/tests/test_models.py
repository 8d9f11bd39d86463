"""Model catalog and lattice specs."""

from fractions import Fraction

import numpy as np
import pytest

from cdcalc import models


def test_catalog_entries_serialize():
    cat = models.catalog()
    assert {"heisenberg1", "heisenberg2", "su2"} <= set(cat)
    for name, entry in cat.items():
        payload = entry.to_json()
        assert payload["label"] == entry.label
        assert payload["chart_dim"] == entry.model.chart_dim


def test_get_model_parametric_names():
    assert models.get_model("heisenberg3").model.chart_dim == 7
    assert models.get_model("torus2").model.chart_dim == 2
    with pytest.raises(KeyError):
        models.get_model("nope")


def test_heisenberg_reference_parameters():
    e1 = models.heisenberg(1)
    assert e1.reference_cd.rho2 == 0.5
    assert e1.reference_cd.d == 2
    assert e1.homogeneous_dim == 4
    e2 = models.heisenberg(2)
    assert e2.reference_cd.rho2 == 1.0
    assert e2.homogeneous_dim == 6


def test_su2_reference_is_regression_constant():
    entry = models.su2()
    assert entry.reference_cd.rho1 == models.SU2_RHO1 == 1.0


def test_grid_points_rational_and_on_domain():
    entry = models.su2()
    pts = entry.grid_points(per_axis=3)
    assert len(pts) == 27
    for p in pts:
        assert all(isinstance(v, Fraction) for v in p)
        assert sum(v * v for v in p) == 1  # exactly on the unit sphere

    box_pts = models.heisenberg(1).grid_points(per_axis=3)
    assert len(box_pts) == 27
    assert all(all(isinstance(v, Fraction) for v in p) for p in box_pts)


def test_random_points_seeded_and_rational():
    entry = models.heisenberg(1)
    a = entry.random_points(10, seed=3)
    b = entry.random_points(10, seed=3)
    c = entry.random_points(10, seed=4)
    assert a == b and a != c
    sphere = models.su2().random_points(5, seed=1)
    for p in sphere:
        assert sum(v * v for v in p) == 1


def test_lattice_spec_validation_and_cap():
    m = models.heisenberg(1).model
    spec = models.PeriodicLatticeSpec(
        box=(2 * np.pi,) * 3, points=(8, 8, 8), model=m
    )
    assert spec.total_points == 512
    assert spec.spacing == (2 * np.pi / 8,) * 3
    with pytest.raises(ValueError, match="cap"):
        models.PeriodicLatticeSpec(
            box=(1.0,) * 3, points=(100, 100, 100), model=m
        )
    with pytest.raises(ValueError):
        models.PeriodicLatticeSpec(box=(1.0, 1.0), points=(4, 4), model=m)
    # the cap is overridable for deliberate large runs
    big = models.PeriodicLatticeSpec(
        box=(1.0,) * 3, points=(100, 100, 100), model=m, cap=10**7
    )
    assert big.total_points == 10**6
