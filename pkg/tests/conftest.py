"""Shared fixtures: lattices and heat operators reused across test modules."""

import numpy as np
import pytest

from cdcalc import models
from cdcalc.lattice import HeatOperator, build_generator, build_su2_generator


@pytest.fixture(scope="session")
def h1_entry():
    return models.heisenberg(1)


@pytest.fixture(scope="session")
def h1_lattice12():
    m = models.heisenberg(1).model
    spec = models.PeriodicLatticeSpec(
        box=(2 * np.pi,) * 3, points=(12, 12, 12), model=m
    )
    return build_generator(spec)


@pytest.fixture(scope="session")
def h1_operator12(h1_lattice12):
    return HeatOperator(h1_lattice12)


@pytest.fixture(scope="session")
def h1_lattice16():
    m = models.heisenberg(1).model
    spec = models.PeriodicLatticeSpec(
        box=(2 * np.pi,) * 3, points=(16, 16, 16), model=m
    )
    return build_generator(spec)


@pytest.fixture(scope="session")
def h1_operator16(h1_lattice16):
    return HeatOperator(h1_lattice16)


@pytest.fixture(scope="session")
def su2_lattice16():
    return build_su2_generator(16, 16)


@pytest.fixture(scope="session")
def su2_operator16(su2_lattice16):
    return HeatOperator(su2_lattice16)


@pytest.fixture(scope="session")
def su2_lattice10():
    return build_su2_generator(10, 10)


@pytest.fixture(scope="session")
def su2_operator10(su2_lattice10):
    return HeatOperator(su2_lattice10)
