"""Symbolic Gamma-calculus oracles, exact on every catalog model."""

from fractions import Fraction

import numpy as np
import pytest

from cdcalc import models
from cdcalc.fields import (
    check_H2,
    commutator,
    gamma,
    gamma2,
    gamma2_Z,
    gamma_from_definition,
    gamma_Z,
    sub_laplacian,
)
from cdcalc.polynomial import ScalarField


def _random_poly(dim, rng, degree=3, terms=5):
    out = ScalarField.zero(dim)
    for _ in range(terms):
        expo = tuple(int(e) for e in rng.integers(0, degree + 1, size=dim))
        while sum(expo) > degree:
            expo = tuple(int(e) for e in rng.integers(0, degree + 1, size=dim))
        c = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5)))
        out = out + ScalarField.monomial(expo, c)
    return out


def test_heisenberg_oracle_values():
    """Gamma(z) = (x^2+y^2)/4, Gamma_2(z) = 1/2, Lz = 0, exactly."""
    m = models.heisenberg(1).model
    x = ScalarField.coordinate(0, 3)
    y = ScalarField.coordinate(1, 3)
    z = ScalarField.coordinate(2, 3)
    assert gamma(m, z) == Fraction(1, 4) * (x**2 + y**2)
    assert gamma2(m, z) == ScalarField.constant(Fraction(1, 2), 3)
    assert sub_laplacian(m, z) == ScalarField.zero(3)


def test_heisenberg_gamma_z_is_vertical_square():
    m = models.heisenberg(1).model
    rng = np.random.default_rng(5)
    Z = m.vertical[0]
    for _ in range(10):
        f = _random_poly(3, rng)
        assert gamma_Z(m, f) == Z(f) * Z(f)


def test_gamma_definition_agrees_with_frame_form():
    """1/2(L(fg) - fLg - gLf) equals sum (X_i f)(X_i g) on every model."""
    rng = np.random.default_rng(17)
    for name, entry in models.catalog().items():
        m = entry.model
        for _ in range(5):
            f = _random_poly(m.chart_dim, rng)
            g = _random_poly(m.chart_dim, rng)
            assert gamma(m, f, g) == gamma_from_definition(m, f, g), name


def test_h2_identity_100_random_polynomials_every_model():
    rng = np.random.default_rng(23)
    for name, entry in models.catalog().items():
        m = entry.model
        for _ in range(100):
            f = _random_poly(m.chart_dim, rng, degree=2, terms=4)
            assert check_H2(m, f), name


def test_su2_commutation_relations():
    """Normalized frame: [X, Y] = Z, [Y, Z] = X, [Z, X] = Y."""
    m = models.su2().model
    X, Y = m.horizontal
    (Z,) = m.vertical
    assert commutator(X, Y).components == Z.components
    assert commutator(Y, Z).components == X.components
    assert commutator(Z, X).components == Y.components


def test_heisenberg_commutator_is_reeb():
    m = models.heisenberg(1).model
    X, Y = m.horizontal
    (Z,) = m.vertical
    assert commutator(X, Y).components == Z.components


def test_gamma2_bochner_consistency_numeric():
    """Gamma_2(f) = 1/2[L Gamma(f) - 2 Gamma(f, Lf)], cross-checked at points."""
    rng = np.random.default_rng(31)
    m = models.heisenberg(1).model
    for _ in range(5):
        f = _random_poly(3, rng)
        lhs = gamma2(m, f)
        rhs = Fraction(1, 2) * (
            sub_laplacian(m, gamma(m, f)) - 2 * gamma(m, f, sub_laplacian(m, f))
        )
        assert lhs == rhs


def test_gamma2_Z_iterates_vertical_form():
    rng = np.random.default_rng(37)
    m = models.su2().model
    for _ in range(5):
        f = _random_poly(4, rng, degree=2)
        lhs = gamma2_Z(m, f)
        rhs = Fraction(1, 2) * (
            sub_laplacian(m, gamma_Z(m, f))
            - 2 * gamma_Z(m, f, sub_laplacian(m, f))
        )
        assert lhs == rhs


def test_model_json_roundtrip():
    m = models.su2().model
    from cdcalc.fields import SubRiemannianModel

    m2 = SubRiemannianModel.from_json(m.to_json())
    assert m2.chart_dim == m.chart_dim
    assert m2.horizontal == m.horizontal
    assert m2.vertical == m.vertical
