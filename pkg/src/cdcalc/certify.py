"""Pointwise certification of generalized curvature-dimension inequalities.

The inequality

    Gamma_2(f) + nu Gamma_2^Z(f) >=
        (1/d)(Lf)^2 + (rho1 - kappa/nu) Gamma(f) + rho2 Gamma^Z(f)

is quadratic in the 2-jet of f at any fixed point, because every term is a
quadratic differential expression of order <= 2 in f.  Centered polynomials
of degree 1..2 realize every 2-jet, so the quantifier over all smooth f
reduces, at a point, to positive semidefiniteness of a matrix on that jet
space.  The quantifier over nu > 0 is sampled on a geometric grid and closed
off with the nu -> 0 and nu -> infinity endpoint forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .fields import SubRiemannianModel, apply, gamma, gamma_Z, gamma2, gamma2_Z, sub_laplacian
from .polynomial import ScalarField

PSD_TOL = 1e-9
NULLSPACE_TOL = 1e-9


@dataclass(frozen=True)
class CDParams:
    """Constants (rho1, rho2, kappa, d) of the curvature-dimension inequality."""

    rho1: float
    rho2: float
    kappa: float
    d: float

    def __post_init__(self):
        if not self.rho2 > 0:
            raise ValueError("rho2 must be positive")
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if not (0 < self.d < math.inf):
            raise ValueError("d must lie in (0, inf)")

    def with_rho1(self, rho1):
        return CDParams(rho1, self.rho2, self.kappa, self.d)

    def to_json(self):
        return {
            "rho1": float(self.rho1),
            "rho2": float(self.rho2),
            "kappa": float(self.kappa),
            "d": float(self.d),
        }


def jet_basis(dim):
    """Exponent multi-indices of total degree 1..2 (constants excluded)."""
    basis = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        basis.append(tuple(e))
    for i in range(dim):
        for j in range(i, dim):
            e = [0] * dim
            e[i] += 1
            e[j] += 1
            basis.append(tuple(e))
    return basis


def cd_inequality_value(model, f, point, params, nu):
    """Left-minus-right side of the CD inequality for f at a point.

    Exact (Fraction) when point, params and nu are all rational.
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    exact = all(isinstance(v, Rational) for v in point) and all(
        isinstance(v, Rational) for v in (params.rho1, params.rho2, params.kappa, params.d, nu)
    )
    g2 = gamma2(model, f)(point)
    g2z = gamma2_Z(model, f)(point)
    lf = sub_laplacian(model, f)(point)
    g = gamma(model, f)(point)
    gz = gamma_Z(model, f)(point)
    if exact:
        one = Fraction(1)
        return (
            g2
            + Fraction(nu) * g2z
            - (one / Fraction(params.d)) * lf * lf
            - (Fraction(params.rho1) - Fraction(params.kappa) / Fraction(nu)) * g
            - Fraction(params.rho2) * gz
        )
    return (
        float(g2)
        + nu * float(g2z)
        - float(lf) ** 2 / params.d
        - (params.rho1 - params.kappa / nu) * float(g)
        - params.rho2 * float(gz)
    )


def truncated_jet(f, point):
    """Coefficients of the degree-1..2 Taylor truncation of f at a point."""
    shifted = f.shift(point)  # g(x) = f(x + point)
    return {e: shifted.coeffs.get(e, Fraction(0)) for e in jet_basis(f.dimension)}


class JetComponents:
    """The five bilinear building blocks of the CD form at one base point.

    Matrices are indexed by the centered-monomial jet basis; the full CD
    form for any (params, nu) is an affine combination of them, so they are
    assembled once per point and reused across the whole parameter search.
    """

    def __init__(self, model: SubRiemannianModel, point):
        dim = model.chart_dim
        point = tuple(Fraction(p) for p in point)
        basis = jet_basis(dim)
        neg = tuple(-p for p in point)
        polys = [ScalarField.monomial(e).shift(neg) for e in basis]

        lf = [sub_laplacian(model, f) for f in polys]
        xf = [[apply(X, f) for X in model.horizontal] for f in polys]
        zf = [[apply(Z, f) for Z in model.vertical] for f in polys]
        xlf = [[apply(X, g) for X in model.horizontal] for g in lf]
        zlf = [[apply(Z, g) for Z in model.vertical] for g in lf]

        nb = len(basis)
        A_g2 = np.zeros((nb, nb))
        A_g2z = np.zeros((nb, nb))
        A_ll = np.zeros((nb, nb))
        A_g = np.zeros((nb, nb))
        A_gz = np.zeros((nb, nb))
        half = Fraction(1, 2)
        for a in range(nb):
            lfa = lf[a](point)
            for b in range(a, nb):
                gam = _pair_sum(xf[a], xf[b])
                gamz = _pair_sum(zf[a], zf[b])
                g2 = half * (
                    sub_laplacian(model, gam)
                    - _pair_sum(xf[a], xlf[b])
                    - _pair_sum(xf[b], xlf[a])
                )
                g2z = half * (
                    sub_laplacian(model, gamz)
                    - _pair_sum(zf[a], zlf[b])
                    - _pair_sum(zf[b], zlf[a])
                )
                A_g2[a, b] = A_g2[b, a] = float(g2(point))
                A_g2z[a, b] = A_g2z[b, a] = float(g2z(point))
                A_ll[a, b] = A_ll[b, a] = float(lfa * lf[b](point))
                A_g[a, b] = A_g[b, a] = float(gam(point))
                A_gz[a, b] = A_gz[b, a] = float(gamz(point))

        self.model = model
        self.point = point
        self.basis = basis
        self.gamma2 = A_g2
        self.gamma2_Z = A_g2z
        self.LL = A_ll
        self.gamma = A_g
        self.gamma_Z = A_gz

    def matrix(self, params: CDParams, nu: float) -> np.ndarray:
        if nu <= 0:
            raise ValueError("nu must be positive")
        return (
            self.gamma2
            + nu * self.gamma2_Z
            - self.LL / params.d
            - (params.rho1 - params.kappa / nu) * self.gamma
            - params.rho2 * self.gamma_Z
        )

    def limit_matrix_large_nu(self, params: CDParams) -> np.ndarray:
        """nu -> infinity form, valid on the null space of the Gamma_2^Z block."""
        return (
            self.gamma2
            - self.LL / params.d
            - params.rho1 * self.gamma
            - params.rho2 * self.gamma_Z
        )

    def limit_matrix_small_nu(self, params: CDParams) -> np.ndarray:
        """nu -> 0 form; for kappa > 0 it binds on the null space of Gamma."""
        rho1 = params.rho1 if params.kappa == 0 else 0.0
        return (
            self.gamma2
            - self.LL / params.d
            - rho1 * self.gamma
            - params.rho2 * self.gamma_Z
        )


def _pair_sum(us, vs):
    if not us:
        return ScalarField.zero(1) if not vs else ScalarField.zero(vs[0].dimension)
    out = ScalarField.zero(us[0].dimension)
    for u, v in zip(us, vs):
        out = out + u * v
    return out


@dataclass(frozen=True)
class JetQuadraticForm:
    """The CD quadratic form on centered 2-jets at one point and one nu."""

    base_point: tuple
    basis: tuple
    matrix: np.ndarray
    nu: float

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (len(self.basis), len(self.basis)):
            raise ValueError("matrix size must match the jet basis")
        if np.max(np.abs(m - m.T)) > 1e-12 * (1 + np.max(np.abs(m))):
            raise ValueError("matrix must be symmetric")

    def value(self, coeffs):
        c = np.asarray(coeffs, dtype=float)
        return float(c @ self.matrix @ c)


def jet_form(model, point, params: CDParams, nu: float) -> JetQuadraticForm:
    """Assemble the CD jet form at a point for one nu."""
    comps = JetComponents(model, point)
    m = comps.matrix(params, nu)
    m = 0.5 * (m + m.T)
    return JetQuadraticForm(
        base_point=tuple(float(p) for p in point),
        basis=tuple(comps.basis),
        matrix=m,
        nu=nu,
    )


def is_psd(form_or_matrix, tol=PSD_TOL):
    """Smallest eigenvalue >= -tol * (1 + spectral radius)."""
    m = (
        form_or_matrix.matrix
        if isinstance(form_or_matrix, JetQuadraticForm)
        else np.asarray(form_or_matrix, dtype=float)
    )
    if not np.all(np.isfinite(m)):
        raise FloatingPointError("non-finite entries in jet form matrix")
    eigs = np.linalg.eigvalsh(0.5 * (m + m.T))
    radius = max(abs(eigs[0]), abs(eigs[-1]))
    return bool(eigs[0] >= -tol * (1.0 + radius)), float(eigs[0])


def _restricted(matrix, psd_block, tol):
    """Restrict matrix to the (near) null space of the PSD block."""
    w, v = np.linalg.eigh(psd_block)
    scale = 1.0 + max(abs(w[0]), abs(w[-1]))
    if w[0] < -tol * scale:
        return None  # block not PSD: the nu-limit diverges to -infinity
    null = v[:, np.abs(w) <= tol * scale]
    if null.shape[1] == 0:
        return np.zeros((0, 0))
    return null.T @ matrix @ null


@dataclass
class CertificateCell:
    point: tuple
    nu: float  # math.inf and 0.0 mark the endpoint forms
    min_eig: float
    psd: bool

    def to_json(self):
        return {
            "point": [float(p) for p in self.point],
            "nu": "inf" if math.isinf(self.nu) else float(self.nu),
            "min_eig": self.min_eig,
            "psd": self.psd,
        }


@dataclass
class CertificateReport:
    params: CDParams
    tol: float
    cells: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)

    @property
    def certified(self):
        return all(c.psd for c in self.cells)

    @property
    def worst(self):
        return min(self.cells, key=lambda c: c.min_eig)

    def to_json(self):
        return {
            "params": self.params.to_json(),
            "tol": self.tol,
            "verdict": "certified at samples" if self.certified else "violated",
            "cells": [c.to_json() for c in self.cells],
            "witnesses": self.witnesses,
        }


def default_nu_grid(kmin=-6, kmax=6):
    return [2.0 ** k for k in range(kmin, kmax + 1)]


def verify_cd(
    model,
    params: CDParams,
    points,
    nus=None,
    tol=PSD_TOL,
    endpoints=True,
    components=None,
) -> CertificateReport:
    """Check PSD of the CD jet form at every (point, nu) cell.

    ``components`` may carry precomputed JetComponents per point (reused by
    the bisection); endpoint cells use the nu -> 0 / nu -> inf limit forms.
    """
    nus = default_nu_grid() if nus is None else list(nus)
    if not points or not nus:
        raise ValueError("need nonempty point and nu grids")
    if components is None:
        components = [JetComponents(model, p) for p in points]
    report = CertificateReport(params=params, tol=tol)
    for comp in components:
        pt = tuple(float(p) for p in comp.point)
        for nu in nus:
            m = comp.matrix(params, nu)
            ok, lo = is_psd(m, tol)
            report.cells.append(CertificateCell(pt, float(nu), lo, ok))
            if not ok:
                report.witnesses.append(_witness(comp, params, nu, m))
        if endpoints:
            big = _restricted(comp.limit_matrix_large_nu(params), comp.gamma2_Z, NULLSPACE_TOL)
            if big is None:
                report.cells.append(CertificateCell(pt, math.inf, -math.inf, False))
            elif big.size:
                ok, lo = is_psd(big, tol)
                report.cells.append(CertificateCell(pt, math.inf, lo, ok))
            if params.kappa == 0:
                ok, lo = is_psd(comp.limit_matrix_small_nu(params), tol)
                report.cells.append(CertificateCell(pt, 0.0, lo, ok))
            else:
                small = _restricted(comp.limit_matrix_small_nu(params), comp.gamma, NULLSPACE_TOL)
                if small is not None and small.size:
                    ok, lo = is_psd(small, tol)
                    report.cells.append(CertificateCell(pt, 0.0, lo, ok))
    return report


def _witness(comp, params, nu, matrix):
    w, v = np.linalg.eigh(0.5 * (matrix + matrix.T))
    vec = v[:, 0]
    poly = witness_polynomial(comp, vec)
    return {
        "point": [float(p) for p in comp.point],
        "nu": float(nu),
        "min_eig": float(w[0]),
        "coefficients": {str(e): float(c) for e, c in zip(comp.basis, vec)},
        "quadratic_value": float(vec @ matrix @ vec),
        "polynomial": poly.to_json(),
    }


def witness_polynomial(comp, coeffs) -> ScalarField:
    """Render a jet-basis coefficient vector as a centered polynomial."""
    dim = comp.model.chart_dim
    out = ScalarField.zero(dim)
    neg = tuple(-p for p in comp.point)
    for e, c in zip(comp.basis, coeffs):
        out = out + ScalarField.monomial(e, Fraction(float(c))).shift(neg)
    return out


def maximize_rho1(
    model,
    rho2,
    kappa,
    d,
    points,
    nus=None,
    tol=PSD_TOL,
    width=1e-6,
    bracket=1024.0,
) -> float:
    """Largest rho1 certified by verify_cd, located by bisection.

    The PSD verdict is monotone in rho1 (the rho1 term enters through the
    negative of the PSD Gamma block), so bisection on [lo, hi] is sound.
    """
    nus = default_nu_grid() if nus is None else list(nus)
    components = [JetComponents(model, p) for p in points]

    def certified(rho1):
        params = CDParams(rho1, rho2, kappa, d)
        return verify_cd(
            model, params, points, nus, tol=tol, components=components
        ).certified

    lo, hi = -bracket, bracket
    if not certified(lo):
        raise ValueError(f"no certified rho1 in [{lo}, {hi}]")
    if certified(hi):
        raise ValueError(f"certified rho1 exceeds bracket bound {hi}")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if certified(mid):
            lo = mid
        else:
            hi = mid
    return lo
