"""Built-in sub-Riemannian models and their lattice specifications.

The catalog covers the Heisenberg groups H^{2n+1}, the group SU(2) charted
through unit quaternions in R^4, general step-2 Carnot groups given by
bracket structure tables, and flat tori used as Riemannian sanity models.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .certify import CDParams
from .fields import ScalarField, SubRiemannianModel, VectorField, commutator

LATTICE_POINT_CAP = 250_000

# Largest certified rho1 for su2() at (rho2, kappa, d) = (1/2, 1, 2), recorded
# as a regression constant from the first verified bisection run (nu grid
# 2^-6..2^6 plus endpoints, unit-sphere sample points, width 1e-6).  The
# bisection pins the value at 1.0 to within the 1e-6 width.
SU2_RHO1 = 1.0

def _zero(dim):
    return ScalarField.zero(dim)


def _const(c, dim):
    return ScalarField.constant(c, dim)


def _coord(i, dim):
    return ScalarField.coordinate(i, dim)


def _vf(dim, entries):
    """Vector field from sparse {index: ScalarField-or-rational} components."""
    comps = []
    for i in range(dim):
        c = entries.get(i, None)
        if c is None:
            comps.append(_zero(dim))
        elif isinstance(c, ScalarField):
            comps.append(c)
        else:
            comps.append(_const(c, dim))
    return VectorField(tuple(comps))


@dataclass(frozen=True)
class ModelCatalogEntry:
    """A model plus the metadata the certifier and lattice engine need."""

    model: SubRiemannianModel
    homogeneous_dim: int | None = None
    reference_cd: CDParams | None = None
    dilation: tuple | None = None
    domain: str = "box"  # sample points in a box, or on the unit sphere

    @property
    def label(self):
        return self.model.label

    def grid_points(self, per_axis=3, halfwidth=1):
        """Deterministic rational sample grid in the model's chart domain."""
        n = self.model.chart_dim
        if self.domain == "sphere":
            axes = _sym_grid(per_axis, Fraction(halfwidth, 2))
            pts = _mesh(axes, n - 1)
            return [_stereographic(u) for u in pts]
        axes = _sym_grid(per_axis, Fraction(halfwidth))
        return _mesh(axes, n)

    def random_points(self, count, seed, halfwidth=1):
        """Rational pseudo-random sample points (denominator 64)."""
        rng = np.random.default_rng(seed)
        n = self.model.chart_dim
        m = n - 1 if self.domain == "sphere" else n
        raw = rng.integers(-64 * halfwidth, 64 * halfwidth + 1, size=(count, m))
        pts = [tuple(Fraction(int(v), 64) for v in row) for row in raw]
        if self.domain == "sphere":
            return [_stereographic(u) for u in pts]
        return pts

    def to_json(self):
        return {
            "label": self.label,
            "chart_dim": self.model.chart_dim,
            "horizontal_fields": len(self.model.horizontal),
            "vertical_fields": len(self.model.vertical),
            "homogeneous_dim": self.homogeneous_dim,
            "reference_cd": None
            if self.reference_cd is None
            else self.reference_cd.to_json(),
            "dilation": list(self.dilation) if self.dilation else None,
            "domain": self.domain,
        }


def _sym_grid(per_axis, halfwidth):
    if per_axis == 1:
        return [Fraction(0)]
    return [
        Fraction(-halfwidth) + Fraction(2 * halfwidth * k, per_axis - 1)
        for k in range(per_axis)
    ]


def _mesh(axes, n):
    pts = [()]
    for _ in range(n):
        pts = [p + (a,) for p in pts for a in axes]
    return pts


def _stereographic(u):
    """Rational point on the unit sphere S^{n} from u in Q^{n}."""
    s = sum(ui * ui for ui in u)
    denom = 1 + s
    return tuple([(1 - s) / denom] + [2 * ui / denom for ui in u])


def heisenberg(n: int) -> ModelCatalogEntry:
    """Heisenberg group H^{2n+1} with the symmetric exponential frame.

    Coordinates (x_1, y_1, ..., x_n, y_n, z); horizontal frame
    X_i = d/dx_i - (y_i/2) d/dz, Y_i = d/dy_i + (x_i/2) d/dz; vertical
    Z = d/dz.  Reference CD parameters (0, n/2, 1, 2n).
    """
    if n < 1:
        raise ValueError("need n >= 1")
    dim = 2 * n + 1
    zi = dim - 1
    horizontal = []
    for i in range(n):
        xi, yi = 2 * i, 2 * i + 1
        horizontal.append(
            _vf(dim, {xi: 1, zi: _coord(yi, dim) * Fraction(-1, 2)})
        )
        horizontal.append(
            _vf(dim, {yi: 1, zi: _coord(xi, dim) * Fraction(1, 2)})
        )
    vertical = (_vf(dim, {zi: 1}),)
    model = SubRiemannianModel(
        horizontal=tuple(horizontal),
        vertical=vertical,
        chart_dim=dim,
        label=f"heisenberg{n}",
    )
    return ModelCatalogEntry(
        model=model,
        homogeneous_dim=2 * n + 2,
        reference_cd=CDParams(0.0, n / 2, 1.0, 2 * n),
        dilation=(1,) * (2 * n) + (2,),
        domain="box",
    )


def su2() -> ModelCatalogEntry:
    """SU(2) as the unit quaternions, charted by the ambient R^4 coordinates.

    The frame consists of the left-invariant linear fields q -> q*j/2,
    q -> q*k/2 (horizontal) and q -> q*i/2 (vertical); they are tangent to
    every sphere about the origin.  The factor 1/2 normalizes the bracket to
    [X, Y] = Z, matching the Heisenberg convention, so the reference
    parameters (rho2, kappa) = (1/2, 1) apply here as well.  Sample points
    live on the unit sphere, where the chart represents the group.
    """
    dim = 4
    half = Fraction(1, 2)
    a, b, c, d = (_coord(i, dim) * half for i in range(dim))
    # q*j = (-c, -d, a, b), q*k = (-d, c, -b, a), q*i = (-b, a, d, -c)
    X = VectorField((-c, -d, a, b))
    Y = VectorField((-d, c, -b, a))
    Z = VectorField((-b, a, d, -c))
    model = SubRiemannianModel(
        horizontal=(X, Y), vertical=(Z,), chart_dim=dim, label="su2"
    )
    return ModelCatalogEntry(
        model=model,
        homogeneous_dim=4,
        reference_cd=CDParams(SU2_RHO1, 0.5, 1.0, 2),
        dilation=None,
        domain="sphere",
    )


def step2_carnot(m: int, structure) -> ModelCatalogEntry:
    """Step-2 Carnot group from antisymmetric bracket tables.

    ``structure`` is a sequence of m-by-m rational tables c^K with
    [X_i, X_j] = sum_K c^K[i][j] Z_K.  Exponential coordinates
    (x_1..x_m, z_1..z_K); the frame is
    X_i = d/dx_i - (1/2) sum_{K,j} c^K[i][j] x_j d/dz_K.
    """
    tables = [
        [[Fraction(v) for v in row] for row in table] for table in structure
    ]
    k = len(tables)
    if k == 0:
        raise ValueError("need at least one vertical direction")
    for table in tables:
        if len(table) != m or any(len(row) != m for row in table):
            raise ValueError("structure tables must be m-by-m")
        for i in range(m):
            for j in range(m):
                if table[i][j] != -table[j][i]:
                    raise ValueError("structure tables must be antisymmetric")
    dim = m + k
    horizontal = []
    for i in range(m):
        entries = {i: _const(1, dim)}
        for K, table in enumerate(tables):
            coeff = _zero(dim)
            for j in range(m):
                if table[i][j] != 0:
                    coeff = coeff + _coord(j, dim) * (-table[i][j] / 2)
            if not coeff.is_zero():
                entries[m + K] = coeff
        horizontal.append(_vf(dim, entries))
    vertical = tuple(_vf(dim, {m + K: 1}) for K in range(k))
    model = SubRiemannianModel(
        horizontal=tuple(horizontal),
        vertical=vertical,
        chart_dim=dim,
        label=f"carnot2_{m}_{k}",
    )
    _assert_step2(model)
    return ModelCatalogEntry(
        model=model,
        homogeneous_dim=m + 2 * k,
        reference_cd=None,
        dilation=(1,) * m + (2,) * k,
        domain="box",
    )


def _assert_step2(model):
    """Every iterated bracket [X_i, [X_j, X_l]] must vanish identically."""
    H = model.horizontal
    for j in range(len(H)):
        for l in range(len(H)):
            inner = commutator(H[j], H[l])
            for i in range(len(H)):
                outer = commutator(H[i], inner)
                if any(not c.is_zero() for c in outer.components):
                    raise ValueError("structure is not step 2")


def flat_torus(dim: int) -> ModelCatalogEntry:
    """Flat Riemannian model: full coordinate frame, no vertical directions."""
    model = SubRiemannianModel(
        horizontal=tuple(_vf(dim, {i: 1}) for i in range(dim)),
        vertical=(),
        chart_dim=dim,
        label=f"torus{dim}",
    )
    return ModelCatalogEntry(model=model, homogeneous_dim=dim, domain="box")


def catalog():
    """All built-in models keyed by name."""
    return {
        "heisenberg1": heisenberg(1),
        "heisenberg2": heisenberg(2),
        "su2": su2(),
        "torus1": flat_torus(1),
        "torus2": flat_torus(2),
    }


def get_model(name: str) -> ModelCatalogEntry:
    if name.startswith("heisenberg") and name[len("heisenberg"):].isdigit():
        return heisenberg(int(name[len("heisenberg"):]))
    if name.startswith("torus") and name[len("torus"):].isdigit():
        return flat_torus(int(name[len("torus"):]))
    cat = catalog()
    if name not in cat:
        raise KeyError(f"unknown model {name!r}")
    return cat[name]


@dataclass(frozen=True)
class PeriodicLatticeSpec:
    """Periodic box discretization request for a model chart."""

    box: tuple
    points: tuple
    model: SubRiemannianModel
    cap: int = LATTICE_POINT_CAP

    def __post_init__(self):
        if len(self.box) != self.model.chart_dim or len(self.points) != len(
            self.box
        ):
            raise ValueError("box/points must match the chart dimension")
        if any(b <= 0 for b in self.box) or any(p <= 0 for p in self.points):
            raise ValueError("box lengths and point counts must be positive")
        total = int(np.prod(self.points))
        if total > self.cap:
            raise ValueError(f"lattice size {total} exceeds cap {self.cap}")

    @property
    def total_points(self):
        return int(np.prod(self.points))

    @property
    def spacing(self):
        return tuple(b / p for b, p in zip(self.box, self.points))
