"""Discrete sub-Laplacians and heat semigroups on periodic lattices.

A model's horizontal frame is discretized by forward differences with
coefficients evaluated at edge midpoints, so the assembled generator is
symmetric with respect to the lattice mass by construction:

    A = -M^{-1} sum_i G_i^T W_i G_i

where G_i approximates X_i on lattice edges and W_i carries the edge
quadrature weights.  This gives exactly

    <f, -Af>_mass = sum_i ||D_i f||^2         (discrete integration by parts)

with D_i = sqrt(W_i) G_i, mirroring the symmetric structure of L.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .models import PeriodicLatticeSpec

DENSE_EIG_CUTOFF = 5000


def _shift_op(shape, axis):
    """Sparse periodic shift S: (Sf)(x) = f(x + e_axis) on a flattened grid."""
    n = int(np.prod(shape))
    idx = np.arange(n).reshape(shape)
    shifted = np.roll(idx, -1, axis=axis).reshape(-1)
    return sp.csr_matrix(
        (np.ones(n), (np.arange(n), shifted)), shape=(n, n)
    )


def _forward_diff(shape, axis, h):
    """Periodic forward difference (f(x+h e_axis) - f(x)) / h."""
    return (_shift_op(shape, axis) - sp.identity(int(np.prod(shape)))) / h


@dataclass
class DiscreteGenerator:
    """Sparse symmetric generator on a lattice, with its mass weights.

    ``matrix`` is the generator A (an approximation of L); ``mass`` the
    per-point quadrature weight; ``difference_ops`` the weighted edge
    operators D_i with <f, -Af>_mass = sum_i ||D_i f||^2 exactly.
    """

    matrix: sp.spmatrix
    mass: np.ndarray
    shape: tuple
    box: tuple
    difference_ops: list = field(default_factory=list)
    lattice: PeriodicLatticeSpec | None = None
    label: str = ""

    @property
    def n(self):
        return self.matrix.shape[0]

    def total_mass(self):
        return float(self.mass.sum())

    def apply(self, f):
        return self.matrix.dot(f)

    def gamma(self, f, g=None):
        """Discrete carre du champ: Gamma(f,g) = 1/2 (A(fg) - f Ag - g Af).

        Nonnegative on the diagonal because A has nonnegative
        off-diagonal entries (it is a weighted graph Laplacian).
        """
        if g is None:
            g = f
        A = self.matrix
        return 0.5 * (A.dot(f * g) - f * A.dot(g) - g * A.dot(f))

    def dirichlet(self, f, g=None):
        """Energy <f, -Ag>_mass = sum_i <D_i f, D_i g>."""
        if g is None:
            g = f
        return float(-np.sum(self.mass * f * self.matrix.dot(g)))

    def inner(self, f, g):
        return float(np.sum(self.mass * f * g))

    def norm(self, f, p):
        """Weighted L^p norm with respect to the mass measure."""
        if p == np.inf:
            return float(np.max(np.abs(f)))
        return float(np.sum(self.mass * np.abs(f) ** p) ** (1.0 / p))

    def mean(self, f):
        return float(np.sum(self.mass * f) / self.mass.sum())


def _midpoint_coords(coords, axis_pts, axis, h, box):
    """Coordinates shifted half a step along `axis`, wrapped into the box."""
    out = list(coords)
    lo = -box[axis] / 2.0
    out[axis] = lo + np.mod(axis_pts[axis] + h / 2.0 - lo, box[axis])
    return out


def build_generator(spec: PeriodicLatticeSpec) -> DiscreteGenerator:
    """Discretize L = sum X_i^2 on a periodic box lattice.

    Each horizontal field X = sum_j a_j d/dx_j becomes
    G_X f = sum_j a_j(midpoint_j) D_j f with D_j the periodic forward
    difference; the generator is -sum_X G_X^T G_X scaled by the uniform
    mass.  Polynomial coefficients are wrapped periodically into the box.
    """
    model = spec.model
    dim = model.chart_dim
    shape = tuple(spec.points)
    h = spec.spacing
    n = int(np.prod(shape))

    axes = [
        -spec.box[i] / 2.0 + h[i] * np.arange(shape[i]) for i in range(dim)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = [m.reshape(-1) for m in mesh]

    cell = float(np.prod(h))
    mass = np.full(n, cell)

    diffs = [_forward_diff(shape, j, h[j]) for j in range(dim)]

    ops = []
    quad = sp.csr_matrix((n, n))
    for X in model.horizontal:
        G = sp.csr_matrix((n, n))
        for j, comp in enumerate(X.components):
            if comp.is_zero():
                continue
            mid = _midpoint_coords(flat, flat, j, h[j], spec.box)
            coef = _poly_eval(comp, mid)
            G = G + sp.diags(coef).dot(diffs[j])
        G = G.tocsr()
        ops.append(np.sqrt(cell) * G)
        quad = quad + G.T.dot(G)
    A = (-quad).tocsr()
    return DiscreteGenerator(
        matrix=A,
        mass=mass,
        shape=shape,
        box=tuple(float(b) for b in spec.box),
        difference_ops=ops,
        lattice=spec,
        label=model.label,
    )


def _poly_eval(poly, coords):
    """Evaluate a ScalarField on arrays of coordinates (float, vectorized)."""
    out = np.zeros_like(np.asarray(coords[0], dtype=float))
    for expo, c in poly.coeffs.items():
        term = float(c) * np.ones_like(out)
        for xi, e in zip(coords, expo):
            if e:
                term = term * np.asarray(xi, dtype=float) ** e
        out = out + term
    return out


def build_su2_generator(n_eta=16, n_xi=16) -> DiscreteGenerator:
    """Discrete sub-Laplacian on SU(2) in Hopf coordinates.

    The chart is (eta, xi1, xi2) with the unit quaternion
    q = (cos eta e^{i xi1}, sin eta e^{i xi2}), eta in (0, pi/2) and both
    xi's 2*pi-periodic.  In these coordinates the horizontal gradient of
    the su2() frame is

        Gamma(f) = (1/4) [ f_eta^2 + (tan(eta) f_xi1 + cot(eta) f_xi2)^2 ]

    so the generator is assembled from the orthogonal pair
    E1 = (1/2) d/deta and E2 = (1/2)(tan(eta) d/dxi1 + cot(eta) d/dxi2).
    The eta grid is staggered at (i + 1/2) h so the vanishing volume
    weight sin(eta)cos(eta) supplies the natural zero-flux condition at
    the degenerate circles eta = 0, pi/2; the mass is normalized to 1.
    """
    shape = (n_eta, n_xi, n_xi)
    n = int(np.prod(shape))
    h_eta = (np.pi / 2.0) / n_eta
    h_xi = 2.0 * np.pi / n_xi

    eta = (np.arange(n_eta) + 0.5) * h_eta
    weight = np.sin(eta) * np.cos(eta)
    mass3 = np.broadcast_to(
        weight[:, None, None] * h_eta * h_xi * h_xi, shape
    ).reshape(-1)
    total = mass3.sum()
    mass = mass3 / total

    # E1: forward differences in eta, interior edges only; the edge weight
    # carries the volume density at the eta midpoint.
    rows, cols, vals, wedge = [], [], [], []
    idx = np.arange(n).reshape(shape)
    for i in range(n_eta - 1):
        eta_mid = (i + 1) * h_eta
        w = np.sin(eta_mid) * np.cos(eta_mid) * h_eta * h_xi * h_xi / total
        a = idx[i].reshape(-1)
        b = idx[i + 1].reshape(-1)
        e0 = len(rows) // 2
        for aa, bb in zip(a, b):
            rows.extend([e0, e0])
            cols.extend([int(bb), int(aa)])
            vals.extend([0.5 / h_eta, -0.5 / h_eta])
            wedge.append(w)
            e0 += 1
    n_edges = len(wedge)
    G1 = sp.csr_matrix((vals, (rows, cols)), shape=(n_edges, n))
    W1 = np.asarray(wedge)

    # E2: combination of the two periodic xi differences; coefficients
    # depend on eta only, which is constant along xi edges, so midpoint
    # and point evaluation coincide.
    D1 = _forward_diff(shape, 1, h_xi)
    D2 = _forward_diff(shape, 2, h_xi)
    tan_flat = np.broadcast_to(np.tan(eta)[:, None, None], shape).reshape(-1)
    cot_flat = np.broadcast_to(
        1.0 / np.tan(eta)[:, None, None], shape
    ).reshape(-1)
    G2 = 0.5 * (sp.diags(tan_flat).dot(D1) + sp.diags(cot_flat).dot(D2))
    G2 = G2.tocsr()

    quad = G1.T.dot(sp.diags(W1)).dot(G1) + G2.T.dot(sp.diags(mass)).dot(G2)
    A = sp.diags(1.0 / mass).dot(-quad).tocsr()
    ops = [
        sp.diags(np.sqrt(W1)).dot(G1).tocsr(),
        sp.diags(np.sqrt(mass)).dot(G2).tocsr(),
    ]
    return DiscreteGenerator(
        matrix=A,
        mass=mass,
        shape=shape,
        box=(np.pi / 2.0, 2.0 * np.pi, 2.0 * np.pi),
        difference_ops=ops,
        lattice=None,
        label="su2",
    )


def su2_lattice_points(n_eta=16, n_xi=16):
    """Unit-quaternion coordinates of the su2 lattice points, shape (N, 4)."""
    h_eta = (np.pi / 2.0) / n_eta
    h_xi = 2.0 * np.pi / n_xi
    eta = (np.arange(n_eta) + 0.5) * h_eta
    xi = np.arange(n_xi) * h_xi
    E, X1, X2 = np.meshgrid(eta, xi, xi, indexing="ij")
    pts = np.stack(
        [
            np.cos(E) * np.cos(X1),
            np.cos(E) * np.sin(X1),
            np.sin(E) * np.cos(X2),
            np.sin(E) * np.sin(X2),
        ],
        axis=-1,
    )
    return pts.reshape(-1, 4)


def lattice_coordinates(G: DiscreteGenerator):
    """Coordinate arrays (flattened) of a box lattice built by build_generator."""
    if G.lattice is None:
        raise ValueError("generator has no box lattice spec")
    spec = G.lattice
    axes = [
        -spec.box[i] / 2.0 + spec.spacing[i] * np.arange(spec.points[i])
        for i in range(len(spec.points))
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return [m.reshape(-1) for m in mesh]


class HeatOperator:
    """P_t = e^{tA} through the (mass-weighted) eigendecomposition of A.

    Dense decomposition for N <= DENSE_EIG_CUTOFF, Lanczos for larger
    lattices (then the operator is a truncated semigroup and P_0 is a
    projection, reported through `n_modes`).  Decompositions can be cached
    under the directory named by the CDCALC_CACHE environment variable.
    """

    def __init__(self, generator: DiscreteGenerator, n_modes=None):
        self.generator = generator
        n = generator.n
        full = n <= DENSE_EIG_CUTOFF and (n_modes is None or n_modes >= n)
        k = n if full else (n_modes or min(512, n - 2))
        self.n_modes = k
        lam, vecs = _eigendecompose(generator, k, full)
        self.eigenvalues = lam  # nonincreasing, lam[0] = 0
        self.eigenbasis = vecs  # columns orthonormal w.r.t. mass

    def apply(self, f, t):
        """P_t f via the spectral decomposition."""
        if t < 0:
            raise ValueError("t must be nonnegative")
        c = self.eigenbasis.T.dot(self.generator.mass * f)
        return self.eigenbasis.dot(np.exp(self.eigenvalues * t) * c)

    def residual(self, f):
        """Norm of the component of f outside the computed eigenspace."""
        c = self.eigenbasis.T.dot(self.generator.mass * f)
        proj = self.eigenbasis.dot(c)
        return float(np.sqrt(np.sum(self.generator.mass * (f - proj) ** 2)))

    def kernel_diag(self, t):
        """p(x,x,t) = sum_k e^{lambda_k t} v_k(x)^2."""
        if t <= 0:
            raise ValueError("t must be positive")
        w = np.exp(self.eigenvalues * t)
        return np.einsum("k,xk->x", w, self.eigenbasis**2)

    def kernel(self, t):
        """Full heat kernel matrix p(x,y,t) (dense; small lattices only)."""
        if t <= 0:
            raise ValueError("t must be positive")
        w = np.exp(self.eigenvalues * t)
        return (self.eigenbasis * w).dot(self.eigenbasis.T)


def heat_apply(G: DiscreteGenerator, f, t, operator=None, n_modes=None):
    """Convenience wrapper: e^{tA} f, building the decomposition if needed."""
    op = operator or HeatOperator(G, n_modes=n_modes)
    return op.apply(f, t)


def spectrum(G: DiscreteGenerator, k, operator=None):
    """The k smallest eigenvalues of -A (nonnegative, ascending)."""
    if k > G.n:
        raise ValueError("k exceeds lattice size")
    op = operator or HeatOperator(G, n_modes=max(k, 16))
    return -op.eigenvalues[:k]


def heat_kernel_diag(G: DiscreteGenerator, t, operator=None):
    op = operator or HeatOperator(G)
    return op.kernel_diag(t)


def _eigendecompose(G, k, full):
    cached = _cache_load(G, k, full)
    if cached is not None:
        return cached
    sqrt_m = np.sqrt(G.mass)
    if full:
        M = sp.diags(sqrt_m).dot(G.matrix).dot(sp.diags(1.0 / sqrt_m))
        S = M.toarray()
        S = 0.5 * (S + S.T)
        lam, U = np.linalg.eigh(S)
        order = np.argsort(-lam)  # nonincreasing: 0 first
        lam, U = lam[order], U[:, order]
    else:
        M = sp.diags(sqrt_m).dot(G.matrix).dot(sp.diags(1.0 / sqrt_m))
        M = 0.5 * (M + M.T)
        lam, U = spla.eigsh(M, k=k, which="LA")
        order = np.argsort(-lam)
        lam, U = lam[order], U[:, order]
    vecs = U / sqrt_m[:, None]
    # deterministic sign: first component of noticeable size positive
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        lead = col[np.argmax(np.abs(col) > 1e-8 * np.max(np.abs(col)))]
        if lead < 0:
            vecs[:, j] = -col
    lam = np.where(np.abs(lam) < 1e-12, 0.0, lam)
    _cache_store(G, k, full, lam, vecs)
    return lam, vecs


def _cache_key(G, k, full):
    A = G.matrix.tocsr()
    hsh = hashlib.sha256()
    hsh.update(A.data.tobytes())
    hsh.update(A.indices.tobytes())
    hsh.update(A.indptr.tobytes())
    hsh.update(G.mass.tobytes())
    hsh.update(f"{k}:{full}".encode())
    return hsh.hexdigest()[:32]


def _cache_load(G, k, full):
    root = os.environ.get("CDCALC_CACHE")
    if not root:
        return None
    path = os.path.join(root, _cache_key(G, k, full) + ".npz")
    if not os.path.exists(path):
        return None
    data = np.load(path)
    return data["eigenvalues"], data["eigenbasis"]


def _cache_store(G, k, full, lam, vecs):
    root = os.environ.get("CDCALC_CACHE")
    if not root:
        return
    os.makedirs(root, exist_ok=True)
    path = os.path.join(root, _cache_key(G, k, full) + ".npz")
    np.savez(path, eigenvalues=lam, eigenbasis=vecs)


def save_function(path, values, G: DiscreteGenerator):
    """Lattice function to flat binary with a JSON header line."""
    header = {
        "dims": list(G.shape),
        "box": list(G.box),
        "mass": "float64",
        "dtype": "float64",
        "label": G.label,
    }
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if values.size != G.n:
        raise ValueError("function size does not match lattice")
    with open(path, "wb") as fh:
        fh.write((json.dumps(header) + "\n").encode())
        fh.write(values.tobytes())
        fh.write(G.mass.astype(np.float64).tobytes())


def load_function(path):
    """Read back a lattice function: (values, mass, header dict)."""
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        n = int(np.prod(header["dims"]))
        raw = fh.read()
    values = np.frombuffer(raw[: 8 * n], dtype=np.float64).copy()
    mass = np.frombuffer(raw[8 * n : 16 * n], dtype=np.float64).copy()
    return values, mass, header
