"""Carnot-Caratheodory distance, ball volumes, and horizontal perimeter.

All operations here are specific to the Heisenberg model H^3 with the
symmetric frame; the closed-form distance from `kernels` serves as the
oracle for the control-based optimizer and drives the Monte Carlo volume
computation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .report import InequalityReport


@dataclass
class HorizontalPath:
    """Piecewise-constant control path on [0, 1] in the Heisenberg group.

    ``controls`` has shape (K, 2); segment k steers (x', y') = controls[k]
    and the vertical coordinate follows z' = (x y' - y x')/2.  The path is
    subunit after normalizing controls to the unit disc.
    """

    controls: np.ndarray
    start: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        self.controls = np.asarray(self.controls, dtype=float).reshape(-1, 2)

    @property
    def segments(self):
        return self.controls.shape[0]

    def endpoint(self):
        """Exact endpoint: x, y are piecewise linear, z integrates exactly."""
        k = self.segments
        dt = 1.0 / k
        x, y, z = self.start
        for a, b in self.controls:
            z += 0.5 * (x * b - y * a) * dt
            x += a * dt
            y += b * dt
        return (x, y, z)

    def energy(self):
        return float(np.sum(self.controls**2)) / self.segments

    def length(self):
        return float(np.sum(np.hypot(*self.controls.T))) / self.segments

    def max_speed(self):
        return float(np.max(np.hypot(*self.controls.T)))


def _arc_controls(target, k):
    """Controls along the closed-form geodesic candidate to `target`."""
    x, y, z = (float(v) for v in target)
    r = np.hypot(x, y)
    ts = (np.arange(k) + 0.5) / k
    if abs(z) < 1e-14:
        return np.tile([x, y], (k, 1))
    if r < 1e-12:
        rho = np.sqrt(abs(z) / np.pi)
        sgn = np.sign(z)
        w = 2 * np.pi * rho * np.exp(1j * (2 * np.pi * ts * sgn))
        return np.stack([w.real, w.imag], axis=1)
    from .kernels import cc_distance_origin  # closed-form turning angle

    d = cc_distance_origin(target)
    # recover psi from d = psi * r / sin(psi)
    from scipy.optimize import brentq

    psi = brentq(
        lambda p: p / np.sin(p) - d / r, 1e-9, np.pi - 1e-9
    )
    omega = 2.0 * psi * np.sign(z)
    v = omega * (x + 1j * y) / (np.exp(1j * omega) - 1.0)
    w = v * np.exp(1j * omega * ts)
    return np.stack([w.real, w.imag], axis=1)


def cc_distance(x, y, segments=16, starts=3, seed=0, endpoint_tol=1e-6):
    """Upper bound on d(x, y) by optimizing piecewise-constant controls.

    Minimizes the control energy subject to the endpoint constraint
    (SLSQP, multi-start); the minimizer has constant speed so the length
    equals sqrt(energy).  Raises if no start reaches the endpoint within
    ``endpoint_tol``.
    """
    target = kernels.multiply(kernels.inverse(tuple(x)), tuple(y))
    tx = np.asarray(target, dtype=float)
    if np.allclose(tx, 0.0, atol=1e-14):
        return 0.0
    k = segments
    rng = np.random.default_rng(seed)

    def endpoint_gap(u):
        p = HorizontalPath(u.reshape(k, 2))
        return np.asarray(p.endpoint()) - tx

    def energy(u):
        return float(np.sum(u**2)) / k

    inits = [_arc_controls(target, k).reshape(-1)]
    scale = max(1.0, np.linalg.norm(tx[:2]) + np.sqrt(abs(tx[2])))
    for _ in range(max(0, starts - 1)):
        inits.append(
            inits[0] + 0.3 * scale * rng.standard_normal(2 * k)
        )
    best = None
    for u0 in inits:
        res = minimize(
            energy,
            u0,
            method="SLSQP",
            constraints=[{"type": "eq", "fun": endpoint_gap}],
            options={"maxiter": 400, "ftol": 1e-14},
        )
        gap = np.linalg.norm(endpoint_gap(res.x))
        if gap <= endpoint_tol:
            val = np.sqrt(energy(res.x))
            if best is None or val < best:
                best = val
    if best is None:
        raise RuntimeError(
            f"control optimizer failed to reach endpoint {target}"
        )
    return float(best)


_GAUGE_LIP = None


def _gauge_lipschitz():
    """sup sqrt(Gamma(N)) for the Koranyi gauge N = ((x^2+y^2)^2+16 z^2)^{1/4}.

    Gamma(N) is homogeneous of degree 0; the supremum is estimated once on
    a dense angular sample and cached.
    """
    global _GAUGE_LIP
    if _GAUGE_LIP is None:
        th = np.linspace(0, 2 * np.pi, 721)
        al = np.linspace(-np.pi / 2 + 1e-6, np.pi / 2 - 1e-6, 721)
        T, A = np.meshgrid(th, al, indexing="ij")
        c = np.sqrt(np.cos(A))
        x, y, z = c * np.cos(T), c * np.sin(T), 0.25 * np.sin(A)
        n4 = (x**2 + y**2) ** 2 + 16 * z**2
        nx = (4 * (x**2 + y**2) * x) / (4 * n4 ** 0.75)
        ny = (4 * (x**2 + y**2) * y) / (4 * n4 ** 0.75)
        nz = 32 * z / (4 * n4 ** 0.75)
        gx = nx - 0.5 * y * nz
        gy = ny + 0.5 * x * nz
        _GAUGE_LIP = float(np.sqrt(np.max(gx**2 + gy**2)))
    return _GAUGE_LIP


def gauge(g):
    x, y, z = g
    return ((x * x + y * y) ** 2 + 16.0 * z * z) ** 0.25


def lipschitz_lower_bound(x, y):
    """Lower bound on d(x, y) from horizontally 1-Lipschitz test functions.

    Uses the linear functions u.(x, y) (exactly 1-Lipschitz) and the
    Koranyi gauge scaled by its Lipschitz constant.
    """
    rel = kernels.multiply(kernels.inverse(tuple(x)), tuple(y))
    planar = float(np.hypot(rel[0], rel[1]))
    gauge_bound = gauge(rel) / _gauge_lipschitz()
    return max(planar, gauge_bound)


def ball_volume(center, r, samples=100_000, seed=12345):
    """Monte Carlo volume of the CC ball B(center, r) on H^3.

    Counter-based RNG (Philox) keyed by the seed, so the estimate is
    reproducible regardless of evaluation order.  Returns
    (volume, standard_error).  Membership uses the closed-form distance
    (validated against the control optimizer), sampled in the bounding
    box |x|,|y| <= r, |z| <= r^2/2.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    rng = np.random.Generator(np.random.Philox(key=seed))
    pts = rng.random((samples, 3))
    pts[:, 0] = (2 * pts[:, 0] - 1) * r
    pts[:, 1] = (2 * pts[:, 1] - 1) * r
    pts[:, 2] = (2 * pts[:, 2] - 1) * (r * r / 2.0)
    box_vol = (2 * r) * (2 * r) * (r * r)
    d = kernels.cc_distance_origin_grid(pts[:, 0], pts[:, 1], pts[:, 2])
    inside = d <= r
    p = inside.mean()
    vol = p * box_vol
    stderr = box_vol * np.sqrt(max(p * (1 - p), 1e-12) / samples)
    return float(vol), float(stderr)


@dataclass
class CandidateSet:
    """Smoothly bounded test set for perimeter and isoperimetry.

    kinds: 'gauge-ball' (Koranyi ball of radius R), 'tube' (vertical
    cylinder of radius rho and half-height H), 'box' (|x|<=a, |y|<=b,
    |z|<=c).
    """

    kind: str
    params: dict

    def dilate(self, lam):
        p = dict(self.params)
        if self.kind == "gauge-ball":
            p["R"] = self.params["R"] * lam
        elif self.kind == "tube":
            p["rho"] = self.params["rho"] * lam
            p["H"] = self.params["H"] * lam * lam
        elif self.kind == "box":
            p["a"] = self.params["a"] * lam
            p["b"] = self.params["b"] * lam
            p["c"] = self.params["c"] * lam * lam
        else:
            raise ValueError(self.kind)
        return CandidateSet(self.kind, p)

    def volume(self):
        """Exact Lebesgue volume (closed forms)."""
        if self.kind == "gauge-ball":
            return np.pi**2 * self.params["R"] ** 4 / 8.0
        if self.kind == "tube":
            return 2 * np.pi * self.params["rho"] ** 2 * self.params["H"]
        if self.kind == "box":
            return 8 * self.params["a"] * self.params["b"] * self.params["c"]
        raise ValueError(self.kind)

    def contains(self, xs, ys, zs):
        if self.kind == "gauge-ball":
            R = self.params["R"]
            return (xs**2 + ys**2) ** 2 + 16 * zs**2 <= R**4
        if self.kind == "tube":
            rho, H = self.params["rho"], self.params["H"]
            return (xs**2 + ys**2 <= rho**2) & (np.abs(zs) <= H)
        if self.kind == "box":
            a, b, c = self.params["a"], self.params["b"], self.params["c"]
            return (np.abs(xs) <= a) & (np.abs(ys) <= b) & (np.abs(zs) <= c)
        raise ValueError(self.kind)

    def bounding_box(self):
        if self.kind == "gauge-ball":
            R = self.params["R"]
            return (R, R, R * R / 4.0)
        if self.kind == "tube":
            return (self.params["rho"], self.params["rho"], self.params["H"])
        if self.kind == "box":
            return (self.params["a"], self.params["b"], self.params["c"])
        raise ValueError(self.kind)

    def patches(self, m):
        """Boundary quadrature patches: list of (points, normals, weights).

        points (n,3), unit Euclidean normals (n,3), surface weights (n,).
        Gauss-Legendre in the non-periodic parameter, trapezoid in the
        angular one.
        """
        if self.kind == "gauge-ball":
            return [_gauge_ball_patch(self.params["R"], m)]
        if self.kind == "tube":
            return _tube_patches(self.params["rho"], self.params["H"], m)
        if self.kind == "box":
            return _box_patches(
                self.params["a"], self.params["b"], self.params["c"], m
            )
        raise ValueError(self.kind)


def _gauge_ball_patch(R, m):
    # boundary: x = R c(al) cos th, y = R c(al) sin th, z = (R^2/4) sin al
    # with c(al) = cos(al)^(1/2), so (x^2+y^2)^2 + 16 z^2 = R^4 exactly;
    # al in (-pi/2, pi/2), th in [0, 2 pi).
    nodes, wts = np.polynomial.legendre.leggauss(m)
    al = nodes * (np.pi / 2)
    wal = wts * (np.pi / 2)
    th = 2 * np.pi * np.arange(2 * m) / (2 * m)
    wth = np.full(2 * m, 2 * np.pi / (2 * m))
    A, T = np.meshgrid(al, th, indexing="ij")
    WA, WT = np.meshgrid(wal, wth, indexing="ij")
    c = np.cos(A) ** 0.5
    x = R * c * np.cos(T)
    y = R * c * np.sin(T)
    z = (R * R / 4.0) * np.sin(A)
    # tangents
    dc = -0.5 * np.sin(A) * np.cos(A) ** -0.5
    px = np.stack(
        [R * dc * np.cos(T), R * dc * np.sin(T), (R * R / 4) * np.cos(A)],
        axis=-1,
    )
    pt = np.stack([-R * c * np.sin(T), R * c * np.cos(T), 0 * A], axis=-1)
    nrm = np.cross(px, pt)
    area = np.linalg.norm(nrm, axis=-1)
    unit = nrm / np.maximum(area, 1e-300)[..., None]
    pts = np.stack([x, y, z], axis=-1).reshape(-1, 3)
    return (
        pts,
        unit.reshape(-1, 3),
        (area * WA * WT).reshape(-1),
    )


def _tube_patches(rho, H, m):
    # lateral surface
    th = 2 * np.pi * np.arange(2 * m) / (2 * m)
    nodes, wts = np.polynomial.legendre.leggauss(m)
    zs = nodes * H
    wz = wts * H
    T, Z = np.meshgrid(th, zs, indexing="ij")
    WT, WZ = np.meshgrid(np.full(2 * m, 2 * np.pi / (2 * m)) * rho, wz, indexing="ij")
    lat_pts = np.stack(
        [rho * np.cos(T), rho * np.sin(T), Z], axis=-1
    ).reshape(-1, 3)
    lat_nrm = np.stack(
        [np.cos(T), np.sin(T), 0 * T], axis=-1
    ).reshape(-1, 3)
    lat_w = (WT * WZ).reshape(-1)
    patches = [(lat_pts, lat_nrm, lat_w)]
    # caps
    rr = 0.5 * rho * (nodes + 1.0)
    wr = 0.5 * rho * wts
    Rg, T2 = np.meshgrid(rr, th, indexing="ij")
    WR, WT2 = np.meshgrid(wr, np.full(2 * m, 2 * np.pi / (2 * m)), indexing="ij")
    for sgn in (+1.0, -1.0):
        pts = np.stack(
            [Rg * np.cos(T2), Rg * np.sin(T2), np.full_like(Rg, sgn * H)],
            axis=-1,
        ).reshape(-1, 3)
        nrm = np.tile([0.0, 0.0, sgn], (pts.shape[0], 1))
        w = (Rg * WR * WT2).reshape(-1)
        patches.append((pts, nrm, w))
    return patches


def _box_patches(a, b, c, m):
    nodes, wts = np.polynomial.legendre.leggauss(m)
    patches = []
    for axis, (h1, h2, hn) in enumerate([(b, c, a), (a, c, b), (a, b, c)]):
        u = nodes * h1
        wu = wts * h1
        v = nodes * h2
        wv = wts * h2
        U, V = np.meshgrid(u, v, indexing="ij")
        WU, WV = np.meshgrid(wu, wv, indexing="ij")
        for sgn in (+1.0, -1.0):
            coords = [None, None, None]
            others = [i for i in range(3) if i != axis]
            coords[axis] = np.full_like(U, sgn * hn)
            coords[others[0]] = U
            coords[others[1]] = V
            pts = np.stack(coords, axis=-1).reshape(-1, 3)
            nrm = np.zeros_like(pts)
            nrm[:, axis] = sgn
            patches.append((pts, nrm, (WU * WV).reshape(-1)))
    return patches


def _horizontal_normal_length(pts, normals):
    """|N_H| = |(X.n, Y.n)| for the H^3 frame at each boundary point."""
    x, y = pts[:, 0], pts[:, 1]
    n1, n2, n3 = normals[:, 0], normals[:, 1], normals[:, 2]
    gx = n1 - 0.5 * y * n3
    gy = n2 + 0.5 * x * n3
    return np.hypot(gx, gy)


def horizontal_perimeter(E: CandidateSet, resolution=64, rich_tol=1e-3):
    """P(E) = surface integral of |N_H|, Richardson-checked.

    Evaluates the quadrature at `resolution` and 2*`resolution`; raises if
    the two disagree beyond `rich_tol` relatively.
    """

    def quad(m):
        total = 0.0
        for pts, nrm, w in E.patches(m):
            total += float(np.sum(_horizontal_normal_length(pts, nrm) * w))
        return total

    coarse, fine = quad(resolution), quad(2 * resolution)
    if abs(fine - coarse) > rich_tol * max(1.0, abs(fine)):
        raise RuntimeError(
            f"perimeter quadrature not converged: {coarse} vs {fine}"
        )
    return fine


def mollified_perimeter(E: CandidateSet, grid=160, widths=(2.0, 3.0)):
    """BV-style oracle: integral of sqrt(Gamma(f_eps)) for a mollified
    indicator, extrapolated linearly from two mollification widths
    (in units of the grid spacing)."""
    from scipy.ndimage import gaussian_filter

    bx, by, bz = E.bounding_box()
    pad = 1.35
    xs = np.linspace(-pad * bx, pad * bx, grid)
    ys = np.linspace(-pad * by, pad * by, grid)
    zs = np.linspace(-pad * bz, pad * bz, grid)
    X, Y, Z = np.meshgrid(xs, ys, zs, indexing="ij")
    ind = E.contains(X, Y, Z).astype(float)
    h = (xs[1] - xs[0], ys[1] - ys[0], zs[1] - zs[0])
    hmax = max(h)
    vals = []
    for w in widths:
        # equal physical mollification width on every axis
        sig = (w * hmax / h[0], w * hmax / h[1], w * hmax / h[2])
        f = gaussian_filter(ind, sigma=sig, mode="constant")
        fx = np.gradient(f, h[0], axis=0)
        fy = np.gradient(f, h[1], axis=1)
        fz = np.gradient(f, h[2], axis=2)
        gx = fx - 0.5 * Y * fz
        gy = fy + 0.5 * X * fz
        tv = np.sqrt(gx**2 + gy**2).sum() * h[0] * h[1] * h[2]
        vals.append(tv)
    # linear extrapolation in the width to zero mollification
    w0, w1 = widths
    return float(vals[0] + (vals[0] - vals[1]) * w0 / (w1 - w0))


def check_isoperimetric(sets, D=4, tolerance=0.02, resolution=48):
    """Thm-2.5-(4)-type ratio mu(E)^{(D-1)/D} / P(E) over a set family.

    Reports the maximal relative deviation of the ratio from the family
    mean; for dilated gauge balls the ratio is scale-invariant.
    """
    if D != 4:
        raise ValueError("homogeneous dimension must be 4 for H^3")
    ratios = []
    for E in sets:
        vol = E.volume()
        per = horizontal_perimeter(E, resolution=resolution)
        ratios.append(vol ** ((D - 1) / D) / per)
    ratios = np.asarray(ratios)
    ref = float(np.mean(ratios))
    dev = np.abs(ratios / ref - 1.0)
    worst = int(np.argmax(dev))
    return InequalityReport(
        name="isoperimetric-ratio",
        params={"D": D},
        witnesses=len(sets),
        max_violation=float(np.max(dev)),
        worst_case={"set_index": worst, "ratio": float(ratios[worst])},
        tolerance=tolerance,
        details={"ratios": [float(r) for r in ratios]},
    )


def discrete_perimeter(G, indicator):
    """Lattice perimeter: L^1(mass) norm of sqrt(discrete Gamma(1_E))."""
    g = np.maximum(G.gamma(np.asarray(indicator, dtype=float)), 0.0)
    return float(np.sum(G.mass * np.sqrt(g)))
