"""Named hypersurface patches with analytic jets."""
from __future__ import annotations

import numpy as np

from .lift import EUCLIDEAN, SPHERE, HypersurfacePatch, Jet

POLE_MARGIN = 0.15


def sphere_chart(angles):
    """Hyperspherical chart of S^m and its derivatives.

    ``angles`` has shape (B, m); returns y (B, m+1) and dy (B, m, m+1).
    The first m-1 angles range over (0, pi), the last over [0, 2 pi).
    """
    a = np.atleast_2d(np.asarray(angles, dtype=float))
    b, m = a.shape
    s, c = np.sin(a), np.cos(a)
    fac = np.ones((b, m + 1, m))
    dfac = np.zeros((b, m + 1, m))
    for k in range(m + 1):
        for j in range(m):
            if j < k:
                fac[:, k, j], dfac[:, k, j] = s[:, j], c[:, j]
            elif j == k:
                fac[:, k, j], dfac[:, k, j] = c[:, j], -s[:, j]
    y = np.prod(fac, axis=2)
    dy = np.empty((b, m, m + 1))
    for j in range(m):
        f2 = fac.copy()
        f2[:, :, j] = dfac[:, :, j]
        dy[:, j] = np.prod(f2, axis=2)
    return y, dy


def sphere_domain(m: int, margin: float = POLE_MARGIN):
    dom = [(margin, np.pi - margin)] * (m - 1) + [(0.0, 2 * np.pi)]
    per = (False,) * (m - 1) + (True,)
    return dom, per


def _patch(ambient, n, domain, jet_fn, periodic, name, params):
    frame = lambda u: (lambda j: (j.f, j.xi))(jet_fn(u))
    return HypersurfacePatch(ambient, n, domain, frame, jet_fn, periodic, name, params)


def sphere(a: float = 1.0, n: int = 3, center=None) -> HypersurfacePatch:
    """Round hypersphere of radius ``a`` in R^n, normal pointing inward."""
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)

    def jet(u):
        y, dy = sphere_chart(u)
        return Jet(c + a * y, -y, a * dy, -dy)

    dom, per = sphere_domain(n - 1)
    return _patch(EUCLIDEAN, n, dom, jet, per, "sphere", {"a": a, "n": n})


def plane(n: int = 3, half_width: float = 1.0) -> HypersurfacePatch:
    def jet(u):
        b = len(u)
        f = np.hstack([u, np.zeros((b, 1))])
        xi = np.zeros((b, n))
        xi[:, -1] = 1.0
        df = np.broadcast_to(np.eye(n - 1, n), (b, n - 1, n)).copy()
        return Jet(f, xi, df, np.zeros_like(df))

    dom = [(-half_width, half_width)] * (n - 1)
    return _patch(EUCLIDEAN, n, dom, jet, (), "plane", {"n": n})


def circle_profile(R: float = 2.0, a: float = 0.5) -> HypersurfacePatch:
    """Circle (a sin t) u1 + (R + a cos t) u2 in R^2, normal toward its center."""

    def jet(u):
        t = u[:, 0]
        s, c = np.sin(t), np.cos(t)
        f = np.stack([a * s, R + a * c], axis=1)
        xi = -np.stack([s, c], axis=1)
        df = np.stack([a * c, -a * s], axis=1)[:, None, :]
        dxi = -np.stack([c, -s], axis=1)[:, None, :]
        return Jet(f, xi, df, dxi)

    return _patch(EUCLIDEAN, 2, [(0.0, 2 * np.pi)], jet, (True,), "circle_profile", {"R": R, "a": a})


def circle(radius: float = 1.0, center=(0.0, 0.0)) -> HypersurfacePatch:
    """Circle of R^2 centered at ``center``, normal toward the center."""
    c0 = np.asarray(center, dtype=float)

    def jet(u):
        t = u[:, 0]
        y = np.stack([np.cos(t), np.sin(t)], axis=1)
        dy = np.stack([-np.sin(t), np.cos(t)], axis=1)[:, None, :]
        return Jet(c0 + radius * y, -y, radius * dy, -dy)

    return _patch(EUCLIDEAN, 2, [(0.0, 2 * np.pi)], jet, (True,), "circle",
                  {"radius": radius, "center": list(c0)})


def ellipse_profile(a: float = 0.6, b: float = 0.3, offset: float = 2.0) -> HypersurfacePatch:
    """Ellipse (a cos t) u1 + (offset + b sin t) u2, inward normal. Not Dupin
    as a curve; used for generic (non-circular) constructions."""

    def jet(u):
        t = u[:, 0]
        s, c = np.sin(t), np.cos(t)
        f = np.stack([a * c, offset + b * s], axis=1)
        tan = np.stack([-a * s, b * c], axis=1)
        nrm = np.linalg.norm(tan, axis=1)[:, None]
        xi = -np.stack([b * c, a * s], axis=1) / nrm
        df = tan[:, None, :]
        # derivative of the unit normal: -(N' - (N'.n) n)/|N| with N = (b c, a s)
        dn = np.stack([-b * s, a * c], axis=1)
        nn = -xi
        dxi = -(dn - np.sum(dn * nn, axis=1)[:, None] * nn) / nrm
        return Jet(f, xi, df, dxi[:, None, :])

    return _patch(EUCLIDEAN, 2, [(0.0, 2 * np.pi)], jet, (True,), "ellipse_profile",
                  {"a": a, "b": b, "offset": offset})


def torus(R: float = 2.0, a: float = 0.5) -> HypersurfacePatch:
    """Torus of revolution about the third axis; normal toward the core circle.

    Principal curvatures: 1/a and cos t / (R + a cos t).
    """

    def jet(u):
        t, th = u[:, 0], u[:, 1]
        ct, st, cp, sp = np.cos(t), np.sin(t), np.cos(th), np.sin(th)
        rho = R + a * ct
        f = np.stack([rho * cp, rho * sp, a * st], axis=1)
        xi = -np.stack([ct * cp, ct * sp, st], axis=1)
        f_t = np.stack([-a * st * cp, -a * st * sp, a * ct], axis=1)
        f_th = np.stack([-rho * sp, rho * cp, np.zeros_like(t)], axis=1)
        xi_t = -np.stack([-st * cp, -st * sp, ct], axis=1)
        xi_th = -np.stack([-ct * sp, ct * cp, np.zeros_like(t)], axis=1)
        return Jet(f, xi, np.stack([f_t, f_th], axis=1), np.stack([xi_t, xi_th], axis=1))

    return _patch(EUCLIDEAN, 3, [(0.0, 2 * np.pi)] * 2, jet, (True, True), "torus", {"R": R, "a": a})


def torus_curvatures(R: float, a: float, t) -> np.ndarray:
    """Analytic principal curvatures of ``torus(R, a)``, ascending per row."""
    t = np.asarray(t, dtype=float)
    k = np.stack([np.cos(t) / (R + a * np.cos(t)), np.full_like(t, 1.0 / a)], axis=-1)
    return np.sort(k, axis=-1)


def ellipsoid(a: float = 1.0, b: float = 2.0, c: float = 3.0) -> HypersurfacePatch:
    """Triaxial ellipsoid, inward normal, chart avoiding the poles."""
    axes = np.array([a, b, c])

    def jet(u):
        th, ph = u[:, 0], u[:, 1]
        st, ct, sp, cp = np.sin(th), np.cos(th), np.sin(ph), np.cos(ph)
        y = np.stack([st * cp, st * sp, ct], axis=1)
        dy = np.stack([np.stack([ct * cp, ct * sp, -st], axis=1),
                       np.stack([-st * sp, st * cp, np.zeros_like(th)], axis=1)], axis=1)
        f = axes * y
        df = axes * dy
        big_n = y / axes              # gradient of the defining quadric, up to 2
        dn = dy / axes
        nrm = np.linalg.norm(big_n, axis=1)[:, None]
        nhat = big_n / nrm
        proj = dn - np.einsum("bid,bd->bi", dn, nhat)[..., None] * nhat[:, None, :]
        return Jet(f, -nhat, df, -proj / nrm[:, :, None])

    dom = [(POLE_MARGIN, np.pi - POLE_MARGIN), (0.0, 2 * np.pi)]
    return _patch(EUCLIDEAN, 3, dom, jet, (False, True), "ellipsoid", {"a": a, "b": b, "c": c})


def product_of_spheres(k: int = 1, n: int = 3, r: float = 0.6, s: float = 0.8) -> HypersurfacePatch:
    """S^k(r) x S^{n-k-1}(s) in S^n with r^2 + s^2 = 1.

    Principal curvatures -s/r (multiplicity k) and r/s (multiplicity n-k-1).
    """
    if not 1 <= k <= n - 2:
        raise ValueError("need 1 <= k <= n-2")
    if abs(r * r + s * s - 1) > 1e-12:
        raise ValueError("r^2 + s^2 must equal 1")
    q = n - k - 1

    def jet(u):
        p, dp = sphere_chart(u[:, :k])
        w, dw = sphere_chart(u[:, k:])
        b = len(u)
        f = np.hstack([r * p, s * w])
        xi = np.hstack([s * p, -r * w])
        df = np.zeros((b, n - 1, n + 1))
        dxi = np.zeros_like(df)
        df[:, :k, : k + 1] = r * dp
        df[:, k:, k + 1:] = s * dw
        dxi[:, :k, : k + 1] = s * dp
        dxi[:, k:, k + 1:] = -r * dw
        return Jet(f, xi, df, dxi)

    d1, p1 = sphere_domain(k)
    d2, p2 = sphere_domain(q)
    return _patch(SPHERE, n, d1 + d2, jet, p1 + p2, "product_of_spheres",
                  {"k": k, "n": n, "r": r, "s": s})


def clifford_cone(p: int = 1, t_range=(1.0, 2.0)) -> HypersurfacePatch:
    """Cone over S^p(1/sqrt 2) x S^p(1/sqrt 2) in R^{2p+2}.

    Curvatures 1/t, -1/t (multiplicity p each) and 0 along the rays.
    """
    n = 2 * p + 2
    rt = 1 / np.sqrt(2)

    def jet(u):
        t = u[:, :1]
        a, da = sphere_chart(u[:, 1: p + 1])
        c, dc = sphere_chart(u[:, p + 1:])
        b = len(u)
        y = rt * np.hstack([a, c])
        xi = rt * np.hstack([a, -c])
        df = np.zeros((b, n - 1, n))
        dxi = np.zeros_like(df)
        df[:, 0] = y
        df[:, 1: p + 1, : p + 1] = t[:, :, None] * rt * da
        df[:, p + 1:, p + 1:] = t[:, :, None] * rt * dc
        dxi[:, 1: p + 1, : p + 1] = rt * da
        dxi[:, p + 1:, p + 1:] = -rt * dc
        return Jet(t * y, xi, df, dxi)

    d1, p1 = sphere_domain(p)
    return _patch(EUCLIDEAN, n, [tuple(t_range)] + d1 + d1, jet, (False,) + p1 + p1,
                  "clifford_cone", {"p": p})
