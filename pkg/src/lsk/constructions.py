"""Dupin-preserving constructions: surface of revolution, cylinder, tube.

Each construction maps a patch in R^n to a patch in R^{n+m} (or R^{n+k}),
composing analytic jets by the chain rule when the input has them. R^n sits
in the bigger space as the span of the first n coordinates u_1..u_n; the
revolution axis is span{u_1, ..., u_{n-1}}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import principal_curvatures
from .generators import sphere_chart, sphere_domain
from .lift import EUCLIDEAN, HypersurfacePatch, Jet, euclidean_frame
from .model import projectively_equal


class FocalDistanceError(ValueError):
    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point


@dataclass(frozen=True)
class RevolutionSpec:
    m: int = 1

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("fiber sphere dimension m must be >= 1")


def _require_euclidean(patch):
    if patch.ambient != EUCLIDEAN:
        raise ValueError(f"construction needs a patch in R^n, got {patch.ambient}")


def _base_jet(patch, x):
    return patch.jet(x)


def surface_of_revolution(patch: HypersurfacePatch, spec: RevolutionSpec = RevolutionSpec()) -> HypersurfacePatch:
    """F(x, y) = fhat(x) + f_n(x) y,  eta(x, y) = xihat(x) + xi_n(x) y,  y in S^m."""
    _require_euclidean(patch)
    n, m, d = patch.n, spec.m, patch.dim

    def jet(u):
        x, ang = u[:, :d], u[:, d:]
        j = _base_jet(patch, x)
        y, dy = sphere_chart(ang)
        b = len(u)
        fn, xn = j.f[:, -1:], j.xi[:, -1:]
        f = np.hstack([j.f[:, :-1], fn * y])
        xi = np.hstack([j.xi[:, :-1], xn * y])
        df = np.zeros((b, d + m, n + m))
        dxi = np.zeros_like(df)
        df[:, :d, : n - 1] = j.df[:, :, :-1]
        df[:, :d, n - 1:] = j.df[:, :, -1:] * y[:, None, :]
        df[:, d:, n - 1:] = fn[:, :, None] * dy
        dxi[:, :d, : n - 1] = j.dxi[:, :, :-1]
        dxi[:, :d, n - 1:] = j.dxi[:, :, -1:] * y[:, None, :]
        dxi[:, d:, n - 1:] = xn[:, :, None] * dy
        return Jet(f, xi, df, dxi)

    frame = lambda u: (lambda j: (j.f, j.xi))(jet(u))
    fdom, fper = sphere_domain(m)
    return HypersurfacePatch(
        EUCLIDEAN, n + m, patch.domain + tuple(fdom), frame, jet,
        patch.periodic + tuple(fper), name=f"revolve({patch.name}, m={m})",
        params={"profile": patch.name, **patch.params, "m": m},
        meta={"construction": "revolution", "profile": patch, "fiber_dim": m},
    )


def cylinder(patch: HypersurfacePatch, k: int = 1, half_length: float = 1.0) -> HypersurfacePatch:
    """F(x, t) = f(x) + sum t_j u_{n+j}, eta = xi; adds curvature 0 (multiplicity k)."""
    _require_euclidean(patch)
    if k < 1:
        raise ValueError("k must be >= 1")
    n, d = patch.n, patch.dim

    def jet(u):
        x, t = u[:, :d], u[:, d:]
        j = _base_jet(patch, x)
        b = len(u)
        f = np.hstack([j.f, t])
        xi = np.hstack([j.xi, np.zeros((b, k))])
        df = np.zeros((b, d + k, n + k))
        dxi = np.zeros_like(df)
        df[:, :d, :n] = j.df
        df[:, d:, n:] = np.eye(k)
        dxi[:, :d, :n] = j.dxi
        return Jet(f, xi, df, dxi)

    frame = lambda u: (lambda j: (j.f, j.xi))(jet(u))
    return HypersurfacePatch(
        EUCLIDEAN, n + k, patch.domain + ((-half_length, half_length),) * k, frame, jet,
        patch.periodic + (False,) * k, name=f"cylinder({patch.name}, k={k})",
        params={"profile": patch.name, **patch.params, "k": k},
        meta={"construction": "cylinder", "profile": patch, "fiber_dim": k},
    )


def focal_check(patch: HypersurfacePatch, eps: float, resolution: int = 16) -> None:
    """Raise FocalDistanceError at the first grid point with eps |kappa| >= 1."""
    grid = patch.grid(resolution).reshape(-1, patch.dim)
    kap = principal_curvatures(patch, grid)
    bad = np.max(np.abs(kap), axis=1) * eps >= 1.0
    if np.any(bad):
        i = int(np.argmax(bad))
        raise FocalDistanceError(
            f"tube radius {eps} reaches a focal point at u = {grid[i]} "
            f"(focal distance {1 / np.max(np.abs(kap[i])):.6g})", grid[i])


def tube(patch: HypersurfacePatch, eps: float, k: int = 1, check_resolution: int = 16) -> HypersurfacePatch:
    """Tube of radius eps about f(M) in R^{n+k}.

    F(x, y) = f(x) + eps w, eta = w with w = y_0 xi(x) + sum_j y_j u_{n+j}
    and y in S^k. The new principal curvature is -1/eps (multiplicity k).
    """
    _require_euclidean(patch)
    if eps <= 0:
        raise ValueError("tube radius must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    focal_check(patch, eps, check_resolution)
    n, d = patch.n, patch.dim

    def jet(u):
        x, ang = u[:, :d], u[:, d:]
        j = _base_jet(patch, x)
        y, dy = sphere_chart(ang)
        b = len(u)
        w = np.hstack([y[:, :1] * j.xi, y[:, 1:]])
        dw = np.zeros((b, d + k, n + k))
        dw[:, :d, :n] = y[:, :1, None] * j.dxi
        dw[:, d:, :n] = dy[:, :, :1] * j.xi[:, None, :]
        dw[:, d:, n:] = dy[:, :, 1:]
        df = eps * dw
        df[:, :d, :n] += j.df
        return Jet(np.hstack([j.f, np.zeros((b, k))]) + eps * w, w, df, dw)

    frame = lambda u: (lambda j: (j.f, j.xi))(jet(u))
    fdom, fper = sphere_domain(k)
    return HypersurfacePatch(
        EUCLIDEAN, n + k, patch.domain + tuple(fdom), frame, jet,
        patch.periodic + tuple(fper), name=f"tube({patch.name}, eps={eps}, k={k})",
        params={"profile": patch.name, **patch.params, "eps": eps, "k": k},
        meta={"construction": "tube", "profile": patch, "fiber_dim": k, "eps": eps},
    )


def new_sphere_pair(patch: HypersurfacePatch, u) -> np.ndarray:
    """Pencil pairs (r, s) of the construction's new curvature sphere, w.r.t. (K1, K2).

    Revolution: (xi_n, -f_n) evaluated on the profile; tube: (-1/eps, 1);
    cylinder: (0, 1).
    """
    kind = patch.meta.get("construction")
    u = patch._as_batch(u)
    if kind == "revolution":
        prof = patch.meta["profile"]
        j = prof.jet(u[:, : prof.dim])
        return np.stack([j.xi[:, -1], -j.f[:, -1]], axis=1)
    if kind == "tube":
        return np.tile([-1.0 / patch.meta["eps"], 1.0], (len(u), 1))
    if kind == "cylinder":
        return np.tile([0.0, 1.0], (len(u), 1))
    raise ValueError(f"patch {patch.name!r} is not a construction output")


def predicted_curvature_spheres(profile_pairs, K1, K2, f_n: float, xi_n: float, tol: float = 1e-10) -> list:
    """Curvature spheres of a surface of revolution at one point (x, y).

    ``profile_pairs`` are the profile's pencil pairs (r, s) at x; K1, K2 the
    lift of the revolved patch at (x, y). The new sphere
    [xi_n K1 - f_n K2] comes first unless it coincides with an inherited one.
    """
    if f_n == 0 and xi_n == 0:
        raise ValueError("f_n and xi_n vanish together: profile meets the axis orthogonally degenerate")
    K1 = np.asarray(K1, dtype=float)
    K2 = np.asarray(K2, dtype=float)
    inherited = [r * K1 + s * K2 for r, s in np.atleast_2d(profile_pairs)]
    new = xi_n * K1 - f_n * K2
    if any(projectively_equal(new, k, tol) for k in inherited):
        return inherited
    return [new] + inherited


def predicted_spheres_at(patch: HypersurfacePatch, u, profile_pencils=None) -> list:
    """Predicted curvature spheres of a revolved patch at each parameter."""
    from .curvature import curvature_pencils

    if patch.meta.get("construction") != "revolution":
        raise ValueError("prediction formulas apply to surfaces of revolution")
    prof = patch.meta["profile"]
    u = patch._as_batch(u)
    x = u[:, : prof.dim]
    pj = prof.jet(x)
    if profile_pencils is None:
        profile_pencils = curvature_pencils(prof, x)
    j = patch.jet(u)
    K1, K2 = euclidean_frame(j.f, j.xi)
    return [predicted_curvature_spheres(pp.pairs, K1[b], K2[b], pj.f[b, -1], pj.xi[b, -1])
            for b, pp in enumerate(profile_pencils)]
