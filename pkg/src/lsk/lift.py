"""Parametrized hypersurface patches and their Legendre lifts.

All evaluators are batched: a parameter array of shape (B, d), d = n - 1,
maps to positions and unit normals of shape (B, D) where D = n + 1 for
patches in S^n and D = n for patches in R^n. Jets carry first derivatives
along the parameter axes with shape (B, d, D).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .indefinite import inner

SPHERE = "sphere"
EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class Jet:
    f: np.ndarray
    xi: np.ndarray
    df: np.ndarray
    dxi: np.ndarray


FrameFn = Callable[[np.ndarray], tuple]
JetFn = Callable[[np.ndarray], Jet]


class PatchInvariantError(ValueError):
    pass


@dataclass(frozen=True)
class HypersurfacePatch:
    """A hypersurface patch in S^n or R^n with an explicit unit normal field.

    ``frame`` maps parameters to (f, xi). ``jet_fn``, when given, returns the
    analytic first derivatives; otherwise central differences with step
    ``fd_rel_step`` times the axis extent are used (second order one-sided
    stencils on the boundary of non-periodic axes).
    """

    ambient: str
    n: int
    domain: tuple
    frame: FrameFn = field(repr=False)
    jet_fn: Optional[JetFn] = field(default=None, repr=False)
    periodic: tuple = ()
    name: str = ""
    params: dict = field(default_factory=dict)
    fd_rel_step: float = 1e-5
    richardson: bool = False
    # arbitrary construction metadata (profile patch, fiber dims, ...)
    meta: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.ambient not in (SPHERE, EUCLIDEAN):
            raise ValueError(f"unknown ambient {self.ambient!r}")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        dom = tuple((float(a), float(b)) for a, b in self.domain)
        if len(dom) != self.n - 1:
            raise ValueError(f"domain must have n-1 = {self.n - 1} axes, got {len(dom)}")
        object.__setattr__(self, "domain", dom)
        per = tuple(self.periodic) or (False,) * len(dom)
        if len(per) != len(dom):
            raise ValueError("periodic flags must match domain axes")
        object.__setattr__(self, "periodic", per)

    @property
    def dim(self) -> int:
        return self.n - 1

    @property
    def space_dim(self) -> int:
        return self.n + 1 if self.ambient == SPHERE else self.n

    @property
    def lie_dim(self) -> int:
        return self.n + 3

    @property
    def extent(self) -> np.ndarray:
        return np.array([b - a for a, b in self.domain])

    def _as_batch(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        u = u.reshape(-1, self.dim)
        return u

    def evaluate(self, u):
        f, xi = self.frame(self._as_batch(u))
        return np.asarray(f, dtype=float), np.asarray(xi, dtype=float)

    def jet(self, u, analytic: Optional[bool] = None) -> Jet:
        u = self._as_batch(u)
        use_analytic = self.jet_fn is not None if analytic is None else analytic
        if use_analytic:
            if self.jet_fn is None:
                raise ValueError(f"patch {self.name!r} has no analytic jet")
            return self.jet_fn(u)
        return self._fd_jet(u)

    def steps(self) -> np.ndarray:
        return self.fd_rel_step * self.extent

    def _fd_jet(self, u: np.ndarray) -> Jet:
        f, xi = self.evaluate(u)
        h = self.steps()
        df = np.empty((len(u), self.dim, f.shape[1]))
        dxi = np.empty_like(df)
        for i in range(self.dim):
            df[:, i], dxi[:, i] = self._axis_derivative(u, i, h[i])
            if self.richardson:
                c_f, c_x = self._axis_derivative(u, i, h[i] / 2)
                df[:, i] = (4 * c_f - df[:, i]) / 3
                dxi[:, i] = (4 * c_x - dxi[:, i]) / 3
        return Jet(f, xi, df, dxi)

    def _axis_derivative(self, u, i, h):
        lo, hi = self.domain[i]
        e = np.zeros(self.dim)
        e[i] = h
        if self.periodic[i]:
            fwd = bwd = np.zeros(len(u), dtype=bool)
        else:
            bwd = u[:, i] - h < lo - 1e-12 * (hi - lo)
            fwd = u[:, i] + h > hi + 1e-12 * (hi - lo)
        fp, xp = self.evaluate(u + e)
        fm, xm = self.evaluate(u - e)
        d_f = (fp - fm) / (2 * h)
        d_x = (xp - xm) / (2 * h)
        if np.any(bwd):
            # one-sided forward stencil at the low boundary
            f1, x1 = fp[bwd], xp[bwd]
            f2, x2 = self.evaluate(u[bwd] + 2 * e)
            f0, x0 = self.evaluate(u[bwd])
            d_f[bwd] = (-3 * f0 + 4 * f1 - f2) / (2 * h)
            d_x[bwd] = (-3 * x0 + 4 * x1 - x2) / (2 * h)
        if np.any(fwd):
            f1, x1 = fm[fwd], xm[fwd]
            f2, x2 = self.evaluate(u[fwd] - 2 * e)
            f0, x0 = self.evaluate(u[fwd])
            d_f[fwd] = (3 * f0 - 4 * f1 + f2) / (2 * h)
            d_x[fwd] = (3 * x0 - 4 * x1 + x2) / (2 * h)
        return d_f, d_x

    def second_derivatives(self, u) -> np.ndarray:
        """Hessian of f, shape (B, d, d, D), by central differences of the jet."""
        u = self._as_batch(u)
        h = self.steps() * 10
        out = np.empty((len(u), self.dim, self.dim, self.space_dim))
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = h[j]
            out[:, :, j] = (self.jet(u + e).df - self.jet(u - e).df) / (2 * h[j])
        return 0.5 * (out + out.transpose(0, 2, 1, 3))

    def grid(self, resolution) -> np.ndarray:
        """Uniform product grid, shape (*resolution, d).

        Periodic axes omit the duplicate endpoint.
        """
        if np.isscalar(resolution):
            resolution = (int(resolution),) * self.dim
        if len(resolution) != self.dim:
            raise ValueError(f"grid needs {self.dim} resolutions, got {len(resolution)}")
        axes = []
        for (lo, hi), k, per in zip(self.domain, resolution, self.periodic):
            axes.append(np.linspace(lo, hi, int(k), endpoint=not per))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    def check(self, u, tol_unit: float = 1e-10, tol_normal: float = 1e-8) -> None:
        """Raise PatchInvariantError when the frame violates its invariants."""
        jet = self.jet(u)
        unit = np.abs(np.einsum("bi,bi->b", jet.xi, jet.xi) - 1)
        if np.max(unit) > tol_unit:
            raise PatchInvariantError(f"|xi| deviates from 1 by {np.max(unit):.2e}")
        scale = np.linalg.norm(jet.df, axis=2) + 1e-300
        normality = np.abs(np.einsum("bid,bd->bi", jet.df, jet.xi)) / scale
        if np.max(normality) > tol_normal:
            raise PatchInvariantError(f"xi is not normal: {np.max(normality):.2e}")
        if self.ambient == SPHERE:
            on = np.abs(np.einsum("bi,bi->b", jet.f, jet.f) - 1)
            tang = np.abs(np.einsum("bi,bi->b", jet.f, jet.xi))
            if max(np.max(on), np.max(tang)) > tol_unit:
                raise PatchInvariantError("sphere patch leaves S^n or xi is not tangent to it")


@dataclass(frozen=True)
class LegendreSample:
    """Batched lift [Y0, Y1] with derivatives along the parameter axes.

    In the Euclidean model Y0, Y1 are the point sphere k1 and tangent
    hyperplane k2.
    """

    u: np.ndarray
    Y0: np.ndarray
    Y1: np.ndarray
    dY0: Optional[np.ndarray] = None
    dY1: Optional[np.ndarray] = None
    model: str = SPHERE

    def __len__(self) -> int:
        return len(self.Y0)

    def take(self, idx) -> "LegendreSample":
        pick = (lambda a: None if a is None else a[idx])
        return LegendreSample(self.u[idx], self.Y0[idx], self.Y1[idx],
                              pick(self.dY0), pick(self.dY1), self.model)

    def transformed(self, a) -> "LegendreSample":
        """Push every vector through the Lie transformation ``a``."""
        m = getattr(a, "matrix", a)
        t = lambda v: None if v is None else v @ m.T
        return LegendreSample(self.u, t(self.Y0), t(self.Y1), t(self.dY0), t(self.dY1), "lie")


def spherical_lift(patch: HypersurfacePatch, u, jet: Optional[Jet] = None) -> LegendreSample:
    if patch.ambient != SPHERE:
        raise ValueError("spherical_lift needs a patch in S^n")
    jet = jet or patch.jet(u)
    b = len(jet.f)
    one, zero = np.ones((b, 1)), np.zeros((b, 1))
    y0 = np.hstack([one, jet.f, zero])
    y1 = np.hstack([zero, jet.xi, one])
    pad = lambda d: np.pad(d, ((0, 0), (0, 0), (1, 1)))
    return LegendreSample(patch._as_batch(u), y0, y1, pad(jet.df), pad(jet.dxi), SPHERE)


def euclidean_frame(f, xi):
    """k1 = (1+f.f, 1-f.f, 2f, 0)/2 and k2 = (f.xi, -f.xi, xi, 1), batched."""
    f = np.atleast_2d(f)
    xi = np.atleast_2d(xi)
    ff = np.einsum("bi,bi->b", f, f)[:, None]
    fx = np.einsum("bi,bi->b", f, xi)[:, None]
    zero, one = np.zeros_like(ff), np.ones_like(ff)
    k1 = np.hstack([(1 + ff) / 2, (1 - ff) / 2, f, zero])
    k2 = np.hstack([fx, -fx, xi, one])
    return k1, k2


def euclidean_lift(patch: HypersurfacePatch, u, jet: Optional[Jet] = None) -> LegendreSample:
    if patch.ambient != EUCLIDEAN:
        raise ValueError("euclidean_lift needs a patch in R^n")
    jet = jet or patch.jet(u)
    k1, k2 = euclidean_frame(jet.f, jet.xi)
    fdf = np.einsum("bd,bid->bi", jet.f, jet.df)[..., None]
    dfx = (np.einsum("bid,bd->bi", jet.df, jet.xi)
           + np.einsum("bd,bid->bi", jet.f, jet.dxi))[..., None]
    zero = np.zeros_like(fdf)
    dk1 = np.concatenate([fdf, -fdf, jet.df, zero], axis=2)
    dk2 = np.concatenate([dfx, -dfx, jet.dxi, zero], axis=2)
    return LegendreSample(patch._as_batch(u), k1, k2, dk1, dk2, EUCLIDEAN)


def lift(patch: HypersurfacePatch, u, jet: Optional[Jet] = None) -> LegendreSample:
    if patch.ambient == SPHERE:
        return spherical_lift(patch, u, jet)
    return euclidean_lift(patch, u, jet)


def contact_residual(sample: LegendreSample) -> np.ndarray:
    """Per-sample max over axes of |<dY0(X), Y1>| / (|dY0(X)| |Y1|)."""
    if sample.dY0 is None:
        raise ValueError("sample carries no derivative data")
    num = np.abs(inner(sample.dY0, sample.Y1[:, None, :]))
    den = np.linalg.norm(sample.dY0, axis=2) * np.linalg.norm(sample.Y1, axis=1)[:, None]
    return np.max(num / np.maximum(den, 1e-300), axis=1)


def inverse_stereographic(f):
    """R^n -> S^n matching the identity map between the two Lie models."""
    f = np.atleast_2d(f)
    ff = np.einsum("bi,bi->b", f, f)[:, None]
    return np.hstack([(1 - ff) / (1 + ff), 2 * f / (1 + ff)])


def spherical_normal(f, xi):
    """Unit normal in S^n of the stereographic image of (f, xi).

    Reads the line [k1, k2] in spherical normal form: Y1 = k2 - (k2_0/k1_0) k1.
    """
    k1, k2 = euclidean_frame(f, xi)
    y1 = k2 - (k2[:, :1] / k1[:, :1]) * k1
    return y1[:, 1:-1]


def stereographic_patch(patch: HypersurfacePatch) -> HypersurfacePatch:
    """The same Legendre lift read in the spherical model."""
    if patch.ambient != EUCLIDEAN:
        raise ValueError("expected a Euclidean patch")

    def frame(u):
        f, xi = patch.evaluate(u)
        return inverse_stereographic(f), spherical_normal(f, xi)

    return HypersurfacePatch(
        SPHERE, patch.n, patch.domain, frame, None, patch.periodic,
        name=f"stereo({patch.name})", params=dict(patch.params),
        fd_rel_step=patch.fd_rel_step, meta={"source": patch},
    )
