"""Oriented spheres as points of the Lie quadric, and lines on it.

Spherical chart: the sphere of S^n with center ``p`` and signed radius
``rho`` is [(cos rho, p, sin rho)]. With this chart a point p on a
hypersurface and a unit normal xi, the curvature sphere [k Y0 + Y1] has
center cos(rho) p + sin(rho) xi with k = cot(rho): for rho > 0 the normal
at the point of contact points toward the center.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .indefinite import LieTransform, inner, normalize_rep

QUADRIC_TOL = 1e-12
CONTACT_TOL = 1e-10
PROJECTIVE_TOL = 1e-10

ORIENTATION_CONVENTION = (
    "spherical chart (cos rho, p, sin rho); for rho > 0 the unit normal at a "
    "point of contact points toward the sphere center"
)


@dataclass(frozen=True)
class QuadricPoint:
    rep: np.ndarray = field(repr=False)
    normalized: bool = False
    tol: float = QUADRIC_TOL

    def __post_init__(self):
        rep = np.array(self.rep, dtype=float)
        if rep.ndim != 1:
            raise ValueError("a quadric point is a single vector")
        nrm2 = rep @ rep
        if nrm2 == 0:
            raise ValueError("zero vector is not a projective point")
        if abs(inner(rep, rep)) > self.tol * nrm2:
            raise ValueError(f"not on the Lie quadric: <x,x>/|x|^2 = {inner(rep, rep) / nrm2:.3e}")
        if self.normalized:
            rep = normalize_rep(rep)
        rep.setflags(write=False)
        object.__setattr__(self, "rep", rep)

    @property
    def dim(self) -> int:
        return len(self.rep)

    def normalize(self) -> "QuadricPoint":
        return QuadricPoint(self.rep, True, self.tol)


@dataclass(frozen=True)
class QuadricLine:
    x: QuadricPoint
    y: QuadricPoint
    tol: float = 1e-10

    def __post_init__(self):
        if self.x.dim != self.y.dim:
            raise ValueError("line generators live in different spaces")
        a, b = normalize_rep(self.x.rep), normalize_rep(self.y.rep)
        if abs(inner(a, b)) > self.tol:
            raise ValueError("generators are not in oriented contact; line leaves the quadric")
        if np.linalg.matrix_rank(np.stack([a, b]), tol=self.tol) < 2:
            raise ValueError("generators are projectively dependent")


def projectively_equal(x, y, tol: float = PROJECTIVE_TOL) -> bool:
    a = normalize_rep(getattr(x, "rep", x))
    b = normalize_rep(getattr(y, "rep", y))
    return bool(min(np.max(np.abs(a - b)), np.max(np.abs(a + b))) <= tol)


def projective_distance(x, y) -> float:
    """sin of the angle between the two lines through the origin."""
    a = np.asarray(getattr(x, "rep", x), dtype=float)
    b = np.asarray(getattr(y, "rep", y), dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    c = min(1.0, abs(a @ b))
    return float(np.sqrt(max(0.0, 1.0 - c * c)))


def sphere_to_point(center, signed_radius: float, tol: float = 1e-12) -> QuadricPoint:
    """Oriented sphere of S^n -> point of the Lie quadric Q^{n+1}."""
    p = np.asarray(center, dtype=float)
    if abs(p @ p - 1.0) > tol:
        raise ValueError(f"center must be a unit vector, |p| = {np.linalg.norm(p)}")
    rep = np.concatenate([[np.cos(signed_radius)], p, [np.sin(signed_radius)]])
    return QuadricPoint(rep)


def point_sphere(p) -> QuadricPoint:
    return sphere_to_point(p, 0.0)


def euclidean_sphere(center, radius: float) -> QuadricPoint:
    """Sphere of R^n with center ``center`` and signed radius, Euclidean layout.

    A radius of 0 gives the point sphere, matching the point-sphere map of the
    Euclidean lift.
    """
    c = np.asarray(center, dtype=float)
    q = c @ c - radius * radius
    return QuadricPoint(np.concatenate([[(1 + q) / 2, (1 - q) / 2], c, [radius]]))


def euclidean_plane(normal, height: float) -> QuadricPoint:
    """Oriented hyperplane {x : x . normal = height} with unit normal."""
    nv = np.asarray(normal, dtype=float)
    return QuadricPoint(np.concatenate([[height, -height], nv, [1.0]]))


def point_at_infinity(dim: int) -> np.ndarray:
    """The improper point (1, -1, 0, ..., 0) of the Euclidean layout."""
    e = np.zeros(dim)
    e[0], e[1] = 1.0, -1.0
    return e


def in_oriented_contact(s1, s2, tol: float = CONTACT_TOL) -> bool:
    a = normalize_rep(getattr(s1, "rep", s1))
    b = normalize_rep(getattr(s2, "rep", s2))
    return bool(abs(inner(a, b)) <= tol)


def pencil_point(line: QuadricLine, rs) -> QuadricPoint:
    r, s = rs
    if r == 0 and s == 0:
        raise ValueError("(0, 0) is not a projective pair")
    return QuadricPoint(r * line.x.rep + s * line.y.rep, tol=1e-10)


def apply_transform(a: LieTransform, obj: Union[QuadricPoint, QuadricLine]):
    if not isinstance(a, LieTransform):
        raise TypeError("apply_transform needs a validated LieTransform")
    if isinstance(obj, QuadricPoint):
        return QuadricPoint(a(obj.rep), obj.normalized, max(obj.tol, 1e-10))
    if isinstance(obj, QuadricLine):
        return QuadricLine(apply_transform(a, obj.x), apply_transform(a, obj.y), obj.tol)
    raise TypeError(f"cannot transform {type(obj).__name__}")


def parallel_transform(t: float, n: int) -> LieTransform:
    """Euclidean parallel map: adds ``t`` to every signed radius.

    Acts on the Euclidean layout ((1+q)/2, (1-q)/2, c, rho), q = |c|^2 - rho^2.
    """
    dim = n + 3
    # new (x0 - x1) = (x0 - x1) - 2 t x_last - t^2 (x0 + x1)
    # new x_last = x_last + t (x0 + x1)
    to_sd = np.eye(dim)
    to_sd[0, :2] = [1, 1]
    to_sd[1, :2] = [1, -1]
    m = np.eye(dim)
    m[1, 0] = -t * t
    m[1, dim - 1] = -2 * t
    m[dim - 1, 0] = t
    a = np.linalg.solve(to_sd, m @ to_sd)
    return LieTransform(a)
