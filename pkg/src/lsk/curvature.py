"""Principal curvatures, curvature spheres, Lie curvature and Dupin checks.

Sign convention: the shape operator is A(X) = -dxi(X), so the curvature
sphere belonging to the principal curvature k is [k Y0 + Y1] in both the
spherical and the Euclidean model. An infinite curvature is carried as the
projective pair (1, 0).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .indefinite import gram, inner, normalize_rep, orthogonal_complement, row_span
from .lift import HypersurfacePatch, LegendreSample, lift

CLUSTER_TOL = 1e-6
DUPIN_TOL = 1e-6
DUPIN_REL_STEP = 1e-4

SHAPE_OPERATOR_CONVENTION = "A(X) = -dxi(X); curvature spheres [k Y0 + Y1]"


class NonImmersionError(ValueError):
    """The first fundamental form is singular at some sample."""


class BranchMatchingError(RuntimeError):
    pass


@dataclass
class CurvaturePencil:
    """Distinct curvature spheres at one point.

    ``pairs[i] = (r, s)`` with sphere [r Y0 + s Y1]; finite curvatures have
    s = 1 and ``kappas[i] = r``, infinite ones are stored as (1, 0) / inf.
    ``bases[i]`` holds principal vectors (columns, parameter coordinates).
    """

    u: np.ndarray
    pairs: np.ndarray
    multiplicities: tuple
    bases: list = field(repr=False)
    spheres: Optional[np.ndarray] = field(default=None, repr=False)
    ambiguous: bool = False

    @property
    def g(self) -> int:
        return len(self.multiplicities)

    @property
    def kappas(self) -> np.ndarray:
        r, s = self.pairs[:, 0], self.pairs[:, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(np.abs(s) > 1e-14 * np.abs(r), r / np.where(s == 0, 1, s), np.inf)


@dataclass(frozen=True)
class LieCurvatureResult:
    ordering: tuple
    r: float
    canonical: bool


# ---------------------------------------------------------------- shape operator

def fundamental_forms(patch: HypersurfacePatch, u, analytic: Optional[bool] = None):
    """First and second fundamental forms (B, d, d) with II = -df . dxi."""
    jet = patch.jet(u, analytic)
    first = np.einsum("bid,bjd->bij", jet.df, jet.df)
    second = -np.einsum("bid,bjd->bij", jet.df, jet.dxi)
    ev = np.linalg.eigvalsh(first)
    bad = ev[:, 0] <= 1e-12 * np.maximum(ev[:, -1], 1e-300)
    if np.any(bad):
        where = patch._as_batch(u)[np.argmax(bad)]
        raise NonImmersionError(f"degenerate first fundamental form at u = {where}")
    return first, second, jet


def shape_operator(patch: HypersurfacePatch, u, analytic: Optional[bool] = None) -> np.ndarray:
    """Shape operator in the coordinate tangent basis, shape (B, d, d)."""
    first, second, _ = fundamental_forms(patch, u, analytic)
    return np.linalg.solve(first, second)


def self_adjoint_defect(a, first) -> np.ndarray:
    ia = first @ a
    return np.linalg.norm(ia - np.swapaxes(ia, -1, -2), axis=(-2, -1)) / np.maximum(
        np.linalg.norm(ia, axis=(-2, -1)), 1e-300)


def _principal_batch(first, second):
    """Generalized symmetric eigenproblem, eigenvectors I-orthonormal."""
    sym = 0.5 * (second + np.swapaxes(second, -1, -2))
    chol = np.linalg.cholesky(first)
    linv = np.linalg.inv(chol)
    m = linv @ sym @ np.swapaxes(linv, -1, -2)
    w, v = np.linalg.eigh(0.5 * (m + np.swapaxes(m, -1, -2)))
    return w, np.swapaxes(linv, -1, -2) @ v


def cluster_values(values: np.ndarray, tol: float = CLUSTER_TOL):
    """Group sorted eigenvalues; returns (groups of indices, ambiguous flag)."""
    order = np.argsort(values)
    groups, ambiguous = [[order[0]]], False
    for a, b in zip(order[:-1], order[1:]):
        gap = abs(values[b] - values[a])
        scale = 1 + max(abs(values[a]), abs(values[b]))
        if gap <= tol * scale:
            groups[-1].append(b)
        else:
            if gap <= 2 * tol * scale:
                ambiguous = True
            groups.append([b])
    return groups, ambiguous


def _pencil_from_eig(u, w, vecs, tol, y0=None, y1=None) -> CurvaturePencil:
    groups, amb = cluster_values(w, tol)
    kap = np.array([np.mean(w[g]) for g in groups])
    pairs = np.stack([kap, np.ones_like(kap)], axis=1)
    bases = [vecs[:, g] for g in groups]
    spheres = None
    if y0 is not None:
        spheres = pairs[:, :1] * y0[None, :] + pairs[:, 1:] * y1[None, :]
    return CurvaturePencil(np.asarray(u), pairs, tuple(len(g) for g in groups), bases, spheres, amb)


def principal_decomposition(a, first, cluster_tol: float = CLUSTER_TOL, u=None) -> CurvaturePencil:
    """Cluster the eigenvalues of the I-self-adjoint matrix ``a``."""
    a = np.asarray(a, dtype=float)
    first = np.asarray(first, dtype=float)
    if self_adjoint_defect(a, first) > 1e-8:
        raise ValueError("shape operator is not self-adjoint w.r.t. the metric")
    w, v = _principal_batch(first[None], (first @ a)[None])
    return _pencil_from_eig(u if u is not None else np.zeros(0), w[0], v[0], cluster_tol)


def curvature_pencils(patch: HypersurfacePatch, u, cluster_tol: float = CLUSTER_TOL,
                      analytic: Optional[bool] = None) -> list:
    """Pencils (with curvature spheres) at every parameter in ``u``."""
    u = patch._as_batch(u)
    first, second, jet = fundamental_forms(patch, u, analytic)
    w, v = _principal_batch(first, second)
    sample = lift(patch, u, jet)
    return [_pencil_from_eig(u[b], w[b], v[b], cluster_tol, sample.Y0[b], sample.Y1[b])
            for b in range(len(u))]


def principal_curvatures(patch: HypersurfacePatch, u, analytic: Optional[bool] = None) -> np.ndarray:
    """All n-1 principal curvatures per sample, ascending, shape (B, d)."""
    first, second, _ = fundamental_forms(patch, u, analytic)
    return _principal_batch(first, second)[0]


# ------------------------------------------------------- Lie-invariant pencil

def _quotient_coords(y0, y1):
    """Basis C of a complement of [Y0,Y1] inside its orthogonal space, and
    the map taking v in [Y0,Y1]^perp to coordinates modulo the line."""
    line = np.stack([y0, y1])
    perp = orthogonal_complement(line)
    q = row_span(line)
    perp = perp - (perp @ q.T) @ q
    basis = row_span(perp, 1e-9)
    gc = gram(basis)
    return basis, gc


def line_pencil(sample: LegendreSample, index: int = 0, cluster_tol: float = CLUSTER_TOL) -> CurvaturePencil:
    """Curvature spheres [r Y0 + s Y1] where d(r Y0 + s Y1)(X) lies in the line.

    Needs only the line and its derivatives, so it applies to any Lie image
    of a lift.
    """
    y0, y1 = sample.Y0[index], sample.Y1[index]
    d0, d1 = sample.dY0[index], sample.dY1[index]
    basis, gc = _quotient_coords(y0, y1)
    signs = np.ones(len(y0))
    signs[0] = signs[-1] = -1.0
    proj = np.linalg.solve(gc, (basis * signs))
    m0 = proj @ d0.T
    m1 = proj @ d1.T
    ab = scipy.linalg.eig(m1, -m0, right=False, homogeneous_eigvals=True)
    pairs = np.real(np.stack(ab, axis=1))
    pairs /= np.linalg.norm(pairs, axis=1)[:, None]
    flip = (pairs[:, 1] < 0) | ((pairs[:, 1] == 0) & (pairs[:, 0] < 0))
    pairs[flip] *= -1
    theta = np.mod(np.arctan2(pairs[:, 0], pairs[:, 1]), np.pi)
    groups, amb = _cluster_angles(theta, cluster_tol)
    out_pairs, bases = [], []
    for g in groups:
        t = _circular_mean(theta[g])
        rs = np.array([np.sin(t), np.cos(t)])
        if rs[1] < 0 or (rs[1] == 0 and rs[0] < 0):
            rs = -rs
        if abs(rs[1]) > 1e-12:
            rs = rs / rs[1]
        else:
            rs = np.array([1.0, 0.0])
        out_pairs.append(rs)
        _, s, vt = np.linalg.svd(rs[0] * m0 + rs[1] * m1)
        bases.append(vt[len(vt) - len(g):].T)
    pairs = np.array(out_pairs)
    spheres = pairs[:, :1] * y0[None, :] + pairs[:, 1:] * y1[None, :]
    return CurvaturePencil(sample.u[index], pairs, tuple(len(g) for g in groups), bases, spheres, amb)


def _cluster_angles(theta, tol):
    order = np.argsort(theta)
    groups, amb = [[order[0]]], False
    for a, b in zip(order[:-1], order[1:]):
        gap = abs(np.sin(theta[b] - theta[a]))
        if gap <= tol:
            groups[-1].append(b)
        else:
            amb |= gap <= 2 * tol
            groups.append([b])
    if len(groups) > 1 and abs(np.sin(theta[groups[0][0]] - theta[groups[-1][-1]])) <= tol:
        groups[0] = groups.pop() + groups[0]
    return groups, amb


def _circular_mean(t):
    return 0.5 * np.arctan2(np.mean(np.sin(2 * t)), np.mean(np.cos(2 * t)))


def curvature_sphere_residual(pencil: CurvaturePencil, sample: LegendreSample, i: int, x,
                              index: int = 0, strict: bool = False) -> float:
    """Size of d(r Y0 + s Y1)(X) off the line [Y0, Y1], relative to |dY(X)|.

    Vanishes exactly when [r Y0 + s Y1] is a curvature sphere with principal
    vector X. With ``strict`` the vector must lie in the i-th principal space.
    """
    x = np.asarray(x, dtype=float)
    if strict:
        basis = pencil.bases[i]
        q, _ = np.linalg.qr(basis)
        off = x - q @ (q.T @ x)
        if np.linalg.norm(off) > 1e-6 * np.linalg.norm(x):
            raise ValueError("X is not in the stated principal space")
    r, s = pencil.pairs[i]
    d0 = x @ sample.dY0[index]
    d1 = x @ sample.dY1[index]
    dk = r * d0 + s * d1
    q = row_span(np.stack([sample.Y0[index], sample.Y1[index]]))
    off = dk - (dk @ q.T) @ q
    scale = abs(r) * np.linalg.norm(d0) + abs(s) * np.linalg.norm(d1)
    return float(np.linalg.norm(off) / max(scale, 1e-300))


# -------------------------------------------------------------- Lie curvature

def as_pair(k) -> np.ndarray:
    if np.ndim(k) == 1:
        p = np.asarray(k, dtype=float)
        if p.shape != (2,) or not np.any(p):
            raise ValueError(f"bad projective pair {k}")
        return p
    k = float(k)
    return np.array([1.0, 0.0]) if np.isinf(k) else np.array([k, 1.0])


def _det(a, b):
    return a[0] * b[1] - b[0] * a[1]


def lie_curvature(k1, k2, k3, k4) -> float:
    """Value at k4 of the Moebius map sending k1 -> inf, k2 -> 0, k3 -> 1."""
    p = [as_pair(k) for k in (k1, k2, k3, k4)]
    for a, b in itertools.combinations(range(4), 2):
        if abs(_det(p[a], p[b])) <= 1e-14 * np.linalg.norm(p[a]) * np.linalg.norm(p[b]):
            raise ValueError("Lie curvature needs four distinct curvatures")
    return float(_det(p[3], p[1]) * _det(p[2], p[0]) / (_det(p[3], p[0]) * _det(p[2], p[1])))


def cross_ratio_orbit(r: float) -> set:
    return {r, 1 / r, 1 - r, 1 / (1 - r), r / (r - 1), (r - 1) / r}


def _paired(m) -> bool:
    return m[0] == m[1] and m[2] == m[3]


def canonical_lie_curvature(kappas: Sequence, multiplicities: Sequence = (1, 1, 1, 1)) -> LieCurvatureResult:
    """Ordering with m1 = m2, m3 = m4 and negative Lie curvature.

    Permutations are scanned in lexicographic order and the first one that
    qualifies wins. If the multiplicities admit no pairing, the best
    negative candidate is returned with ``canonical=False``.
    """
    if len(kappas) != 4 or len(multiplicities) != 4:
        raise ValueError("canonical Lie curvature needs exactly four curvatures")
    perms = list(itertools.permutations(range(4)))
    values = {p: lie_curvature(*(kappas[i] for i in p)) for p in perms}
    mult = lambda p: tuple(multiplicities[i] for i in p)
    pairable = any(_paired(mult(p)) for p in perms)
    for p in perms:
        if values[p] < 0 and (not pairable or _paired(mult(p))):
            return LieCurvatureResult(p, values[p], pairable)
    neg = [p for p in perms if values[p] < 0]
    best = neg[0] if neg else min(perms, key=lambda p: values[p])
    return LieCurvatureResult(best, values[best], False)


# ------------------------------------------------------------------- Dupin

@dataclass
class DupinResult:
    residuals: np.ndarray          # per branch (sorted-curvature order)
    g_values: np.ndarray           # g at every grid point
    tol: float
    points: int

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if len(self.residuals) else 0.0

    @property
    def is_dupin(self) -> bool:
        return self.max_residual <= self.tol

    @property
    def is_proper(self) -> bool:
        return bool(np.all(self.g_values == self.g_values.flat[0]))


def _flatten_grid(patch, grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    return grid.reshape(-1, patch.dim)


def dupin_residual(patch: HypersurfacePatch, grid, cluster_tol: float = CLUSTER_TOL,
                   dupin_tol: float = DUPIN_TOL, rel_step: float = DUPIN_REL_STEP,
                   analytic: Optional[bool] = None) -> DupinResult:
    """Max |d kappa_i(X)| over unit principal X, per curvature branch.

    Branches are identified at neighboring parameters by nearest value.
    Requires the same g at every grid point.
    """
    u = _flatten_grid(patch, grid)
    first, second, _ = fundamental_forms(patch, u, analytic)
    w, vecs = _principal_batch(first, second)
    b, d = w.shape
    clusters = [cluster_values(w[i], cluster_tol)[0] for i in range(b)]
    g_vals = np.array([len(c) for c in clusters])
    h = rel_step * float(np.mean(patch.extent))
    # shifted parameters: one pair per eigenvector
    steps = h * np.swapaxes(vecs, 1, 2) / np.linalg.norm(vecs, axis=1)[:, :, None]
    plus = (u[:, None, :] + steps).reshape(-1, d)
    minus = (u[:, None, :] - steps).reshape(-1, d)
    wp = principal_curvatures(patch, plus, analytic).reshape(b, d, d)
    wm = principal_curvatures(patch, minus, analytic).reshape(b, d, d)
    hs = (h / np.linalg.norm(vecs, axis=1))            # parameter step length per eigvec
    ds = hs * np.sqrt(np.einsum("bij,bik,bkj->bj", vecs, first, vecs))  # arc length of the step
    g_max = int(np.max(g_vals))
    res = np.zeros(g_max)
    for i in range(b):
        for ci, group in enumerate(clusters[i]):
            kap = np.mean(w[i, group])
            for j in group:
                kp = wp[i, j][np.argmin(np.abs(wp[i, j] - kap))]
                km = wm[i, j][np.argmin(np.abs(wm[i, j] - kap))]
                res[ci] = max(res[ci], abs(kp - km) / (2 * ds[i, j]))
    return DupinResult(res, g_vals.reshape(np.shape(grid)[:-1]), dupin_tol, b)


def proper_dupin_check(patch: HypersurfacePatch, grid, cluster_tol: float = CLUSTER_TOL,
                       analytic: Optional[bool] = None) -> tuple:
    u = _flatten_grid(patch, grid)
    w = principal_curvatures(patch, u, analytic)
    g = np.array([len(cluster_values(row, cluster_tol)[0]) for row in w])
    return bool(np.all(g == g[0])), int(g[0]) if np.all(g == g[0]) else int(np.max(g))


# --------------------------------------------------------- branch tracking

def _neighbor_index(idx: tuple) -> Optional[tuple]:
    for ax in range(len(idx) - 1, -1, -1):
        if idx[ax] > 0:
            nb = list(idx)
            nb[ax] -= 1
            return tuple(nb)
    return None


def track_families(pencils: Sequence[CurvaturePencil], shape: Optional[tuple] = None) -> np.ndarray:
    """Label curvature spheres consistently across a grid.

    Returns ``labels`` with labels[p][i] = family of sphere i at point p,
    obtained by minimal-total-distance matching against an already visited
    neighbor (C-order traversal).
    """
    shape = shape or (len(pencils),)
    g = pencils[0].g
    if any(p.g != g for p in pencils):
        raise BranchMatchingError("number of curvature spheres varies over the grid")
    reps = np.stack([normalize_rep(p.spheres) for p in pencils])
    labels = np.zeros((len(pencils), g), dtype=int)
    labels[0] = np.arange(g)
    by_family = np.zeros_like(reps)
    by_family[0] = reps[0]
    for flat, idx in enumerate(np.ndindex(*shape)):
        if flat == 0:
            continue
        nb = np.ravel_multi_index(_neighbor_index(idx), shape)
        ref = by_family[nb]
        cost = 1 - np.abs(reps[flat] @ ref.T)
        rows, cols = linear_sum_assignment(cost)
        labels[flat, rows] = cols
        by_family[flat, cols] = reps[flat, rows]
    return labels


def family_samples(pencils: Sequence[CurvaturePencil], labels: np.ndarray):
    """Per family: (normalized sphere representatives, multiplicity)."""
    g = labels.shape[1]
    out = []
    for fam in range(g):
        reps, mults = [], set()
        for p, lab in zip(pencils, labels):
            i = int(np.flatnonzero(lab == fam)[0])
            reps.append(p.spheres[i])
            mults.add(p.multiplicities[i])
        if len(mults) != 1:
            raise BranchMatchingError(f"family {fam} changes multiplicity across the grid")
        out.append((normalize_rep(np.array(reps)), mults.pop()))
    return out
