"""Reducibility, construction type, isoparametric witnesses, immersing transforms."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from .curvature import canonical_lie_curvature, curvature_pencils, family_samples, track_families
from .indefinite import (
    LieTransform, adjoint, complete_timelike, gram, inner, normalize_rep,
    numerical_rank, orthogonal_complement, restricted_signature, row_span,
    subspace_intersection,
)
from .lift import euclidean_frame
from .model import point_at_infinity, projective_distance

REVOLUTION, TUBE, CYLINDER, UNKNOWN = "Revolution", "Tube", "Cylinder", "Unknown"

FOUND, NONE, INCONCLUSIVE = "found", "none", "inconclusive"


@dataclass
class SphereMapSamples:
    """Normalized representatives of one curvature sphere map over a grid."""

    family: int
    reps: np.ndarray = field(repr=False)
    multiplicity: Optional[int] = None

    def __post_init__(self):
        reps = np.atleast_2d(np.asarray(self.reps, dtype=float))
        on = np.abs(inner(reps, reps)) / np.einsum("bi,bi->b", reps, reps)
        if np.max(on) > 1e-8:
            raise ValueError(f"family {self.family} leaves the quadric ({np.max(on):.2e})")
        self.reps = normalize_rep(reps)

    def __len__(self) -> int:
        return len(self.reps)

    @property
    def dim(self) -> int:
        return self.reps.shape[1]

    def transformed(self, a) -> "SphereMapSamples":
        m = getattr(a, "matrix", a)
        return SphereMapSamples(self.family, self.reps @ m.T, self.multiplicity)


@dataclass
class ReducibilityVerdict:
    status: str                      # "reducible" | "irreducible" | "unknown"
    family: Optional[int]
    span_dim: int
    E: np.ndarray = field(repr=False)
    E_perp: np.ndarray = field(repr=False)
    m: int
    family_spans: list
    multiplicity: Optional[int] = None
    signature: Optional[tuple] = None
    construction: str = UNKNOWN
    compatible: tuple = ()
    refined_perp: Optional[np.ndarray] = field(default=None, repr=False)
    refined_signature: Optional[tuple] = None
    warnings: list = field(default_factory=list)

    @property
    def reducible(self) -> bool:
        return self.status == "reducible"


def reducibility_detect(samples: Sequence[SphereMapSamples], tol: float = 1e-8) -> ReducibilityVerdict:
    """Scan curvature sphere maps in the given order for a span of codim >= 2.

    The first family whose samples span at most n+1 dimensions decides; E is
    its row span and E_perp the complement under the indefinite form, so m+1
    is the largest number of independent constraints <K, v_i> = 0.
    """
    if not samples:
        raise ValueError("no sphere map samples")
    dim = samples[0].dim
    spans = [numerical_rank(s.reps, tol)[0] for s in samples]
    warnings = [f"family {s.family}: {len(s)} samples < {dim}" for s in samples if len(s) < dim]
    empty = np.zeros((0, dim))
    if warnings:
        return ReducibilityVerdict("unknown", None, max(spans), empty, empty, 0, spans,
                                   warnings=warnings + ["insufficient samples"])
    for s, span in zip(samples, spans):
        if span <= dim - 2:
            e = row_span(s.reps, tol)
            perp = orthogonal_complement(e, tol)
            verdict = ReducibilityVerdict("reducible", s.family, span, e, perp, dim - span - 1,
                                          spans, multiplicity=s.multiplicity)
            classify_construction(verdict)
            return verdict
    return ReducibilityVerdict("irreducible", None, min(spans), empty, empty, 0, spans)


def tag_from_signature(sig: tuple, m: int) -> str:
    pos, neg, null = sig
    if (pos, neg, null) == (m + 1, 0, 0):
        return REVOLUTION
    if (pos, neg, null) == (m, 1, 0):
        return TUBE
    if (pos, neg, null) == (m, 0, 1):
        return CYLINDER
    return UNKNOWN


def compatible_tags(sig: tuple, mult: int) -> tuple:
    """Construction types realizable by a (mult+1)-dimensional subspace of E_perp."""
    pos, neg, null = sig
    tags = []
    if pos >= mult + 1:
        tags.append(REVOLUTION)
    if pos >= mult and neg >= 1:
        tags.append(TUBE)
    if (null >= 1 and pos >= mult) or (neg >= 1 and pos >= mult + 1):
        tags.append(CYLINDER)
    return tuple(tags)


def _contains(basis, v, tol=1e-8) -> bool:
    if len(basis) == 0:
        return False
    q = row_span(basis)
    v = v / np.linalg.norm(v)
    return bool(np.linalg.norm(v - (v @ q.T) @ q) <= tol)


def refine_perp(perp: np.ndarray, mult: int) -> np.ndarray:
    """Pick a (mult+1)-dimensional part of E_perp read in the Euclidean frame.

    Order of preference: directions of R^n only (spheres centered on an
    axis), then those plus the improper point (hyperplanes), then the
    spatial part plus the most timelike remaining direction.
    """
    dim = perp.shape[1]
    spatial = np.eye(dim)[2:dim - 1]
    s = subspace_intersection(perp, spatial)
    if len(s) >= mult + 1:
        return s
    inf = point_at_infinity(dim)
    if _contains(perp, inf):
        c = subspace_intersection(perp, np.vstack([spatial, inf]))
        if len(c) >= mult + 1:
            return c
    rest = perp if len(s) == 0 else subspace_intersection(perp, orthogonal_complement(s))
    ev, vec = np.linalg.eigh(gram(rest))
    timelike = vec[:, 0] @ rest
    return np.vstack([s, timelike[None, :]]) if len(s) else timelike[None, :]


def classify_construction(verdict: ReducibilityVerdict) -> str:
    """Construction type from the signature of the form on E_perp.

    (m+1, 0) -> Revolution, (m, 1) -> Tube, (m, 0) degenerate -> Cylinder.
    When the span has more codimension than the family's multiplicity calls
    for, every type in ``compatible`` is realizable; the tag then comes from
    the Euclidean reading in ``refine_perp``.
    """
    if not verdict.reducible:
        verdict.construction = UNKNOWN
        return UNKNOWN
    sig = restricted_signature(verdict.E_perp)
    verdict.signature = sig
    tag = tag_from_signature(sig, verdict.m)
    mu = verdict.multiplicity
    verdict.compatible = (tag,) if tag != UNKNOWN else ()
    if mu is not None and mu < verdict.m:
        verdict.compatible = compatible_tags(sig, mu)
        v = refine_perp(verdict.E_perp, mu)
        verdict.refined_perp = v
        verdict.refined_signature = restricted_signature(v)
        tag = tag_from_signature(verdict.refined_signature, len(v) - 1)
    verdict.construction = tag
    return tag


def patch_families(patch, resolution, cluster_tol: float = 1e-6):
    """Curvature sphere maps of ``patch`` sampled on its grid.

    Families are tracked across the grid; for construction outputs the
    construction's own sphere map is moved to the front.
    """
    grid = patch.grid(resolution)
    shape = grid.shape[:-1]
    u = grid.reshape(-1, patch.dim)
    pencils = curvature_pencils(patch, u, cluster_tol)
    labels = track_families(pencils, shape)
    fams = [SphereMapSamples(i, reps, mult) for i, (reps, mult) in
            enumerate(family_samples(pencils, labels))]
    if patch.meta.get("construction"):
        from .constructions import new_sphere_pair

        r, s = new_sphere_pair(patch, u[:1])[0]
        j = patch.jet(u[:1])
        k1, k2 = euclidean_frame(j.f, j.xi)
        new = r * k1[0] + s * k2[0]
        i = int(np.argmin([projective_distance(new, f.reps[0]) for f in fams]))
        fams = [fams[i]] + fams[:i] + fams[i + 1:]
    return fams


# --------------------------------------------------------- Muenzner conditions

def has_pairing(multiplicities: Sequence[int]) -> bool:
    return any(m[0] == m[1] and m[2] == m[3] for m in itertools.permutations(multiplicities))


def necessary_conditions(multiplicities: Sequence[int], r: float, tol: float = 1e-9) -> bool:
    """m1 = m2, m3 = m4 for some pairing and canonical Lie curvature -1."""
    if len(multiplicities) != 4:
        raise ValueError("necessary conditions concern g = 4")
    return has_pairing(multiplicities) and abs(r + 1) <= tol


def munzner_check(kappas, multiplicities, tol: float = 1e-9) -> bool:
    res = canonical_lie_curvature(kappas, multiplicities)
    return res.canonical and necessary_conditions(multiplicities, res.r, tol)


# ------------------------------------------------------------ witness search

@dataclass
class IsoparametricWitness:
    W1: np.ndarray
    W2: np.ndarray
    residual: float

    def __post_init__(self):
        g = [inner(self.W1, self.W1), inner(self.W2, self.W2), inner(self.W1, self.W2)]
        if max(abs(g[0] + 2), abs(g[1] + 2), abs(g[2])) > 1e-6:
            raise ValueError("W1, W2 do not satisfy the norm conditions")


@dataclass
class WitnessResult:
    status: str
    witness: Optional[IsoparametricWitness] = None
    ordering: Optional[tuple] = None
    nullity: dict = field(default_factory=dict)
    note: str = ""

    @property
    def found(self) -> bool:
        return self.status == FOUND


def _orderings(samples):
    mults = [s.multiplicity for s in samples]
    known = all(m is not None for m in mults)
    for p in itertools.permutations(range(4)):
        if known and not (mults[p[0]] == mults[p[1]] and mults[p[2]] == mults[p[3]]):
            continue
        yield p


def witness_system(k1, k2, k3, k4) -> np.ndarray:
    """Rows of the linear constraints on (W1, W2) in R^{2(n+3)}."""
    dim = k1.shape[1]
    s = np.ones(dim)
    s[0] = s[-1] = -1.0
    z = lambda k: np.zeros((len(k), dim))
    rows = [np.hstack([k1 * s, z(k1)]), np.hstack([z(k2), k2 * s]),
            np.hstack([k3 * s, -k3 * s]), np.hstack([k4 * s, k4 * s])]
    return np.vstack(rows)


def replay_residual(families, w1, w2) -> float:
    """Max violation of the orthogonality system and the norm conditions."""
    scale = max(np.linalg.norm(w1), np.linalg.norm(w2))
    combos = [w1, w2, w1 - w2, w1 + w2]
    lin = max(np.max(np.abs(inner(k, w))) for k, w in zip(families, combos)) / scale
    quad = max(abs(inner(w1, w1) + 2), abs(inner(w2, w2) + 2), abs(inner(w1, w2))) / 2
    return float(max(lin, quad))


def _solve_quadratic(z: np.ndarray, dim: int, seed: int = 0):
    """Coefficients c with W = c @ z meeting <W1,W1> = <W2,W2> = -2, <W1,W2> = 0."""
    z1, z2 = z[:, :dim], z[:, dim:]
    q11, q22 = gram(z1), gram(z2)
    s = np.ones(dim)
    s[0] = s[-1] = -1.0
    q12 = z1 @ (s[:, None] * z2.T)
    q12 = 0.5 * (q12 + q12.T)

    def resid(c):
        return np.array([c @ q11 @ c + 2, c @ q22 @ c + 2, c @ q12 @ c])

    d = len(z)
    if d == 1:
        a = q11[0, 0]
        if a >= 0:
            return None
        return np.array([np.sqrt(-2 / a)])
    starts = []
    ev, vec = np.linalg.eigh(q11 + q22)
    for i in np.flatnonzero(ev < 0):
        starts.append(vec[:, i] * np.sqrt(-4 / ev[i]))
    rng = np.random.default_rng(seed)
    starts += list(rng.standard_normal((8, d)))
    best, best_cost = None, np.inf
    for c0 in starts:
        sol = least_squares(resid, c0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if sol.cost < best_cost:
            best, best_cost = sol.x, sol.cost
    return best


def isoparametric_witness(families: Sequence[SphereMapSamples], tol: float = 1e-8,
                          rank_tol: float = 1e-8, max_nullity: int = 4) -> WitnessResult:
    """Constant W1, W2 with <K1,W1> = <K2,W2> = <K3,W1-W2> = <K4,W1+W2> = 0.

    Orderings of the four families compatible with the multiplicity pairing
    are all tried; the witness with the smallest replay residual wins.
    """
    if len(families) != 4:
        raise ValueError("the witness search needs exactly four sphere maps")
    dim = families[0].dim
    best: Optional[WitnessResult] = None
    under = False
    nullity = {}
    for order in _orderings(families):
        ks = [families[i].reps for i in order]
        rank, z = numerical_rank(witness_system(*ks), rank_tol)
        nullity[order] = len(z)
        if len(z) == 0:
            continue
        if len(z) > max_nullity:
            under = True
            continue
        c = _solve_quadratic(z, dim)
        if c is None:
            continue
        w = c @ z
        w1, w2 = w[:dim], w[dim:]
        res = replay_residual(ks, w1, w2)
        if res <= tol and (best is None or res < best.witness.residual):
            best = WitnessResult(FOUND, IsoparametricWitness(w1, w2, res), order)
    if best is not None:
        best.nullity = nullity
        return best
    if under:
        return WitnessResult(INCONCLUSIVE, nullity=nullity,
                             note=f"nullspace dimension above {max_nullity}: under-sampled")
    return WitnessResult(NONE, nullity=nullity)


def plane_distance(a, b) -> float:
    """Largest principal-angle sine between two 2-planes (rows)."""
    qa, qb = row_span(a), row_span(b)
    s = np.linalg.svd(qa @ qb.T, compute_uv=False)
    return float(np.sqrt(max(0.0, 1 - np.min(s) ** 2)))


# ------------------------------------------------------ immersing transform

@dataclass
class ImmersionResult:
    status: str
    v: Optional[np.ndarray] = None
    score: float = 0.0
    transform: Optional[LieTransform] = None
    trial: Optional[int] = None


def immersion_score(reps: np.ndarray, v: np.ndarray) -> float:
    """min_x |<k(x), v>| / |v| over unit-norm representatives."""
    return float(np.min(np.abs(inner(reps, v))) / np.linalg.norm(v))


def _unit_timelike(rng, dim):
    s = rng.standard_normal(dim - 2)
    th = rng.uniform(0, 2 * np.pi)
    r = np.sqrt(1 + s @ s)
    return np.concatenate([[r * np.cos(th)], s, [r * np.sin(th)]])


def _ascend(reps, v, steps):
    score = immersion_score(reps, v)
    step = 0.5
    for _ in range(steps):
        vals = inner(reps, v)
        j = int(np.argmin(np.abs(vals)))
        w = np.sign(vals[j]) * reps[j]
        # tangent to the unit hyperboloid at v
        d = w + inner(w, v) * v
        if np.linalg.norm(d) == 0:
            break
        d /= np.linalg.norm(d)
        improved = False
        while step > 1e-8:
            cand = v + step * d
            nrm = inner(cand, cand)
            if nrm < 0:
                cand = cand / np.sqrt(-nrm)
                sc = immersion_score(reps, cand)
                if sc > score:
                    v, score, improved = cand, sc, True
                    step *= 1.5
                    break
            step /= 2
        if not improved:
            break
    return v, score


def find_immersing_transform(families, trials: int = 256, steps: int = 50, seed: int = 0,
                             tol: float = 1e-6) -> ImmersionResult:
    """Unit timelike v with <k, v> != 0 on every sampled curvature sphere.

    Returns A in O(n+1, 2) with A v = e_{n+2}; the point sphere map of the
    transformed lift then avoids every curvature sphere on the samples. The
    first start is e_{n+2} itself.
    """
    reps = np.vstack([normalize_rep(getattr(f, "reps", f)) for f in families])
    dim = reps.shape[1]
    rng = np.random.default_rng(seed)
    e_last = np.zeros(dim)
    e_last[-1] = 1.0
    best_v, best_score, best_trial = None, -1.0, None
    for t in range(trials):
        v0 = e_last if t == 0 else _unit_timelike(rng, dim)
        v, sc = _ascend(reps, v0, steps)
        if sc > best_score:
            best_v, best_score, best_trial = v, sc, t
    if best_score <= tol:
        return ImmersionResult(INCONCLUSIVE, best_v, best_score, None, best_trial)
    b = complete_timelike(best_v)
    return ImmersionResult(FOUND, best_v, best_score, LieTransform(adjoint(b)), best_trial)


def project_to_profile(q, n: int, m: int) -> np.ndarray:
    """Orthogonal projection R^{n+m+3}_2 -> R^{n+3}_2 keeping e_0..e_{n+1}, e_{n+m+2}."""
    q = np.asarray(q, dtype=float)
    if len(q) != n + m + 3:
        raise ValueError("q has the wrong length")
    return np.concatenate([q[: n + 2], q[-1:]])
