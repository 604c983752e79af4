"""Linear algebra for the signature (n+1, 2) form on R^{n+3}.

Coordinates are laid out as (x0, x1, ..., x_{n+1}, x_{n+2}); slots 0 and
n+2 are timelike. Vectors are plain numpy arrays of length n+3, subspaces
are stored as (k, n+3) arrays of row vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RANK_TOL = 1e-8
SIGNATURE_TOL = 1e-8


def metric(dim: int) -> np.ndarray:
    """Diagonal Gram matrix diag(-1, 1, ..., 1, -1) of size ``dim``."""
    if dim < 5:
        raise ValueError(f"ambient dimension {dim} < 5 (need n >= 2)")
    g = np.ones(dim)
    g[0] = g[-1] = -1.0
    return np.diag(g)


def _signs(dim: int) -> np.ndarray:
    s = np.ones(dim)
    s[0] = s[-1] = -1.0
    return s


def inner(x, y) -> np.ndarray:
    """Indefinite inner product, broadcasting over leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != y.shape[-1]:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    s = _signs(x.shape[-1])
    return np.sum(x * s * y, axis=-1)


def gram(vectors) -> np.ndarray:
    """Gram matrix of row vectors under the indefinite form."""
    v = np.atleast_2d(np.asarray(vectors, dtype=float))
    return (v * _signs(v.shape[-1])) @ v.T


def lie_frame_gram(dim: int) -> np.ndarray:
    """The Gram matrix a Lie frame Y_0..Y_{n+2} must have."""
    k = np.zeros((dim, dim))
    k[2:dim - 2, 2:dim - 2] = np.eye(dim - 4)
    # -J in the corner blocks pairs Y0<->Y_{n+2} and Y1<->Y_{n+1}
    k[0, dim - 1] = k[dim - 1, 0] = -1.0
    k[1, dim - 2] = k[dim - 2, 1] = -1.0
    return k


def frame_gram(frame, tol: float = 1e-10) -> tuple[np.ndarray, bool]:
    frame = np.asarray(frame, dtype=float)
    if frame.ndim != 2 or frame.shape[0] != frame.shape[1]:
        raise ValueError(
            f"a frame needs n+3 vectors of length n+3, got shape {frame.shape}")
    g = gram(frame)
    return g, bool(np.max(np.abs(g - lie_frame_gram(frame.shape[0]))) <= tol)


def normalize_rep(x, tol: float = 1e-12) -> np.ndarray:
    """Unit Euclidean norm, first clearly nonzero coordinate positive.

    Works row-wise on 2-d input.
    """
    x = np.asarray(x, dtype=float)
    flat = np.atleast_2d(x)
    norms = np.linalg.norm(flat, axis=1)
    if np.any(norms == 0):
        raise ValueError("cannot normalize the zero vector")
    out = flat / norms[:, None]
    big = np.abs(out) > tol
    first = np.argmax(big, axis=1)
    sgn = np.sign(out[np.arange(len(out)), first])
    out = out * sgn[:, None]
    return out.reshape(x.shape)


def numerical_rank(m, tol: float = RANK_TOL) -> tuple[int, np.ndarray]:
    """Rank and (right) nullspace basis of ``m``.

    Singular values above ``tol`` times the largest one count toward the
    rank. The nullspace is returned as orthonormal rows.
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        raise ValueError("empty matrix")
    if tol <= 0:
        raise ValueError("tol must be positive")
    # tall matrices: the thin SVD already carries all of V and skips the big U
    _, s, vt = np.linalg.svd(m, full_matrices=m.shape[0] < m.shape[1])
    if s[0] == 0:
        return 0, vt
    rank = int(np.sum(s > tol * s[0]))
    return rank, vt[rank:]


def row_span(m, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of the row space of ``m``."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    _, s, vt = np.linalg.svd(m, full_matrices=False)
    if s[0] == 0:
        return vt[:0]
    return vt[: int(np.sum(s > tol * s[0]))]


def orthogonal_complement(basis, tol: float = RANK_TOL) -> np.ndarray:
    """Rows spanning {v : <b, v> = 0 for every row b} under the indefinite form."""
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    if basis.shape[0] == 0:
        return np.eye(basis.shape[1])
    return numerical_rank(basis * _signs(basis.shape[1]), tol)[1]


def subspace_intersection(a, b, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal rows spanning span(a) ∩ span(b) (Euclidean sense)."""
    qa = row_span(a, tol)
    qb = row_span(b, tol)
    if len(qa) == 0 or len(qb) == 0:
        return np.zeros((0, np.shape(a)[-1]))
    # x = c @ qa lies in span(b) iff its component off span(b) vanishes
    resid = qa - (qa @ qb.T) @ qb
    _, s, vt = np.linalg.svd(resid @ resid.T)
    keep = s <= tol
    return row_span(vt[keep] @ qa, tol) if np.any(keep) else qa[:0]


class DegenerateBasisError(ValueError):
    pass


def restricted_signature(basis, tol: float = SIGNATURE_TOL) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of the form restricted to span(basis).

    The Gram matrix is computed on an orthonormalized copy of the basis and
    scaled by its largest absolute eigenvalue before the zero band is applied.
    """
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    if basis.shape[0] == 0:
        raise ValueError("empty basis")
    q = row_span(basis, 1e-10)
    if len(q) < basis.shape[0]:
        raise DegenerateBasisError(
            f"basis of {basis.shape[0]} vectors has rank {len(q)}")
    ev = np.linalg.eigvalsh(gram(q))
    scale = np.max(np.abs(ev))
    # q is orthonormal, so |ev| <= 1; an all-tiny spectrum is a null subspace
    if scale <= tol:
        return 0, 0, len(ev)
    ev = ev / scale
    return int(np.sum(ev > tol)), int(np.sum(ev < -tol)), int(np.sum(np.abs(ev) <= tol))


def adjoint(a) -> np.ndarray:
    """G A^T G, the adjoint w.r.t. the form; equals A^{-1} on O(n+1, 2)."""
    a = np.asarray(a, dtype=float)
    s = _signs(a.shape[0])
    return (s[:, None] * a.T) * s[None, :]


def is_lie_transform(a, tol: float = 1e-10) -> bool:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got {a.shape}")
    g = metric(a.shape[0])
    return bool(np.max(np.abs(a.T @ g @ a - g)) <= tol)


def polish(a, steps: int = 2) -> np.ndarray:
    """Newton-Schulz steps pulling a near-group matrix back onto O(n+1, 2)."""
    a = np.asarray(a, dtype=float)
    eye = np.eye(a.shape[0])
    for _ in range(steps):
        a = a @ (3 * eye - adjoint(a) @ a) / 2
    return a


def expm_series(x) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a Taylor series."""
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x, 1)
    squarings = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0.5 else 0
    y = x / 2.0 ** squarings
    out = np.eye(x.shape[0])
    term = np.eye(x.shape[0])
    for k in range(1, 40):
        term = term @ y / k
        out = out + term
        if np.max(np.abs(term)) < 1e-17 * np.max(np.abs(out)):
            break
    for _ in range(squarings):
        out = out @ out
    return out


@dataclass(frozen=True)
class LieTransform:
    """An element of O(n+1, 2) acting on homogeneous coordinates."""

    matrix: np.ndarray = field(repr=False)
    tol: float = 1e-10

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if not is_lie_transform(m, self.tol):
            raise ValueError("matrix does not preserve the (n+1, 2) form")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, x) -> np.ndarray:
        """Apply to vectors stored along the last axis."""
        return np.asarray(x, dtype=float) @ self.matrix.T

    def inverse(self) -> "LieTransform":
        return LieTransform(adjoint(self.matrix), self.tol)

    def __matmul__(self, other: "LieTransform") -> "LieTransform":
        return LieTransform(self.matrix @ other.matrix, max(self.tol, other.tol))


def random_generator(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Random X with X^T G + G X = 0, unit Frobenius norm."""
    s = rng.standard_normal((dim, dim))
    s = s - s.T
    x = metric(dim) @ s
    return x / np.linalg.norm(x)


def random_lie_transform(seed: int, n: int, magnitude: float = 1.0) -> LieTransform:
    if magnitude < 0:
        raise ValueError("magnitude must be >= 0")
    dim = n + 3
    if magnitude == 0:
        return LieTransform(np.eye(dim))
    rng = np.random.default_rng(seed)
    a = polish(expm_series(magnitude * random_generator(rng, dim)))
    return LieTransform(a)


def complete_timelike(v) -> np.ndarray:
    """A matrix B in O(n+1, 2) whose last column is the unit timelike ``v``.

    The remaining columns are a pseudo-orthonormal basis of v's complement,
    with the single timelike one placed in slot 0.
    """
    v = np.asarray(v, dtype=float)
    dim = len(v)
    norm = inner(v, v)
    if norm >= 0:
        raise ValueError("v is not timelike")
    v = v / np.sqrt(-norm)
    comp = orthogonal_complement(v[None, :])
    ev, u = np.linalg.eigh(gram(comp))
    cols = (u.T @ comp) / np.sqrt(np.abs(ev))[:, None]
    neg = np.flatnonzero(ev < 0)
    if len(neg) != 1:
        raise ValueError("complement of a timelike vector must have one timelike direction")
    pos = np.flatnonzero(ev > 0)
    b = np.empty((dim, dim))
    b[:, 0] = cols[neg[0]]
    b[:, 1:dim - 1] = cols[pos].T
    b[:, dim - 1] = v
    return polish(b)
