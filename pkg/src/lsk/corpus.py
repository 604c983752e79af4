"""Example generators, synthetic isoparametric pencils and the shipped corpus."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from . import constructions as C
from . import generators as G
from .classify import SphereMapSamples
from .indefinite import expm_series, random_lie_transform

CORPUS_FILE = "corpus.json"


def _profile(params, default="circle_profile"):
    name = params.pop("profile", default)
    sub = {k: params.pop(k) for k in list(params) if k in PROFILE_KEYS.get(name, ())}
    return generate(name, sub)


PROFILE_KEYS = {
    "circle_profile": ("R", "a"),
    "circle": ("radius", "center"),
    "ellipse_profile": ("a", "b", "offset"),
    "clifford_cone": ("p", "t_range"),
    "torus": ("R", "a"),
    "sphere": ("a", "n"),
}


def _leftover(params):
    if params:
        raise TypeError(f"unexpected parameters {sorted(params)}")


def _revolve(params):
    params = dict(params)
    prof = _profile(params)
    spec = C.RevolutionSpec(int(params.pop("m", 1)))
    _leftover(params)
    return C.surface_of_revolution(prof, spec)


def _tube(params):
    params = dict(params)
    prof = _profile(params, "circle")
    eps, k = float(params.pop("eps", 0.5)), int(params.pop("k", 1))
    _leftover(params)
    return C.tube(prof, eps, k)


def _cylinder(params):
    params = dict(params)
    prof = _profile(params, "circle")
    k, half = int(params.pop("k", 1)), float(params.pop("half_length", 1.0))
    _leftover(params)
    return C.cylinder(prof, k, half)


def cone_tube(p: int = 1, eps: float = 0.25, margin: float = 0.2):
    """Tube of radius eps about the cone over a Clifford torus, k = 1.

    Curvatures -1/eps (the tube's own, multiplicity 1) and the images of
    1/t, -1/t (multiplicity p) and 0 (multiplicity 1). Only the half
    cos(phi) > 0 of the normal circle is kept: at cos(phi) = 0 the three
    inherited curvatures merge.
    """
    cone = G.clifford_cone(p)
    t = C.tube(cone, eps, 1)
    dom = t.domain[:-1] + ((-np.pi / 2 + margin, np.pi / 2 - margin),)
    return dataclasses.replace(t, domain=dom, periodic=t.periodic[:-1] + (False,),
                               name=f"cone_tube(p={p}, eps={eps})",
                               params={"p": p, "eps": eps})


GENERATORS = {
    "sphere": lambda p: G.sphere(**p),
    "plane": lambda p: G.plane(**p),
    "circle": lambda p: G.circle(**p),
    "circle_profile": lambda p: G.circle_profile(**p),
    "ellipse_profile": lambda p: G.ellipse_profile(**p),
    "torus": lambda p: G.torus(**p),
    "ellipsoid": lambda p: G.ellipsoid(**p),
    "product_of_spheres": lambda p: G.product_of_spheres(**p),
    "clifford_cone": lambda p: G.clifford_cone(**p),
    "revolve": _revolve,
    "tube": _tube,
    "cylinder": _cylinder,
    "cone_tube": lambda p: cone_tube(**p),
}


def generate(name: str, params: Optional[dict] = None):
    """Named patch with analytic jets; construction names take a ``profile``."""
    if name not in GENERATORS:
        raise KeyError(f"unknown patch {name!r}; known: {', '.join(sorted(GENERATORS))}")
    return GENERATORS[name](dict(params or {}))


# ------------------------------------------------------ synthetic pencils

@dataclass
class SyntheticPencil:
    families: list
    W1: np.ndarray
    W2: np.ndarray
    x: np.ndarray = field(repr=False)
    raw: list = field(repr=False, default_factory=list)   # unnormalized K_i(x)
    transform: Optional[object] = None


def _rotation_generator(rng, k):
    """Antisymmetric k x k with well separated rotation frequencies."""
    q, _ = np.linalg.qr(rng.standard_normal((k, k)))
    x = np.zeros((k, k))
    for j in range(k // 2):
        w = 1.0 + 0.7 * j + 0.2 * rng.random()
        x[2 * j, 2 * j + 1], x[2 * j + 1, 2 * j] = w, -w
    return q @ x @ q.T


def synthetic_isoparametric_pencil(seed: int, n: int = 5, samples: int = 64,
                                   conjugate: bool = False) -> SyntheticPencil:
    """Four sphere curves with a planted witness plane span{W1, W2}.

    W1, W2 are orthogonal with norm -2; with w_i = W_i / sqrt 2 and (e, f)
    a moving orthonormal pair in span{W1, W2}^perp,
    K1 = w2 + e, K2 = w1 + f, K3 = K1 + K2, K4 = K2 - K1.
    These satisfy <K1,W1> = <K2,W2> = <K3,W1-W2> = <K4,W1+W2> = 0 and lie
    on one line of the quadric at every x.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    dim = n + 3
    rng = np.random.default_rng(seed)
    frame = random_lie_transform(seed + 10_000, n, 0.5).matrix
    W1, W2 = np.sqrt(2) * frame[:, 0], np.sqrt(2) * frame[:, -1]
    space = frame[:, 1:-1]                     # orthonormal, positive definite part
    x = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    gen = _rotation_generator(rng, dim - 2)
    e0 = np.zeros(dim - 2)
    e0[0] = 1.0
    f0 = np.zeros(dim - 2)
    f0[1] = 1.0
    base = np.linalg.qr(rng.standard_normal((dim - 2, dim - 2)))[0]
    e0, f0 = base @ e0, base @ f0
    rots = np.stack([expm_series(t * gen) for t in x])
    e = (rots @ e0) @ space.T
    f = (rots @ f0) @ space.T
    w1, w2 = W1 / np.sqrt(2), W2 / np.sqrt(2)
    k1 = w2 + e
    k2 = w1 + f
    raw = [k1, k2, k1 + k2, k2 - k1]
    transform = None
    if conjugate:
        transform = random_lie_transform(seed + 20_000, n, 1.0)
        raw = [transform(k) for k in raw]
        W1, W2 = transform(W1), transform(W2)
    fams = [SphereMapSamples(i, k, 1) for i, k in enumerate(raw)]
    return SyntheticPencil(fams, W1, W2, x, raw, transform)


def cone_tube_families(p: int = 1, eps: float = 0.25, resolution: int = 4, seed: Optional[int] = None):
    """Sphere maps of ``cone_tube`` in ascending-curvature order.

    With cos(phi) > 0 the order -1/eps < M(-1/t) < 0 < M(1/t) never changes,
    so sorting labels the families. A seed conjugates by a random Lie transform.
    """
    from .curvature import curvature_pencils

    patch = cone_tube(p, eps)
    u = patch.grid(resolution).reshape(-1, patch.dim)
    pencils = curvature_pencils(patch, u)
    g = {pc.g for pc in pencils}
    if g != {4}:
        raise RuntimeError(f"expected four curvature spheres, got {sorted(g)}")
    order = [np.argsort(pc.kappas) for pc in pencils]
    fams = []
    a = random_lie_transform(seed, patch.lie_dim - 3) if seed is not None else None
    for i in range(4):
        reps = np.array([pc.spheres[o[i]] for pc, o in zip(pencils, order)])
        mult = pencils[0].multiplicities[order[0][i]]
        if a is not None:
            reps = a(reps)
        fams.append(SphereMapSamples(i, reps, mult))
    return patch, fams


REM34_EXAMPLES = [
    {"p": 1, "eps": 0.25, "seed": None}, {"p": 1, "eps": 0.25, "seed": 1},
    {"p": 1, "eps": 0.5, "seed": None}, {"p": 1, "eps": 0.5, "seed": 2},
    {"p": 1, "eps": 0.75, "seed": None}, {"p": 1, "eps": 0.75, "seed": 3},
    {"p": 2, "eps": 0.25, "seed": None}, {"p": 2, "eps": 0.25, "seed": 4},
    {"p": 2, "eps": 0.5, "seed": None}, {"p": 2, "eps": 0.5, "seed": 5},
]


# ------------------------------------------------------------ shipped corpus

@dataclass
class CorpusEntry:
    name: str
    kind: str                       # "patch" | "synthetic"
    generator: str
    params: dict
    expected: dict
    provenance: dict
    resolution: Optional[int] = None


def load_corpus(path=None) -> list:
    if path is None:
        text = resources.files("lsk").joinpath(CORPUS_FILE).read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    doc = json.loads(text)
    entries = []
    for e in doc["entries"]:
        missing = set(e["expected"]) - set(e["provenance"])
        if missing:
            raise ValueError(f"corpus entry {e['name']}: no provenance for {sorted(missing)}")
        entries.append(CorpusEntry(e["name"], e["kind"], e["generator"], e.get("params", {}),
                                   e["expected"], e["provenance"], e.get("resolution")))
    return entries
