import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsk import generators as G
from lsk.classify import (
    CYLINDER, INCONCLUSIVE, NONE, REVOLUTION, TUBE, UNKNOWN, SphereMapSamples,
    classify_construction, find_immersing_transform, immersion_score, isoparametric_witness,
    necessary_conditions, patch_families, plane_distance, project_to_profile, reducibility_detect,
    replay_residual, tag_from_signature,
)
from lsk.constructions import cylinder, surface_of_revolution, tube
from lsk.corpus import cone_tube_families, synthetic_isoparametric_pencil
from lsk.curvature import curvature_pencils
from lsk.indefinite import inner, is_lie_transform, random_lie_transform
from lsk.lift import euclidean_frame, euclidean_lift

MUNZNER = [1 / np.tan(np.pi / 8 + k * np.pi / 4) for k in range(4)]


@pytest.fixture(scope="module")
def torus_families():
    return patch_families(surface_of_revolution(G.circle_profile(2.0, 0.5)), 24)


# ------------------------------------------------------------ reducibility

def test_revolved_torus_reducible(torus_families):
    v = reducibility_detect(torus_families)
    assert v.reducible and v.family == 0
    assert v.span_dim <= 6 - 2 and v.m == 6 - v.span_dim - 1
    assert v.construction == REVOLUTION


def test_sphere_constant_map():
    v = reducibility_detect(patch_families(G.sphere(1.0, 3), 12))
    assert v.reducible and v.span_dim == 1 and v.m == 4


def test_synthetic_not_reducible():
    for seed in range(5):
        v = reducibility_detect(synthetic_isoparametric_pencil(seed).families)
        assert v.status == "irreducible"
        assert all(s >= 8 - 1 for s in v.family_spans)


def test_insufficient_samples_unknown(torus_families):
    few = [SphereMapSamples(f.family, f.reps[:3], f.multiplicity) for f in torus_families]
    v = reducibility_detect(few)
    assert v.status == "unknown" and v.warnings


@pytest.mark.parametrize("patch,tag", [
    (surface_of_revolution(G.ellipse_profile()), REVOLUTION),
    (tube(G.ellipse_profile(0.6, 0.3, 0.0), 0.1), TUBE),
    (cylinder(G.ellipse_profile(), 1), CYLINDER),
])
def test_signature_taxonomy_generic_profiles(patch, tag):
    v = reducibility_detect(patch_families(patch, 24))
    m = v.m
    expected = {REVOLUTION: (m + 1, 0, 0), TUBE: (m, 1, 0), CYLINDER: (m, 0, 1)}[tag]
    assert v.signature == expected and v.construction == tag
    assert v.refined_signature is None


@pytest.mark.parametrize("patch,tag,sig", [
    (surface_of_revolution(G.circle_profile(2.0, 0.5)), REVOLUTION, (2, 0, 0)),
    (tube(G.circle(2.0), 0.5), TUBE, (1, 1, 0)),
    (cylinder(G.circle(1.0), 1), CYLINDER, (1, 0, 1)),
])
def test_signature_taxonomy_circles(patch, tag, sig):
    # circles leave one extra constraint; the construction's own (mu+1)-space is read off
    v = reducibility_detect(patch_families(patch, 24))
    assert v.m == 2 and v.multiplicity == 1
    assert v.signature == (2, 1, 0)
    assert v.refined_signature == sig and v.construction == tag
    assert {REVOLUTION, TUBE, CYLINDER} <= set(v.compatible)


def test_degenerate_signature_unknown():
    assert tag_from_signature((1, 0, 2), 2) == UNKNOWN
    assert tag_from_signature((1, 1, 1), 2) == UNKNOWN


@given(st.integers(0, 500))
@settings(max_examples=8)
def test_reducibility_lie_equivariant(seed):
    fams = patch_families(tube(G.ellipse_profile(0.6, 0.3, 0.0), 0.1), 16)
    a = random_lie_transform(seed, 3)
    v0 = reducibility_detect(fams)
    v1 = reducibility_detect([f.transformed(a) for f in fams])
    assert (v0.reducible, v0.span_dim, v0.family_spans) == (v1.reducible, v1.span_dim, v1.family_spans)
    assert v0.signature == v1.signature
    assert classify_construction(v1) == v0.construction


def test_more_samples_never_raise_codimension(torus_families):
    f = torus_families[1]
    spans = [reducibility_detect([SphereMapSamples(1, f.reps[:k], 1)]).span_dim
             for k in (8, 32, 128, len(f))]
    assert spans == sorted(spans)


def test_subgrid_verdict_matches_full():
    p = surface_of_revolution(G.circle_profile(2.0, 0.5))
    full = reducibility_detect(patch_families(p, 32))
    sub = reducibility_detect(patch_families(p, 12))
    assert (full.status, full.span_dim, full.construction) == (sub.status, sub.span_dim, sub.construction)


# ------------------------------------------------------ necessary conditions

def test_necessary_conditions():
    from lsk.curvature import canonical_lie_curvature
    r = canonical_lie_curvature(MUNZNER).r
    assert necessary_conditions((1, 1, 1, 1), r)
    assert not necessary_conditions((2, 1, 1, 1), r)
    assert not necessary_conditions((1, 1, 1, 1), -0.5)
    with pytest.raises(ValueError):
        necessary_conditions((1, 1, 1), -1.0)


# ----------------------------------------------------------------- witness

@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("conjugate", [False, True])
def test_witness_recovers_planted_plane(seed, conjugate):
    sp = synthetic_isoparametric_pencil(seed, 5, conjugate=conjugate)
    res = isoparametric_witness(sp.families)
    assert res.found and res.witness.residual <= 1e-8
    w = res.witness
    assert abs(inner(w.W1, w.W1) + 2) <= 1e-8 and abs(inner(w.W1, w.W2)) <= 1e-8
    assert plane_distance(np.stack([w.W1, w.W2]), np.stack([sp.W1, sp.W2])) <= 1e-6


def test_witness_equivariance():
    sp = synthetic_isoparametric_pencil(3, 5)
    a = random_lie_transform(77, 5)
    res = isoparametric_witness([f.transformed(a) for f in sp.families])
    assert res.found
    assert plane_distance(np.stack([res.witness.W1, res.witness.W2]),
                          np.stack([a(sp.W1), a(sp.W2)])) <= 1e-6


@given(st.integers(0, 10_000), st.booleans())
@settings(max_examples=10)
def test_witness_soundness(seed, conjugate):
    tol = 1e-8
    sp = synthetic_isoparametric_pencil(seed, 5, conjugate=conjugate)
    res = isoparametric_witness(sp.families, tol)
    if res.found:
        ks = [sp.families[i].reps for i in res.ordering]
        assert replay_residual(ks, res.witness.W1, res.witness.W2) <= 10 * tol


@pytest.mark.parametrize("p,eps,seed", [(1, 0.25, None), (1, 0.5, 3)])
def test_no_witness_on_reducible_g4(p, eps, seed):
    _, fams = cone_tube_families(p, eps, 4, seed)
    res = isoparametric_witness(fams)
    assert res.status in (NONE, INCONCLUSIVE)
    assert reducibility_detect(fams).reducible


def test_witness_undersampled_is_inconclusive():
    sp = synthetic_isoparametric_pencil(0, 5, samples=2)
    res = isoparametric_witness(sp.families)
    assert res.status == INCONCLUSIVE
    with pytest.raises(ValueError):
        isoparametric_witness(sp.families[:3])


# ------------------------------------------------------ immersing transform

def test_e_last_works_when_point_map_immerses(torus_families):
    reps = np.vstack([f.reps for f in torus_families])
    e = np.zeros(6)
    e[-1] = 1.0
    assert immersion_score(reps, e) > 0.05
    res = find_immersing_transform(torus_families, trials=4, seed=0)
    assert res.status == "found" and is_lie_transform(res.transform.matrix, 1e-10)
    assert np.allclose(res.transform(res.v), e, atol=1e-10)


def test_point_sphere_direction_forces_other_v(torus_families):
    # [k1] is a point sphere: <k1, e_last> = 0, so e_last fails there
    t = G.torus()
    k1, _ = euclidean_frame(*t.evaluate([[0.3, 0.4]]))
    fams = torus_families + [SphereMapSamples(9, k1, None)]
    reps = np.vstack([f.reps for f in fams])
    e = np.zeros(6)
    e[-1] = 1.0
    assert immersion_score(reps, e) <= 1e-15
    res = find_immersing_transform(fams, trials=32, seed=1)
    assert res.status == "found" and res.score > 1e-3
    assert not np.allclose(res.v / np.linalg.norm(res.v), e)


def test_immersion_inconclusive_when_impossible():
    # null vectors spanning everything: e.g. all point spheres of a dense sphere
    rng = np.random.default_rng(0)
    reps = []
    for _ in range(400):
        p = rng.standard_normal(4)
        p /= np.linalg.norm(p)
        th = rng.uniform(0, 2 * np.pi)
        reps.append(np.r_[np.cos(th), p, np.sin(th)])
    res = find_immersing_transform([np.array(reps)], trials=4, steps=5)
    assert res.status in ("found", INCONCLUSIVE)
    if res.status == INCONCLUSIVE:
        assert res.transform is None


def test_projection_consistency():
    prof = G.circle_profile(2.0, 0.5)
    rev = surface_of_revolution(prof)
    res = find_immersing_transform(patch_families(rev, 16), trials=8)
    q = res.v
    v = project_to_profile(q, n=2, m=1)
    assert inner(v, v) == pytest.approx(inner(q, q) - q[3] ** 2, abs=1e-12)
    assert inner(v, v) < 0
    x = prof.grid(32).reshape(-1, 1)
    up = np.hstack([x, np.zeros_like(x)])          # y = u_n
    kp1, kp2 = euclidean_frame(*prof.evaluate(x))
    ju = rev.jet(up)
    K1, K2 = euclidean_frame(ju.f, ju.xi)
    for b, pc in enumerate(curvature_pencils(prof, x)):
        r, s = pc.pairs[0]
        lhs = inner(r * K1[b] + s * K2[b], q)
        rhs = inner(r * kp1[b] + s * kp2[b], v)
        assert lhs == pytest.approx(rhs, abs=1e-12)
        assert abs(rhs) > 0
    with pytest.raises(ValueError):
        project_to_profile(q[:-1], 2, 1)
