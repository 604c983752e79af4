import dataclasses

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from lsk import generators as G
from lsk.constructions import surface_of_revolution
from lsk.indefinite import inner, random_lie_transform
from lsk.lift import (
    EUCLIDEAN, HypersurfacePatch, PatchInvariantError, contact_residual, euclidean_frame,
    euclidean_lift, spherical_lift, stereographic_patch,
)
from lsk.model import projectively_equal

coords = st.floats(-20, 20, allow_nan=False)


def test_spherical_lift_identities():
    p = G.product_of_spheres(1, 3, 0.6, 0.8)
    s = spherical_lift(p, p.grid(12))
    for a, b in [(s.Y0, s.Y0), (s.Y1, s.Y1), (s.Y0, s.Y1)]:
        assert np.max(np.abs(inner(a, b))) <= 1e-14
    assert np.all(s.Y0[:, 0] == 1) and np.all(s.Y1[:, -1] == 1)


def test_euclidean_lift_origin():
    k1, k2 = euclidean_frame(np.zeros((1, 3)), np.array([[0.0, 0.0, 1.0]]))
    assert np.array_equal(k1[0], [0.5, 0.5, 0, 0, 0, 0])
    assert np.array_equal(k2[0], [0, 0, 0, 0, 1, 1])


@given(arrays(float, (2, 5), elements=coords))
def test_euclidean_frame_on_quadric(v):
    f, xi = v[0], v[1]
    if np.linalg.norm(xi) < 1e-3:
        xi = np.eye(5)[0]
    xi = xi / np.linalg.norm(xi)
    k1, k2 = euclidean_frame(f[None], xi[None])
    scale = (1 + f @ f) ** 2
    assert abs(inner(k1, k1)[0]) <= 1e-13 * scale
    assert abs(inner(k2, k2)[0]) <= 1e-13 * scale
    assert abs(inner(k1, k2)[0]) <= 1e-13 * scale


def test_contact_residual_torus_and_sphere():
    t = G.torus(2.0, 0.5)
    assert np.max(contact_residual(euclidean_lift(t, t.grid(24)))) <= 1e-8
    s = G.sphere(1.0, 3)
    assert np.max(contact_residual(euclidean_lift(s, s.grid(24)))) <= 1e-12


def tilted_torus(alpha=0.2):
    """Torus with its normal tilted toward the t-direction: not a Legendre lift."""
    t = G.torus(2.0, 0.5)

    def frame(u):
        j = t.jet(u)
        tang = j.df[:, 0] / np.linalg.norm(j.df[:, 0], axis=1)[:, None]
        return j.f, np.cos(alpha) * j.xi + np.sin(alpha) * tang

    return HypersurfacePatch(EUCLIDEAN, 3, t.domain, frame, None, t.periodic, "tilted_torus")


def test_contact_residual_detects_non_normal_field():
    p = tilted_torus()
    assert np.min(contact_residual(euclidean_lift(p, p.grid(16)))) > 1e-3
    with pytest.raises(PatchInvariantError):
        p.check(p.grid(4).reshape(-1, 2))


def test_models_agree_on_contact_residual():
    t = G.torus(2.0, 0.5)
    u = t.grid(16).reshape(-1, 2)
    eu = contact_residual(euclidean_lift(t, u))
    sp = stereographic_patch(t)
    sp.check(u)
    sph = contact_residual(spherical_lift(sp, u))
    assert np.max(np.abs(eu - sph)) <= 1e-8


def test_models_share_the_line():
    """The identity on Lie coordinates carries the Euclidean line to the spherical one."""
    t = G.torus(2.0, 0.5)
    u = t.grid(6).reshape(-1, 2)
    eu = euclidean_lift(t, u)
    sph = spherical_lift(stereographic_patch(t), u)
    for b in range(len(u)):
        assert projectively_equal(eu.Y0[b], sph.Y0[b], 1e-10)
        span = np.stack([eu.Y0[b], eu.Y1[b]])
        resid = np.linalg.lstsq(span.T, sph.Y1[b], rcond=None)[1]
        assert resid.size == 0 or resid[0] <= 1e-20


def test_fd_jets_match_analytic():
    t = G.torus(2.0, 0.5)
    u = t.grid(10).reshape(-1, 2)
    a, f = t.jet(u, analytic=True), t.jet(u, analytic=False)
    assert np.max(np.abs(a.df - f.df)) <= 1e-8
    assert np.max(np.abs(a.dxi - f.dxi)) <= 1e-8


def test_boundary_stencils_on_open_axes():
    e = G.ellipsoid(1.0, 2.0, 3.0)
    u = e.grid(9).reshape(-1, 2)
    a, f = e.jet(u, analytic=True), e.jet(u, analytic=False)
    assert np.max(np.abs(a.dxi - f.dxi)) <= 1e-7


def test_grid_shapes():
    t = G.torus()
    g = t.grid((8, 5))
    assert g.shape == (8, 5, 2)
    assert g[-1, 0, 0] < 2 * np.pi          # periodic axis omits the endpoint
    e = G.ellipsoid()
    ge = e.grid(7)
    assert ge[-1, 0, 0] == pytest.approx(e.domain[0][1])


def test_pencil_commutes_with_transform(rng):
    t = G.torus()
    s = euclidean_lift(t, t.grid(4).reshape(-1, 2))
    a = random_lie_transform(3, 3)
    st_ = s.transformed(a)
    r, q = rng.standard_normal(2)
    lhs = a(r * s.Y0 + q * s.Y1)
    rhs = r * st_.Y0 + q * st_.Y1
    assert np.array_equal(lhs, rhs) or np.max(np.abs(lhs - rhs)) <= 1e-14


def test_revolution_slice_recovers_profile():
    prof = G.circle_profile(2.0, 0.5)
    rev = surface_of_revolution(prof)
    t = np.linspace(0, 2 * np.pi, 11)
    u = np.stack([t, np.zeros_like(t)], axis=1)    # y = u_n
    f, xi = rev.evaluate(u)
    pf, pxi = prof.evaluate(t[:, None])
    assert np.allclose(f[:, :2], pf, atol=1e-15) and np.allclose(f[:, 2], 0)
    assert np.allclose(xi[:, :2], pxi, atol=1e-15)
    fa, xa = rev.evaluate(rev.grid(9))
    assert np.allclose(np.linalg.norm(xa, axis=-1), 1, atol=1e-14)


def test_patch_rejects_bad_domain():
    t = G.torus()
    with pytest.raises(ValueError):
        dataclasses.replace(t, domain=((0.0, 1.0),))
    with pytest.raises(ValueError):
        spherical_lift(t, t.grid(3))
