"""Acceptance criteria, one test each, at the stated tolerances and time budgets.

Every test prints a single ``PASS``/``FAIL`` line; run with ``pytest -v`` or
directly with ``python3 tests/test_acceptance.py``.
"""
import itertools
import time

import numpy as np
import pytest

from lsk import generators as G
from lsk.classify import (
    CYLINDER, REVOLUTION, TUBE, find_immersing_transform, isoparametric_witness,
    patch_families, reducibility_detect, replay_residual,
)
from lsk.constructions import cylinder, predicted_spheres_at, surface_of_revolution, tube
from lsk.corpus import REM34_EXAMPLES, cone_tube_families, synthetic_isoparametric_pencil
from lsk.curvature import (
    canonical_lie_curvature, cross_ratio_orbit, curvature_pencils, dupin_residual,
    lie_curvature, principal_curvatures,
)
from lsk.indefinite import inner, is_lie_transform, numerical_rank, random_lie_transform, restricted_signature
from lsk.lift import euclidean_frame
from lsk.model import euclidean_sphere, in_oriented_contact, projective_distance


def report(number, title, ok, detail, seconds, budget):
    ok = ok and seconds < budget
    line = f"{'PASS' if ok else 'FAIL'} criterion {number} ({title}): {detail}; {seconds:.2f}s of {budget:g}s"
    return ok, line


def emit(capsys, line):
    with capsys.disabled():
        print("\n" + line)


# -------------------------------------------------------------- criteria

def criterion_1():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    per = 10_000 // 4
    for n in (3, 4, 5, 6):
        f = rng.uniform(-3, 3, (per, n))
        xi = rng.standard_normal((per, n))
        xi /= np.linalg.norm(xi, axis=1, keepdims=True)
        k1, k2 = euclidean_frame(f, xi)
        worst = max(worst, np.max(np.abs(inner(k1, k1))), np.max(np.abs(inner(k2, k2))),
                    np.max(np.abs(inner(k1, k2))))
    dt = time.perf_counter() - t0
    return report(1, "quadric/contact identities", worst <= 1e-12,
                  f"max |<k_i,k_j>| = {worst:.2e} over 10^4 pairs (tol 1e-12)", dt, 1.0)


def _signature_case(rng, dim):
    """Random 3-dim subspaces of each signature type (including degenerate)."""
    null = np.zeros(dim)
    null[0] = null[1] = 1.0                 # (-1)(1) + 1 = 0
    spatial = np.eye(dim)[2:4]
    time_ = np.eye(dim)[[0, -1]]
    cases = [spatial[:1], np.vstack([spatial, time_[:1]]), np.vstack([null, np.eye(dim)[2]]),
             rng.standard_normal((3, dim))]
    return cases


def criterion_2():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    drift, flips, rank_bad, sig_bad = 0.0, 0, 0, 0
    for i in range(100):
        n = 3 + i % 4
        dim = n + 3
        a = random_lie_transform(i, n)
        x = rng.standard_normal((40, dim))
        g0 = x @ (x * np.r_[-1, np.ones(dim - 2), -1]).T
        y = a(x)
        g1 = y @ (y * np.r_[-1, np.ones(dim - 2), -1]).T
        drift = max(drift, float(np.max(np.abs(g1 - g0) / (1 + np.abs(g0)))))
        # contact booleans on sphere pairs in and out of contact
        c = rng.standard_normal(n)
        s1 = euclidean_sphere(c, 1.0).rep
        d = rng.standard_normal(n)
        d /= np.linalg.norm(d)
        for s2 in (euclidean_sphere(c + 1.5 * d, 0.5).rep, euclidean_sphere(c + 2.0 * d, 0.5).rep):
            flips += in_oriented_contact(s1, s2) != in_oriented_contact(a(s1), a(s2))
        for sub in _signature_case(rng, dim):
            rank_bad += numerical_rank(sub)[0] != numerical_rank(a(sub))[0]
            sig_bad += restricted_signature(sub) != restricted_signature(a(sub))
    dt = time.perf_counter() - t0
    ok = drift <= 1e-9 and flips == rank_bad == sig_bad == 0
    return report(2, "Lie invariance", ok,
                  f"inner-product drift {drift:.2e} (tol 1e-9), contact flips {flips}, "
                  f"rank changes {rank_bad}, signature changes {sig_bad}", dt, 10.0)


def criterion_3():
    t0 = time.perf_counter()
    rev = surface_of_revolution(G.circle_profile(2.0, 0.5))
    u = rev.grid((64, 64)).reshape(-1, 2)
    pencils = curvature_pencils(rev, u)
    g_ok = all(pc.g == 2 for pc in pencils)
    k = principal_curvatures(rev, u)
    kerr = float(np.max(np.abs(k - G.torus_curvatures(2.0, 0.5, u[:, 0]))))
    dup = dupin_residual(rev, u).max_residual
    perr = 0.0
    for pred, pc in zip(predicted_spheres_at(rev, u), pencils):
        for s in pred:
            perr = max(perr, min(projective_distance(s, t) for t in pc.spheres))
    dt = time.perf_counter() - t0
    ok = g_ok and kerr <= 1e-6 and dup <= 1e-6 and perr <= 1e-6
    return report(3, "torus oracle", ok,
                  f"g=2 everywhere {g_ok}, curvature error {kerr:.2e}, dupin residual {dup:.2e}, "
                  f"predicted-sphere distance {perr:.2e} (tol 1e-6)", dt, 30.0)


def criterion_4():
    t0 = time.perf_counter()
    ks = [1 / np.tan(np.pi / 8 + j * np.pi / 4) for j in range(4)]
    res = canonical_lie_curvature(ks, (1, 1, 1, 1))
    raw = lie_curvature(*ks)
    values = {round(lie_curvature(*(ks[i] for i in p)), 9) for p in itertools.permutations(range(4))}
    orbit = {round(v, 9) for v in cross_ratio_orbit(raw)}
    dt = time.perf_counter() - t0
    # a harmonic quadruple: the six orbit formulas give only three values, 1/2 among them
    ok = abs(res.r + 1) <= 1e-12 and res.canonical and values == orbit and 0.5 in values
    return report(4, "cross-ratio/Munzner", ok,
                  f"canonical r = {res.r:.15f} via {res.ordering}, natural order r = {raw:.12g}, "
                  f"24 orderings give {sorted(values)} = orbit of the natural order", dt, 1.0)


def criterion_5():
    t0 = time.perf_counter()
    cases = [
        ("revolved circle", surface_of_revolution(G.circle_profile(2.0, 0.5)), REVOLUTION),
        ("tubed circle", tube(G.circle(2.0), 0.5), TUBE),
        ("cylindered circle", cylinder(G.circle(1.0), 1), CYLINDER),
        ("revolved ellipse", surface_of_revolution(G.ellipse_profile()), REVOLUTION),
        ("tubed ellipse", tube(G.ellipse_profile(0.6, 0.3, 0.0), 0.1), TUBE),
        ("cylindered ellipse", cylinder(G.ellipse_profile(), 1), CYLINDER),
    ]
    parts, ok = [], True
    for label, patch, tag in cases:
        v = reducibility_detect(patch_families(patch, 24), 1e-8)
        # the construction's own (mu+1)-space when E^perp is larger than it
        sig = v.refined_signature or v.signature
        mu = sum(sig) - 1
        want = {REVOLUTION: (mu + 1, 0, 0), TUBE: (mu, 1, 0), CYLINDER: (mu, 0, 1)}[tag]
        good = v.reducible and sig == want and v.construction == tag
        ok = ok and good
        parts.append(f"{label} {tuple(sig) if sig else None}{'' if good else ' (wrong)'}")
    dt = time.perf_counter() - t0
    return report(5, "reducibility taxonomy", ok, ", ".join(parts), dt, 60.0)


def criterion_6():
    t0 = time.perf_counter()
    worst, misses = 0.0, 0
    for seed in range(50):
        for conj in (False, True):
            sp = synthetic_isoparametric_pencil(seed, 5, conjugate=conj)
            res = isoparametric_witness(sp.families, 1e-8)
            if not res.found:
                misses += 1
                continue
            ks = [sp.families[i].reps for i in res.ordering]
            worst = max(worst, replay_residual(ks, res.witness.W1, res.witness.W2))
    false_pos = 0
    for ex in REM34_EXAMPLES:
        _, fams = cone_tube_families(ex["p"], ex["eps"], 4, ex["seed"])
        false_pos += isoparametric_witness(fams, 1e-8).found
    dt = time.perf_counter() - t0
    ok = misses == 0 and worst <= 1e-8 and false_pos == 0
    return report(6, "witness recovery", ok,
                  f"100 synthetic pencils: {misses} misses, worst replay residual {worst:.2e} (tol 1e-8); "
                  f"{len(REM34_EXAMPLES)} reducible g=4 examples: {false_pos} witnesses", dt, 300.0)


def criterion_7():
    t0 = time.perf_counter()
    fams = patch_families(G.torus(2.0, 0.5), 64)
    res = find_immersing_transform(fams, seed=0)
    reps = np.vstack([f.reps / np.linalg.norm(f.reps, axis=1, keepdims=True) for f in fams])
    score = float(np.min(np.abs(inner(reps, res.v)))) if res.v is not None else 0.0
    lie = res.transform is not None and is_lie_transform(res.transform.matrix, 1e-10)
    dt = time.perf_counter() - t0
    return report(7, "immersing transform", score >= 1e-3 and lie,
                  f"min |<k_i,v>| = {score:.3e} with unit k_i (need >= 1e-3), A is Lie at 1e-10: {lie}",
                  dt, 30.0)


def criterion_8():
    t0 = time.perf_counter()
    ell = G.ellipsoid(1.0, 2.0, 3.0)
    d_ell = dupin_residual(ell, ell.grid(64)).max_residual
    prod = G.product_of_spheres(1, 3, 0.6, 0.8)
    d_prod = dupin_residual(prod, prod.grid(64))
    pcs = curvature_pencils(prod, prod.grid(32).reshape(-1, 2))
    g2 = all(pc.g == 2 and sorted(pc.multiplicities) == [1, 1] for pc in pcs)
    dt = time.perf_counter() - t0
    ok = d_ell > 1e-2 and g2 and d_prod.is_dupin and d_prod.is_proper
    return report(8, "negative control", ok,
                  f"ellipsoid residual {d_ell:.3e} (need > 1e-2); product of spheres g=2 (1,1) {g2}, "
                  f"residual {d_prod.max_residual:.2e}", dt, 30.0)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i + 1}" for i in range(8)])
def test_acceptance(criterion, capsys):
    ok, line = criterion()
    emit(capsys, line)
    assert ok, line


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    for _, line in results:
        print(line)
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
