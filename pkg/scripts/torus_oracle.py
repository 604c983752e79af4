"""Revolve a circle profile and compare against the analytic torus.

    python3 scripts/torus_oracle.py --R 2 --a 0.5 --res 64
"""
import argparse

import numpy as np

from lsk import generators as G
from lsk.constructions import predicted_spheres_at, surface_of_revolution
from lsk.curvature import curvature_pencils, dupin_residual, principal_curvatures
from lsk.model import projective_distance


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--R", type=float, default=2.0)
    ap.add_argument("--a", type=float, default=0.5)
    ap.add_argument("--res", type=int, default=64)
    args = ap.parse_args()

    rev = surface_of_revolution(G.circle_profile(args.R, args.a))
    u = rev.grid(args.res).reshape(-1, 2)
    k = principal_curvatures(rev, u)
    err = np.abs(k - G.torus_curvatures(args.R, args.a, u[:, 0]))
    pencils = curvature_pencils(rev, u)
    dist = max(min(projective_distance(s, t) for t in pc.spheres)
               for pred, pc in zip(predicted_spheres_at(rev, u), pencils) for s in pred)
    print(f"points               {len(u)}")
    print(f"g values             {sorted({pc.g for pc in pencils})}")
    print(f"max curvature error  {err.max():.3e}")
    print(f"dupin residual       {dupin_residual(rev, u).max_residual:.3e}")
    print(f"predicted vs direct  {dist:.3e}")


if __name__ == "__main__":
    main()
